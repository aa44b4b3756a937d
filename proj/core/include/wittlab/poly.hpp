#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "wittlab/errors.hpp"

namespace wittlab {

/// Exponent vector of a monomial; entries may go negative transiently
/// inside quotient-ring normalization (Laurent form).
using Exps = std::vector<int32_t>;

inline long total_deg(const Exps& e) {
    long d = 0;
    for (auto x : e) d += x;
    return d;
}

/// Graded lexicographic order, strict less-than.
inline bool mono_less(const Exps& a, const Exps& b) {
    long da = total_deg(a), db = total_deg(b);
    if (da != db) return da < db;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return a[i] < b[i];
    return false;
}

inline bool mono_divides(const Exps& a, const Exps& b) {
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

inline Exps mono_mul(const Exps& a, const Exps& b) {
    Exps r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Exps mono_quot(const Exps& b, const Exps& a) {
    Exps r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = b[i] - a[i];
    return r;
}

template <class C>
struct PTerm {
    Exps m;
    C c;
};

/// Sparse multivariate polynomial over coefficient type C.
/// Terms are kept strictly descending in graded lex with no zero coefficients.
template <class C>
struct Poly {
    int nvars = 0;
    std::vector<PTerm<C>> terms;

    bool is_zero() const { return terms.empty(); }
    long degree() const { return terms.empty() ? -1 : total_deg(terms.front().m); }
    const PTerm<C>& lead() const { return terms.front(); }
};

struct mono_greater {
    bool operator()(const Exps& a, const Exps& b) const { return mono_less(b, a); }
};

/// Rebuild canonical form from an arbitrary term list (sorts, merges, drops zeros).
template <class C, class Ops>
Poly<C> poly_collect(const Ops& ops, int nvars, std::vector<PTerm<C>>&& ts) {
    std::map<Exps, C, mono_greater> acc;
    for (auto& t : ts) {
        auto it = acc.find(t.m);
        if (it == acc.end())
            acc.emplace(std::move(t.m), std::move(t.c));
        else
            it->second = ops.add(it->second, t.c);
    }
    Poly<C> r;
    r.nvars = nvars;
    for (auto& [m, c] : acc)
        if (!ops.is_zero(c)) r.terms.push_back({m, c});
    return r;
}

template <class C, class Ops>
Poly<C> poly_add(const Ops& ops, const Poly<C>& a, const Poly<C>& b) {
    Poly<C> r;
    r.nvars = a.nvars;
    r.terms.reserve(a.terms.size() + b.terms.size());
    size_t i = 0, j = 0;
    while (i < a.terms.size() && j < b.terms.size()) {
        if (a.terms[i].m == b.terms[j].m) {
            C c = ops.add(a.terms[i].c, b.terms[j].c);
            if (!ops.is_zero(c)) r.terms.push_back({a.terms[i].m, std::move(c)});
            ++i, ++j;
        } else if (mono_less(b.terms[j].m, a.terms[i].m)) {
            r.terms.push_back(a.terms[i++]);
        } else {
            r.terms.push_back(b.terms[j++]);
        }
    }
    while (i < a.terms.size()) r.terms.push_back(a.terms[i++]);
    while (j < b.terms.size()) r.terms.push_back(b.terms[j++]);
    return r;
}

template <class C, class Ops>
Poly<C> poly_neg(const Ops& ops, const Poly<C>& a) {
    Poly<C> r = a;
    for (auto& t : r.terms) t.c = ops.neg(t.c);
    return r;
}

template <class C, class Ops>
Poly<C> poly_sub(const Ops& ops, const Poly<C>& a, const Poly<C>& b) {
    return poly_add(ops, a, poly_neg(ops, b));
}

/// Product; terms above `degree_cap` (total degree) are dropped when
/// degree_cap >= 0.  `term_budget` > 0 bounds the accumulator size.
template <class C, class Ops>
Poly<C> poly_mul(const Ops& ops, const Poly<C>& a, const Poly<C>& b, long degree_cap = -1,
                 size_t term_budget = 0) {
    std::map<Exps, C, mono_greater> acc;
    for (const auto& ta : a.terms) {
        long da = total_deg(ta.m);
        for (const auto& tb : b.terms) {
            if (degree_cap >= 0 && da + total_deg(tb.m) > degree_cap) continue;
            Exps m = mono_mul(ta.m, tb.m);
            C c = ops.mul(ta.c, tb.c);
            if (ops.is_zero(c)) continue;
            auto it = acc.find(m);
            if (it == acc.end()) {
                acc.emplace(std::move(m), std::move(c));
                if (term_budget && acc.size() > term_budget)
                    throw resource_budget_exceeded("poly_mul: term budget exceeded");
            } else {
                it->second = ops.add(it->second, c);
            }
        }
    }
    Poly<C> r;
    r.nvars = a.nvars;
    for (auto& [m, c] : acc)
        if (!ops.is_zero(c)) r.terms.push_back({m, c});
    return r;
}

template <class C, class Ops>
Poly<C> poly_pow(const Ops& ops, const Poly<C>& a, unsigned long k, long degree_cap = -1,
                 size_t term_budget = 0) {
    Poly<C> r;
    r.nvars = a.nvars;
    r.terms.push_back({Exps(a.nvars, 0), ops.one()});
    Poly<C> base = a;
    while (k > 0) {
        if (k & 1) r = poly_mul(ops, r, base, degree_cap, term_budget);
        k >>= 1;
        if (k) base = poly_mul(ops, base, base, degree_cap, term_budget);
    }
    return r;
}

template <class C, class Ops>
Poly<C> poly_scale(const Ops& ops, const Poly<C>& a, const C& s) {
    if (ops.is_zero(s)) return Poly<C>{a.nvars, {}};
    Poly<C> r;
    r.nvars = a.nvars;
    for (const auto& t : a.terms) {
        C c = ops.mul(t.c, s);
        if (!ops.is_zero(c)) r.terms.push_back({t.m, std::move(c)});
    }
    return r;
}

/// Exact multivariate division over a coefficient field/domain where
/// ops.div is total on nonzero divisors.  Throws not_divisible.
template <class C, class Ops>
Poly<C> poly_exact_div(const Ops& ops, const Poly<C>& a, const Poly<C>& b) {
    if (b.is_zero()) throw not_divisible("poly_exact_div: division by zero");
    Poly<C> q;
    q.nvars = a.nvars;
    Poly<C> r = a;
    std::vector<PTerm<C>> qterms;
    while (!r.is_zero()) {
        const auto& lr = r.lead();
        const auto& lb = b.lead();
        if (!mono_divides(lb.m, lr.m))
            throw not_divisible("poly_exact_div: leading monomial does not divide");
        PTerm<C> t{mono_quot(lr.m, lb.m), ops.div(lr.c, lb.c)};
        Poly<C> tb;
        tb.nvars = a.nvars;
        tb.terms.push_back(t);
        r = poly_sub(ops, r, poly_mul(ops, tb, b));
        qterms.push_back(std::move(t));
    }
    return poly_collect(ops, a.nvars, std::move(qterms));
}

/// Generic evaluation: coefficients through fc, variable i through fv,
/// target arithmetic through topo.  Variable powers are memoized.
template <class C, class T, class TOps, class FC, class FV>
T poly_eval(const TOps& topo, const Poly<C>& a, const FC& fc, const FV& fv, long degree_cap = -1) {
    T acc = topo.zero();
    std::vector<std::vector<T>> powcache(a.nvars);
    auto varpow = [&](int i, int32_t e) -> const T& {
        auto& cache = powcache[i];
        if (cache.empty()) {
            cache.push_back(topo.one());
            cache.push_back(fv(i));
        }
        while ((int32_t)cache.size() <= e) cache.push_back(topo.mul(cache.back(), cache[1], degree_cap));
        return cache[e];
    };
    for (const auto& t : a.terms) {
        T v = fc(t.c);
        for (int i = 0; i < a.nvars; ++i)
            if (t.m[i] != 0) v = topo.mul(v, varpow(i, t.m[i]), degree_cap);
        acc = topo.add(acc, v);
    }
    return acc;
}

} // namespace wittlab
