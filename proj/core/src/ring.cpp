#include "wittlab/ring.hpp"

#include <sstream>

namespace wittlab {

std::optional<long> vp(const mpz_class& n, long p) {
    if (n == 0) return std::nullopt;
    mpz_class m = n;
    long v = 0;
    while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
        m /= p;
        ++v;
    }
    return v;
}

std::optional<long> vp(const mpq_class& q, long p) {
    if (sgn(q) == 0) return std::nullopt;
    auto vn = vp(mpz_class(q.get_num()), p);
    auto vd = vp(mpz_class(q.get_den()), p);
    return *vn - *vd;
}

int PolyRingDesc::var_index(const std::string& name) const {
    for (size_t i = 0; i < vars.size(); ++i)
        if (vars[i] == name) return (int)i;
    return -1;
}

bool ring_equal(const RingDesc& a, const RingDesc& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == RingDesc::Kind::eisenstein) return a.eis == b.eis;
    const auto& x = a.poly;
    const auto& y = b.poly;
    return x.vars == y.vars && x.domain == y.domain && x.p == y.p && x.rel == y.rel &&
           x.bounds == y.bounds && x.o_c == y.o_c && x.o_lambda == y.o_lambda &&
           x.b_nu == y.b_nu && x.b_lambda == y.b_lambda && x.b_m == y.b_m;
}

// ---- ring constructors ----

static RingPtr make_poly_desc(PolyRingDesc p) {
    auto d = std::make_shared<RingDesc>();
    d->kind = RingDesc::Kind::poly;
    d->poly = std::move(p);
    return d;
}

RingPtr make_integer_ring() {
    PolyRingDesc d;
    d.domain = CoeffDomain::integer;
    return make_poly_desc(std::move(d));
}

RingPtr make_p_local_ring(long p) {
    PolyRingDesc d;
    d.domain = CoeffDomain::p_local;
    d.p = p;
    return make_poly_desc(std::move(d));
}

RingPtr make_rational_ring() {
    PolyRingDesc d;
    d.domain = CoeffDomain::rational;
    return make_poly_desc(std::move(d));
}

RingPtr make_poly_ring(std::vector<std::string> vars, CoeffDomain domain, long p) {
    PolyRingDesc d;
    d.vars = std::move(vars);
    d.domain = domain;
    d.p = p;
    return make_poly_desc(std::move(d));
}

RingPtr make_bounded_ring(std::vector<std::string> vars, std::vector<long> bounds, long p) {
    PolyRingDesc d;
    d.vars = std::move(vars);
    d.domain = CoeffDomain::p_local;
    d.p = p;
    d.rel = PolyRingDesc::Rel::power_bounds;
    d.bounds = std::move(bounds);
    d.bounds.resize(d.vars.size(), 0);
    return make_poly_desc(std::move(d));
}

RingPtr make_o_ring(long p, std::vector<std::string> extra_vars, CoeffDomain domain) {
    PolyRingDesc d;
    d.vars = {"C", "L"};
    for (auto& v : extra_vars) d.vars.push_back(v);
    d.domain = domain;
    d.p = p;
    d.rel = PolyRingDesc::Rel::o_shape;
    d.o_c = 0;
    d.o_lambda = 1;
    return make_poly_desc(std::move(d));
}

RingPtr make_b_ring(long p, int n, long nu) {
    PolyRingDesc d;
    d.domain = CoeffDomain::p_local;
    d.p = p;
    d.rel = PolyRingDesc::Rel::b_shape;
    d.b_nu = nu;
    for (int i = 1; i <= n; ++i) d.vars.push_back("L" + std::to_string(i));
    for (int i = 2; i <= n; ++i) d.vars.push_back("M" + std::to_string(i));
    for (int i = 0; i < n; ++i) d.b_lambda.push_back(i);
    for (int i = 0; i < n - 1; ++i) d.b_m.push_back(n + i);
    return make_poly_desc(std::move(d));
}

RingPtr make_eisenstein_ring(long p, long e, long K) {
    auto d = std::make_shared<RingDesc>();
    d->kind = RingDesc::Kind::eisenstein;
    d->eis = EisRing{p, e, K};
    return d;
}

// ---- normalization ----

namespace {

// ceil(-w / (p-1)) clamped at 0: number of C factors a Laurent term L^w needs.
long o_c_power(long w, long p) {
    if (w >= 0) return 0;
    return (-w + p - 2) / (p - 1);
}

// Laurent transform for o_shape: C^a L^b -> p^a L^(b-(p-1)a).
QPoly o_to_laurent(const PolyRingDesc& R, QPoly q) {
    QOps ops;
    std::vector<PTerm<mpq_class>> ts;
    for (auto& t : q.terms) {
        long a = t.m[R.o_c];
        if (a != 0) {
            mpz_class pa;
            mpz_ui_pow_ui(pa.get_mpz_t(), R.p, a);
            t.c *= mpq_class(pa);
            t.m[R.o_lambda] -= (int32_t)((R.p - 1) * a);
            t.m[R.o_c] = 0;
        }
        ts.push_back(std::move(t));
    }
    return poly_collect(ops, q.nvars, std::move(ts));
}

// Laurent transform for b_shape: M_{j+1}^a -> L_j^(nu a) L_{j+1}^(-a).
QPoly b_to_laurent(const PolyRingDesc& R, QPoly q) {
    QOps ops;
    std::vector<PTerm<mpq_class>> ts;
    for (auto& t : q.terms) {
        for (size_t j = 0; j < R.b_m.size(); ++j) {
            long a = t.m[R.b_m[j]];
            if (a != 0) {
                t.m[R.b_lambda[j]] += (int32_t)(R.b_nu * a);
                t.m[R.b_lambda[j + 1]] -= (int32_t)a;
                t.m[R.b_m[j]] = 0;
            }
        }
        ts.push_back(std::move(t));
    }
    return poly_collect(ops, q.nvars, std::move(ts));
}

} // namespace

QPoly ring_normalize(const RingDesc& D, QPoly q) {
    if (D.kind != RingDesc::Kind::poly) return q;
    const auto& R = D.poly;
    switch (R.rel) {
    case PolyRingDesc::Rel::free_ring:
        return q;
    case PolyRingDesc::Rel::power_bounds: {
        QPoly r;
        r.nvars = q.nvars;
        for (auto& t : q.terms) {
            bool dead = false;
            for (size_t i = 0; i < R.bounds.size(); ++i)
                if (R.bounds[i] > 0 && t.m[i] >= R.bounds[i]) {
                    dead = true;
                    break;
                }
            if (!dead) r.terms.push_back(std::move(t));
        }
        return r;
    }
    case PolyRingDesc::Rel::o_shape:
        return o_to_laurent(R, std::move(q));
    case PolyRingDesc::Rel::b_shape:
        return b_to_laurent(R, std::move(q));
    }
    return q;
}

void ring_check_domain(const RingDesc& D, const QPoly& q) {
    if (D.kind != RingDesc::Kind::poly) return;
    const auto& R = D.poly;
    for (const auto& t : q.terms) {
        // quotient-ring membership of the Laurent form
        if (R.rel == PolyRingDesc::Rel::o_shape) {
            for (size_t i = 0; i < t.m.size(); ++i)
                if ((int)i != R.o_lambda && t.m[i] < 0)
                    throw not_divisible("negative exponent outside quotient ring");
            long w = t.m[R.o_lambda];
            long a0 = o_c_power(w, R.p);
            if (R.domain != CoeffDomain::rational) {
                auto v = vp(t.c, R.p);
                if (!v || *v < a0)
                    throw not_divisible("element left the quotient ring (p-power deficit)");
            }
            mpq_class c = t.c;
            if (a0 > 0) {
                mpz_class pa;
                mpz_ui_pow_ui(pa.get_mpz_t(), R.p, a0);
                c /= mpq_class(pa);
            }
            if (R.domain == CoeffDomain::integer && c.get_den() != 1)
                throw not_divisible("element left the integer-coefficient ring");
            continue;
        }
        if (R.rel == PolyRingDesc::Rel::b_shape) {
            for (size_t i = 0; i < t.m.size(); ++i) {
                bool is_lambda_tail = false;
                for (size_t j = 1; j < R.b_lambda.size(); ++j)
                    if ((int)i == R.b_lambda[j]) is_lambda_tail = true;
                if (!is_lambda_tail && t.m[i] < 0)
                    throw not_divisible("negative exponent outside quotient ring");
            }
            long cap = t.m[R.b_lambda[0]];
            for (size_t j = 0; j + 1 < R.b_lambda.size(); ++j) {
                if (cap < 0) throw not_divisible("element left the quotient ring (chain deficit)");
                long a = cap / R.b_nu;
                cap = t.m[R.b_lambda[j + 1]] + a;
            }
            if (cap < 0) throw not_divisible("element left the quotient ring (chain deficit)");
        } else {
            for (size_t i = 0; i < t.m.size(); ++i)
                if (t.m[i] < 0) throw not_divisible("negative exponent outside quotient ring");
        }
        if (R.domain == CoeffDomain::integer && t.c.get_den() != 1)
            throw not_divisible("non-integer coefficient in integer ring");
        if (R.domain == CoeffDomain::p_local) {
            auto v = vp(t.c, R.p);
            if (v && *v < 0) throw not_divisible("coefficient not p-local");
        }
    }
}

// ---- element constructors ----

RingElem r_zero(const RingPtr& R) {
    if (R->kind == RingDesc::Kind::eisenstein) return RingElem(R, EisElem::zero(R->eis));
    QPoly q;
    q.nvars = (int)R->poly.vars.size();
    return RingElem(R, std::move(q));
}

RingElem r_one(const RingPtr& R) { return r_from_int(R, 1); }

RingElem r_from_int(const RingPtr& R, const mpz_class& n) {
    if (R->kind == RingDesc::Kind::eisenstein) return RingElem(R, EisElem::from_int(R->eis, n));
    QPoly q;
    q.nvars = (int)R->poly.vars.size();
    if (n != 0) q.terms.push_back({Exps(q.nvars, 0), mpq_class(n)});
    return RingElem(R, std::move(q));
}

RingElem r_from_rational(const RingPtr& R, const mpq_class& c0) {
    mpq_class c = c0;
    c.canonicalize();
    if (R->kind == RingDesc::Kind::eisenstein)
        return RingElem(R, EisElem::from_rational(R->eis, c.get_num(), c.get_den()));
    QPoly q;
    q.nvars = (int)R->poly.vars.size();
    if (sgn(c) != 0) q.terms.push_back({Exps(q.nvars, 0), c});
    ring_check_domain(*R, q);
    return RingElem(R, std::move(q));
}

RingElem r_var(const RingPtr& R, int index) {
    if (R->kind != RingDesc::Kind::poly || index < 0 || index >= (int)R->poly.vars.size())
        throw config_error("r_var: no such variable");
    QPoly q;
    q.nvars = (int)R->poly.vars.size();
    Exps m(q.nvars, 0);
    m[index] = 1;
    q.terms.push_back({std::move(m), mpq_class(1)});
    return RingElem(R, ring_normalize(*R, std::move(q)));
}

RingElem r_var(const RingPtr& R, const std::string& name) {
    if (R->kind == RingDesc::Kind::eisenstein && name == "pi")
        return RingElem(R, EisElem::pi(R->eis));
    if (R->kind != RingDesc::Kind::poly) throw config_error("r_var: no such variable: " + name);
    return r_var(R, R->poly.var_index(name));
}

// ---- arithmetic ----

namespace {

void check_same_ring(const RingElem& a, const RingElem& b) {
    if (a.ring() == b.ring()) return;
    if (a.ring() && b.ring() && ring_equal(*a.ring(), *b.ring())) return;
    throw config_error("ring mismatch between operands");
}

thread_local size_t g_term_budget = 0;

} // namespace

TermBudgetGuard::TermBudgetGuard(size_t budget) : prev_(g_term_budget) { g_term_budget = budget; }
TermBudgetGuard::~TermBudgetGuard() { g_term_budget = prev_; }
size_t current_term_budget() { return g_term_budget; }

RingElem r_add(const RingElem& a, const RingElem& b) {
    check_same_ring(a, b);
    if (a.ring()->kind == RingDesc::Kind::eisenstein)
        return RingElem(a.ring(), eis_add(a.ring()->eis, a.eis(), b.eis()));
    QOps ops;
    return RingElem(a.ring(), poly_add(ops, a.poly(), b.poly()));
}

RingElem r_sub(const RingElem& a, const RingElem& b) {
    check_same_ring(a, b);
    if (a.ring()->kind == RingDesc::Kind::eisenstein)
        return RingElem(a.ring(), eis_sub(a.ring()->eis, a.eis(), b.eis()));
    QOps ops;
    return RingElem(a.ring(), poly_sub(ops, a.poly(), b.poly()));
}

RingElem r_neg(const RingElem& a) {
    if (a.ring()->kind == RingDesc::Kind::eisenstein)
        return RingElem(a.ring(), eis_neg(a.ring()->eis, a.eis()));
    QOps ops;
    return RingElem(a.ring(), poly_neg(ops, a.poly()));
}

RingElem r_mul(const RingElem& a, const RingElem& b) {
    check_same_ring(a, b);
    if (a.ring()->kind == RingDesc::Kind::eisenstein)
        return RingElem(a.ring(), eis_mul(a.ring()->eis, a.eis(), b.eis()));
    QOps ops;
    return RingElem(a.ring(),
                    ring_normalize(*a.ring(), poly_mul(ops, a.poly(), b.poly(), -1, g_term_budget)));
}

RingElem r_pow(const RingElem& a, unsigned long k) {
    if (a.ring()->kind == RingDesc::Kind::eisenstein)
        return RingElem(a.ring(), eis_pow(a.ring()->eis, a.eis(), k));
    RingElem r = r_one(a.ring());
    RingElem base = a;
    while (k > 0) {
        if (k & 1) r = r_mul(r, base);
        k >>= 1;
        if (k) base = r_mul(base, base);
    }
    return r;
}

bool r_is_zero(const RingElem& a) {
    if (a.ring()->kind == RingDesc::Kind::eisenstein) return a.eis().is_zero_at_prec();
    return a.poly().is_zero();
}

bool r_eq(const RingElem& a, const RingElem& b) {
    check_same_ring(a, b);
    if (a.ring()->kind == RingDesc::Kind::eisenstein)
        return eis_eq(a.ring()->eis, a.eis(), b.eis());
    const auto& x = a.poly();
    const auto& y = b.poly();
    if (x.terms.size() != y.terms.size()) return false;
    for (size_t i = 0; i < x.terms.size(); ++i)
        if (x.terms[i].m != y.terms[i].m || x.terms[i].c != y.terms[i].c) return false;
    return true;
}

// Exact division of polynomials allowing Laurent variables: factor the
// variable-wise minimal exponents out of both operands, divide in the
// nonnegative ring, shift back.  In a domain the lowest graded parts
// multiply, so the quotient's shifted exponents are certified nonnegative.
static QPoly laurent_div(const QPoly& a, const QPoly& b, const std::vector<int>& laurent_vars) {
    QOps ops;
    if (a.is_zero()) return QPoly{a.nvars, {}};
    auto min_exps = [&](const QPoly& q) {
        std::vector<int32_t> mins(q.nvars, 0);
        for (int v : laurent_vars) {
            int32_t m = q.terms.front().m[v];
            for (const auto& t : q.terms) m = std::min(m, t.m[v]);
            mins[v] = m;
        }
        return mins;
    };
    auto shift = [&](QPoly q, const std::vector<int32_t>& by, int sign) {
        for (auto& t : q.terms)
            for (int v : laurent_vars) t.m[v] += sign * by[v];
        QOps o2;
        return poly_collect(o2, q.nvars, std::vector<PTerm<mpq_class>>(q.terms.begin(), q.terms.end()));
    };
    auto sa = min_exps(a);
    auto sb = min_exps(b);
    QPoly a0 = shift(a, sa, -1);
    QPoly b0 = shift(b, sb, -1);
    QPoly q = poly_exact_div(ops, a0, b0);
    for (auto& t : q.terms)
        for (int v : laurent_vars) t.m[v] += sa[v] - sb[v];
    return q;
}

RingElem r_exact_div(const RingElem& a, const RingElem& b) {
    check_same_ring(a, b);
    const auto& D = *a.ring();
    if (D.kind == RingDesc::Kind::eisenstein)
        return RingElem(a.ring(), eis_div(D.eis, a.eis(), b.eis()));

    const auto& R = D.poly;
    QOps ops;
    if (b.poly().is_zero()) throw not_divisible("division by zero");
    if (a.poly().is_zero()) return r_zero(a.ring());

    QPoly q;
    switch (R.rel) {
    case PolyRingDesc::Rel::free_ring:
        q = poly_exact_div(ops, a.poly(), b.poly());
        break;
    case PolyRingDesc::Rel::power_bounds: {
        if (b.poly().terms.size() == 1) {
            // canonical section: strip the monomial factor from the normal form
            const auto& d = b.poly().terms.front();
            q.nvars = a.poly().nvars;
            for (const auto& t : a.poly().terms) {
                if (!mono_divides(d.m, t.m))
                    throw not_divisible("monomial does not divide normal form");
                q.terms.push_back({mono_quot(t.m, d.m), t.c / d.c});
            }
        } else {
            q = poly_exact_div(ops, a.poly(), b.poly());
            // verify modulo the bounds: the free quotient must reproduce a
            QPoly back = ring_normalize(D, poly_mul(ops, q, b.poly()));
            QPoly diff = poly_sub(ops, back, a.poly());
            if (!diff.is_zero()) throw not_divisible("division not exact in truncated ring");
        }
        break;
    }
    case PolyRingDesc::Rel::o_shape:
        q = laurent_div(a.poly(), b.poly(), {R.o_lambda});
        break;
    case PolyRingDesc::Rel::b_shape: {
        std::vector<int> lv(R.b_lambda.begin() + 1, R.b_lambda.end());
        q = laurent_div(a.poly(), b.poly(), lv);
        break;
    }
    }
    ring_check_domain(D, q);
    return RingElem(a.ring(), std::move(q));
}

bool r_divisible(const RingElem& a, const RingElem& b) {
    try {
        (void)r_exact_div(a, b);
        return true;
    } catch (const not_divisible&) {
        return false;
    }
}

RingElem r_invert_unit(const RingElem& a) {
    const auto& D = *a.ring();
    if (D.kind == RingDesc::Kind::eisenstein)
        return RingElem(a.ring(), eis_inv_unit(D.eis, a.eis()));
    const auto& q = a.poly();
    if (q.is_zero()) throw not_divisible("invert_unit: zero");
    // constant part must be an invertible scalar
    const auto& back = q.terms.back();
    bool has_const = total_deg(back.m) == 0 && back.m == Exps(q.nvars, 0);
    if (!has_const) throw not_divisible("invert_unit: no unit constant term");
    mpq_class c0inv = 1 / back.c;
    {
        QPoly probe;
        probe.nvars = q.nvars;
        probe.terms.push_back({Exps(q.nvars, 0), c0inv});
        ring_check_domain(D, probe);
    }
    if (q.terms.size() == 1) return RingElem(a.ring(), [&] {
        QPoly r;
        r.nvars = q.nvars;
        r.terms.push_back({Exps(q.nvars, 0), c0inv});
        return r;
    }());
    // 1/(c0 + m) = c0inv * sum (-m/c0)^k; requires m nilpotent in the ring
    QOps ops;
    QPoly m = q;
    m.terms.pop_back(); // strip constant (last in graded-lex descending order)
    m = poly_scale(ops, m, mpq_class(-c0inv));
    QPoly acc;
    acc.nvars = q.nvars;
    acc.terms.push_back({Exps(q.nvars, 0), mpq_class(1)});
    QPoly power = acc;
    long cap = 2;
    if (D.poly.rel == PolyRingDesc::Rel::power_bounds) {
        cap = 1;
        for (size_t i = 0; i < D.poly.bounds.size(); ++i)
            cap += D.poly.bounds[i] > 0 ? D.poly.bounds[i] - 1 : 0;
    }
    for (long k = 1; k <= cap; ++k) {
        power = ring_normalize(D, poly_mul(ops, power, m));
        if (power.is_zero()) {
            return RingElem(a.ring(), poly_scale(ops, acc, c0inv));
        }
        acc = poly_add(ops, acc, power);
    }
    throw not_divisible("invert_unit: non-nilpotent tail");
}

std::optional<long> r_valuation(const RingElem& a) {
    if (a.ring()->kind != RingDesc::Kind::eisenstein)
        throw config_error("valuation: only defined on the Eisenstein backend");
    return a.eis().valuation();
}

bool r_nilpotent_mod(const RingElem& a, const RingElem& m, long k_cap) {
    RingElem p = a;
    for (long k = 1; k <= k_cap; ++k) {
        if (r_divisible(p, m)) return true;
        p = r_mul(p, a);
    }
    return false;
}

RingElem r_substitute(const RingElem& a, const RingPtr& target,
                      const std::vector<std::pair<std::string, RingElem>>& assignment) {
    if (a.ring()->kind == RingDesc::Kind::eisenstein) {
        if (target == a.ring() || ring_equal(*target, *a.ring())) return a;
        throw config_error("substitute: cannot map an Eisenstein element");
    }
    const auto& R = a.ring()->poly;
    auto value_of = [&](int i) -> RingElem {
        for (const auto& [name, v] : assignment)
            if (name == R.vars[i]) return v;
        if (target->kind == RingDesc::Kind::poly && target->poly.var_index(R.vars[i]) >= 0)
            return r_var(target, R.vars[i]);
        throw config_error("substitute: unmapped variable " + R.vars[i]);
    };
    RingElem acc = r_zero(target);
    for (const auto& t : a.poly().terms) {
        RingElem v = r_from_rational(target, t.c);
        RingElem den = r_one(target);
        for (int i = 0; i < a.poly().nvars; ++i) {
            if (t.m[i] == 0) continue;
            RingElem base = value_of(i);
            if (t.m[i] > 0)
                v = r_mul(v, r_pow(base, t.m[i]));
            else
                den = r_mul(den, r_pow(base, -t.m[i]));
        }
        // negative Laurent exponents: divide exactly (falling back to a unit
        // inverse when the divisor is invertible but does not divide)
        if (!r_eq(den, r_one(target))) {
            try {
                v = r_exact_div(v, den);
            } catch (const not_divisible&) {
                v = r_mul(v, r_invert_unit(den));
            }
        }
        acc = r_add(acc, v);
    }
    return acc;
}

// ---- printing ----

static void render_term(std::ostream& os, const PolyRingDesc& R, const PTerm<mpq_class>& t0,
                        bool first) {
    // re-render the Laurent form through the ring generators for display
    PTerm<mpq_class> t = t0;
    if (R.rel == PolyRingDesc::Rel::o_shape) {
        long w = t.m[R.o_lambda];
        long a0 = o_c_power(w, R.p);
        if (a0 > 0) {
            mpz_class pa;
            mpz_ui_pow_ui(pa.get_mpz_t(), R.p, a0);
            t.c /= mpq_class(pa);
            t.m[R.o_c] = (int32_t)a0;
            t.m[R.o_lambda] = (int32_t)(w + (R.p - 1) * a0);
        }
    } else if (R.rel == PolyRingDesc::Rel::b_shape) {
        long cap = t.m[R.b_lambda[0]];
        for (size_t j = 0; j + 1 < R.b_lambda.size(); ++j) {
            long aj = cap >= 0 ? cap / R.b_nu : 0;
            t.m[R.b_lambda[j]] = (int32_t)(cap - R.b_nu * aj);
            t.m[R.b_m[j]] = (int32_t)aj;
            cap = t.m[R.b_lambda[j + 1]] + aj;
        }
        t.m[R.b_lambda.back()] = (int32_t)cap;
    }
    mpq_class c = t.c;
    bool neg = sgn(c) < 0;
    if (neg) c = -c;
    os << (first ? (neg ? "-" : "") : (neg ? " - " : " + "));
    bool unit_coeff = (c == 1);
    bool any_var = false;
    for (auto e : t.m)
        if (e != 0) any_var = true;
    if (!unit_coeff || !any_var) os << c.get_str();
    bool printed = !unit_coeff || !any_var;
    for (size_t i = 0; i < t.m.size(); ++i) {
        if (t.m[i] == 0) continue;
        if (printed) os << "*";
        os << R.vars[i];
        if (t.m[i] != 1) os << "^" << t.m[i];
        printed = true;
    }
}

std::string r_str(const RingElem& a) {
    if (a.ring()->kind == RingDesc::Kind::eisenstein) return a.eis().str(a.ring()->eis);
    const auto& q = a.poly();
    if (q.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : q.terms) {
        render_term(os, a.ring()->poly, t, first);
        first = false;
    }
    return os.str();
}

} // namespace wittlab
