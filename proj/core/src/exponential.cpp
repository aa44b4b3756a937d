#include "wittlab/exponential.hpp"

#include <mutex>

namespace wittlab {

namespace {

// master variables: index 0 = U, index 1 = L
constexpr int kU = 0, kL = 1;

QPoly m_term(const mpq_class& c, long eu, long el) {
    QPoly q;
    q.nvars = 2;
    if (sgn(c) != 0) q.terms.push_back({Exps{(int32_t)eu, (int32_t)el}, c});
    return q;
}

// log of the deformed exponential assembled term by term:
//   (U/L) log(1+LT) + sum_{k>=1} (1/p^k)((U/L)^{p^k}-(U/L)^{p^{k-1}}) log(1+L^{p^k}T^{p^k})
// every T-coefficient is a polynomial in U, L.
std::vector<QPoly> ep_log_coeffs(long p, long D) {
    QOps ops;
    std::vector<QPoly> a(D + 1, QPoly{2, {}});
    for (long j = 1; j <= D; ++j) {
        mpq_class c(((j % 2) ? 1 : -1), j);
        a[j] = poly_add(ops, a[j], m_term(c, 1, j - 1));
    }
    mpz_class pk = p;
    for (long k = 1; pk <= D; ++k, pk *= p) {
        long pkl = mpz_get_si(pk.get_mpz_t());
        long pk1 = pkl / p;
        for (long j = 1; j * pkl <= D; ++j) {
            mpq_class c(((j % 2) ? 1 : -1), j * pkl);
            // U^{p^k} L^{(j-1)p^k} - U^{p^{k-1}} L^{j p^k - p^{k-1}}
            QPoly t = poly_sub(ops, m_term(c, pkl, (j - 1) * pkl),
                               m_term(c, pk1, j * pkl - pk1));
            a[j * pkl] = poly_add(ops, a[j * pkl], t);
        }
    }
    return a;
}

struct MasterKey {
    long p, D;
    bool operator<(const MasterKey& o) const { return p < o.p || (p == o.p && D < o.D); }
};

std::mutex g_master_mu;
std::map<MasterKey, std::vector<QPoly>> g_master;

} // namespace

std::vector<QPoly> ep_master(long p, long D) {
    {
        std::lock_guard<std::mutex> lock(g_master_mu);
        auto it = g_master.lower_bound(MasterKey{p, D});
        if (it != g_master.end() && it->first.p == p && it->first.D >= D) {
            std::vector<QPoly> out(it->second.begin(), it->second.begin() + D + 1);
            return out;
        }
    }
    QOps ops;
    auto a = ep_log_coeffs(p, D);
    // exp by the derivative recurrence: n E_n = sum_{k=1..n} k a_k E_{n-k}
    std::vector<QPoly> E(D + 1, QPoly{2, {}});
    E[0] = m_term(1, 0, 0);
    for (long n = 1; n <= D; ++n) {
        QPoly acc{2, {}};
        for (long k = 1; k <= n; ++k) {
            if (a[k].is_zero()) continue;
            acc = poly_add(ops, acc, poly_scale(ops, poly_mul(ops, a[k], E[n - k]), mpq_class(k)));
        }
        E[n] = poly_scale(ops, acc, mpq_class(mpz_class(1), mpz_class(n)));
    }
    for (long n = 0; n <= D; ++n)
        for (const auto& t : E[n].terms)
            if (mpz_divisible_ui_p(mpq_class(t.c).get_den().get_mpz_t(), p))
                throw not_integral("deformed exponential coefficient not p-integral");
    {
        std::lock_guard<std::mutex> lock(g_master_mu);
        g_master[MasterKey{p, D}] = E;
    }
    return E;
}

namespace {

// specialize a master coefficient at concrete (u, lambda)
RingElem specialize(const QPoly& c, const RingPtr& R, const RingElem& u, const RingElem& la) {
    struct TOps {
        RingPtr R;
        RingElem zero() const { return r_zero(R); }
        RingElem one() const { return r_one(R); }
        RingElem add(const RingElem& a, const RingElem& b) const { return r_add(a, b); }
        RingElem mul(const RingElem& a, const RingElem& b, long) const { return r_mul(a, b); }
    } topo{R};
    auto fc = [&](const mpq_class& q) { return r_from_rational(R, q); };
    auto fv = [&](int i) { return i == kU ? u : la; };
    return poly_eval<mpq_class, RingElem>(topo, c, fc, fv);
}

} // namespace

TruncSeries ep_single(long p, const RingElem& u, const RingElem& lambda, long D) {
    auto master = ep_master(p, D);
    const RingPtr& R = u.ring();
    std::vector<RingElem> cs;
    for (long n = 0; n <= D; ++n) cs.push_back(specialize(master[n], R, u, lambda));
    return series_from(R, D, std::move(cs));
}

TruncSeries ep_vector(long p, const std::vector<RingElem>& a, const RingElem& lambda, long D) {
    const RingPtr& R = lambda.ring();
    TruncSeries acc = series_one(R, D);
    mpz_class pl = 1;
    for (size_t ell = 0; ell < a.size() && pl <= D; ++ell, pl *= p) {
        long step = mpz_get_si(pl.get_mpz_t());
        if (r_is_zero(a[ell])) continue;
        long inner = D / step;
        TruncSeries f = ep_single(p, a[ell], r_pow(lambda, (unsigned long)step), inner);
        // T -> T^(p^ell)
        TruncSeries g = series_one(R, D);
        for (long n = 0; n <= inner; ++n) g.c[n * step] = f.c[n];
        acc = series_mul(acc, g);
    }
    return acc;
}

TruncSeries ep_vector(long p, const WittVector& a, const RingElem& lambda, long D) {
    return ep_vector(p, a.coords(), lambda, D);
}

TruncSeries ep_truncated(long p, const std::vector<RingElem>& a, const RingElem& lambda,
                         const TruncationLevel& level) {
    return ep_vector(p, a, lambda, level.degree_bound(p));
}

DegreeSupportReport degree_support_check(long p, const TruncationLevel& level, long margin) {
    long B = level.degree_bound(p);
    std::vector<std::string> vars{"l"};
    std::vector<long> bounds{level.L};
    for (long i = 0; i < level.M; ++i) {
        vars.push_back("u" + std::to_string(i));
        bounds.push_back(level.N);
    }
    RingPtr R = make_bounded_ring(vars, bounds, p);
    std::vector<RingElem> a;
    for (long i = 0; i < level.M; ++i) a.push_back(r_var(R, (int)(1 + i)));
    // factors at ell >= M have U_ell = 0 in the quotient, so the cutoff at M
    // in ep_vector's argument list is exactly the stated ideal
    TruncSeries s = ep_vector(p, a, r_var(R, "l"), B + margin);
    DegreeSupportReport rep{true, false, B};
    for (long n = B + 1; n <= B + margin; ++n)
        if (!r_is_zero(s.c[n])) rep.ok = false;
    if (B <= s.cap && !r_is_zero(s.c[B])) rep.sharp = true;
    return rep;
}

std::map<long, WittVector> harmonic_decompose(long p, const TruncSeries& G,
                                              const RingElem& lambda) {
    const RingPtr& R = G.ring;
    if (!r_eq(G.c[0], r_one(R)))
        throw config_error("harmonic_decompose: constant term must be 1");
    long D = G.cap;
    TruncSeries rest = G;
    std::vector<RingElem> b(D + 1, r_zero(R));
    for (long n = 1; n <= D; ++n) {
        b[n] = rest.c[n];
        if (r_is_zero(b[n])) continue;
        long v = 0, q = n;
        while (q % p == 0) {
            q /= p;
            ++v;
        }
        mpz_class pv;
        mpz_ui_pow_ui(pv.get_mpz_t(), p, v);
        TruncSeries h = ep_single(p, b[n], r_pow(lambda, mpz_get_ui(pv.get_mpz_t())), D / n);
        TruncSeries g = series_one(R, D);
        for (long j = 0; j <= D / n; ++j) g.c[j * n] = h.c[j];
        rest = series_mul(rest, series_inv(g));
    }
    std::map<long, WittVector> parts;
    for (long k = 1; k <= D; ++k) {
        if (k % p == 0) continue;
        std::vector<RingElem> coords;
        for (long m = k; m <= D; m *= p) coords.push_back(b[m]);
        WittVector w = WittVector::exact(R, std::move(coords));
        if (w.len() > 0) parts.emplace(k, std::move(w));
    }
    return parts;
}

TruncSeries harmonic_reconstruct(long p, const std::map<long, WittVector>& parts,
                                 const RingElem& lambda, long D, const RingPtr& R) {
    TruncSeries acc = series_one(R, D);
    for (const auto& [k, a] : parts) {
        TruncSeries f = ep_vector(p, a, lambda, D / k);
        TruncSeries g = series_one(R, D);
        for (long j = 0; j <= D / k; ++j) g.c[j * k] = f.c[j];
        acc = series_mul(acc, g);
    }
    return acc;
}

} // namespace wittlab
