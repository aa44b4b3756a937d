#include "wittlab/witt.hpp"

#include <sstream>

namespace wittlab {

// Kernel variable layouts, at cached depth D:
//   add/mul: X_i -> i, Y_i -> (D+1)+i            (nvars 2(D+1))
//   tmap:    A_i -> i, X_i -> (D+1)+i            (nvars 2(D+1))
//   frob:    X_i -> i                            (nvars D+2)
//   neg:     X_i -> i                            (nvars D+1)

namespace {

QPoly q_var(int nvars, int i) {
    QPoly q;
    q.nvars = nvars;
    Exps m(nvars, 0);
    m[i] = 1;
    q.terms.push_back({std::move(m), mpq_class(1)});
    return q;
}

QPoly q_const(int nvars, const mpq_class& c) {
    QPoly q;
    q.nvars = nvars;
    if (sgn(c) != 0) q.terms.push_back({Exps(nvars, 0), c});
    return q;
}

mpz_class pow_l(long p, long k) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), p, k);
    return r;
}

// Phi_r over variables var(base+0..base+r).
QPoly ghost_qpoly(long p, int nvars, int base, long r) {
    QOps ops;
    QPoly acc = q_const(nvars, 0);
    for (long i = 0; i <= r; ++i) {
        QPoly t = poly_pow(ops, q_var(nvars, base + (int)i), (unsigned long)mpz_get_ui(pow_l(p, r - i).get_mpz_t()));
        t = poly_scale(ops, t, mpq_class(pow_l(p, i)));
        acc = poly_add(ops, acc, t);
    }
    return acc;
}

// w_r = (g_r - sum_{i<r} p^i w_i^(p^(r-i))) / p^r with integrality assertion.
std::vector<QPoly> lift_family(long p, const std::vector<QPoly>& targets) {
    QOps ops;
    std::vector<QPoly> w;
    for (long r = 0; r < (long)targets.size(); ++r) {
        QPoly acc = targets[r];
        for (long i = 0; i < r; ++i) {
            QPoly t = poly_pow(ops, w[i], (unsigned long)mpz_get_ui(pow_l(p, r - i).get_mpz_t()));
            t = poly_scale(ops, t, mpq_class(pow_l(p, i)));
            acc = poly_sub(ops, acc, t);
        }
        acc = poly_scale(ops, acc, mpq_class(mpz_class(1), pow_l(p, r)));
        for (const auto& t : acc.terms)
            if (t.c.get_den() != 1)
                throw not_integral("kernel lift produced a non-integer coefficient at r=" +
                                   std::to_string(r));
        w.push_back(std::move(acc));
    }
    return w;
}

} // namespace

void WittContext::ensure(Kernel k, long r) const {
    auto it = cache_.find(k);
    if (it != cache_.end() && (long)it->second.size() > r) return;
    // recompute the family at exactly the requested depth; the families grow
    // steeply with r, so no speculative over-computation
    long D = std::max<long>(r, 3);
    if (it != cache_.end()) D = std::max(D, cache_depth_[k]);
    std::vector<QPoly> targets;
    int nv;
    switch (k) {
    case Kernel::add:
    case Kernel::mul: {
        nv = (int)(2 * (D + 1));
        for (long i = 0; i <= D; ++i) {
            QPoly gx = ghost_qpoly(p_, nv, 0, i);
            QPoly gy = ghost_qpoly(p_, nv, (int)(D + 1), i);
            QOps ops;
            targets.push_back(k == Kernel::add ? poly_add(ops, gx, gy) : poly_mul(ops, gx, gy));
        }
        break;
    }
    case Kernel::tmap: {
        nv = (int)(2 * (D + 1));
        for (long i = 0; i <= D; ++i) {
            QOps ops;
            QPoly acc = q_const(nv, 0);
            for (long j = 0; j <= i; ++j) {
                // p^j A_j^(p^(i-j)) Phi_{i-j}(X)
                QPoly t = poly_pow(ops, q_var(nv, (int)j),
                                   (unsigned long)mpz_get_ui(pow_l(p_, i - j).get_mpz_t()));
                t = poly_mul(ops, t, ghost_qpoly(p_, nv, (int)(D + 1), i - j));
                t = poly_scale(ops, t, mpq_class(pow_l(p_, j)));
                acc = poly_add(ops, acc, t);
            }
            targets.push_back(std::move(acc));
        }
        break;
    }
    case Kernel::frob: {
        nv = (int)(D + 2);
        for (long i = 0; i <= D; ++i) targets.push_back(ghost_qpoly(p_, nv, 0, i + 1));
        break;
    }
    case Kernel::neg: {
        nv = (int)(D + 1);
        QOps ops;
        for (long i = 0; i <= D; ++i)
            targets.push_back(poly_neg(ops, ghost_qpoly(p_, nv, 0, i)));
        break;
    }
    }
    cache_[k] = lift_family(p_, targets);
    cache_depth_[k] = D;
}

QPoly WittContext::kernel(Kernel k, long r) const {
    std::lock_guard<std::mutex> lock(mu_);
    ensure(k, r);
    return cache_[k][r];
}

long WittContext::kernel_depth(Kernel k) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_depth_.find(k);
    return it == cache_depth_.end() ? -1 : it->second;
}

// ---- WittVector ----

static void trim_coords(std::vector<RingElem>& cs) {
    while (!cs.empty() && r_is_zero(cs.back())) cs.pop_back();
}

WittVector WittVector::exact(RingPtr R, std::vector<RingElem> coords) {
    WittVector w;
    trim_coords(coords);
    w.ring_ = std::move(R);
    w.coords_ = std::move(coords);
    w.known_ = kExact;
    return w;
}

WittVector WittVector::with_horizon(RingPtr R, std::vector<RingElem> coords, long known) {
    WittVector w;
    if ((long)coords.size() > known) coords.resize(known);
    trim_coords(coords);
    w.ring_ = std::move(R);
    w.coords_ = std::move(coords);
    w.known_ = known;
    return w;
}

WittVector WittVector::teichmuller(const RingElem& a) {
    return exact(a.ring(), {a});
}

RingElem WittVector::coord(long i) const {
    if (i < (long)coords_.size()) return coords_[i];
    if (i < known_ || known_ == kExact) return r_zero(ring_);
    throw config_error("witt coordinate " + std::to_string(i) + " beyond certified horizon " +
                       std::to_string(known_));
}

bool WittVector::is_zero_window() const {
    for (const auto& c : coords_)
        if (!r_is_zero(c)) return false;
    return true;
}

std::string WittVector::str() const {
    std::ostringstream os;
    os << "(";
    for (long i = 0; i < len(); ++i) {
        if (i) os << ", ";
        os << r_str(coords_[i]);
    }
    if (known_ == kExact)
        os << (len() ? ", 0..." : "0...");
    else
        os << (len() ? ", " : "") << "?@" << known_;
    os << ")";
    return os.str();
}

// ---- evaluation of cached kernels at ring elements ----

namespace {

struct RingTargetOps {
    RingPtr R;
    RingElem zero() const { return r_zero(R); }
    RingElem one() const { return r_one(R); }
    RingElem add(const RingElem& a, const RingElem& b) const { return r_add(a, b); }
    RingElem mul(const RingElem& a, const RingElem& b, long) const { return r_mul(a, b); }
};

// Evaluate a kernel polynomial with slot X bound through fx and slot Y
// through fy (kernel layout at cached depth D).
RingElem eval_kernel(const WittContext& ctx, WittContext::Kernel k, long r,
                     const RingPtr& R, const std::vector<RingElem>& xs,
                     const std::vector<RingElem>& ys) {
    QPoly ker = ctx.kernel(k, r);
    // infer the cached depth from the polynomial itself (layout is fixed)
    long D;
    switch (k) {
    case WittContext::Kernel::frob: D = ker.nvars - 2; break;
    case WittContext::Kernel::neg: D = ker.nvars - 1; break;
    default: D = ker.nvars / 2 - 1; break;
    }
    RingTargetOps topo{R};
    auto fc = [&](const mpq_class& c) { return r_from_rational(R, c); };
    auto fv = [&](int i) -> RingElem {
        long slot, idx;
        if (k == WittContext::Kernel::frob || k == WittContext::Kernel::neg) {
            slot = 0;
            idx = i;
        } else {
            slot = i <= D ? 0 : 1;
            idx = i <= D ? i : i - (D + 1);
        }
        const auto& v = slot == 0 ? xs : ys;
        return idx < (long)v.size() ? v[idx] : r_zero(R);
    };
    return poly_eval<mpq_class, RingElem>(topo, ker, fc, fv);
}

std::vector<RingElem> coords_upto(const WittVector& w, long n) {
    std::vector<RingElem> cs;
    for (long i = 0; i < n; ++i) cs.push_back(w.coord(i));
    return cs;
}

long computable(const WittVector& a) { return a.known_upto(); }

} // namespace

// ---- ghost ----

RingElem ghost_component(const WittContext& ctx, const WittVector& w, long r) {
    RingElem acc = r_zero(w.ring());
    for (long i = 0; i <= r; ++i) {
        RingElem t = r_pow(w.coord(i), (unsigned long)mpz_get_ui(pow_l(ctx.p(), r - i).get_mpz_t()));
        acc = r_add(acc, r_mul(r_from_int(w.ring(), pow_l(ctx.p(), i)), t));
    }
    return acc;
}

GhostVector ghost(const WittContext& ctx, const WittVector& w, long depth) {
    GhostVector g;
    g.ring = w.ring();
    for (long r = 0; r <= depth; ++r) g.values.push_back(ghost_component(ctx, w, r));
    return g;
}

WittVector ghost_lift(const WittContext& ctx, const GhostVector& g, bool check_congruence) {
    const RingPtr& R = g.ring;
    if (R->kind != RingDesc::Kind::poly)
        throw config_error("ghost_lift: needs a torsion-free polynomial backend");
    long p = ctx.p();
    if (check_congruence) {
        for (size_t r = 0; r + 1 < g.values.size(); ++r) {
            // sigma raises every variable to the p-th power
            QPoly s = g.values[r].poly();
            for (auto& t : s.terms)
                for (auto& e : t.m) e = (int32_t)(e * p);
            s = ring_normalize(*R, std::move(s));
            RingElem diff = r_sub(g.values[r + 1], RingElem(R, std::move(s)));
            if (!r_divisible(diff, r_from_int(R, pow_l(p, (long)r + 1))))
                throw not_integral("ghost_lift: congruence g_{r+1} = sigma(g_r) mod p^{r+1} fails");
        }
    }
    std::vector<RingElem> w;
    for (long r = 0; r < (long)g.values.size(); ++r) {
        RingElem acc = g.values[r];
        for (long i = 0; i < r; ++i) {
            RingElem t = r_pow(w[i], (unsigned long)mpz_get_ui(pow_l(p, r - i).get_mpz_t()));
            acc = r_sub(acc, r_mul(r_from_int(R, pow_l(p, i)), t));
        }
        try {
            w.push_back(r_exact_div(acc, r_from_int(R, pow_l(p, r))));
        } catch (const not_divisible&) {
            throw not_integral("ghost_lift: division by p^" + std::to_string(r) + " failed");
        }
    }
    return WittVector::with_horizon(R, std::move(w), (long)g.values.size());
}

std::vector<mpz_class> integer_witt_coords(long p, const mpz_class& n, long depth) {
    std::vector<mpz_class> a;
    for (long r = 0; r <= depth; ++r) {
        mpz_class acc = n;
        for (long i = 0; i < r; ++i) {
            mpz_class t;
            mpz_pow_ui(t.get_mpz_t(), a[i].get_mpz_t(), mpz_get_ui(pow_l(p, r - i).get_mpz_t()));
            acc -= pow_l(p, i) * t;
        }
        mpz_class pr = pow_l(p, r);
        if (!mpz_divisible_p(acc.get_mpz_t(), pr.get_mpz_t()))
            throw not_integral("integer_witt_coords: ghost solve not integral");
        a.push_back(acc / pr);
    }
    return a;
}

// ---- arithmetic ----

static long policy_len(const WittContext& ctx, const WittVector& a, const WittVector& b,
                       long want_len) {
    if (want_len >= 0) return want_len;
    long l = a.len() + b.len() + ctx.config().slack;
    return std::min(l, ctx.config().max_len);
}

WittVector witt_add(const WittContext& ctx, const WittVector& a, const WittVector& b,
                    long want_len) {
    if (a.is_exact() && a.len() == 0) return b;
    if (b.is_exact() && b.len() == 0) return a;
    long n = std::min({policy_len(ctx, a, b, want_len), computable(a), computable(b)});
    auto xs = coords_upto(a, n);
    auto ys = coords_upto(b, n);
    std::vector<RingElem> cs;
    for (long r = 0; r < n; ++r)
        cs.push_back(eval_kernel(ctx, WittContext::Kernel::add, r, a.ring(), xs, ys));
    return WittVector::with_horizon(a.ring(), std::move(cs), n);
}

WittVector witt_neg(const WittContext& ctx, const WittVector& a, long want_len) {
    if (a.is_exact() && a.len() == 0) return a;
    long n = std::min({want_len >= 0 ? want_len : a.len() + ctx.config().slack, computable(a)});
    auto xs = coords_upto(a, n);
    std::vector<RingElem> cs;
    for (long r = 0; r < n; ++r)
        cs.push_back(eval_kernel(ctx, WittContext::Kernel::neg, r, a.ring(), xs, {}));
    return WittVector::with_horizon(a.ring(), std::move(cs), n);
}

WittVector witt_sub(const WittContext& ctx, const WittVector& a, const WittVector& b,
                    long want_len) {
    long n = std::min({policy_len(ctx, a, b, want_len), computable(a), computable(b)});
    return witt_add(ctx, a, witt_neg(ctx, b, n), n);
}

WittVector witt_mul(const WittContext& ctx, const WittVector& a, const WittVector& b,
                    long want_len) {
    if ((a.is_exact() && a.len() == 0) || (b.is_exact() && b.len() == 0))
        return WittVector::zero(a.ring());
    // Teichmuller factor: use the point formula, preserving exactness
    if (a.is_exact() && a.len() == 1) return teich_scale(ctx, a.coord(0), b);
    if (b.is_exact() && b.len() == 1) return teich_scale(ctx, b.coord(0), a);
    long n = std::min({policy_len(ctx, a, b, want_len), computable(a), computable(b)});
    auto xs = coords_upto(a, n);
    auto ys = coords_upto(b, n);
    std::vector<RingElem> cs;
    for (long r = 0; r < n; ++r)
        cs.push_back(eval_kernel(ctx, WittContext::Kernel::mul, r, a.ring(), xs, ys));
    return WittVector::with_horizon(a.ring(), std::move(cs), n);
}

WittVector witt_int(const WittContext& ctx, const RingPtr& R, const mpz_class& n, long len) {
    auto zs = integer_witt_coords(ctx.p(), n, len - 1);
    std::vector<RingElem> cs;
    for (const auto& z : zs) cs.push_back(r_from_int(R, z));
    return WittVector::with_horizon(R, std::move(cs), len);
}

WittVector frobenius(const WittContext& ctx, const WittVector& a, long want_len) {
    long comp = a.is_exact() ? WittVector::kExact : a.known_upto() - 1;
    long n = std::min({want_len >= 0 ? want_len : a.len() + ctx.config().slack, comp});
    auto xs = coords_upto(a, n + 1);
    std::vector<RingElem> cs;
    for (long r = 0; r < n; ++r)
        cs.push_back(eval_kernel(ctx, WittContext::Kernel::frob, r, a.ring(), xs, {}));
    return WittVector::with_horizon(a.ring(), std::move(cs), n);
}

WittVector verschiebung(const WittVector& a) {
    std::vector<RingElem> cs;
    cs.push_back(r_zero(a.ring()));
    for (long i = 0; i < a.len(); ++i) cs.push_back(a.coord(i));
    if (a.is_exact()) return WittVector::exact(a.ring(), std::move(cs));
    return WittVector::with_horizon(a.ring(), std::move(cs), a.known_upto() + 1);
}

WittVector teich_scale(const WittContext& ctx, const RingElem& a, const WittVector& x) {
    if (r_is_zero(a)) return WittVector::zero(x.ring());
    std::vector<RingElem> cs;
    RingElem apow = a; // a^(p^i)
    for (long i = 0; i < x.len(); ++i) {
        cs.push_back(r_mul(apow, x.coords()[i]));
        if (i + 1 < x.len()) apow = r_pow(apow, (unsigned long)ctx.p());
    }
    if (x.is_exact()) return WittVector::exact(x.ring(), std::move(cs));
    return WittVector::with_horizon(x.ring(), std::move(cs), x.known_upto());
}

WittVector t_map(const WittContext& ctx, const WittVector& a, const WittVector& x,
                 long want_len) {
    WittVector acc = WittVector::zero(x.ring());
    long n = want_len >= 0
                 ? want_len
                 : std::min(a.len() + x.len() + ctx.config().slack, ctx.config().max_len);
    for (long r = 0; r < a.len(); ++r) {
        WittVector piece = teich_scale(ctx, a.coords()[r], x);
        for (long k = 0; k < r; ++k) piece = verschiebung(piece);
        acc = witt_add(ctx, acc, piece, n);
    }
    return acc;
}

WittVector f_lambda(const WittContext& ctx, const WittVector& x, const RingElem& lambda,
                    long want_len) {
    long n = want_len >= 0 ? want_len
                           : std::min(2 * x.len() + ctx.config().slack, ctx.config().max_len);
    WittVector fx = frobenius(ctx, x, n);
    if (r_is_zero(lambda)) return fx;
    WittVector tw = teich_scale(ctx, r_pow(lambda, (unsigned long)(ctx.p() - 1)), x);
    return witt_sub(ctx, fx, tw, n);
}

bool witt_eq_known(const WittContext& ctx, const WittVector& a, const WittVector& b) {
    (void)ctx;
    long n = std::min(computable(a), computable(b));
    if (n == WittVector::kExact) n = std::max(a.len(), b.len());
    for (long i = 0; i < n; ++i)
        if (!r_eq(a.coord(i), b.coord(i))) return false;
    return true;
}

// ---- truncation classes ----

bool in_truncation_class(const WittVector& x, const TruncationClass& cls) {
    if (!x.is_exact() && x.known_upto() < cls.M)
        throw config_error("in_truncation_class: horizon shorter than M");
    for (long i = cls.M; i < x.len(); ++i)
        if (!r_is_zero(x.coords()[i])) return false;
    bool strict = r_is_zero(cls.lambda);
    for (long i = 0; i < std::min<long>(cls.M, x.len()); ++i) {
        RingElem pw = r_pow(x.coords()[i], (unsigned long)cls.N);
        if (strict ? !r_is_zero(pw) : !r_divisible(pw, cls.lambda)) return false;
    }
    return true;
}

// ---- lambda-twisted module structure ----

ModuleStructure module_structure(const WittContext& ctx, long r) {
    std::vector<std::string> vars1{"L"}, vars2{"L"};
    for (long i = 0; i <= r; ++i) vars1.push_back("u" + std::to_string(i));
    for (long i = 0; i <= r; ++i) vars1.push_back("v" + std::to_string(i));
    for (long i = 0; i <= r; ++i) vars2.push_back("a" + std::to_string(i));
    for (long i = 0; i <= r; ++i) vars2.push_back("u" + std::to_string(i));
    RingPtr R1 = make_poly_ring(vars1, CoeffDomain::integer);
    RingPtr R2 = make_poly_ring(vars2, CoeffDomain::integer);

    auto scaled = [&](const RingPtr& R, long base) {
        std::vector<RingElem> v;
        for (long i = 0; i <= r; ++i) v.push_back(r_mul(r_var(R, "L"), r_var(R, (int)(base + i))));
        return v;
    };
    RingElem s = eval_kernel(ctx, WittContext::Kernel::add, r, R1, scaled(R1, 1), scaled(R1, r + 2));
    RingElem p = eval_kernel(ctx, WittContext::Kernel::mul, r, R2, scaled(R2, 1), scaled(R2, r + 2));
    return ModuleStructure{r_exact_div(s, r_var(R1, "L")), r_exact_div(p, r_var(R2, "L"))};
}

// ---- support probe ----

ProbeResult support_probe(const WittContext& ctx, const ProbeOp& op, long M, long N) {
    TermBudgetGuard guard(ctx.config().probe_term_budget);
    long p = ctx.p();

    std::vector<std::string> vars;
    std::vector<long> bounds;
    auto add_block = [&](const std::string& prefix, long count, long bound) {
        long base = (long)vars.size();
        for (long i = 0; i < count; ++i) {
            vars.push_back(prefix + std::to_string(i));
            bounds.push_back(bound);
        }
        return base;
    };

    // weight of x_j is p^j; lambda has weight 1.  Surviving monomials have
    // weight at most `wcap`, and coordinate i of the composed operator is
    // isobaric of weight p^i (add) or p^(i+1) (f_lambda), which certifies
    // the stopping index for those two.  t_map is measured with a margin.
    auto class_weight = [&](long m, long n) {
        long w = 0, pj = 1;
        for (long j = 0; j < m; ++j) {
            w += (n - 1) * pj;
            pj *= p;
        }
        return w;
    };

    WittVector image;
    long wcap = 0;
    bool certified = true;
    switch (op.kind) {
    case ProbeOp::Kind::add: {
        long bx = add_block("x", M, N);
        long by = add_block("y", M, N);
        RingPtr R = make_bounded_ring(vars, bounds, p);
        auto mk = [&](long base) {
            std::vector<RingElem> cs;
            for (long i = 0; i < M; ++i) cs.push_back(r_var(R, (int)(base + i)));
            return WittVector::exact(R, std::move(cs));
        };
        wcap = 2 * class_weight(M, N);
        long stop = 0;
        while (pow_l(p, stop) <= wcap) ++stop;
        image = witt_add(ctx, mk(bx), mk(by), stop + 2);
        break;
    }
    case ProbeOp::Kind::f_lambda: {
        long bx = add_block("x", M, N);
        vars.push_back("l");
        bounds.push_back(op.L);
        RingPtr R = make_bounded_ring(vars, bounds, p);
        std::vector<RingElem> cs;
        for (long i = 0; i < M; ++i) cs.push_back(r_var(R, (int)(bx + i)));
        WittVector x = WittVector::exact(R, std::move(cs));
        wcap = class_weight(M, N) + (op.L - 1);
        long stop = 0; // coordinate i isobaric of weight p^(i+1)
        while (pow_l(p, stop + 1) <= wcap) ++stop;
        image = f_lambda(ctx, x, r_var(R, "l"), stop + 2);
        break;
    }
    case ProbeOp::Kind::t_map: {
        // Na = 0 admits a free (non-nilpotent) first argument, as in the
        // operator columns of the induction where only a support bound holds
        long ba = add_block("a", op.Ma, op.Na);
        long bx = add_block("x", M, N);
        RingPtr R = make_bounded_ring(vars, bounds, p);
        std::vector<RingElem> as, xs;
        for (long i = 0; i < op.Ma; ++i) as.push_back(r_var(R, (int)(ba + i)));
        for (long i = 0; i < M; ++i) xs.push_back(r_var(R, (int)(bx + i)));
        wcap = class_weight(M, N) + (op.Na > 0 ? class_weight(op.Ma, op.Na) : 0);
        long stop = op.Ma + 1;
        while (pow_l(p, stop) <= 2 * std::max<long>(wcap, 1)) ++stop;
        certified = false; // empirical: verified by the trailing zero window
        image = t_map(ctx, WittVector::exact(R, std::move(as)), WittVector::exact(R, xs),
                      stop + 3);
        break;
    }
    }

    long last = -1;
    for (long i = 0; i < image.len(); ++i)
        if (!r_is_zero(image.coords()[i])) last = i;
    if (!certified) {
        long window = image.known_upto() - (last + 1);
        if (window < 3)
            throw resource_budget_exceeded("support_probe: zero window too small to trust");
    }
    long M2 = last + 1;
    if (M2 == 0) return ProbeResult{1, 1}; // zero image

    long nil_cap = 1;
    for (long b : bounds) nil_cap += b > 0 ? b - 1 : 0;
    long N2 = 1;
    for (long i = 0; i <= last; ++i) {
        RingElem pw = image.coords()[i];
        long k = 1;
        while (!r_is_zero(pw) && k <= nil_cap) {
            pw = r_mul(pw, image.coords()[i]);
            ++k;
        }
        if (!r_is_zero(pw))
            throw resource_budget_exceeded("support_probe: coordinate not nilpotent within cap");
        N2 = std::max(N2, k);
    }
    return ProbeResult{M2, N2};
}

} // namespace wittlab
