#include "wittlab/kummer.hpp"

#include <algorithm>

namespace wittlab {

namespace {

mpz_class ipow(long b, long k) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), b, k);
    return r;
}

} // namespace

// ---- Witt expansion of p over Z ----

PWittExpansion p_witt_expansion(long p, long depth) {
    PWittExpansion out;
    out.p = p;
    out.components = integer_witt_coords(p, p, depth);
    // re-verify the ghost equations Phi_n(a) = p
    for (long n = 0; n <= depth; ++n) {
        mpz_class acc = 0;
        for (long i = 0; i <= n; ++i) {
            mpz_class t;
            mpz_pow_ui(t.get_mpz_t(), out.components[i].get_mpz_t(),
                       mpz_get_ui(ipow(p, n - i).get_mpz_t()));
            acc += ipow(p, i) * t;
        }
        if (acc != p) throw not_integral("p_witt_expansion: ghost equation failed");
    }
    if (out.components[0] != p || out.components[1] != 1 - ipow(p, p - 1))
        throw not_integral("p_witt_expansion: leading components wrong");
    for (long n = 2; n <= depth; ++n) {
        auto v = vp(out.components[n], p);
        long expected = p == 2 ? (long)(1 + (1L << (n - 2))) : p - 1;
        out.valuations.push_back({v ? *v : -1, expected});
    }
    return out;
}

// ---- d-vector ----

WittVector DVector::as_witt(long upto) const {
    std::vector<RingElem> cs(d.begin(), d.begin() + std::min<size_t>(upto, d.size()));
    return WittVector::with_horizon(lambda.ring(), std::move(cs), (long)std::min<size_t>(upto, d.size()));
}

DVector d_vector(const WittContext& ctx, const RingPtr& R, const RingElem& lambda, long depth) {
    long p = ctx.p();
    RingElem c = r_exact_div(r_from_int(R, p), r_pow(lambda, p - 1));
    WittVector pw = witt_int(ctx, R, p, depth + 1);
    WittVector pl = teich_scale(ctx, lambda, pw); // p * [lambda] = [lambda] * p
    RingElem lp = r_pow(lambda, p);
    DVector out;
    out.lambda = lambda;
    out.c = c;
    for (long i = 0; i <= depth; ++i) out.d.push_back(r_exact_div(pl.coord(i), lp));
    if (!r_eq(out.d[0], c)) throw not_divisible("d_vector: d_0 != c");
    if (depth >= 1 && !r_eq(out.d[1], r_from_int(R, 1 - ipow(p, p - 1))))
        throw not_divisible("d_vector: d_1 != 1 - p^(p-1)");
    return out;
}

// ---- dimension 1 ----

KummerDim1 kummer_dim1(const WittContext& ctx, const RingElem& lambda) {
    long p = ctx.p();
    const RingPtr& R = lambda.ring();
    KummerDim1 out;
    out.finite_flat = r_divisible(r_from_int(R, p), r_pow(lambda, p - 1));
    if (!out.finite_flat) return out;

    EOps ops{R};
    // Q = lambda^(-p) ((lambda x + 1)^p - 1), coefficient i: binom(p,i) lambda^(i-p)
    RingElem lp = r_pow(lambda, p);
    LawPoly Q{1, {}};
    for (long i = 1; i <= p; ++i) {
        mpz_class binom;
        mpz_bin_uiui(binom.get_mpz_t(), p, i);
        RingElem ci = r_mul(r_from_int(R, binom), r_pow(lambda, i));
        ci = r_exact_div(ci, lp);
        if (r_is_zero(ci)) continue;
        Q.terms.push_back({Exps{(int32_t)i}, std::move(ci)});
    }
    std::sort(Q.terms.begin(), Q.terms.end(),
              [](const PTerm<RingElem>& a, const PTerm<RingElem>& b) { return mono_less(b.m, a.m); });

    // homomorphism certificate: psi(x *_l y) = psi(x) *_{l^p} psi(y) symbolically
    LawPoly x = law_var(R, 2, 0), y = law_var(R, 2, 1);
    LawPoly star = poly_add(ops, poly_add(ops, x, y), poly_scale(ops, poly_mul(ops, x, y), lambda));
    LawPoly lhs = law_subst(ops, Q, {star, star});
    std::vector<int> mx{0}, my{1};
    LawPoly Qx = law_subst(ops, Q, {law_remap(law_var(R, 1, 0), 2, mx)});
    LawPoly Qy = law_subst(ops, Q, {law_remap(law_var(R, 1, 0), 2, my)});
    LawPoly rhs = poly_add(ops, poly_add(ops, Qx, Qy),
                           poly_scale(ops, poly_mul(ops, Qx, Qy), lp));
    if (!poly_sub(ops, lhs, rhs).is_zero())
        throw not_divisible("kummer_dim1: psi homomorphism identity failed");

    out.generator = Q;
    out.isogeny = std::move(Q);
    return out;
}

// ---- Upsilon ----

UpsilonOp upsilon_init(const WittVector& d1) { return UpsilonOp{{d1}, {}}; }

UpsilonOp upsilon_extend(const UpsilonOp& up, const WittVector& d_next,
                         const std::vector<WittVector>& z) {
    if (z.size() != up.d.size())
        throw config_error("upsilon_extend: witness dimension mismatch");
    UpsilonOp out = up;
    out.z_cols.push_back(z);
    out.d.push_back(d_next);
    return out;
}

std::vector<WittVector> apply_upsilon(const WittContext& ctx, const UpsilonOp& up,
                                      const std::vector<WittVector>& v, long want_len) {
    long n = (long)up.d.size();
    if ((long)v.size() != n) throw config_error("apply_upsilon: dimension mismatch");
    std::vector<WittVector> out;
    for (long i = 0; i < n; ++i) {
        WittVector acc = t_map(ctx, up.d[i], v[i], want_len);
        for (long j = i + 1; j < n; ++j)
            acc = witt_sub(ctx, acc, t_map(ctx, up.z_cols[j - 1][i], v[j], want_len), want_len);
        out.push_back(std::move(acc));
    }
    return out;
}

// ---- LocalPoly helpers ----

namespace {

struct LocalCtx {
    EOps ops;
    std::vector<LawPoly> alphas; // denominators, in the current variable count
    long cap;
};

LocalPoly lp_from(const LawPoly& a, long n_alphas) {
    return LocalPoly{a, std::vector<long>(n_alphas, 0)};
}

LocalPoly lp_mul(const LocalCtx& c, const LocalPoly& a, const LocalPoly& b) {
    LocalPoly r;
    r.num = poly_mul(c.ops, a.num, b.num, c.cap);
    r.den.resize(a.den.size());
    for (size_t j = 0; j < a.den.size(); ++j) r.den[j] = a.den[j] + b.den[j];
    return r;
}

LocalPoly lp_add(const LocalCtx& c, const LocalPoly& a, const LocalPoly& b) {
    LocalPoly r;
    r.den.resize(a.den.size());
    for (size_t j = 0; j < a.den.size(); ++j) r.den[j] = std::max(a.den[j], b.den[j]);
    LawPoly na = a.num, nb = b.num;
    for (size_t j = 0; j < a.den.size(); ++j) {
        for (long k = a.den[j]; k < r.den[j]; ++k) na = poly_mul(c.ops, na, c.alphas[j], c.cap);
        for (long k = b.den[j]; k < r.den[j]; ++k) nb = poly_mul(c.ops, nb, c.alphas[j], c.cap);
    }
    r.num = poly_add(c.ops, na, nb);
    return r;
}

LocalPoly lp_sub(const LocalCtx& c, const LocalPoly& a, const LocalPoly& b) {
    LocalPoly nb{poly_neg(c.ops, b.num), b.den};
    return lp_add(c, a, nb);
}

RingElem lp_eval(const LocalCtx& c, const LocalPoly& a, const std::vector<RingElem>& pt) {
    RingElem v = law_eval(c.ops, a.num, pt);
    for (size_t j = 0; j < a.den.size(); ++j) {
        if (a.den[j] == 0) continue;
        RingElem av = law_eval(c.ops, c.alphas[j], pt);
        v = r_mul(v, r_pow(r_invert_unit(av), (unsigned long)a.den[j]));
    }
    return v;
}

// substitute LocalPoly arguments into a base polynomial
LocalPoly lp_compose(const LocalCtx& c, const LawPoly& body, const std::vector<LocalPoly>& args,
                     int nvars) {
    struct TOps {
        const LocalCtx& c;
        int nv;
        size_t nalpha;
        LocalPoly zero() const { return LocalPoly{LawPoly{nv, {}}, std::vector<long>(nalpha, 0)}; }
        LocalPoly one() const {
            return LocalPoly{law_const(c.ops.R, nv, c.ops.one()), std::vector<long>(nalpha, 0)};
        }
        LocalPoly add(const LocalPoly& x, const LocalPoly& y) const { return lp_add(c, x, y); }
        LocalPoly mul(const LocalPoly& x, const LocalPoly& y, long) const { return lp_mul(c, x, y); }
    } topo{c, nvars, c.alphas.size()};
    auto fc = [&](const RingElem& q) {
        return LocalPoly{law_const(c.ops.R, nvars, q), std::vector<long>(c.alphas.size(), 0)};
    };
    auto fv = [&](int i) { return args[i]; };
    return poly_eval<RingElem, LocalPoly>(topo, body, fc, fv, c.cap);
}

// Psi_{n1} for already-extended towers; throws not_divisible when a
// coordinatewise division fails.
LocalPoly build_top_psi(const WittContext& ctx, const TowerState& e2, const TowerState& f2,
                        const std::vector<LocalPoly>& psi_old, const RingElem& lambda_next) {
    long p = ctx.p();
    long n1 = e2.dim();
    long n = n1 - 1;
    EOps ops{e2.base};
    auto alphas = alpha_map(e2);
    LocalCtx lc{ops, alphas, e2.cap()};

    // Theta_{n1}(alpha) = alpha_{n1}^p / alpha_n
    LocalPoly theta = lp_from(poly_pow(ops, alphas[n1 - 1], (unsigned long)p, e2.cap()), n1);
    theta.den[n1 - 2] += 1;

    // E_n(Psi_1..Psi_n): F-side fundamental morphism composed with psi
    std::vector<LocalPoly> args;
    for (long k = 0; k < n; ++k) {
        LocalPoly a = psi_old[k];
        std::vector<int> map(a.num.nvars);
        for (int i = 0; i < a.num.nvars; ++i) map[i] = i;
        a.num = law_remap(a.num, (int)n1, map);
        a.den.resize(n1, 0);
        args.push_back(std::move(a));
    }
    LocalPoly en = lp_compose(lc, f2.levels[n].D, args, (int)n1);

    LocalPoly A = lp_sub(lc, theta, en);
    RingElem lp_pow_elem = r_pow(lambda_next, (unsigned long)p);
    LocalPoly psi_top;
    psi_top.den = A.den;
    psi_top.num = law_div_elem(A.num, lp_pow_elem); // throws not_divisible
    return psi_top;
}

} // namespace

// ---- isogeny towers ----

IsogenyTower init_isogeny_tower(const WittContext& ctx, RingPtr base, const RingElem& lambda1,
                                TowerParams params) {
    IsogenyTower iso;
    iso.e_tower = init_tower(TowerState::Mode::algebraic, ctx, base, lambda1, params);
    iso.f_tower = init_tower(TowerState::Mode::algebraic, ctx, base,
                             r_pow(lambda1, (unsigned long)ctx.p()), params);
    DVector d1 = d_vector(ctx, base, lambda1, params.frame_len);
    iso.upsilon = upsilon_init(d1.as_witt(params.frame_len));
    iso.dvecs.push_back(std::move(d1));
    KummerDim1 k1 = kummer_dim1(ctx, lambda1);
    if (!k1.finite_flat)
        throw not_divisible("init_isogeny_tower: lambda^(p-1) does not divide p");
    iso.psi.push_back(LocalPoly{k1.isogeny, {0}});
    iso.omega_diag.push_back(tprime_ghost_matrix(ctx, base, lambda1, 4));
    return iso;
}

std::optional<std::vector<WittVector>>
big_frame_check(const WittContext& ctx, const IsogenyTower& iso,
                const std::vector<WittVector>& a_next, const std::vector<WittVector>& u_next,
                const RingElem& lambda_next) {
    long n = iso.dim();
    long p = ctx.p();
    long len = iso.e_tower.params.frame_len;
    const RingPtr& R = iso.e_tower.base;
    if ((long)a_next.size() != n || (long)u_next.size() != n)
        throw config_error("big_frame_check: dimension mismatch");

    // c = (a^n, [lambda_n]): alpha_n is the fundamental morphism with
    // coefficient vector (a^n_1, ..., a^n_{n-1}, [lambda_n]) -- the last slot
    // carries the top level's lambda, which is what the psi-division
    // condition decomposes against (frames with lambda_n = lambda_{n+1}
    // cannot tell the difference)
    std::vector<WittVector> c;
    const Frame& top = iso.e_tower.levels[n - 1].frame;
    for (long i = 0; i + 1 < n; ++i) c.push_back(top.a[i]);
    c.push_back(WittVector::teichmuller(iso.e_tower.levels[n - 1].lambda));

    auto ups = apply_upsilon(ctx, iso.upsilon, u_next, len);
    WittVector pW = witt_int(ctx, R, p, len);
    RingElem lnp = r_pow(lambda_next, (unsigned long)p);

    std::vector<WittVector> z;
    for (long i = 0; i < n; ++i) {
        WittVector lhs = witt_mul(ctx, pW, a_next[i], len);
        lhs = witt_sub(ctx, lhs, c[i], len);
        lhs = witt_sub(ctx, lhs, ups[i], len);
        std::vector<RingElem> q;
        for (long r = 0; r < lhs.len(); ++r) {
            if (!r_divisible(lhs.coords()[r], lnp)) return std::nullopt;
            q.push_back(r_exact_div(lhs.coords()[r], lnp));
        }
        z.push_back(WittVector::with_horizon(R, std::move(q), lhs.known_upto()));
    }
    return z;
}

IsogenyTower isogeny_extend(const WittContext& ctx, const IsogenyTower& iso,
                            const BigFrame& frame, const RingElem& lambda_next) {
    long p = ctx.p();
    IsogenyTower out;
    out.e_tower = extend_tower(ctx, iso.e_tower, frame.e_frame, lambda_next);
    out.f_tower =
        extend_tower(ctx, iso.f_tower, frame.f_frame, r_pow(lambda_next, (unsigned long)p));
    out.dvecs = iso.dvecs;
    DVector dn = d_vector(ctx, iso.e_tower.base, lambda_next, iso.e_tower.params.frame_len);
    out.upsilon =
        upsilon_extend(iso.upsilon, dn.as_witt(iso.e_tower.params.frame_len), frame.z);
    out.dvecs.push_back(std::move(dn));
    out.omega_diag = iso.omega_diag;
    out.omega_diag.push_back(tprime_ghost_matrix(ctx, iso.e_tower.base, lambda_next, 4));
    out.psi = iso.psi;
    out.psi.push_back(build_top_psi(ctx, out.e_tower, out.f_tower, iso.psi, lambda_next));
    // re-embed the lower psi coordinates into the new variable count
    long n1 = out.dim();
    for (long k = 0; k + 1 < n1; ++k) {
        std::vector<int> map(out.psi[k].num.nvars);
        for (int i = 0; i < out.psi[k].num.nvars; ++i) map[i] = i;
        out.psi[k].num = law_remap(out.psi[k].num, (int)n1, map);
        out.psi[k].den.resize(n1, 0);
    }
    return out;
}

bool psi_divisions_succeed(const WittContext& ctx, const IsogenyTower& iso,
                           const BigFrame& frame, const RingElem& lambda_next) {
    long p = ctx.p();
    TowerState e2 = extend_tower(ctx, iso.e_tower, frame.e_frame, lambda_next);
    TowerState f2 =
        extend_tower(ctx, iso.f_tower, frame.f_frame, r_pow(lambda_next, (unsigned long)p));
    try {
        (void)build_top_psi(ctx, e2, f2, iso.psi, lambda_next);
        return true;
    } catch (const not_divisible&) {
        return false;
    }
}

bool isogeny_point_check(const IsogenyTower& iso, const std::vector<RingElem>& x) {
    long n = iso.dim();
    long p = iso.e_tower.p;
    EOps ops{iso.e_tower.base};
    auto alphas = alpha_map(iso.e_tower);
    auto betas = alpha_map(iso.f_tower);
    LocalCtx lc{ops, alphas, iso.e_tower.cap()};

    std::vector<RingElem> av, pv;
    for (long k = 0; k < n; ++k) av.push_back(law_eval(ops, alphas[k], x));
    for (long k = 0; k < n; ++k) pv.push_back(lp_eval(lc, iso.psi[k], x));
    for (long k = 0; k < n; ++k) {
        RingElem theta = r_pow(av[k], (unsigned long)p);
        if (k > 0) theta = r_mul(theta, r_invert_unit(av[k - 1]));
        RingElem beta = law_eval(ops, betas[k], pv);
        if (!r_eq(theta, beta)) return false;
    }
    return true;
}

// ---- Eisenstein root counting ----

namespace {

RingElem eval_poly_vec(const std::vector<RingElem>& coeffs, const RingElem& x) {
    RingElem acc = r_zero(x.ring());
    for (long i = (long)coeffs.size() - 1; i >= 0; --i) acc = r_add(r_mul(acc, x), coeffs[i]);
    return acc;
}

long val_floor(const RingElem& v, long m) {
    // valuation clamped to m; a value that is zero at its tracked precision
    // must carry at least m digits, otherwise the count cannot be certified
    auto val = v.eis().valuation();
    if (val) return std::min(*val, m);
    if (v.eis().prec() < m)
        throw precision_exhausted("root search: residual zero below target precision");
    return m;
}

void root_dfs(const RingPtr& R, const std::vector<RingElem>& f, const std::vector<RingElem>& fp,
              EisElem x, long t, long m, long& count, std::vector<RingElem>* roots) {
    RingElem xe(R, x);
    long vf = val_floor(eval_poly_vec(f, xe), m);
    if (vf < t) return;
    long vd = val_floor(eval_poly_vec(fp, xe), m);
    if (vf >= m && t + vd >= m) { // whole disc solves f = 0 mod pi^m
        ++count;
        if (roots) roots->push_back(xe);
        return;
    }
    if (t >= m) {
        if (vf >= m) {
            ++count;
            if (roots) roots->push_back(xe);
        }
        return;
    }
    const EisRing& E = R->eis;
    for (uint32_t d = 0; d < (uint32_t)E.p; ++d) {
        std::vector<uint32_t> digits = x.digits();
        if (d != 0) {
            digits.resize(std::max<size_t>(digits.size(), t + 1), 0);
            digits[t] = d;
        }
        EisElem child(std::move(digits), x.prec());
        RingElem ce(R, child);
        if (val_floor(eval_poly_vec(f, ce), m) >= std::min(t + 1, m))
            root_dfs(R, f, fp, child, t + 1, m, count, roots);
    }
}

std::vector<RingElem> derivative(const std::vector<RingElem>& f) {
    std::vector<RingElem> d;
    for (size_t i = 1; i < f.size(); ++i)
        d.push_back(r_mul(r_from_int(f[i].ring(), (long)i), f[i]));
    if (d.empty() && !f.empty()) d.push_back(r_zero(f[0].ring()));
    return d;
}

} // namespace

long count_eis_roots(const RingPtr& R, const std::vector<RingElem>& coeffs, long m,
                     std::vector<RingElem>* roots_out) {
    if (R->kind != RingDesc::Kind::eisenstein)
        throw config_error("count_eis_roots: Eisenstein backend only");
    if (m > R->eis.max_prec()) throw precision_exhausted("count_eis_roots: m beyond precision");
    long count = 0;
    auto fp = derivative(coeffs);
    root_dfs(R, coeffs, fp, EisElem::zero(R->eis), 0, m, count, roots_out);
    return count;
}

namespace {

// coefficients in x_keep after substituting the prefix values (vars > keep absent)
std::vector<RingElem> univariate_coeffs(const EOps& ops, const LawPoly& a,
                                        const std::vector<RingElem>& prefix, int keep) {
    std::vector<RingElem> out;
    for (const auto& t : a.terms) {
        RingElem v = t.c;
        for (int i = 0; i < a.nvars; ++i) {
            if (i == keep || t.m[i] == 0) continue;
            if (i > keep) throw config_error("univariate_coeffs: variable above the solved level");
            v = r_mul(v, r_pow(prefix[i], (unsigned long)t.m[i]));
        }
        long deg = t.m[keep];
        if ((long)out.size() <= deg) out.resize(deg + 1, r_zero(ops.R));
        out[deg] = r_add(out[deg], v);
    }
    if (out.empty()) out.push_back(r_zero(ops.R));
    return out;
}

void kernel_dfs(const IsogenyTower& iso, long level, std::vector<RingElem>& prefix, long m,
                long& total) {
    const RingPtr& R = iso.e_tower.base;
    EOps ops{R};
    long n = iso.dim();
    auto coeffs = univariate_coeffs(ops, iso.psi[level].num, prefix, (int)level);
    std::vector<RingElem> roots;
    count_eis_roots(R, coeffs, m, &roots);
    for (const auto& r : roots) {
        if (level + 1 == n) {
            ++total;
        } else {
            prefix.push_back(r);
            kernel_dfs(iso, level + 1, prefix, m, total);
            prefix.pop_back();
        }
    }
}

} // namespace

long kernel_point_count(const IsogenyTower& iso, long m_eff) {
    std::vector<RingElem> prefix;
    long total = 0;
    kernel_dfs(iso, 0, prefix, m_eff, total);
    return total;
}

// ---- T'_d ----

namespace {

// alpha_n and beta_k coefficient vectors over a base with p = c lambda^(p-1);
// returns the lower-triangular c[n][k] matrix of t'_d.
std::vector<std::vector<RingElem>> tprime_matrix(const WittContext& ctx, const RingPtr& R,
                                                 const RingElem& lambda,
                                                 const std::vector<RingElem>& d, long depth_R) {
    long p = ctx.p();
    auto lam_pow = [&](long e) { return r_pow(lambda, (unsigned long)e); };
    auto p_pow = [&](long e) { return r_from_int(R, ipow(p, e)); };
    auto pw = [&](const RingElem& x, long e) { return r_pow(x, (unsigned long)e); };

    std::vector<std::vector<RingElem>> mat;
    for (long n = 0; n < depth_R; ++n) {
        // alpha_n = sum_j A_j y_j, j = 0..n+1
        std::vector<RingElem> A(n + 2, r_zero(R));
        mpz_class pj = 1;
        for (long j = 0; j <= n + 1; ++j) {
            long e = mpz_get_si(pj.get_mpz_t()); // p^j
            RingElem term = r_mul(p_pow(n + 1 - j), pw(d[n + 1 - j], e));
            if (j <= n) {
                RingElem sec = r_mul(p_pow(n - j), pw(d[n - j], e));
                long lexp = (long)mpz_get_si(ipow(p, n).get_mpz_t()) * (p - 1);
                sec = r_mul(sec, lam_pow(lexp));
                term = r_sub(term, sec);
            }
            A[j] = term;
            pj *= p;
        }
        // back-substitute against beta_k = y_{k+1} - lambda^(p^{k+1}(p-1)) y_k
        std::vector<RingElem> c(n + 1, r_zero(R));
        for (long k = n; k >= 0; --k) {
            c[k] = A[k + 1];
            A[k + 1] = r_zero(R);
            long lexp = (long)mpz_get_si(ipow(p, k + 1).get_mpz_t()) * (p - 1);
            A[k] = r_add(A[k], r_mul(c[k], lam_pow(lexp)));
        }
        if (!r_is_zero(A[0]))
            throw not_integral("tprime: residual y_0 coefficient does not vanish");
        mat.push_back(std::move(c));
    }
    return mat;
}

} // namespace

std::vector<std::vector<RingElem>> tprime_ghost_matrix(const WittContext& ctx, const RingPtr& R,
                                                       const RingElem& lambda, long depth_R) {
    DVector d = d_vector(ctx, R, lambda, depth_R + 1);
    return tprime_matrix(ctx, R, lambda, d.d, depth_R);
}

TPrimeData tprime_d(const WittContext& ctx, long depth_R) {
    long p = ctx.p();
    RingPtr O = make_o_ring(p);
    RingElem lambda = r_var(O, "L");
    DVector d = d_vector(ctx, O, lambda, depth_R + 1);

    TPrimeData out;
    out.ghost_mat = tprime_matrix(ctx, O, lambda, d.d, depth_R);

    // Witt-side lift over O[Z_0..Z_{R-1}]
    std::vector<std::string> zvars;
    for (long i = 0; i < depth_R; ++i) zvars.push_back("Z" + std::to_string(i));
    RingPtr OZ = make_o_ring(p, zvars);
    out.ring = OZ;
    GhostVector g;
    g.ring = OZ;
    for (long n = 0; n < depth_R; ++n) {
        RingElem acc = r_zero(OZ);
        for (long k = 0; k <= n; ++k) {
            RingElem ck = r_substitute(out.ghost_mat[n][k], OZ, {});
            // Phi_k(Z)
            RingElem phi = r_zero(OZ);
            for (long i = 0; i <= k; ++i) {
                RingElem t = r_pow(r_var(OZ, "Z" + std::to_string(i)),
                                   mpz_get_ui(ipow(p, k - i).get_mpz_t()));
                phi = r_add(phi, r_mul(r_from_int(OZ, ipow(p, i)), t));
            }
            acc = r_add(acc, r_mul(ck, phi));
        }
        g.values.push_back(std::move(acc));
    }
    out.witt_side = ghost_lift(ctx, g, false);
    return out;
}

} // namespace wittlab
