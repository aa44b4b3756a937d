#include "wittlab/tower.hpp"

#include <sstream>

namespace wittlab {

uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

LawPoly law_const(const RingPtr& R, int nvars, const RingElem& c) {
    (void)R; // kept for signature symmetry with law_var
    LawPoly q;
    q.nvars = nvars;
    if (!r_is_zero(c)) q.terms.push_back({Exps(nvars, 0), c});
    return q;
}

LawPoly law_var(const RingPtr& R, int nvars, int index) {
    LawPoly q;
    q.nvars = nvars;
    Exps m(nvars, 0);
    m[index] = 1;
    q.terms.push_back({std::move(m), r_one(R)});
    return q;
}

LawPoly law_remap(const LawPoly& a, int new_nvars, const std::vector<int>& map) {
    LawPoly q;
    q.nvars = new_nvars;
    for (const auto& t : a.terms) {
        Exps m(new_nvars, 0);
        for (int i = 0; i < a.nvars; ++i)
            if (t.m[i] != 0) m[map[i]] = t.m[i];
        q.terms.push_back({std::move(m), t.c});
    }
    // remapping is injective on variables, so term order survives a resort
    std::sort(q.terms.begin(), q.terms.end(),
              [](const PTerm<RingElem>& x, const PTerm<RingElem>& y) { return mono_less(y.m, x.m); });
    return q;
}

LawPoly law_subst(const EOps& ops, const LawPoly& a, const std::vector<LawPoly>& args,
                  long degree_cap) {
    int nv = args.empty() ? 0 : args[0].nvars;
    struct TOps {
        const EOps& e;
        long cap;
        LawPoly zero() const { return LawPoly{nv, {}}; }
        LawPoly one() const { return law_const(e.R, nv, e.one()); }
        LawPoly add(const LawPoly& x, const LawPoly& y) const { return poly_add(e, x, y); }
        LawPoly mul(const LawPoly& x, const LawPoly& y, long c) const {
            return poly_mul(e, x, y, c);
        }
        int nv;
    } topo{ops, degree_cap, nv};
    auto fc = [&](const RingElem& c) { return law_const(ops.R, nv, c); };
    auto fv = [&](int i) { return args[i]; };
    return poly_eval<RingElem, LawPoly>(topo, a, fc, fv, degree_cap);
}

RingElem law_eval(const EOps& ops, const LawPoly& a, const std::vector<RingElem>& point) {
    struct TOps {
        const EOps& e;
        RingElem zero() const { return r_zero(e.R); }
        RingElem one() const { return e.one(); }
        RingElem add(const RingElem& x, const RingElem& y) const { return r_add(x, y); }
        RingElem mul(const RingElem& x, const RingElem& y, long) const { return r_mul(x, y); }
    } topo{ops};
    auto fc = [&](const RingElem& c) { return c; };
    auto fv = [&](int i) { return point[i]; };
    return poly_eval<RingElem, RingElem>(topo, a, fc, fv);
}

LawPoly law_inv_unit(const EOps& ops, const LawPoly& a, long degree_cap) {
    if (degree_cap < 0) throw config_error("law_inv_unit: needs a degree cap");
    // split a = c0 + m with c0 the constant coefficient
    RingElem c0 = r_zero(ops.R);
    LawPoly m = a;
    if (!m.terms.empty() && total_deg(m.terms.back().m) == 0) {
        c0 = m.terms.back().c;
        m.terms.pop_back();
    }
    RingElem c0i = r_invert_unit(c0);
    LawPoly mm = poly_scale(ops, m, r_neg(c0i));
    LawPoly acc = law_const(ops.R, a.nvars, ops.one());
    LawPoly pw = acc;
    for (long k = 1; k <= degree_cap; ++k) {
        pw = poly_mul(ops, pw, mm, degree_cap);
        if (pw.is_zero()) break;
        acc = poly_add(ops, acc, pw);
    }
    return poly_scale(ops, acc, c0i);
}

LawPoly law_div_elem(const LawPoly& a, const RingElem& d) {
    LawPoly q;
    q.nvars = a.nvars;
    for (const auto& t : a.terms) {
        RingElem c = r_exact_div(t.c, d);
        if (!r_is_zero(c)) q.terms.push_back({t.m, std::move(c)});
    }
    return q;
}

std::string law_str(const LawPoly& a, const std::vector<std::string>& var_names) {
    if (a.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : a.terms) {
        if (!first) os << " + ";
        os << "(" << r_str(t.c) << ")";
        for (size_t i = 0; i < t.m.size(); ++i) {
            if (t.m[i] == 0) continue;
            os << "*" << var_names[i];
            if (t.m[i] > 1) os << "^" << t.m[i];
        }
        first = false;
    }
    return os.str();
}

// ---- tower construction ----

TowerState init_tower(TowerState::Mode mode, const WittContext& ctx, RingPtr base,
                      const RingElem& lambda1, TowerParams params) {
    if (mode == TowerState::Mode::algebraic && r_is_zero(lambda1))
        throw invalid_lambda("algebraic mode requires a nonzerodivisor lambda");
    TowerState st;
    st.mode = mode;
    st.p = ctx.p();
    st.base = std::move(base);
    st.params = params;

    TowerLevel lv;
    lv.lambda = lambda1;
    lv.D = law_const(st.base, 0, r_one(st.base));     // D_0 = 1
    lv.D_inv = lv.D;
    lv.K = LawPoly{0, {}};
    st.levels.push_back(std::move(lv));

    EOps ops{st.base};
    // x + y + lambda x y in variables (X1, Y1)
    LawPoly x = law_var(st.base, 2, 0), y = law_var(st.base, 2, 1);
    LawPoly l0 = poly_add(ops, poly_add(ops, x, y),
                          poly_scale(ops, poly_mul(ops, x, y), lambda1));
    st.law.push_back(std::move(l0));
    return st;
}

std::vector<WittVector> apply_U(const WittContext& ctx, const TowerState& st,
                                const std::vector<WittVector>& v, long want_len) {
    long n = st.dim();
    if ((long)v.size() != n) throw config_error("apply_U: dimension mismatch");
    long len = want_len >= 0 ? want_len : st.params.frame_len;
    std::vector<WittVector> out;
    for (long i = 0; i < n; ++i) {
        WittVector acc = f_lambda(ctx, v[i], st.levels[i].lambda, len);
        for (long j = i + 1; j < n; ++j) {
            const WittVector& bij = st.levels[j].frame.b[i];
            acc = witt_sub(ctx, acc, t_map(ctx, bij, v[j], len), len);
        }
        out.push_back(std::move(acc));
    }
    return out;
}

std::optional<Frame> make_frame(const WittContext& ctx, const TowerState& st,
                                const std::vector<WittVector>& a, const RingElem& lambda_next) {
    TruncationClass cls{st.params.M, st.params.N, lambda_next};
    for (const auto& ai : a)
        if (!in_truncation_class(ai, cls)) return std::nullopt;
    auto img = apply_U(ctx, st, a);
    Frame fr;
    fr.a = a;
    for (auto& w : img) {
        std::vector<RingElem> q;
        for (long r = 0; r < w.len(); ++r) {
            if (!r_divisible(w.coords()[r], lambda_next)) return std::nullopt;
            q.push_back(r_exact_div(w.coords()[r], lambda_next));
        }
        fr.b.push_back(WittVector::with_horizon(st.base, std::move(q), w.known_upto()));
    }
    return fr;
}

std::vector<Frame> frame_search(const WittContext& ctx, const TowerState& st,
                                const RingElem& lambda_next,
                                const std::vector<RingElem>& box, size_t max_results) {
    long n = st.dim();
    long M = st.params.M;
    long slots = n * M;
    std::vector<Frame> found;
    std::vector<size_t> idx(slots, 0);
    while (true) {
        std::vector<WittVector> a;
        for (long i = 0; i < n; ++i) {
            std::vector<RingElem> cs;
            for (long m = 0; m < M; ++m) cs.push_back(box[idx[i * M + m]]);
            a.push_back(WittVector::exact(st.base, std::move(cs)));
        }
        if (auto fr = make_frame(ctx, st, a, lambda_next)) {
            found.push_back(std::move(*fr));
            if (max_results && found.size() >= max_results) return found;
        }
        long k = 0;
        for (; k < slots; ++k) {
            if (++idx[k] < box.size()) break;
            idx[k] = 0;
        }
        if (k == slots) break;
    }
    return found;
}

namespace {

// embed an m-variable X-polynomial into 2n variables (X block at 0..n-1)
LawPoly embed_x(const LawPoly& a, long n) {
    std::vector<int> map(a.nvars);
    for (int i = 0; i < a.nvars; ++i) map[i] = i;
    return law_remap(a, (int)(2 * n), map);
}

// embed an m-variable X-polynomial as the same polynomial in the Y block
LawPoly embed_y(const LawPoly& a, long n) {
    std::vector<int> map(a.nvars);
    for (int i = 0; i < a.nvars; ++i) map[i] = (int)n + i;
    return law_remap(a, (int)(2 * n), map);
}

} // namespace

TruncationLevel probe_factor_level(const WittContext& ctx, const TowerState& st, long row,
                                   long L_row) {
    long n = st.dim();
    ProbeOp fl;
    fl.kind = ProbeOp::Kind::f_lambda;
    fl.L = L_row;
    ProbeResult r = support_probe(ctx, fl, st.params.M, st.params.N);
    long M2 = std::max(st.params.M, r.M2);
    long N2 = std::max(st.params.N, r.N2);
    long parts = 1;
    for (long j = row + 1; j < n; ++j) {
        ProbeOp tm;
        tm.kind = ProbeOp::Kind::t_map;
        tm.Ma = std::min<long>(st.levels[j].frame.b[row].len(), st.params.frame_len);
        tm.Na = 0; // operator columns carry only a support bound
        ProbeResult rt = support_probe(ctx, tm, st.params.M, st.params.N);
        M2 = std::max(M2, rt.M2);
        N2 = std::max(N2, rt.N2);
        ++parts;
    }
    if (parts > 1) {
        ProbeResult ra = support_probe(ctx, {ProbeOp::Kind::add}, M2, N2);
        M2 = std::max(M2, ra.M2);
        N2 = std::max(N2, ra.N2);
    }
    return TruncationLevel{L_row, M2, N2};
}

TowerState extend_tower(const WittContext& ctx, const TowerState& st, const Frame& frame,
                        const RingElem& lambda_next,
                        const std::vector<TruncationLevel>& factor_levels) {
    long n = st.dim();
    EOps ops{st.base};
    if ((long)frame.a.size() != n || (long)frame.b.size() != n)
        throw config_error("extend_tower: frame dimension mismatch");
    if (st.mode == TowerState::Mode::algebraic && r_is_zero(lambda_next))
        throw invalid_lambda("extend_tower: lambda_next is zero");

    // frame validity: truncation class and U^n(a) = lambda_next . b
    TruncationClass cls{st.params.M, st.params.N, lambda_next};
    for (const auto& ai : frame.a)
        if (!in_truncation_class(ai, cls))
            throw not_divisible("extend_tower: frame coordinates leave the truncation class");
    {
        auto img = apply_U(ctx, st, frame.a);
        for (long i = 0; i < n; ++i) {
            long depth = std::min(img[i].known_upto(), frame.b[i].known_upto());
            if (depth == WittVector::kExact)
                depth = std::max(img[i].len(), frame.b[i].len());
            for (long r = 0; r < depth; ++r)
                if (!r_eq(img[i].coord(r), r_mul(lambda_next, frame.b[i].coord(r))))
                    throw not_divisible("extend_tower: frame relation U(a) = lambda.b fails");
        }
    }

    long cap = st.cap();

    // factor truncation levels (algebraic mode only; formal mode keeps the
    // full series at the cap, where nilpotence mod lambda_next is not assumed)
    std::vector<TruncationLevel> levels = factor_levels;
    if (st.mode == TowerState::Mode::algebraic && (long)levels.size() < n) {
        levels.resize(n);
        for (long i = (long)factor_levels.size(); i < n; ++i) {
            long L = 1;
            for (; L <= 16; ++L)
                if (r_divisible(r_pow(st.levels[i].lambda, L), lambda_next)) break;
            if (L > 16)
                throw truncation_too_coarse("extend_tower: lambda_i not nilpotent mod lambda_next");
            levels[i] = st.params.probe_levels ? probe_factor_level(ctx, st, i, L)
                                               : TruncationLevel{L, st.params.M, st.params.N};
        }
    }
    if (st.mode == TowerState::Mode::formal) levels.resize(n);

    // Step B: D_n = prod_i E^{L_i,M_i,N_i}_p(a_i, lambda_i, D_{i-1}^{-1} X_i)
    auto build_D = [&](bool negate) {
        LawPoly acc = law_const(st.base, (int)n, r_one(st.base));
        for (long i = 0; i < n; ++i) {
            WittVector ai = frame.a[i];
            if (negate) ai = witt_neg(ctx, ai, ai.len() + 2);
            long B = st.mode == TowerState::Mode::algebraic ? levels[i].degree_bound(st.p)
                                                            : st.params.series_cap;
            TruncSeries f = ep_vector(st.p, ai, st.levels[i].lambda, B);
            // argument D_{i-1}^{-1} X_i in n variables
            std::vector<int> map(st.levels[i].D_inv.nvars);
            for (int k = 0; k < st.levels[i].D_inv.nvars; ++k) map[k] = k;
            LawPoly arg = law_remap(st.levels[i].D_inv, (int)n, map);
            arg = poly_mul(ops, arg, law_var(st.base, (int)n, (int)i), cap);
            // Horner composition
            LawPoly comp = law_const(st.base, (int)n, f.c[f.cap]);
            for (long k = f.cap - 1; k >= 0; --k) {
                comp = poly_mul(ops, comp, arg, cap);
                comp = poly_add(ops, comp, law_const(st.base, (int)n, f.c[k]));
            }
            acc = poly_mul(ops, acc, comp, cap);
        }
        return acc;
    };
    LawPoly D = build_D(false);
    LawPoly D_inv = build_D(true);

    // D . D_inv = 1 mod (lambda_next, truncation)
    {
        LawPoly prod = poly_mul(ops, D, D_inv, cap);
        LawPoly delta = poly_sub(ops, prod, law_const(st.base, (int)n, r_one(st.base)));
        for (const auto& t : delta.terms)
            if (!r_divisible(t.c, lambda_next))
                throw truncation_too_coarse(
                    "extend_tower: D * D_inv is not 1 modulo lambda_next at the truncation");
    }

    // Step C: K from D(X) D(Y) = D(X*Y) + lambda_next K(X, Y)
    LawPoly DX = embed_x(D, n);
    LawPoly DY = embed_y(D, n);
    std::vector<LawPoly> law_args;
    for (long k = 0; k < n; ++k) law_args.push_back(st.law[k]);
    LawPoly Dstar = law_subst(ops, D, law_args, cap);
    LawPoly DXDY = poly_mul(ops, DX, DY, cap);

    LawPoly K, H;
    if (st.mode == TowerState::Mode::formal) {
        LawPoly Dstar_inv = law_inv_unit(ops, Dstar, cap);
        LawPoly frac = poly_mul(ops, DXDY, Dstar_inv, cap);
        frac = poly_sub(ops, frac, law_const(st.base, (int)(2 * n), r_one(st.base)));
        try {
            H = law_div_elem(frac, lambda_next);
        } catch (const not_divisible&) {
            throw not_divisible("extend_tower: H-division by lambda_next failed (invalid frame)");
        }
        K = poly_mul(ops, Dstar, H, cap);
    } else {
        LawPoly num = poly_sub(ops, DXDY, Dstar);
        try {
            K = law_div_elem(num, lambda_next);
        } catch (const not_divisible&) {
            throw not_divisible("extend_tower: K-division by lambda_next failed (invalid frame)");
        }
    }

    // assemble the new state
    TowerState out = st;
    TowerLevel lv;
    lv.lambda = lambda_next;
    lv.frame = frame;
    lv.factor_trunc = levels;
    lv.D = D;
    lv.D_inv = D_inv;
    lv.K = K;
    lv.H = H;
    out.levels.push_back(std::move(lv));

    // re-embed the old law coordinates into 2(n+1) variables
    long n1 = n + 1;
    std::vector<LawPoly> new_law;
    for (long k = 0; k < n; ++k) {
        std::vector<int> map(2 * n);
        for (long i = 0; i < n; ++i) map[i] = (int)i;
        for (long i = 0; i < n; ++i) map[n + i] = (int)(n1 + i);
        new_law.push_back(law_remap(st.law[k], (int)(2 * n1), map));
    }
    // law coordinate n+1: x D(Y) + y D(X) + lambda x y + K
    {
        std::vector<int> mapx(n), mapy(n), mapk(2 * n);
        for (long i = 0; i < n; ++i) mapx[i] = (int)i;
        for (long i = 0; i < n; ++i) mapy[i] = (int)(n1 + i);
        for (long i = 0; i < n; ++i) mapk[i] = (int)i;
        for (long i = 0; i < n; ++i) mapk[n + i] = (int)(n1 + i);
        LawPoly Dx = law_remap(D, (int)(2 * n1), mapx);
        LawPoly Dy = law_remap(D, (int)(2 * n1), mapy);
        LawPoly Kk = law_remap(K, (int)(2 * n1), mapk);
        LawPoly xn = law_var(st.base, (int)(2 * n1), (int)n);
        LawPoly yn = law_var(st.base, (int)(2 * n1), (int)(2 * n1 - 1));
        LawPoly lc = poly_add(ops, poly_mul(ops, xn, Dy, cap), poly_mul(ops, yn, Dx, cap));
        lc = poly_add(ops, lc, poly_scale(ops, poly_mul(ops, xn, yn, cap), lambda_next));
        lc = poly_add(ops, lc, Kk);
        new_law.push_back(std::move(lc));
    }
    out.law = std::move(new_law);
    return out;
}

std::vector<LawPoly> alpha_map(const TowerState& st) {
    long n = st.dim();
    EOps ops{st.base};
    std::vector<LawPoly> alpha;
    for (long k = 0; k < n; ++k) {
        std::vector<int> map(st.levels[k].D.nvars);
        for (int i = 0; i < st.levels[k].D.nvars; ++i) map[i] = i;
        LawPoly a = law_remap(st.levels[k].D, (int)n, map);
        LawPoly xk = law_var(st.base, (int)n, (int)k);
        a = poly_add(ops, a, poly_scale(ops, xk, st.levels[k].lambda));
        alpha.push_back(std::move(a));
    }
    return alpha;
}

std::vector<RingElem> law_apply(const TowerState& st, const std::vector<RingElem>& x,
                                const std::vector<RingElem>& y) {
    EOps ops{st.base};
    std::vector<RingElem> point;
    point.insert(point.end(), x.begin(), x.end());
    point.insert(point.end(), y.begin(), y.end());
    std::vector<RingElem> out;
    for (long k = 0; k < st.dim(); ++k) out.push_back(law_eval(ops, st.law[k], point));
    return out;
}

std::vector<RingElem> law_inverse_point(const TowerState& st, const std::vector<RingElem>& x) {
    // solve level by level: coordinate k of law(x, y) is
    //   y_k (D_{k-1}(x) + lambda_k x_k) + x_k D_{k-1}(y) + K_{k-1}(x, y)
    EOps ops{st.base};
    long n = st.dim();
    std::vector<RingElem> y;
    for (long k = 0; k < n; ++k) {
        std::vector<RingElem> ypad = y;
        ypad.push_back(r_zero(st.base)); // placeholder for y_k
        for (long j = k + 1; j < n; ++j) ypad.push_back(r_zero(st.base));
        std::vector<RingElem> point;
        point.insert(point.end(), x.begin(), x.end());
        point.insert(point.end(), ypad.begin(), ypad.end());
        RingElem residual = law_eval(ops, st.law[k], point); // value with y_k = 0
        // coefficient of y_k: D_{k-1}(x) + lambda_k x_k = alpha_k(x)
        std::vector<RingElem> xk(x.begin(), x.begin() + k);
        RingElem coeff = law_eval(ops, st.levels[k].D, xk);
        coeff = r_add(coeff, r_mul(st.levels[k].lambda, x[k]));
        y.push_back(r_neg(r_mul(residual, r_invert_unit(coeff))));
    }
    return y;
}

std::vector<RingElem> sample_point(const TowerState& st, uint64_t& rng_state) {
    if (st.base->kind != RingDesc::Kind::eisenstein)
        throw config_error("sample_point: needs the Eisenstein backend");
    const EisRing& E = st.base->eis;
    std::vector<RingElem> pt;
    for (long k = 0; k < st.dim(); ++k) {
        std::vector<uint32_t> digits(E.max_prec(), 0);
        for (long i = 1; i < std::min<long>(E.max_prec(), 10); ++i)
            digits[i] = (uint32_t)(splitmix64(rng_state) % (uint64_t)E.p);
        pt.push_back(RingElem(st.base, EisElem(std::move(digits), E.max_prec())));
    }
    return pt;
}

AxiomReport verify_group_axioms(const TowerState& st, long samples, uint64_t seed) {
    AxiomReport rep;
    rep.samples = samples;
    EOps ops{st.base};
    uint64_t rng = seed ? seed : 0x5eed;
    auto alpha = alpha_map(st);
    auto eq_pts = [&](const std::vector<RingElem>& a, const std::vector<RingElem>& b) {
        for (size_t i = 0; i < a.size(); ++i)
            if (!r_eq(a[i], b[i])) return false;
        return true;
    };
    auto pt_str = [&](const std::vector<RingElem>& a) {
        std::string s = "(";
        for (size_t i = 0; i < a.size(); ++i) s += (i ? ", " : "") + r_str(a[i]);
        return s + ")";
    };
    std::vector<RingElem> zero(st.dim(), r_zero(st.base));
    for (long s = 0; s < samples; ++s) {
        auto x = sample_point(st, rng);
        auto y = sample_point(st, rng);
        auto z = sample_point(st, rng);
        if (!eq_pts(law_apply(st, x, zero), x))
            rep.failures.push_back("unit at " + pt_str(x));
        auto xy = law_apply(st, x, y);
        if (!eq_pts(xy, law_apply(st, y, x)))
            rep.failures.push_back("commutativity at " + pt_str(x) + ", " + pt_str(y));
        if (!eq_pts(law_apply(st, xy, z), law_apply(st, x, law_apply(st, y, z))))
            rep.failures.push_back("associativity at " + pt_str(x) + ", " + pt_str(y) + ", " +
                                   pt_str(z));
        auto xinv = law_inverse_point(st, x);
        if (!eq_pts(law_apply(st, x, xinv), zero))
            rep.failures.push_back("inverse at " + pt_str(x));
        for (long k = 0; k < st.dim(); ++k) {
            RingElem lhs = law_eval(ops, alpha[k], xy);
            RingElem rhs = r_mul(law_eval(ops, alpha[k], x), law_eval(ops, alpha[k], y));
            if (!r_eq(lhs, rhs)) {
                rep.failures.push_back("alpha-hom (k=" + std::to_string(k + 1) + ") at " +
                                       pt_str(x) + ", " + pt_str(y));
                break;
            }
        }
    }
    return rep;
}

} // namespace wittlab
