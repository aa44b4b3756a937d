#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wittlab/exponential.hpp"
#include "wittlab/witt.hpp"

namespace wittlab {

/// Coefficient ops for polynomials over a base ring.
struct EOps {
    RingPtr R;
    bool is_zero(const RingElem& a) const { return r_is_zero(a); }
    RingElem add(const RingElem& a, const RingElem& b) const { return r_add(a, b); }
    RingElem neg(const RingElem& a) const { return r_neg(a); }
    RingElem mul(const RingElem& a, const RingElem& b) const { return r_mul(a, b); }
    RingElem one() const { return r_one(R); }
};

/// Polynomial in the tower coordinates X_1..X_n (and Y_1..Y_n for二-variable
/// identities) with base-ring coefficients.
using LawPoly = Poly<RingElem>;

LawPoly law_const(const RingPtr& R, int nvars, const RingElem& c);
LawPoly law_var(const RingPtr& R, int nvars, int index);
/// Remap variables: new_index = map[old_index]; nvars becomes new_nvars.
LawPoly law_remap(const LawPoly& a, int new_nvars, const std::vector<int>& map);
/// Substitute var i -> args[i]; all args share nvars.
LawPoly law_subst(const EOps& ops, const LawPoly& a, const std::vector<LawPoly>& args,
                  long degree_cap = -1);
RingElem law_eval(const EOps& ops, const LawPoly& a, const std::vector<RingElem>& point);
/// Inverse of a polynomial with unit constant term, modulo total degree cap.
LawPoly law_inv_unit(const EOps& ops, const LawPoly& a, long degree_cap);
/// Coefficient-wise exact division by a base-ring element.
LawPoly law_div_elem(const LawPoly& a, const RingElem& d);
std::string law_str(const LawPoly& a, const std::vector<std::string>& var_names);

/// Frame: the parameter datum (a, b) with U^n(a) = lambda_next . b.
struct Frame {
    std::vector<WittVector> a;
    std::vector<WittVector> b;
};

struct TowerLevel {
    RingElem lambda;
    Frame frame;                             // frame that built this level; empty at level 1
    std::vector<TruncationLevel> factor_trunc; // (L_i, M_i, N_i) per exponential factor
    LawPoly D;                 // fundamental morphism D_{k} of the k-dim sub-state
    LawPoly D_inv;             // its lifted inverse
    LawPoly K;                 // correction term of the extension to level k+1
    LawPoly H;                 // formal-mode 2-cocycle (empty in algebraic mode)
};

struct TowerParams {
    long M = 2;          // frame support bound
    long N = 2;          // frame nilpotency exponent
    long series_cap = 10; // total-degree cap in formal mode (ignored in algebraic)
    // computed Witt support of operator images; the universal kernel
    // polynomials grow steeply with the index (S_5 at p=2 already has ~10^4
    // terms), so windows beyond ~6 are impractical -- the horizon marker on
    // the results keeps the truncation honest
    long frame_len = 4;
    long samples = 50;
    // derive each factor's (M_i, N_i) from the measured operator-image
    // classes instead of reusing (M, N); the probes run on the universal
    // nilpotent model
    bool probe_levels = false;
};

/// Image class of U^n on (W_{M,N})^n inputs, combining the diagonal
/// F^{lambda_i} probe with the column T_b probes through an addition probe.
TruncationLevel probe_factor_level(const WittContext& ctx, const struct TowerState& st, long row,
                                   long L_row);

struct TowerState {
    enum class Mode { formal, algebraic };

    Mode mode = Mode::algebraic;
    long p = 2;
    RingPtr base;
    TowerParams params;
    std::vector<TowerLevel> levels;
    std::vector<LawPoly> law; // law[k]: coordinate k+1 of the group law, 2n vars

    long dim() const { return (long)levels.size(); }
    long cap() const { return mode == Mode::formal ? params.series_cap : -1; }
};

/// One-level state over G^lambda with law x + y + lambda x y.
TowerState init_tower(TowerState::Mode mode, const WittContext& ctx, RingPtr base,
                      const RingElem& lambda1, TowerParams params = {});

/// Apply the operator matrix U^n (diagonal F^{lambda_i}, last columns -T_{b_i}).
std::vector<WittVector> apply_U(const WittContext& ctx, const TowerState& st,
                                const std::vector<WittVector>& v, long want_len = -1);

/// Validate a frame candidate: truncation class membership and the defining
/// relation U^n(a) = lambda_next . b (b computed by exact division).
std::optional<Frame> make_frame(const WittContext& ctx, const TowerState& st,
                                const std::vector<WittVector>& a, const RingElem& lambda_next);

/// Enumerate frames with coordinates from `box`, support <= st.params.M.
std::vector<Frame> frame_search(const WittContext& ctx, const TowerState& st,
                                const RingElem& lambda_next,
                                const std::vector<RingElem>& box, size_t max_results = 0);

/// Extend by one level (steps A-D).  Throws not_divisible when the frame
/// does not make D_n a mod-lambda homomorphism, truncation_too_coarse when
/// D . D_inv is not 1 at the required modulus.
TowerState extend_tower(const WittContext& ctx, const TowerState& st, const Frame& frame,
                        const RingElem& lambda_next,
                        const std::vector<TruncationLevel>& factor_levels = {});

/// Components alpha_k = D_{k-1} + lambda_k X_k (n-variable polynomials).
std::vector<LawPoly> alpha_map(const TowerState& st);

struct AxiomReport {
    long samples = 0;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

/// Pointwise verification: associativity, unit, inverse, commutativity and
/// the alpha-homomorphism identity at sampled points (algebraic mode).
AxiomReport verify_group_axioms(const TowerState& st, long samples, uint64_t seed);

/// Group law evaluated at a pair of points.
std::vector<RingElem> law_apply(const TowerState& st, const std::vector<RingElem>& x,
                                const std::vector<RingElem>& y);

/// Coordinatewise solve of law(x, y) = 0 for y.
std::vector<RingElem> law_inverse_point(const TowerState& st, const std::vector<RingElem>& x);

/// Deterministic sampler of points with positive-valuation coordinates.
std::vector<RingElem> sample_point(const TowerState& st, uint64_t& rng_state);

uint64_t splitmix64(uint64_t& state);

} // namespace wittlab
