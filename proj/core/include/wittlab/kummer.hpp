#pragma once

#include <optional>

#include "wittlab/tower.hpp"

namespace wittlab {

/// Witt coordinates of the prime p in W(Z), with the valuation pattern of
/// the higher components against the expected exponents.
struct PWittExpansion {
    long p;
    std::vector<mpz_class> components; // a_0..a_depth
    // (v_p(a_n), expected) for n >= 2; expected is p-1 for odd p, 2^(n-2)+1 for p = 2
    std::vector<std::pair<long, long>> valuations;
};

PWittExpansion p_witt_expansion(long p, long depth);

/// The unique d with p [lambda] = (lambda^p d_0, lambda^p d_1, ...), over a
/// ring where p = c lambda^(p-1).
struct DVector {
    RingElem lambda;
    RingElem c;
    std::vector<RingElem> d;

    WittVector as_witt(long upto) const;
};

DVector d_vector(const WittContext& ctx, const RingPtr& R, const RingElem& lambda, long depth);

/// Dimension-1 finiteness criterion and quotient isogeny.
struct KummerDim1 {
    bool finite_flat;
    LawPoly generator; // lambda^(-p)((lambda x + 1)^p - 1), univariate
    LawPoly isogeny;   // psi = generator as a map G^lambda -> G^(lambda^p)
};

/// finite_flat = (lambda^(p-1) | p); when true the generator has exact
/// coefficients and psi is certified a homomorphism symbolically.
KummerDim1 kummer_dim1(const WittContext& ctx, const RingElem& lambda);

/// Operator matrix with diagonal T_{d_i} and columns -T_{z_i}.
struct UpsilonOp {
    std::vector<WittVector> d;                   // diagonal entries
    std::vector<std::vector<WittVector>> z_cols; // z^(j+1) for levels j >= 1
};

UpsilonOp upsilon_init(const WittVector& d1);
UpsilonOp upsilon_extend(const UpsilonOp& up, const WittVector& d_next,
                         const std::vector<WittVector>& z);
std::vector<WittVector> apply_upsilon(const WittContext& ctx, const UpsilonOp& up,
                                      const std::vector<WittVector>& v, long want_len = -1);

/// Function on the tower with alpha-power denominators:
/// num / prod alpha_j^(den[j]).
struct LocalPoly {
    LawPoly num;
    std::vector<long> den;
};

/// Ghost-side matrix of t'_d over any base where p = c lambda^(p-1) holds;
/// row n lists the coefficients c[n][k] on beta_k.
std::vector<std::vector<RingElem>> tprime_ghost_matrix(const WittContext& ctx, const RingPtr& R,
                                                       const RingElem& lambda, long depth_R);

/// Paired towers with the coupling data.
struct IsogenyTower {
    TowerState e_tower; // type (lambda_1..lambda_n)
    TowerState f_tower; // type (lambda_1^p..lambda_n^p)
    UpsilonOp upsilon;
    std::vector<DVector> dvecs; // per level
    std::vector<LocalPoly> psi; // isogeny coordinates, nums in n variables
    // diagonal T'_{d_i} operator tables (ghost matrices), one per level
    std::vector<std::vector<std::vector<RingElem>>> omega_diag;

    long dim() const { return e_tower.dim(); }
};

IsogenyTower init_isogeny_tower(const WittContext& ctx, RingPtr base, const RingElem& lambda1,
                                TowerParams params = {});

/// Condition (2) of the equivalence: p a - c - Upsilon u = lambda_next^p (z).
/// Returns the witness z (coordinatewise exact division) or nothing.
std::optional<std::vector<WittVector>>
big_frame_check(const WittContext& ctx, const IsogenyTower& iso,
                const std::vector<WittVector>& a_next, const std::vector<WittVector>& u_next,
                const RingElem& lambda_next);

/// The full big frame: both frames plus the witness.
struct BigFrame {
    Frame e_frame;
    Frame f_frame;
    std::vector<WittVector> z;
};

/// Extend both towers and the isogeny; the Psi_{n+1} coordinate is obtained
/// by the coordinatewise exact division (Theta_k(alpha) - E_{k-1}(Psi)) /
/// lambda_k^p.  Throws not_divisible when condition (1) fails.
IsogenyTower isogeny_extend(const WittContext& ctx, const IsogenyTower& iso,
                            const BigFrame& frame, const RingElem& lambda_next);

/// Divisions-only probe of the extension (the executable side of condition
/// (1)); does not mutate anything.
bool psi_divisions_succeed(const WittContext& ctx, const IsogenyTower& iso,
                           const BigFrame& frame, const RingElem& lambda_next);

/// beta(Psi(x)) and Theta(alpha(x)) agreement at a sampled point.
bool isogeny_point_check(const IsogenyTower& iso, const std::vector<RingElem>& x);

/// Count kernel points (solutions of Psi = 0) at the given effective
/// precision by digit search with valuation-guided cluster collapse.
long kernel_point_count(const IsogenyTower& iso, long m_eff);

/// Roots of a univariate polynomial over the Eisenstein backend mod pi^m.
long count_eis_roots(const RingPtr& R, const std::vector<RingElem>& coeffs, long m,
                     std::vector<RingElem>* roots_out = nullptr);

/// Ghost-side operator t'_d (lower-triangular matrix over O) and the
/// Witt-side lift of T'_d, with the lemma's assertions.
struct TPrimeData {
    RingPtr ring;                                  // O (+ Z variables for the lift)
    std::vector<std::vector<RingElem>> ghost_mat;  // c[n][k], k <= n < R
    WittVector witt_side;                          // lifted coordinates over O[Z]
};

TPrimeData tprime_d(const WittContext& ctx, long depth_R);

} // namespace wittlab
