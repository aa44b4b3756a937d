#pragma once

#include <limits>
#include <map>
#include <mutex>
#include <vector>

#include "wittlab/ring.hpp"

namespace wittlab {

/// Witt vector with finite stored support.  `known` bounds the indices whose
/// coordinates are certified: coord(i) is the true coordinate for i < known
/// (implicitly zero past the stored list); nothing is claimed beyond.
/// known == kExact means the vector is exact: all later coordinates are zero.
class WittVector {
public:
    static constexpr long kExact = std::numeric_limits<long>::max();

    WittVector() = default;

    static WittVector exact(RingPtr R, std::vector<RingElem> coords);
    static WittVector with_horizon(RingPtr R, std::vector<RingElem> coords, long known);
    static WittVector zero(RingPtr R) { return exact(std::move(R), {}); }
    static WittVector teichmuller(const RingElem& a);

    const RingPtr& ring() const { return ring_; }
    long len() const { return (long)coords_.size(); }
    long known_upto() const { return known_; }
    bool is_exact() const { return known_ == kExact; }

    /// Coordinate i; throws config_error past the certified horizon.
    RingElem coord(long i) const;

    const std::vector<RingElem>& coords() const { return coords_; }

    /// All stored coordinates zero (the certified window of a zero vector).
    bool is_zero_window() const;

    std::string str() const;

private:
    RingPtr ring_;
    std::vector<RingElem> coords_;
    long known_ = kExact;
};

/// Ghost components Phi_0..Phi_R of a Witt vector.
struct GhostVector {
    RingPtr ring;
    std::vector<RingElem> values;
};

struct WittConfig {
    long slack = 2;                   // extra indices computed past operand support
    long max_len = 40;                // hard cap on computed support
    size_t probe_term_budget = 500000; // accumulator cap inside support_probe
};

/// Cached universal Witt polynomials for one prime: S_r, P_r, F_r, T_r and
/// the negation family, produced by ghost-component lifting over Q[X,Y] with
/// an integrality assertion at every p-power division.
class WittContext {
public:
    enum class Kernel { add, mul, frob, tmap, neg };

    explicit WittContext(long p, WittConfig cfg = {}) : p_(p), cfg_(cfg) {}

    long p() const { return p_; }
    const WittConfig& config() const { return cfg_; }

    /// Universal polynomial of the given family at index r (thread-safe).
    QPoly kernel(Kernel k, long r) const;

    /// Number of variables per vector slot in the cached polynomial of
    /// index r (layout documented in witt.cpp).
    long kernel_depth(Kernel k) const;

private:
    long p_;
    WittConfig cfg_;
    mutable std::mutex mu_;
    mutable std::map<Kernel, std::vector<QPoly>> cache_; // per family, by r
    mutable std::map<Kernel, long> cache_depth_;

    void ensure(Kernel k, long r) const;
};

// ---- ghost machinery ----

/// Phi_r of a Witt vector: sum p^i coord(i)^(p^(r-i)).
RingElem ghost_component(const WittContext& ctx, const WittVector& w, long r);
GhostVector ghost(const WittContext& ctx, const WittVector& w, long depth);

/// Triangular ghost solve over a torsion-free polynomial backend with the
/// variable-Frobenius endomorphism.  Throws not_integral when a p-power
/// division fails.  check_congruence also validates g_{r+1} = sigma(g_r)
/// mod p^{r+1} before solving.
WittVector ghost_lift(const WittContext& ctx, const GhostVector& g, bool check_congruence = false);

/// Witt coordinates of the integer n in W(Z), by the triangular ghost solve
/// over Z (depth+1 entries).
std::vector<mpz_class> integer_witt_coords(long p, const mpz_class& n, long depth);

// ---- arithmetic ----

WittVector witt_add(const WittContext& ctx, const WittVector& a, const WittVector& b,
                    long want_len = -1);
WittVector witt_neg(const WittContext& ctx, const WittVector& a, long want_len = -1);
WittVector witt_sub(const WittContext& ctx, const WittVector& a, const WittVector& b,
                    long want_len = -1);
WittVector witt_mul(const WittContext& ctx, const WittVector& a, const WittVector& b,
                    long want_len = -1);
/// Image of the integer n (n * x computed as witt_mul(witt_int(n), x)).
WittVector witt_int(const WittContext& ctx, const RingPtr& R, const mpz_class& n, long len);

WittVector frobenius(const WittContext& ctx, const WittVector& a, long want_len = -1);
WittVector verschiebung(const WittVector& a);
/// T_a x = sum_r V^r([a_r] x); a must have finite stored support.
WittVector t_map(const WittContext& ctx, const WittVector& a, const WittVector& x,
                 long want_len = -1);
/// [a] x = (a x_0, a^p x_1, a^(p^2) x_2, ...).
WittVector teich_scale(const WittContext& ctx, const RingElem& a, const WittVector& x);
/// F^lambda = F - [lambda^(p-1)].
WittVector f_lambda(const WittContext& ctx, const WittVector& x, const RingElem& lambda,
                    long want_len = -1);

bool witt_eq_known(const WittContext& ctx, const WittVector& a, const WittVector& b);

// ---- truncation classes (W_{M,N,lambda}; lambda = 0 encodes hat-W_{M,N}) ----

struct TruncationClass {
    long M;
    long N;
    RingElem lambda; // zero element of the base ring encodes the strict class
};

bool in_truncation_class(const WittVector& x, const TruncationClass& cls);

/// lambda-twisted module structure: S'_r = S_r(L.u, L.v)/L and
/// P'_r = P_r(L.a, L.u)/L as exact symbolic divisions.
struct ModuleStructure {
    RingElem s_prime; // over Z[L, u0..ur, v0..vr]
    RingElem p_prime; // over Z[L, a0..ar, u0..ur]
};
ModuleStructure module_structure(const WittContext& ctx, long r);

// ---- empirical support/nilpotency probe ----

struct ProbeOp {
    enum class Kind { add, f_lambda, t_map };
    Kind kind = Kind::add;
    long L = 2;  // f_lambda: nilpotency bound imposed on lambda
    long Ma = 1; // t_map: support bound of a
    long Na = 2; // t_map: nilpotency bound of a
};

struct ProbeResult {
    long M2;
    long N2;
};

/// Image class of the universal point of hat-W_{M,N} under the operator,
/// measured over the universal nilpotent ring Z_(p)[x_ij]/((x_ij)^N).
ProbeResult support_probe(const WittContext& ctx, const ProbeOp& op, long M, long N);

} // namespace wittlab
