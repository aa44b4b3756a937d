#pragma once

#include <map>

#include "wittlab/series.hpp"
#include "wittlab/witt.hpp"

namespace wittlab {

/// Coefficients c_0..c_D of the two-parameter deformed exponential
/// E_p(U, L, T) as exact polynomials over Q in (U, L); assembled by exact
/// log/exp manipulation and certified integral at p before use.  Cached
/// per (p, D); thread-safe.
std::vector<QPoly> ep_master(long p, long D);

/// E_p(u, lambda, T) truncated at degree D over the element ring.
TruncSeries ep_single(long p, const RingElem& u, const RingElem& lambda, long D);

/// E_p(a, lambda, T) of Eq-(1) shape: product over ell of
/// E_p(a_ell, lambda^(p^ell), T^(p^ell)); factors with p^ell > D are skipped.
TruncSeries ep_vector(long p, const std::vector<RingElem>& a, const RingElem& lambda, long D);
TruncSeries ep_vector(long p, const WittVector& a, const RingElem& lambda, long D);

/// Truncation level (L, M, N) with its closed-form degree bound.
struct TruncationLevel {
    long L = 1, M = 1, N = 1;

    long degree_bound(long p) const {
        long geom = 0, pj = 1;
        for (long j = 0; j < M; ++j) {
            geom += pj;
            pj *= p;
        }
        return (N - 1) * geom + (L - 1);
    }
};

/// tau_{L,M,N} E_p(a, lambda, T): truncation at the level's degree bound.
TruncSeries ep_truncated(long p, const std::vector<RingElem>& a, const RingElem& lambda,
                         const TruncationLevel& level);

struct DegreeSupportReport {
    bool ok;          // every coefficient above B vanishes
    bool sharp;       // some coefficient at exactly B is nonzero
    long bound;       // B
};

/// Executable content of the truncation-bound lemma: expand E_p(U, L, T)
/// modulo (L^L, U_0^N..U_{M-1}^N, U_M, ...) to degree B + margin and check
/// the tail vanishes.
DegreeSupportReport degree_support_check(long p, const TruncationLevel& level, long margin = 4);

/// Greedy harmonic decomposition of a unit-constant-term series: returns
/// the Witt vectors a_k = (b_k, b_kp, b_kp2, ...) for prime-to-p k.
std::map<long, WittVector> harmonic_decompose(long p, const TruncSeries& G,
                                              const RingElem& lambda);

/// Product of the harmonics of a decomposition (test oracle for the
/// round-trip identity).
TruncSeries harmonic_reconstruct(long p, const std::map<long, WittVector>& parts,
                                 const RingElem& lambda, long D, const RingPtr& R);

} // namespace wittlab
