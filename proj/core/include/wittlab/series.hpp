#pragma once

#include <vector>

#include "wittlab/ring.hpp"

namespace wittlab {

/// Power series in one variable truncated at an explicit degree cap,
/// exact coefficients in the base ring.
struct TruncSeries {
    RingPtr ring;
    long cap = 0;                // degree cap D
    std::vector<RingElem> c;     // coefficients 0..cap

    RingElem coeff(long n) const { return n <= cap ? c[n] : r_zero(ring); }
};

TruncSeries series_one(const RingPtr& R, long cap);
TruncSeries series_from(const RingPtr& R, long cap, std::vector<RingElem> coeffs);

TruncSeries series_add(const TruncSeries& a, const TruncSeries& b);
TruncSeries series_mul(const TruncSeries& a, const TruncSeries& b);
/// Inverse of a series with unit constant term, within the cap.
TruncSeries series_inv(const TruncSeries& a);
/// a(u * T^k), truncated at a.cap.
TruncSeries series_subst_scaled_power(const TruncSeries& a, const RingElem& u, long k);

bool series_eq(const TruncSeries& a, const TruncSeries& b);
std::string series_str(const TruncSeries& a);

} // namespace wittlab
