#include "wittlab/series.hpp"

#include <sstream>

namespace wittlab {

TruncSeries series_one(const RingPtr& R, long cap) {
    TruncSeries s;
    s.ring = R;
    s.cap = cap;
    s.c.assign(cap + 1, r_zero(R));
    s.c[0] = r_one(R);
    return s;
}

TruncSeries series_from(const RingPtr& R, long cap, std::vector<RingElem> coeffs) {
    TruncSeries s;
    s.ring = R;
    s.cap = cap;
    coeffs.resize(cap + 1, r_zero(R));
    s.c = std::move(coeffs);
    return s;
}

TruncSeries series_add(const TruncSeries& a, const TruncSeries& b) {
    long cap = std::min(a.cap, b.cap);
    TruncSeries s;
    s.ring = a.ring;
    s.cap = cap;
    for (long n = 0; n <= cap; ++n) s.c.push_back(r_add(a.c[n], b.c[n]));
    return s;
}

TruncSeries series_mul(const TruncSeries& a, const TruncSeries& b) {
    long cap = std::min(a.cap, b.cap);
    TruncSeries s;
    s.ring = a.ring;
    s.cap = cap;
    s.c.assign(cap + 1, r_zero(a.ring));
    for (long i = 0; i <= std::min(cap, (long)a.c.size() - 1); ++i) {
        if (r_is_zero(a.c[i])) continue;
        for (long j = 0; i + j <= cap && j < (long)b.c.size(); ++j) {
            if (r_is_zero(b.c[j])) continue;
            s.c[i + j] = r_add(s.c[i + j], r_mul(a.c[i], b.c[j]));
        }
    }
    return s;
}

TruncSeries series_inv(const TruncSeries& a) {
    RingElem c0inv = r_invert_unit(a.c[0]);
    TruncSeries s;
    s.ring = a.ring;
    s.cap = a.cap;
    s.c.assign(a.cap + 1, r_zero(a.ring));
    s.c[0] = c0inv;
    for (long n = 1; n <= a.cap; ++n) {
        RingElem acc = r_zero(a.ring);
        for (long k = 1; k <= n; ++k) acc = r_add(acc, r_mul(a.c[k], s.c[n - k]));
        s.c[n] = r_neg(r_mul(acc, c0inv));
    }
    return s;
}

TruncSeries series_subst_scaled_power(const TruncSeries& a, const RingElem& u, long k) {
    TruncSeries s;
    s.ring = a.ring;
    s.cap = a.cap;
    s.c.assign(a.cap + 1, r_zero(a.ring));
    RingElem upow = r_one(a.ring);
    for (long n = 0; n * k <= a.cap; ++n) {
        if (!r_is_zero(a.c[n])) s.c[n * k] = r_mul(a.c[n], upow);
        if ((n + 1) * k <= a.cap) upow = r_mul(upow, u);
        if (k == 0) break; // constant substitution degenerates
    }
    return s;
}

bool series_eq(const TruncSeries& a, const TruncSeries& b) {
    long cap = std::min(a.cap, b.cap);
    for (long n = 0; n <= cap; ++n)
        if (!r_eq(a.c[n], b.c[n])) return false;
    return true;
}

std::string series_str(const TruncSeries& a) {
    std::ostringstream os;
    bool any = false;
    for (long n = 0; n <= a.cap; ++n) {
        if (r_is_zero(a.c[n])) continue;
        if (any) os << " + ";
        os << "(" << r_str(a.c[n]) << ")";
        if (n >= 1) os << "*T" << (n > 1 ? "^" + std::to_string(n) : "");
        any = true;
    }
    if (!any) os << "0";
    os << " + O(T^" << a.cap + 1 << ")";
    return os.str();
}

} // namespace wittlab
