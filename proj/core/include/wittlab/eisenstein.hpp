#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "wittlab/errors.hpp"

namespace wittlab {

/// Ring description for Z_p[pi]/(pi^e - p) at p-adic precision exponent K.
/// Elements are exact modulo pi^(e*K).
struct EisRing {
    long p;
    long e;
    long K;

    long max_prec() const { return e * K; } // precision in pi-digits

    bool operator==(const EisRing&) const = default;
};

/// Element of an Eisenstein local ring, stored as its pi-adic digit
/// expansion: sum digits[i] * pi^i with digits in [0, p).  `prec` is the
/// number of digits that are known; arithmetic never pretends to know more.
/// pi^e carries to p, so a carry out of position i lands in position i+e.
class EisElem {
public:
    EisElem() = default;
    EisElem(std::vector<uint32_t> digits, long prec) : digits_(std::move(digits)), prec_(prec) {}

    static EisElem zero(const EisRing& R) { return EisElem({}, R.max_prec()); }
    static EisElem one(const EisRing& R);
    static EisElem pi(const EisRing& R);
    static EisElem pi_pow(const EisRing& R, long k);
    static EisElem from_int(const EisRing& R, const mpz_class& n);
    /// n/d with d coprime to p.
    static EisElem from_rational(const EisRing& R, const mpz_class& n, const mpz_class& d);

    long prec() const { return prec_; }
    const std::vector<uint32_t>& digits() const { return digits_; }
    uint32_t digit(long i) const { return i < (long)digits_.size() ? digits_[i] : 0; }

    /// True when every known digit is zero (zero at the tracked precision).
    bool is_zero_at_prec() const;

    /// pi-adic valuation; nullopt means "at least prec" (zero at precision).
    std::optional<long> valuation() const;

    bool is_unit() const { return digit(0) != 0; }

    std::string str(const EisRing& R) const;

private:
    std::vector<uint32_t> digits_; // size() <= prec_
    long prec_ = 0;
};

EisElem eis_add(const EisRing& R, const EisElem& a, const EisElem& b);
EisElem eis_sub(const EisRing& R, const EisElem& a, const EisElem& b);
EisElem eis_neg(const EisRing& R, const EisElem& a);
EisElem eis_mul(const EisRing& R, const EisElem& a, const EisElem& b);
EisElem eis_pow(const EisRing& R, const EisElem& a, unsigned long k);

/// Inverse of a unit, to its tracked precision.
EisElem eis_inv_unit(const EisRing& R, const EisElem& a);

/// Exact division a/b.  Requires v(a) >= v(b); consumes v(b) digits of
/// precision.  Throws not_divisible / precision_exhausted.
EisElem eis_div(const EisRing& R, const EisElem& a, const EisElem& b);

/// Equality at the common tracked precision.
bool eis_eq(const EisRing& R, const EisElem& a, const EisElem& b);

} // namespace wittlab
