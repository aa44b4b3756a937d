#include "wittlab/eisenstein.hpp"

#include <algorithm>

namespace wittlab {

namespace {

void trim(std::vector<uint32_t>& d) {
    while (!d.empty() && d.back() == 0) d.pop_back();
}

// Carry-propagate a signed digit accumulator into canonical digits in [0,p),
// using pi^e = p: an overflow of q at position i adds q at position i+e.
std::vector<uint32_t> normalize(const EisRing& R, std::vector<int64_t> acc, long prec) {
    acc.resize(std::max<size_t>(acc.size(), prec) + R.e, 0);
    std::vector<uint32_t> out(prec, 0);
    for (long i = 0; i < (long)acc.size(); ++i) {
        int64_t v = acc[i];
        int64_t q = v >= 0 ? v / R.p : -((-v + R.p - 1) / R.p);
        int64_t r = v - q * R.p; // r in [0, p)
        if (i < prec) out[i] = (uint32_t)r;
        if (q != 0 && i + R.e < (long)acc.size()) acc[i + R.e] += q;
    }
    trim(out);
    return out;
}

} // namespace

EisElem EisElem::one(const EisRing& R) { return EisElem({1}, R.max_prec()); }

EisElem EisElem::pi(const EisRing& R) { return pi_pow(R, 1); }

EisElem EisElem::pi_pow(const EisRing& R, long k) {
    if (k >= R.max_prec()) return zero(R);
    std::vector<uint32_t> d(k + 1, 0);
    d[k] = 1;
    return EisElem(std::move(d), R.max_prec());
}

EisElem EisElem::from_int(const EisRing& R, const mpz_class& n) {
    // n = sum of base-p digits at positions e*j
    mpz_class m = n;
    mpz_class pK;
    mpz_ui_pow_ui(pK.get_mpz_t(), R.p, R.K);
    m %= pK;
    if (m < 0) m += pK;
    std::vector<uint32_t> d(R.max_prec(), 0);
    for (long j = 0; j < R.K && m != 0; ++j) {
        mpz_class r = m % R.p;
        d[j * R.e] = (uint32_t)r.get_ui();
        m /= R.p;
    }
    trim(d);
    return EisElem(std::move(d), R.max_prec());
}

EisElem EisElem::from_rational(const EisRing& R, const mpz_class& n, const mpz_class& d) {
    if (mpz_divisible_ui_p(d.get_mpz_t(), R.p))
        throw not_divisible("from_rational: denominator not coprime to p");
    return eis_mul(R, from_int(R, n), eis_inv_unit(R, from_int(R, d)));
}

bool EisElem::is_zero_at_prec() const {
    for (auto d : digits_)
        if (d != 0) return false;
    return true;
}

std::optional<long> EisElem::valuation() const {
    for (long i = 0; i < (long)digits_.size(); ++i)
        if (digits_[i] != 0) return i;
    return std::nullopt;
}

std::string EisElem::str(const EisRing& R) const {
    if (is_zero_at_prec()) return "0";
    std::string s;
    for (long i = 0; i < (long)digits_.size(); ++i) {
        if (digits_[i] == 0) continue;
        if (!s.empty()) s += " + ";
        if (i == 0)
            s += std::to_string(digits_[i]);
        else {
            if (digits_[i] != 1) s += std::to_string(digits_[i]) + "*";
            s += "pi";
            if (i > 1) s += "^" + std::to_string(i);
        }
    }
    (void)R;
    return s;
}

EisElem eis_add(const EisRing& R, const EisElem& a, const EisElem& b) {
    long prec = std::min(a.prec(), b.prec());
    std::vector<int64_t> acc(prec, 0);
    for (long i = 0; i < prec; ++i) acc[i] = (int64_t)a.digit(i) + b.digit(i);
    return EisElem(normalize(R, std::move(acc), prec), prec);
}

EisElem eis_neg(const EisRing& R, const EisElem& a) {
    long prec = a.prec();
    std::vector<int64_t> acc(prec, 0);
    for (long i = 0; i < prec; ++i) acc[i] = -(int64_t)a.digit(i);
    return EisElem(normalize(R, std::move(acc), prec), prec);
}

EisElem eis_sub(const EisRing& R, const EisElem& a, const EisElem& b) {
    long prec = std::min(a.prec(), b.prec());
    std::vector<int64_t> acc(prec, 0);
    for (long i = 0; i < prec; ++i) acc[i] = (int64_t)a.digit(i) - b.digit(i);
    return EisElem(normalize(R, std::move(acc), prec), prec);
}

EisElem eis_mul(const EisRing& R, const EisElem& a, const EisElem& b) {
    // prec(ab) = min(prec(a) + v(b), prec(b) + v(a)), capped at ring precision;
    // zero-at-precision operands count with v = prec
    auto va = a.valuation(), vb = b.valuation();
    long va_eff = va ? *va : a.prec();
    long vb_eff = vb ? *vb : b.prec();
    long prec = std::min(a.prec() + vb_eff, b.prec() + va_eff);
    prec = std::min(prec, R.max_prec());
    if (!va || !vb) return EisElem({}, std::max<long>(prec, 1));
    if (prec <= 0) throw precision_exhausted("eis_mul: no precision left");
    std::vector<int64_t> acc(prec, 0);
    for (long i = 0; i < (long)a.digits().size(); ++i) {
        if (a.digit(i) == 0) continue;
        for (long j = 0; j < (long)b.digits().size() && i + j < prec; ++j)
            acc[i + j] += (int64_t)a.digit(i) * b.digit(j);
    }
    return EisElem(normalize(R, std::move(acc), prec), prec);
}

EisElem eis_pow(const EisRing& R, const EisElem& a, unsigned long k) {
    EisElem r = EisElem::one(R);
    EisElem base = a;
    while (k > 0) {
        if (k & 1) r = eis_mul(R, r, base);
        k >>= 1;
        if (k) base = eis_mul(R, base, base);
    }
    return r;
}

EisElem eis_inv_unit(const EisRing& R, const EisElem& a) {
    if (!a.is_unit()) throw not_divisible("eis_inv_unit: not a unit");
    long prec = a.prec();
    // digit-by-digit Hensel: maintain x with a*x = 1 mod pi^k
    // inv0 = a0^{-1} mod p
    uint32_t a0 = a.digit(0);
    uint32_t inv0 = 1;
    for (uint32_t t = 1; t < (uint32_t)R.p; ++t)
        if ((a0 * t) % R.p == 1) { inv0 = t; break; }
    EisElem x({inv0}, prec);
    while (true) {
        EisElem r = eis_sub(R, EisElem::one(R), eis_mul(R, a, x));
        auto v = r.valuation();
        if (!v) break; // residual zero at tracked precision
        // correction digit at position *v kills the lowest residual digit
        uint32_t c = (uint32_t)(((uint64_t)r.digit(*v) * inv0) % R.p);
        std::vector<uint32_t> d(*v + 1, 0);
        d[*v] = c;
        x = eis_add(R, x, EisElem(std::move(d), prec));
    }
    return x;
}

EisElem eis_div(const EisRing& R, const EisElem& a, const EisElem& b) {
    auto vb = b.valuation();
    if (!vb)
        throw precision_exhausted("eis_div: divisor is zero at tracked precision");
    auto va = a.valuation();
    if (va && *va < *vb) throw not_divisible("eis_div: v(a) < v(b)");
    long prec = std::min(a.prec(), b.prec()) - *vb;
    if (prec <= 0) throw precision_exhausted("eis_div: quotient has no precision left");
    if (!va) return EisElem({}, prec); // 0 / b at reduced precision
    // shift both down by v(b), then multiply by unit inverse
    auto shift = [](const EisElem& x, long s, long newprec) {
        std::vector<uint32_t> d;
        for (long i = s; i < (long)x.digits().size(); ++i) d.push_back(x.digits()[i]);
        trim(d);
        return EisElem(std::move(d), newprec);
    };
    EisElem a2 = shift(a, *vb, a.prec() - *vb);
    EisElem b2 = shift(b, *vb, b.prec() - *vb);
    return eis_mul(R, a2, eis_inv_unit(R, b2));
}

bool eis_eq(const EisRing& R, const EisElem& a, const EisElem& b) {
    (void)R;
    long prec = std::min(a.prec(), b.prec());
    for (long i = 0; i < prec; ++i)
        if (a.digit(i) != b.digit(i)) return false;
    return true;
}

} // namespace wittlab
