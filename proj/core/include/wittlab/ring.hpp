#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <gmpxx.h>

#include "wittlab/eisenstein.hpp"
#include "wittlab/errors.hpp"
#include "wittlab/poly.hpp"

namespace wittlab {

/// p-adic valuation of an integer; nullopt for 0.
std::optional<long> vp(const mpz_class& n, long p);
/// p-adic valuation of a rational; nullopt for 0.
std::optional<long> vp(const mpq_class& q, long p);

/// Coefficient arithmetic for Poly<mpq_class>.
struct QOps {
    bool is_zero(const mpq_class& x) const { return sgn(x) == 0; }
    mpq_class add(const mpq_class& a, const mpq_class& b) const { return a + b; }
    mpq_class neg(const mpq_class& a) const { return -a; }
    mpq_class mul(const mpq_class& a, const mpq_class& b) const { return a * b; }
    mpq_class div(const mpq_class& a, const mpq_class& b) const { return a / b; }
    mpq_class one() const { return 1; }
};

using QPoly = Poly<mpq_class>;

enum class CoeffDomain { integer, p_local, rational };

/// Description of a polynomial-backed ring: a free polynomial ring over the
/// stated coefficient domain, optionally with one of the supported relation
/// packs.  Covers Z, Z_(p) and Q as zero-variable rings.
struct PolyRingDesc {
    enum class Rel {
        free_ring,    // no relations
        power_bounds, // x_i^{N_i} = 0 for bounded variables
        o_shape,      // p = C * Lambda^(p-1)
        b_shape       // Lambda_i^nu = M_{i+1} * Lambda_{i+1}
    };

    std::vector<std::string> vars;
    CoeffDomain domain = CoeffDomain::rational;
    long p = 0; // prime; required for p_local and o_shape
    Rel rel = Rel::free_ring;

    std::vector<long> bounds; // power_bounds: per-variable bound, 0 = unbounded

    int o_c = -1, o_lambda = -1; // o_shape variable indices

    long b_nu = 0;             // b_shape exponent
    std::vector<int> b_lambda; // indices of Lambda_1..Lambda_n
    std::vector<int> b_m;      // indices of M_2..M_n

    int var_index(const std::string& name) const;
};

struct RingDesc {
    enum class Kind { poly, eisenstein };
    Kind kind = Kind::poly;
    PolyRingDesc poly;
    EisRing eis{};
};

using RingPtr = std::shared_ptr<const RingDesc>;

bool ring_equal(const RingDesc& a, const RingDesc& b);

// ---- constructors for the rings the constructions need ----

RingPtr make_integer_ring();
RingPtr make_p_local_ring(long p);
RingPtr make_rational_ring();
RingPtr make_poly_ring(std::vector<std::string> vars, CoeffDomain domain, long p = 0);
/// Polynomial ring with nilpotency bounds x_i^{N_i} = 0 (0 entry = free variable).
RingPtr make_bounded_ring(std::vector<std::string> vars, std::vector<long> bounds, long p);
/// O = Z[C,L]/(p - C L^(p-1)); extra free variables may follow C and L.
RingPtr make_o_ring(long p, std::vector<std::string> extra_vars = {},
                    CoeffDomain domain = CoeffDomain::integer);
/// B^n_nu = Z_(p)[L_1..L_n, M_2..M_n]/(L_i^nu - M_{i+1} L_{i+1}).
RingPtr make_b_ring(long p, int n, long nu);
RingPtr make_eisenstein_ring(long p, long e, long K);

/// Exact element of one of the supported base rings.
class RingElem {
public:
    RingElem() = default;
    RingElem(RingPtr ring, QPoly poly) : ring_(std::move(ring)), v_(std::move(poly)) {}
    RingElem(RingPtr ring, EisElem e) : ring_(std::move(ring)), v_(std::move(e)) {}

    const RingPtr& ring() const { return ring_; }
    bool is_poly() const { return std::holds_alternative<QPoly>(v_); }
    const QPoly& poly() const { return std::get<QPoly>(v_); }
    const EisElem& eis() const { return std::get<EisElem>(v_); }
    QPoly& poly() { return std::get<QPoly>(v_); }
    EisElem& eis() { return std::get<EisElem>(v_); }

private:
    RingPtr ring_;
    std::variant<QPoly, EisElem> v_;
};

RingElem r_zero(const RingPtr& R);
RingElem r_one(const RingPtr& R);
RingElem r_from_int(const RingPtr& R, const mpz_class& n);
RingElem r_from_rational(const RingPtr& R, const mpq_class& q);
RingElem r_var(const RingPtr& R, const std::string& name);
RingElem r_var(const RingPtr& R, int index);

RingElem r_add(const RingElem& a, const RingElem& b);
RingElem r_sub(const RingElem& a, const RingElem& b);
RingElem r_neg(const RingElem& a);
RingElem r_mul(const RingElem& a, const RingElem& b);
RingElem r_pow(const RingElem& a, unsigned long k);

bool r_is_zero(const RingElem& a);
bool r_eq(const RingElem& a, const RingElem& b);

/// Exact division; throws not_divisible / precision_exhausted.
RingElem r_exact_div(const RingElem& a, const RingElem& b);
/// Divisibility probe (no throw on clean failure).
bool r_divisible(const RingElem& a, const RingElem& b);

/// Inverse of a unit where the backend can certify one (Eisenstein units,
/// nonzero scalars of a field-like coefficient domain, and 1 + nilpotent in
/// bounded rings).  Throws not_divisible otherwise.
RingElem r_invert_unit(const RingElem& a);

/// pi-adic valuation on the Eisenstein backend; nullopt = "at least precision".
std::optional<long> r_valuation(const RingElem& a);

/// a^k = 0 mod m for some k <= k_cap?  Used for nilpotent-mod-lambda tests.
bool r_nilpotent_mod(const RingElem& a, const RingElem& m, long k_cap);

std::string r_str(const RingElem& a);

/// Canonicalize a raw polynomial into the ring's normal form.  Applied
/// automatically by the arithmetic; public for parser/tests.
QPoly ring_normalize(const RingDesc& R, QPoly p);

/// Membership/domain check after normalization; throws not_divisible when the
/// element left the ring (e.g. a quotient landed outside O).
void ring_check_domain(const RingDesc& R, const QPoly& p);

/// Map an element into another ring by substituting variables (by name where
/// they exist in the target) -- used for specializations like Lambda -> 1.
RingElem r_substitute(const RingElem& a, const RingPtr& target,
                      const std::vector<std::pair<std::string, RingElem>>& assignment);

/// Parse an element expression over the ring's generators: integers,
/// variable names ("pi" on the Eisenstein backend), + - * ^ ( ) and
/// division by integer literals.
RingElem r_parse(const RingPtr& R, const std::string& text);

/// Scoped cap on polynomial-product accumulator size; exceeding it raises
/// resource_budget_exceeded.  0 = unlimited.  Thread-local.
struct TermBudgetGuard {
    explicit TermBudgetGuard(size_t budget);
    ~TermBudgetGuard();
    TermBudgetGuard(const TermBudgetGuard&) = delete;

private:
    size_t prev_;
};
size_t current_term_budget();

} // namespace wittlab
