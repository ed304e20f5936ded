#pragma once
// Exact matrices and monic polynomials over Z and Z[w]: division-free
// characteristic polynomials (Berkowitz), discriminants via fraction-free
// Sylvester determinants, and reducibility over Z for monic degree <= 8.

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "torwalk/cyclotomic.hpp"

namespace torwalk {

/// coeffs[i] is the coefficient of t^i; empty = zero polynomial; the
/// leading coefficient of a nonzero polynomial is nonzero.
struct CycPoly {
    int level = 2;
    std::vector<CycInt> coeffs;

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    bool is_zero() const { return coeffs.empty(); }
    bool is_monic() const;
    /// Coefficient of t^i, zero beyond the degree.
    CycInt coeff(int i) const;

    static CycPoly zero(int level) { return CycPoly{level, {}}; }
    static CycPoly constant(const CycInt& c);
    static CycPoly t(int level);

    bool operator==(const CycPoly&) const = default;
};

/// Strips trailing zeros; every coefficient must carry the given level.
CycPoly make_poly(int level, std::vector<CycInt> coeffs);
CycPoly make_int_poly(int level, const std::vector<long>& coeffs);

CycPoly poly_add(const CycPoly& f, const CycPoly& g);
CycPoly poly_sub(const CycPoly& f, const CycPoly& g);
CycPoly poly_mul(const CycPoly& f, const CycPoly& g);
CycPoly poly_neg(const CycPoly& f);
CycPoly poly_scale(const CycInt& c, const CycPoly& f);
CycInt poly_eval(const CycPoly& f, const CycInt& x);
CycPoly poly_derivative(const CycPoly& f);
/// Quotient and remainder; g must be monic of the same level.
std::pair<CycPoly, CycPoly> poly_divmod_monic(const CycPoly& f, const CycPoly& g);

/// Applies cyc_conj to every coefficient (the automorphism w -> w^2).
CycPoly poly_conj(const CycPoly& f);
/// True iff every coefficient is rational.
bool is_integer_poly(const CycPoly& f);
/// Entrywise retag; 3 -> 2 requires an integer polynomial.
CycPoly poly_to_level(const CycPoly& f, int level);

struct RingMatrix {
    int level = 2;
    int dim = 0;
    std::vector<CycInt> entries;  // row-major

    RingMatrix() = default;
    RingMatrix(int level, int dim);

    CycInt& at(int i, int j) { return entries[static_cast<std::size_t>(i) * dim + j]; }
    const CycInt& at(int i, int j) const {
        return entries[static_cast<std::size_t>(i) * dim + j];
    }

    static RingMatrix identity(int level, int dim);
    bool is_identity() const;
    bool operator==(const RingMatrix&) const = default;
};

RingMatrix mat_mul(const RingMatrix& x, const RingMatrix& y);
RingMatrix mat_pow(const RingMatrix& m, long e);
CycInt mat_trace(const RingMatrix& m);
/// (-1)^d times the constant term of the characteristic polynomial.
CycInt mat_det(const RingMatrix& m);
/// Exact inverse of a matrix whose determinant is a unit (norm 1), via
/// Cayley-Hamilton; throws std::invalid_argument otherwise.
RingMatrix mat_inverse_unit(const RingMatrix& m);
RingMatrix mat_to_level(const RingMatrix& m, int level);

/// Blockwise psi: a d x d matrix over Z[w] becomes 2d x 2d over Z.
RingMatrix restrict_scalars(const RingMatrix& m);

/// det(t*I - M), monic of degree dim, by the Berkowitz algorithm.
CycPoly charpoly(const RingMatrix& m);

/// Fraction-free (Bareiss) determinant of a row-major integer matrix.
mpz_class det_bareiss(int dim, std::vector<mpz_class> a);

/// (-1)^{d(d-1)/2} * Res(f, f') for monic integer f of degree >= 1;
/// zero iff f has a repeated root.
mpz_class discriminant(const CycPoly& f);

/// Raised when integer factorization or divisor enumeration inside the
/// reducibility pipeline exceeds its work cap; the answer is then unknown
/// rather than silently wrong.
struct FactorBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Prime factorization (trial division, then Pollard-Brent under a budget).
std::vector<std::pair<mpz_class, int>> factor_integer(const mpz_class& n);
std::vector<mpz_class> positive_divisors(const mpz_class& n);

/// Rabin's certificate: true iff f mod p is irreducible of full degree.
bool irreducible_mod_p(const CycPoly& f, long p);

inline const std::vector<long> kIrreducibilityPrimes = {2, 3, 5, 7, 11, 13};

/// A nontrivial monic factor over Z, or nullopt iff f is irreducible.
/// Monic integer input, 1 <= degree <= 8.
std::optional<CycPoly> find_monic_factor(const CycPoly& f,
                                         const std::vector<long>& primes = kIrreducibilityPrimes);
bool is_reducible_over_Z(const CycPoly& f, CycPoly* factor = nullptr,
                         const std::vector<long>& primes = kIrreducibilityPrimes);

/// Complete Kronecker search for a factor of degree <= deg(f)/2.
std::optional<CycPoly> kronecker_factor(const CycPoly& f);

/// Full factorization into monic irreducibles, sorted, with multiplicity.
std::vector<CycPoly> factor_monic_over_Z(const CycPoly& f);

/// Text form `t^2 - (1+1*w)*t + (0+1*w)`; integer coefficients print bare.
std::string poly_to_string(const CycPoly& f);
CycPoly poly_from_string(int level, const std::string& text);

std::string matrix_to_string(const RingMatrix& m);

}  // namespace torwalk
