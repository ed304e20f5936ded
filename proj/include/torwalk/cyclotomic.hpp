#pragma once
// Exact arithmetic in Z (level 2, since the second root of unity is -1) and
// in the Eisenstein integers Z[w] (level 3), where w is a primitive cube
// root of unity with w^2 = -1 - w.

#include <array>
#include <string>

#include <gmpxx.h>

namespace torwalk {

/// a + b*w at the given level; b is identically zero at level 2.
struct CycInt {
    int level = 2;
    mpz_class a = 0;
    mpz_class b = 0;

    CycInt() = default;
    CycInt(int level, mpz_class a, mpz_class b);
    static CycInt integer(int level, mpz_class v) { return CycInt(level, std::move(v), 0); }
    static CycInt omega() { return CycInt(3, 0, 1); }

    bool is_zero() const { return a == 0 && b == 0; }
    bool operator==(const CycInt&) const = default;
};

CycInt cyc_add(const CycInt& x, const CycInt& y);
CycInt cyc_sub(const CycInt& x, const CycInt& y);
CycInt cyc_mul(const CycInt& x, const CycInt& y);
CycInt cyc_neg(const CycInt& x);
/// The ring automorphism w -> w^2 (complex conjugation): a+b*w -> (a-b) - b*w.
CycInt cyc_conj(const CycInt& x);

inline CycInt operator+(const CycInt& x, const CycInt& y) { return cyc_add(x, y); }
inline CycInt operator-(const CycInt& x, const CycInt& y) { return cyc_sub(x, y); }
inline CycInt operator*(const CycInt& x, const CycInt& y) { return cyc_mul(x, y); }
inline CycInt operator-(const CycInt& x) { return cyc_neg(x); }

bool is_rational(const CycInt& x);
/// a^2 - ab + b^2 at level 3, a^2 at level 2; multiplicative.
mpz_class cyc_norm(const CycInt& x);

/// Multiplication-by-x in the basis (1, w), as a 2x2 integer matrix
/// (row-major): psi(a+b*w) = [[a, -b], [b, a-b]].  Level 3 only.
std::array<mpz_class, 4> psi(const CycInt& x);

/// Z -> Z[w] embedding (level 2 -> 3); 3 -> 2 requires b = 0.
CycInt lift_to_level(const CycInt& x, int level);

/// Canonical text form: `a` at level 2, `a+b*w` / `a-b*w` at level 3.
std::string cyc_to_string(const CycInt& x);
CycInt cyc_from_string(int level, const std::string& text);

}  // namespace torwalk
