#pragma once
// Freely reduced words in the free group F_n, automorphisms given by
// generator images, the Magnus generating set of the Torelli-analog
// subgroup T_n = ker(Aut(F_n) -> Aut(Z^n)), and the abelianization map.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace torwalk {

/// A freely reduced word in F_n.  Letters are nonzero integers: +i is the
/// generator x_i (1-based), -i its inverse.  The empty word is the identity.
struct Word {
    int rank = 0;
    std::vector<int> letters;

    bool empty() const { return letters.empty(); }
    int length() const { return static_cast<int>(letters.size()); }
    bool operator==(const Word&) const = default;
};

/// Free reduction of a raw letter sequence; validates indices against rank.
Word reduce(int rank, std::span<const int> raw);
Word generator_word(int rank, int letter);
Word word_multiply(const Word& a, const Word& b);
Word word_invert(const Word& a);

/// Text form `x1 x2^-1 x1` (whitespace separated, `^<exp>` suffix allowed).
std::string word_to_string(const Word& w);
Word word_from_string(int rank, const std::string& text);

/// An automorphism of F_n given by the images of x_1..x_n.  inverse_images,
/// when present, must satisfy apply(inv, apply(this, x_i)) = x_i.
struct Automorphism {
    int rank = 0;
    std::vector<Word> images;
    std::optional<std::vector<Word>> inverse_images;

    // Equality by free equality of generator images.
    bool operator==(const Automorphism& o) const {
        return rank == o.rank && images == o.images;
    }
};

Automorphism identity_automorphism(int rank);
/// Conjugation x -> w^-1 x w, with inverse images populated.
Automorphism inner_automorphism(const Word& w);
/// Swaps x_i and x_j, fixing the rest.
Automorphism nielsen_swap(int rank, int i, int j);
/// x_i -> x_i^-1, fixing the rest.
Automorphism nielsen_inversion(int rank, int i);
/// x_i -> x_i x_j^sign (sign = +1/-1), fixing the rest.
Automorphism nielsen_transvection(int rank, int i, int j, int sign);
/// Formal inverse; requires inverse_images.
Automorphism invert(const Automorphism& a);

Word apply(const Automorphism& phi, const Word& w);
/// (phi ∘ psi)(x) = phi(psi(x)); inverse images composed in the opposite
/// order when both operands carry them.
Automorphism compose(const Automorphism& phi, const Automorphism& psi);

/// Exponent-sum matrix: entry (i, j) is the exponent sum of x_i in phi(x_j),
/// i.e. columns are abelianized generator images.
struct AbelianMatrix {
    int n = 0;
    std::vector<mpz_class> entries;  // row-major

    mpz_class& at(int i, int j) { return entries[static_cast<size_t>(i) * n + j]; }
    const mpz_class& at(int i, int j) const { return entries[static_cast<size_t>(i) * n + j]; }
    static AbelianMatrix identity(int n);
    bool is_identity() const;
    bool operator==(const AbelianMatrix&) const = default;
};

AbelianMatrix abelian_multiply(const AbelianMatrix& a, const AbelianMatrix& b);
AbelianMatrix abelianization_matrix(const Automorphism& phi);
bool is_in_torelli(const Automorphism& phi);

/// The Magnus generating set of T_n for n >= 3:
///   K_{ab}:  x_a -> x_b^-1 x_a x_b          (a != b)
///   K_{abc}: x_a -> x_a [x_b, x_c]          (a, b, c distinct, b < c)
/// with [u, v] = u^-1 v^-1 u v.  Every element carries explicit inverse
/// images.  Count: n(n-1) + n(n-1)(n-2)/2.
std::vector<Automorphism> magnus_generators(int n);
/// Names aligned with magnus_generators: "K12", "K123", ...
std::vector<std::string> magnus_generator_names(int n);

}  // namespace torwalk
