#pragma once
// Index-s kernels of F_n, Reidemeister-Schreier rewriting onto the basis
// {y_{k,i}, z}, module coordinates on the kernel abelianization, and the
// representations rho: T_n -> GL_{n-1}(Z[xi_s]).

#include <cstdint>
#include <string>
#include <vector>

#include "torwalk/freegroup.hpp"
#include "torwalk/polymat.hpp"

namespace torwalk {

/// Surjection chi: F_n -> Z/s given by weights (a_1..a_n), not all zero.
struct KernelDescriptor {
    int s = 2;
    int n = 0;
    std::vector<int> weights;  // values in 0..s-1

    KernelDescriptor() = default;
    KernelDescriptor(int s, int n, std::vector<int> weights);

    /// Scalar-equivalence canonical form: first nonzero weight is 1.
    bool canonical() const;
    bool is_standard() const;
    static KernelDescriptor standard(int s, int n);
    std::string label() const;  // e.g. "s2:001"

    bool operator==(const KernelDescriptor&) const = default;
};

int chi_eval(const KernelDescriptor& chi, const Word& w);

/// All canonical descriptors: 2^n - 1 at s = 2, (3^n - 1)/2 at s = 3.
std::vector<KernelDescriptor> enumerate_kernels(int n, int s);

/// Nielsen composite sigma with chi(sigma(x_i)) = [i == n], so that
/// sigma carries the standard kernel onto ker chi.
Automorphism standardizing_automorphism(const KernelDescriptor& chi);

/// Word in the free group on {y_{k,i}, z}; symbols are stored signed,
/// z <-> +-1 and y_{k,i} <-> +-(2 + (k-1)s + i).
struct SchreierWord {
    int n = 0;
    int s = 2;
    std::vector<int> syms;

    bool operator==(const SchreierWord&) const = default;
};

std::string schreier_to_string(const SchreierWord& sw);

/// Rewrites w in the standard kernel (exponent sum of x_n divisible by s)
/// through the transversal {x_n^c}; expand(rewrite(w)) is freely equal to w.
SchreierWord rewrite(const Word& w, int s);
/// y_{k,i} -> x_n^{-i} x_k x_n^i, z -> x_n^s.
Word expand(const SchreierWord& sw);

/// Signed symbol counts: c[(k-1)s + i] counts y_{k,i}, cz counts z.
struct AbelianVector {
    int n = 0;
    int s = 2;
    std::vector<mpz_class> c;
    mpz_class cz;
};

AbelianVector abelianize(const SchreierWord& sw);

/// Membership in ker(alpha): cz = 0 and the rows of c sum to zero.
bool in_ker_alpha(const AbelianVector& v);

/// Coordinates in the basis d_k = y_{k,0} y_{k,1}^{-1}: the k-th entry is
/// sum_{i<s-1} (c_{k,0}+...+c_{k,i}) xi^i.  Requires in_ker_alpha.
std::vector<CycInt> module_coordinates(const AbelianVector& v);

/// The induced matrix on the kernel abelianization module, dimension n-1
/// over Z[xi_s]; phi must be in T_n.  Non-standard kernels go through
/// rho(sigma^{-1} phi sigma, standard).
RingMatrix rho(const Automorphism& phi, const KernelDescriptor& chi);

struct RepBlock {
    KernelDescriptor kernel;
    Automorphism sigma;
    std::vector<RingMatrix> matrices;  // one per generator
};

/// Cached rho images of a generating set over every kernel at s = 2, 3.
struct RepSet {
    int n = 0;
    std::vector<std::string> generator_names;
    std::vector<Automorphism> generators;
    std::vector<RepBlock> blocks;  // all s = 2 blocks, then all s = 3

    std::vector<const RepBlock*> level_blocks(int s) const;
};

/// Computes rho for every (kernel, generator) pair; pairs are independent
/// and run under OpenMP.  Verifies rho(g) rho(g^{-1}) = I and unit
/// determinants before returning.
RepSet build_repset(int n, const std::vector<Automorphism>& generators,
                    const std::vector<std::string>& names);

/// Convenience: build_repset over magnus_generators(n).
RepSet build_torelli_repset(int n);

/// Versioned JSON cache (schema torwalk.repset/1) with `a+b*w` entries.
void save_repset(const RepSet& rs, const std::string& path);
RepSet load_repset(const std::string& path);

/// Structural and algebraic checks on a (possibly loaded) RepSet; throws
/// std::runtime_error with a description on the first failure.
void validate_repset(const RepSet& rs);

/// FNV-1a hash of the generator images, the cache key component.
std::uint64_t generator_set_hash(const std::vector<Automorphism>& gens);

struct ModPrimeReport {
    int q = 0;
    std::uint64_t order = 0;
    bool capped = false;
    mpz_class gl_order;  // |GL_{n-1}(F_q)|
    mpz_class sl_order;  // |SL_{n-1}(F_q)|
};

/// Order of the image of the cached generators in GL_{n-1}(F_q) by
/// breadth-first closure; q must be a residue field size of the level
/// (prime <= 13 for s = 2; one of 4, 7, 13, 25 for s = 3).
ModPrimeReport mod_prime_image_order(const RepSet& rs, const KernelDescriptor& chi, int q,
                                     std::uint64_t cap = 4000000);

mpz_class gl_order(int d, int q);

}  // namespace torwalk
