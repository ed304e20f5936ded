#pragma once
// Certificate predicates: non-iwip and non-hyperbolic certificates over the
// kernel representations, and the Gamma-level detectors (rational trace,
// integer characteristic polynomial, repeated embedded roots, reducible
// powers).  All are necessary-condition detectors: a firing certifies
// membership in the bad set's superset, a no-fire proves nothing beyond the
// scanned power range.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "torwalk/polymat.hpp"
#include "torwalk/reps.hpp"

namespace torwalk {

struct DetectorConfig {
    int power_bound = 12;
    std::vector<long> primes = kIrreducibilityPrimes;
};

struct Witness {
    std::string detector;
    std::optional<KernelDescriptor> kernel;
    int m = 0;
    std::string condition;  // reducible | integer-poly | trace | discriminant
    CycPoly poly;
    std::optional<CycPoly> factor;
};

nlohmann::ordered_json witness_to_json(const Witness& w);

/// Re-evaluates the stated condition against the matrix the witness came
/// from (the per-kernel image for certificates, g itself for detectors).
bool verify_witness(const Witness& w, const RingMatrix& g);

/// mats must be aligned with rs.blocks (one rho image of the same phi per
/// kernel).  Scans m = 1..M outer, kernels inner; fires on reducible
/// charpoly at s = 2 or integer charpoly at s = 3.
std::optional<Witness> iwip_certificate(const RepSet& rs, const std::vector<RingMatrix>& mats,
                                        const DetectorConfig& cfg);

/// Same scan restricted to s = 2 kernels and the reducibility condition.
std::optional<Witness> hyperbolic_certificate(const RepSet& rs,
                                              const std::vector<RingMatrix>& mats,
                                              const DetectorConfig& cfg);

/// trace(g) rational.
bool gamma_trace_detector(const RingMatrix& g);

/// charpoly(g^m) has integer coefficients for some m <= M.
std::optional<Witness> gamma_zt_detector(const RingMatrix& g, const DetectorConfig& cfg);

/// discriminant(charpoly(restrict_scalars(g)^m)) = 0 for some m <= M.
std::optional<Witness> gamma_multiroot_detector(const RingMatrix& g, const DetectorConfig& cfg);

/// charpoly(g^m) reducible over Z for some m <= M (integer matrices).
std::optional<Witness> reducible_power_detector(const RingMatrix& g, const DetectorConfig& cfg);

/// Containment invariant: a Z[t]-detector firing at m0 with irrational
/// trace must be accompanied by a vanishing embedded discriminant at some
/// m <= M * m0.  Returns a verbatim violation description, or nullopt when
/// consistent.
std::optional<std::string> check_zt_containment(const RingMatrix& g, const DetectorConfig& cfg);

}  // namespace torwalk
