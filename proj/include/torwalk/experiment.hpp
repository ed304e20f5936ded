#pragma once
// Seeded random walks on Cayley graphs, evaluated at matrix level, with
// proportion estimates, Wilson intervals, and exponential decay fits.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "torwalk/detectors.hpp"
#include "torwalk/reps.hpp"

namespace torwalk {

enum class TargetKind { torelli, sl_eisenstein, sl_int };

std::string target_kind_name(TargetKind k);
TargetKind target_kind_from_name(const std::string& name);

struct WalkConfig {
    TargetKind target = TargetKind::torelli;
    int target_dim = 3;  // rank n (torelli) or matrix size d (Gamma targets)
    bool lazy = true;
    std::vector<int> k_grid;
    long samples_per_k = 0;
    std::uint64_t master_seed = 0;
    std::vector<std::string> detectors;  // empty = all detectors of the target
    DetectorConfig detector_cfg;
    std::string repset_cache;  // torelli target only
    int threads = 0;           // 0 = runtime default
    bool check_containment = true;  // per-sample invariant on level-3 targets

    std::string target_label() const;
};

/// Exhaustive listing of schema violations; empty means valid.
std::vector<std::string> validate_config(const WalkConfig& cfg);
WalkConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const WalkConfig& cfg);
/// FNV-1a over the canonical config serialization (no timestamps).
std::string config_hash(const WalkConfig& cfg);

/// Names of the detectors a target supports, in report order.
std::vector<std::string> default_detectors(TargetKind k);

/// Elementary matrices E_ij(1) (and E_ij(w) for the Eisenstein target)
/// together with their inverses; symmetric, determinant 1.
std::vector<RingMatrix> gamma_generators(TargetKind kind, int d);

// --- deterministic stream derivation -------------------------------------
// Every sample draws from its own generator seeded by
//   seed = mix64(mix64(mix64(master_seed) ^ k) ^ sample_index)
// where mix64 is the splitmix64 finalizer.  Steps are then chosen by
// rejection sampling, so results are independent of thread scheduling.

std::uint64_t mix64(std::uint64_t x);
std::uint64_t sample_stream_seed(std::uint64_t master_seed, int k, long sample_index);

struct SplitMix64 {
    std::uint64_t state = 0;
    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        return mix64(state);
    }
};

/// Uniform draw from [0, bound) by rejection; bound >= 1.
std::uint64_t uniform_below(SplitMix64& rng, std::uint64_t bound);

/// Prebuilt generator alphabets; immutable and shareable across threads.
struct WalkContext {
    WalkConfig cfg;
    const RepSet* repset = nullptr;                       // torelli
    std::vector<std::vector<RingMatrix>> block_alphabet;  // per block, per symbol
    std::vector<RingMatrix> gamma_alphabet;
    int alphabet_size = 0;
};

WalkContext make_walk_context(const WalkConfig& cfg, const RepSet* rs);

/// Symbol order: generators, then their inverses, then the identity when
/// lazy.  Word-level oracle helpers rebuild the same alphabet in Aut(F_n).
std::vector<Automorphism> torelli_alphabet_automorphisms(const RepSet& rs, bool lazy);

/// The k symbol indices of the given sample.
std::vector<int> walk_choices(const WalkContext& ctx, int k, long sample_index);

/// Walk state after k steps: one matrix per kernel block for the torelli
/// target, a single matrix for Gamma targets.
std::vector<RingMatrix> sample_walk(const WalkContext& ctx, int k, long sample_index);

struct CellStats {
    std::string target;
    std::string detector;
    int k = 0;
    long samples = 0;
    long positives = 0;
    double p_hat = 0;
    double ci_lo = 0;
    double ci_hi = 0;
};

struct DetectorFit {
    std::string detector;
    double alpha_hat = 0;
    double intercept = 0;
    double r2 = 0;
    int cells_used = 0;
    int rule_of_three_cells = 0;
    double rule_of_three_bound = 0;  // 3/N on zero-count cells
};

struct DecayReport {
    WalkConfig config;
    std::vector<CellStats> cells;  // k ascending, detectors in report order
    std::vector<DetectorFit> fits;
    std::vector<std::string> containment_violations;
};

std::pair<double, double> wilson_interval(long positives, long samples, double z = 1.96);

struct FitResult {
    double alpha_hat = 0;
    double intercept = 0;
    double r2 = 0;
    int cells_used = 0;
};

/// Least squares of log p over k on cells with p > 0; alpha_hat = -slope.
FitResult fit_decay(const std::vector<std::pair<int, double>>& k_phat);

using CellCallback = std::function<void(const std::vector<CellStats>&)>;

/// Monte Carlo estimate of detector proportions per walk length.  Counts
/// are aggregated commutatively and the fit runs after aggregation, so the
/// report is a pure function of cfg regardless of thread count.  on_k_done,
/// when given, receives each k's rows as they complete (incremental flush).
DecayReport run_experiment(const WalkConfig& cfg, const RepSet* rs = nullptr,
                           const CellCallback& on_k_done = nullptr);

/// Single-threaded reference implementation with the same contract; kept
/// deliberately plain for differential testing and benchmarking.
DecayReport run_experiment_serial(const WalkConfig& cfg, const RepSet* rs = nullptr,
                                  const CellCallback& on_k_done = nullptr);

// --- report emission -------------------------------------------------------

struct RunManifest {
    std::string version;
    std::string config_hash;
    std::string timestamp;  // excluded from the hash
    std::vector<std::string> outputs;
};

RunManifest make_manifest(const WalkConfig& cfg, std::vector<std::string> outputs);

std::string csv_header();
std::string csv_row(const CellStats& c);
void write_report_csv(const DecayReport& rep, std::ostream& out);
/// Parses a CSV produced by write_report_csv (round-trip reader).
std::vector<CellStats> read_csv_report(std::istream& in);

nlohmann::ordered_json report_to_json(const DecayReport& rep, const RunManifest& manifest);
/// Log-scale scatter of p_hat over k with the fitted line per detector.
std::string report_to_svg(const DecayReport& rep, const RunManifest& manifest);

}  // namespace torwalk
