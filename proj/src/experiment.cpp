#include "torwalk/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <omp.h>

namespace torwalk {

std::string target_kind_name(TargetKind k) {
    switch (k) {
        case TargetKind::torelli: return "torelli";
        case TargetKind::sl_eisenstein: return "sl_eisenstein";
        case TargetKind::sl_int: return "sl_int";
    }
    throw std::logic_error("unreachable target kind");
}

TargetKind target_kind_from_name(const std::string& name) {
    if (name == "torelli") return TargetKind::torelli;
    if (name == "sl_eisenstein") return TargetKind::sl_eisenstein;
    if (name == "sl_int") return TargetKind::sl_int;
    throw std::invalid_argument("unknown target kind: " + name);
}

std::string WalkConfig::target_label() const {
    return target_kind_name(target) + "(" + std::to_string(target_dim) + ")";
}

std::vector<std::string> default_detectors(TargetKind k) {
    switch (k) {
        case TargetKind::torelli: return {"iwip", "hyperbolic"};
        case TargetKind::sl_eisenstein: return {"gamma_trace", "gamma_zt", "gamma_multiroot"};
        case TargetKind::sl_int: return {"reducible_power"};
    }
    throw std::logic_error("unreachable target kind");
}

std::vector<std::string> validate_config(const WalkConfig& cfg) {
    std::vector<std::string> errs;
    if (cfg.target == TargetKind::torelli) {
        if (cfg.target_dim < 3 || cfg.target_dim > 5)
            errs.push_back("torelli target needs rank n in {3,4,5}");
    } else if (cfg.target_dim < 2) {
        errs.push_back("matrix targets need dimension d >= 2");
    }
    if (cfg.k_grid.empty()) errs.push_back("k_grid must be nonempty");
    for (std::size_t i = 0; i < cfg.k_grid.size(); ++i) {
        if (cfg.k_grid[i] < 0) errs.push_back("k_grid entries must be >= 0");
        if (i > 0 && cfg.k_grid[i] <= cfg.k_grid[i - 1]) {
            errs.push_back("k_grid must be strictly increasing");
            break;
        }
    }
    if (cfg.samples_per_k < 1) errs.push_back("samples_per_k must be >= 1");
    if (cfg.detector_cfg.power_bound < 1) errs.push_back("power_bound must be >= 1");
    if (cfg.threads < 0) errs.push_back("threads must be >= 0");
    const auto known = default_detectors(cfg.target);
    for (const std::string& d : cfg.detectors)
        if (std::find(known.begin(), known.end(), d) == known.end())
            errs.push_back("detector '" + d + "' not available for target " +
                           target_kind_name(cfg.target));
    return errs;
}

nlohmann::ordered_json config_to_json(const WalkConfig& cfg) {
    nlohmann::ordered_json j;
    j["schema"] = "torwalk.config/1";
    nlohmann::ordered_json t;
    t["kind"] = target_kind_name(cfg.target);
    t[cfg.target == TargetKind::torelli ? "n" : "d"] = cfg.target_dim;
    j["target"] = std::move(t);
    j["lazy"] = cfg.lazy;
    j["k_grid"] = cfg.k_grid;
    j["samples_per_k"] = cfg.samples_per_k;
    j["master_seed"] = cfg.master_seed;
    j["power_bound"] = cfg.detector_cfg.power_bound;
    j["detectors"] = cfg.detectors.empty() ? default_detectors(cfg.target) : cfg.detectors;
    j["repset_cache"] = cfg.repset_cache;
    j["check_containment"] = cfg.check_containment;
    j["threads"] = cfg.threads;
    return j;
}

WalkConfig config_from_json(const nlohmann::json& j) {
    WalkConfig cfg;
    std::vector<std::string> errs;
    if (j.contains("schema") && j["schema"] != "torwalk.config/1")
        errs.push_back("unknown config schema: " + j["schema"].get<std::string>());
    try {
        const auto& t = j.at("target");
        cfg.target = target_kind_from_name(t.at("kind").get<std::string>());
        if (t.contains("n"))
            cfg.target_dim = t["n"].get<int>();
        else if (t.contains("d"))
            cfg.target_dim = t["d"].get<int>();
        else
            errs.push_back("target needs a rank n or dimension d");
    } catch (const std::exception& e) {
        errs.push_back(std::string("target: ") + e.what());
    }
    auto read = [&](const char* key, auto& slot) {
        if (!j.contains(key)) return;
        try {
            slot = j.at(key).get<std::decay_t<decltype(slot)>>();
        } catch (const std::exception& e) {
            errs.push_back(std::string(key) + ": " + e.what());
        }
    };
    read("lazy", cfg.lazy);
    read("k_grid", cfg.k_grid);
    read("samples_per_k", cfg.samples_per_k);
    read("master_seed", cfg.master_seed);
    read("power_bound", cfg.detector_cfg.power_bound);
    read("detectors", cfg.detectors);
    read("repset_cache", cfg.repset_cache);
    read("check_containment", cfg.check_containment);
    read("threads", cfg.threads);
    if (!errs.empty()) {
        std::string msg = "config errors:";
        for (const std::string& e : errs) msg += "\n  - " + e;
        throw std::invalid_argument(msg);
    }
    return cfg;
}

std::string config_hash(const WalkConfig& cfg) {
    // threads only affects scheduling, never results; keep it out of the hash
    nlohmann::ordered_json j = config_to_json(cfg);
    j.erase("threads");
    const std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<RingMatrix> gamma_generators(TargetKind kind, int d) {
    if (kind == TargetKind::torelli)
        throw std::invalid_argument("gamma_generators: torelli target walks the RepSet");
    if (d < 2) throw std::invalid_argument("gamma_generators needs d >= 2");
    const int level = kind == TargetKind::sl_eisenstein ? 3 : 2;
    std::vector<CycInt> coeffs{CycInt::integer(level, 1)};
    if (level == 3) coeffs.push_back(CycInt::omega());
    std::vector<RingMatrix> out;
    auto shear = [&](int i, int j, const CycInt& c) {
        RingMatrix m = RingMatrix::identity(level, d);
        m.at(i, j) = c;
        return m;
    };
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (i != j)
                for (const CycInt& c : coeffs) out.push_back(shear(i, j, c));
    const std::size_t half = out.size();
    for (std::size_t e = 0; e < half; ++e) out.push_back(mat_inverse_unit(out[e]));
    return out;
}

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

std::uint64_t sample_stream_seed(std::uint64_t master_seed, int k, long sample_index) {
    std::uint64_t h = mix64(master_seed);
    h = mix64(h ^ static_cast<std::uint64_t>(k));
    h = mix64(h ^ static_cast<std::uint64_t>(sample_index));
    return h;
}

std::uint64_t uniform_below(SplitMix64& rng, std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below needs bound >= 1");
    const std::uint64_t limit = ~0ull - ~0ull % bound;
    for (;;) {
        const std::uint64_t v = rng.next();
        if (v < limit) return v % bound;
    }
}

std::vector<Automorphism> torelli_alphabet_automorphisms(const RepSet& rs, bool lazy) {
    std::vector<Automorphism> out = rs.generators;
    for (const Automorphism& g : rs.generators) out.push_back(invert(g));
    if (lazy) out.push_back(identity_automorphism(rs.n));
    return out;
}

WalkContext make_walk_context(const WalkConfig& cfg, const RepSet* rs) {
    WalkContext ctx;
    ctx.cfg = cfg;
    if (ctx.cfg.detectors.empty()) ctx.cfg.detectors = default_detectors(cfg.target);
    auto errs = validate_config(ctx.cfg);
    if (!errs.empty()) {
        std::string msg = "invalid walk config:";
        for (const std::string& e : errs) msg += "\n  - " + e;
        throw std::invalid_argument(msg);
    }
    if (cfg.target == TargetKind::torelli) {
        if (!rs) throw std::invalid_argument("torelli target requires a loaded RepSet");
        if (rs->n != cfg.target_dim)
            throw std::invalid_argument("RepSet rank " + std::to_string(rs->n) +
                                        " does not match target rank " +
                                        std::to_string(cfg.target_dim));
        ctx.repset = rs;
        const std::size_t ng = rs->generators.size();
        ctx.alphabet_size = static_cast<int>(2 * ng) + (cfg.lazy ? 1 : 0);
        ctx.block_alphabet.reserve(rs->blocks.size());
        for (const RepBlock& b : rs->blocks) {
            std::vector<RingMatrix> alpha = b.matrices;
            for (const RingMatrix& m : b.matrices) alpha.push_back(mat_inverse_unit(m));
            if (cfg.lazy) alpha.push_back(RingMatrix::identity(b.kernel.s, rs->n - 1));
            ctx.block_alphabet.push_back(std::move(alpha));
        }
    } else {
        ctx.gamma_alphabet = gamma_generators(cfg.target, cfg.target_dim);
        if (cfg.lazy)
            ctx.gamma_alphabet.push_back(RingMatrix::identity(
                cfg.target == TargetKind::sl_eisenstein ? 3 : 2, cfg.target_dim));
        ctx.alphabet_size = static_cast<int>(ctx.gamma_alphabet.size());
    }
    return ctx;
}

std::vector<int> walk_choices(const WalkContext& ctx, int k, long sample_index) {
    SplitMix64 rng{sample_stream_seed(ctx.cfg.master_seed, k, sample_index)};
    std::vector<int> out(k);
    for (int i = 0; i < k; ++i)
        out[i] = static_cast<int>(uniform_below(rng, ctx.alphabet_size));
    return out;
}

std::vector<RingMatrix> sample_walk(const WalkContext& ctx, int k, long sample_index) {
    const std::vector<int> choices = walk_choices(ctx, k, sample_index);
    if (ctx.cfg.target == TargetKind::torelli) {
        const std::size_t nb = ctx.block_alphabet.size();
        std::vector<RingMatrix> state;
        state.reserve(nb);
        for (const RepBlock& b : ctx.repset->blocks)
            state.push_back(RingMatrix::identity(b.kernel.s, ctx.repset->n - 1));
        for (int c : choices)
            for (std::size_t b = 0; b < nb; ++b)
                state[b] = mat_mul(state[b], ctx.block_alphabet[b][c]);
        return state;
    }
    RingMatrix g = RingMatrix::identity(ctx.gamma_alphabet[0].level, ctx.cfg.target_dim);
    for (int c : choices) g = mat_mul(g, ctx.gamma_alphabet[c]);
    return {g};
}

namespace {

struct SampleOutcome {
    std::uint32_t fired = 0;
    std::optional<std::string> violation;
};

SampleOutcome evaluate_sample(const WalkContext& ctx, int k, long index) {
    const std::vector<RingMatrix> state = sample_walk(ctx, k, index);
    const DetectorConfig& dcfg = ctx.cfg.detector_cfg;
    SampleOutcome out;
    for (std::size_t d = 0; d < ctx.cfg.detectors.size(); ++d) {
        const std::string& name = ctx.cfg.detectors[d];
        bool fired = false;
        if (name == "iwip")
            fired = iwip_certificate(*ctx.repset, state, dcfg).has_value();
        else if (name == "hyperbolic")
            fired = hyperbolic_certificate(*ctx.repset, state, dcfg).has_value();
        else if (name == "gamma_trace")
            fired = gamma_trace_detector(state[0]);
        else if (name == "gamma_zt")
            fired = gamma_zt_detector(state[0], dcfg).has_value();
        else if (name == "gamma_multiroot")
            fired = gamma_multiroot_detector(state[0], dcfg).has_value();
        else if (name == "reducible_power")
            fired = reducible_power_detector(state[0], dcfg).has_value();
        else
            throw std::logic_error("unknown detector slipped past validation: " + name);
        if (fired) out.fired |= 1u << d;
    }
    if (ctx.cfg.check_containment && ctx.cfg.target == TargetKind::sl_eisenstein) {
        if (auto v = check_zt_containment(state[0], dcfg))
            out.violation = "k=" + std::to_string(k) + " sample=" + std::to_string(index) +
                            ": " + *v;
    }
    return out;
}

std::vector<CellStats> make_rows(const WalkContext& ctx, int k,
                                 const std::vector<long>& counts) {
    std::vector<CellStats> rows;
    rows.reserve(counts.size());
    for (std::size_t d = 0; d < counts.size(); ++d) {
        CellStats c;
        c.target = ctx.cfg.target_label();
        c.detector = ctx.cfg.detectors[d];
        c.k = k;
        c.samples = ctx.cfg.samples_per_k;
        c.positives = counts[d];
        c.p_hat = static_cast<double>(counts[d]) / static_cast<double>(c.samples);
        std::tie(c.ci_lo, c.ci_hi) = wilson_interval(c.positives, c.samples);
        rows.push_back(std::move(c));
    }
    return rows;
}

void finish_report(DecayReport& rep) {
    const auto& dets = rep.config.detectors;
    for (const std::string& name : dets) {
        std::vector<std::pair<int, double>> pts;
        int zero_cells = 0;
        for (const CellStats& c : rep.cells) {
            if (c.detector != name) continue;
            if (c.positives > 0)
                pts.emplace_back(c.k, c.p_hat);
            else
                ++zero_cells;
        }
        FitResult f = fit_decay(pts);
        DetectorFit df;
        df.detector = name;
        df.alpha_hat = f.alpha_hat;
        df.intercept = f.intercept;
        df.r2 = f.r2;
        df.cells_used = f.cells_used;
        df.rule_of_three_cells = zero_cells;
        df.rule_of_three_bound =
            rep.config.samples_per_k > 0 ? 3.0 / static_cast<double>(rep.config.samples_per_k) : 0;
        rep.fits.push_back(std::move(df));
    }
}

}  // namespace

std::pair<double, double> wilson_interval(long positives, long samples, double z) {
    if (samples < 1 || positives < 0 || positives > samples)
        throw std::invalid_argument("wilson_interval: need 0 <= positives <= samples, samples >= 1");
    const double n = static_cast<double>(samples);
    const double p = static_cast<double>(positives) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double radius = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - radius), std::min(1.0, center + radius)};
}

FitResult fit_decay(const std::vector<std::pair<int, double>>& k_phat) {
    FitResult r;
    r.cells_used = static_cast<int>(k_phat.size());
    if (k_phat.empty()) return r;
    if (k_phat.size() == 1) {
        r.intercept = std::log(k_phat[0].second);
        r.r2 = 1.0;
        return r;
    }
    double mx = 0, my = 0;
    for (const auto& [k, p] : k_phat) {
        mx += k;
        my += std::log(p);
    }
    mx /= static_cast<double>(k_phat.size());
    my /= static_cast<double>(k_phat.size());
    double sxx = 0, sxy = 0;
    for (const auto& [k, p] : k_phat) {
        const double dx = k - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(p) - my);
    }
    const double slope = sxy / sxx;
    r.alpha_hat = -slope;
    r.intercept = my - slope * mx;
    double ss_res = 0, ss_tot = 0;
    for (const auto& [k, p] : k_phat) {
        const double y = std::log(p);
        const double e = y - (r.intercept + slope * k);
        ss_res += e * e;
        ss_tot += (y - my) * (y - my);
    }
    r.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : (ss_res < 1e-12 ? 1.0 : 0.0);
    return r;
}

DecayReport run_experiment(const WalkConfig& cfg, const RepSet* rs, const CellCallback& on_k_done) {
    const WalkContext ctx = make_walk_context(cfg, rs);
    const int nd = static_cast<int>(ctx.cfg.detectors.size());
    DecayReport rep;
    rep.config = ctx.cfg;
    const int nthreads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
    for (int k : cfg.k_grid) {
        std::vector<long> counts(nd, 0);
        std::vector<std::string> violations;
        std::vector<std::string> errors;
#pragma omp parallel num_threads(nthreads)
        {
            std::vector<long> local(nd, 0);
            std::vector<std::string> lviol;
            std::vector<std::string> lerr;
#pragma omp for schedule(dynamic, 8) nowait
            for (long i = 0; i < cfg.samples_per_k; ++i) {
                try {
                    SampleOutcome out = evaluate_sample(ctx, k, i);
                    for (int d = 0; d < nd; ++d)
                        if (out.fired & (1u << d)) ++local[d];
                    if (out.violation) lviol.push_back(*out.violation);
                } catch (const std::exception& e) {
                    lerr.push_back("k=" + std::to_string(k) + " sample=" + std::to_string(i) +
                                   ": " + e.what());
                }
            }
#pragma omp critical
            {
                for (int d = 0; d < nd; ++d) counts[d] += local[d];
                violations.insert(violations.end(), lviol.begin(), lviol.end());
                errors.insert(errors.end(), lerr.begin(), lerr.end());
            }
        }
        if (!errors.empty()) {
            std::sort(errors.begin(), errors.end());
            throw std::runtime_error("experiment failed: " + errors.front());
        }
        std::sort(violations.begin(), violations.end());
        rep.containment_violations.insert(rep.containment_violations.end(), violations.begin(),
                                          violations.end());
        std::vector<CellStats> rows = make_rows(ctx, k, counts);
        rep.cells.insert(rep.cells.end(), rows.begin(), rows.end());
        if (on_k_done) on_k_done(rows);
    }
    finish_report(rep);
    return rep;
}

DecayReport run_experiment_serial(const WalkConfig& cfg, const RepSet* rs,
                                  const CellCallback& on_k_done) {
    const WalkContext ctx = make_walk_context(cfg, rs);
    const int nd = static_cast<int>(ctx.cfg.detectors.size());
    DecayReport rep;
    rep.config = ctx.cfg;
    for (int k : cfg.k_grid) {
        std::vector<long> counts(nd, 0);
        std::vector<std::string> violations;
        for (long i = 0; i < cfg.samples_per_k; ++i) {
            SampleOutcome out = evaluate_sample(ctx, k, i);
            for (int d = 0; d < nd; ++d)
                if (out.fired & (1u << d)) ++counts[d];
            if (out.violation) violations.push_back(*out.violation);
        }
        std::sort(violations.begin(), violations.end());
        rep.containment_violations.insert(rep.containment_violations.end(), violations.begin(),
                                          violations.end());
        std::vector<CellStats> rows = make_rows(ctx, k, counts);
        rep.cells.insert(rep.cells.end(), rows.begin(), rows.end());
        if (on_k_done) on_k_done(rows);
    }
    finish_report(rep);
    return rep;
}

}  // namespace torwalk
