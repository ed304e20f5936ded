// torwalk: representations of the Torelli-analog subgroup T_n on index-s
// kernel abelianizations, certificate detectors for non-iwip/non-hyperbolic
// elements, and seeded random-walk decay experiments.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "torwalk/detectors.hpp"
#include "torwalk/experiment.hpp"
#include "torwalk/freegroup.hpp"
#include "torwalk/reps.hpp"
#include "torwalk/selftest.hpp"
#include "torwalk/version.hpp"

namespace {

using namespace torwalk;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int cmd_reps(int n, std::string out_path) {
    if (n == 2) throw UsageError("n = 2 is excluded: T_2 = Inn(F_2) and rho is trivial there");
    if (n < 3 || n > 5) throw UsageError("n must be 3, 4 or 5");
    if (out_path.empty()) out_path = "repset-n" + std::to_string(n) + ".json";

    RepSet rs = build_torelli_repset(n);
    validate_repset(rs);
    save_repset(rs, out_path);

    std::size_t mats = 0;
    for (const RepBlock& b : rs.blocks) mats += b.matrices.size();
    std::cout << "generators: " << rs.generators.size() << "\n"
              << "kernels:    " << rs.level_blocks(2).size() << " at s=2, "
              << rs.level_blocks(3).size() << " at s=3\n"
              << "matrices:   " << mats << " (validated: homomorphism spot checks, "
              << "unit determinants, inverse images)\n"
              << "cache:      " << out_path << "\n";
    return 0;
}

int cmd_certify(int n, int power_bound, const std::vector<std::string>& tokens) {
    if (n < 3 || n > 5) throw UsageError("n must be 3, 4 or 5");
    auto gens = magnus_generators(n);
    auto names = magnus_generator_names(n);

    Automorphism phi = identity_automorphism(n);
    std::string word_text;
    for (const std::string& tok : tokens) {
        std::string name = tok;
        long exp = 1;
        if (auto caret = tok.find('^'); caret != std::string::npos) {
            name = tok.substr(0, caret);
            try {
                std::size_t used = 0;
                exp = std::stol(tok.substr(caret + 1), &used);
                if (used != tok.size() - caret - 1) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw UsageError("malformed exponent in token '" + tok + "'");
            }
        }
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end())
            throw UsageError("unknown generator '" + name + "' (expected K<ab> or K<abc>, e.g. " +
                             names.front() + ")");
        const Automorphism& g = gens[static_cast<std::size_t>(it - names.begin())];
        Automorphism step = exp >= 0 ? g : invert(g);
        for (long i = 0; i < std::labs(exp); ++i) phi = compose(phi, step);
        if (!word_text.empty()) word_text += ' ';
        word_text += tok;
    }

    RepSet rs = build_torelli_repset(n);
    std::vector<RingMatrix> mats;
    mats.reserve(rs.blocks.size());
    for (const RepBlock& b : rs.blocks) mats.push_back(rho(phi, b.kernel));

    DetectorConfig cfg;
    cfg.power_bound = power_bound;
    auto iwip = iwip_certificate(rs, mats, cfg);
    auto hyp = hyperbolic_certificate(rs, mats, cfg);

    nlohmann::ordered_json out;
    out["schema"] = "torwalk.certify/1";
    out["version"] = kVersion;
    out["n"] = n;
    out["word"] = word_text;
    out["power_bound"] = power_bound;
    out["iwip_certificate"] = iwip ? witness_to_json(*iwip) : nlohmann::ordered_json(nullptr);
    out["hyperbolic_certificate"] =
        hyp ? witness_to_json(*hyp) : nlohmann::ordered_json(nullptr);
    std::string bound = "no certificate up to M = " + std::to_string(power_bound);
    out["iwip_verdict"] = iwip ? "non-iwip certificate found" : bound;
    out["hyperbolic_verdict"] = hyp ? "non-hyperbolic certificate found" : bound;
    out["disclaimer"] =
        "certificates are necessary conditions for the bad sets; the absence of a "
        "certificate does not prove the element iwip or hyperbolic";
    std::cout << out.dump(1) << "\n";
    return 0;
}

std::optional<std::uint64_t> env_u64(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    char* end = nullptr;
    std::uint64_t x = std::strtoull(v, &end, 10);
    if (end == v || *end) throw UsageError(std::string(name) + " is not an integer: " + v);
    return x;
}

int cmd_walk(const std::string& config_path, std::string out_prefix,
             const std::string& plot_path, std::optional<std::uint64_t> seed_flag,
             std::optional<int> threads_flag) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot read config: " + config_path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("config is not valid JSON: " + std::string(e.what()));
    }
    WalkConfig cfg = config_from_json(j);

    // precedence: flag > environment > config file
    if (auto s = env_u64("TORWALK_SEED")) cfg.master_seed = *s;
    if (auto t = env_u64("TORWALK_THREADS")) cfg.threads = static_cast<int>(*t);
    if (seed_flag) cfg.master_seed = *seed_flag;
    if (threads_flag) cfg.threads = *threads_flag;

    auto errs = validate_config(cfg);
    if (cfg.target == TargetKind::torelli && cfg.repset_cache.empty())
        errs.push_back("torelli target needs repset_cache; build one with the reps subcommand");
    if (!errs.empty()) {
        std::cerr << "config errors (" << errs.size() << "):\n";
        for (const std::string& e : errs) std::cerr << "  - " << e << "\n";
        return 2;
    }

    RepSet rs;
    const RepSet* rsp = nullptr;
    if (cfg.target == TargetKind::torelli) {
        std::ifstream probe(cfg.repset_cache);
        if (!probe)
            throw std::runtime_error("repset cache '" + cfg.repset_cache +
                                     "' not found; create it with: torwalk reps --n " +
                                     std::to_string(cfg.target_dim) + " --out " +
                                     cfg.repset_cache);
        rs = load_repset(cfg.repset_cache);
        validate_repset(rs);
        rsp = &rs;
    }

    if (out_prefix.empty()) out_prefix = "torwalk-" + cfg.target_label();
    const std::string csv_path = out_prefix + ".csv";
    const std::string json_path = out_prefix + ".json";

    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot write " + csv_path);
    csv << csv_header() << "\n" << std::flush;
    CellCallback flush_rows = [&csv](const std::vector<CellStats>& rows) {
        for (const CellStats& c : rows) csv << csv_row(c) << "\n";
        csv << std::flush;
    };

    DecayReport rep = run_experiment(cfg, rsp, flush_rows);
    csv.close();

    std::vector<std::string> outputs{csv_path, json_path};
    if (!plot_path.empty()) outputs.push_back(plot_path);
    RunManifest manifest = make_manifest(cfg, outputs);

    std::ofstream js(json_path);
    if (!js) throw std::runtime_error("cannot write " + json_path);
    js << report_to_json(rep, manifest).dump(1) << "\n";
    js.close();

    if (!plot_path.empty()) {
        std::ofstream svg(plot_path);
        if (!svg) throw std::runtime_error("cannot write " + plot_path);
        svg << report_to_svg(rep, manifest);
    }

    std::cout << "target " << cfg.target_label() << ", seed " << cfg.master_seed << ", "
              << cfg.samples_per_k << " samples/k over " << cfg.k_grid.size() << " walk lengths\n";
    for (const DetectorFit& f : rep.fits) {
        std::cout << "  " << f.detector << ": alpha_hat = " << f.alpha_hat
                  << ", r2 = " << f.r2 << " (" << f.cells_used << " cells";
        if (f.rule_of_three_cells > 0)
            std::cout << ", " << f.rule_of_three_cells << " zero cells, p <= "
                      << f.rule_of_three_bound << " each";
        std::cout << ")\n";
    }
    std::cout << "wrote " << csv_path << ", " << json_path;
    if (!plot_path.empty()) std::cout << ", " << plot_path;
    std::cout << "\n";

    if (!rep.containment_violations.empty()) {
        std::cerr << "containment violations (" << rep.containment_violations.size() << "):\n";
        for (const std::string& v : rep.containment_violations) std::cerr << v << "\n";
        return 1;
    }
    return 0;
}

int cmd_factor(const std::vector<std::string>& parts) {
    std::string text;
    for (const std::string& p : parts) {
        if (!text.empty()) text += ' ';
        text += p;
    }
    CycPoly f = [&] {
        try {
            return poly_from_string(2, text);
        } catch (const std::exception& e) {
            throw UsageError("cannot parse polynomial '" + text + "': " + e.what());
        }
    }();
    if (!f.is_monic()) throw UsageError("polynomial must be monic");
    if (f.degree() < 1 || f.degree() > 8) throw UsageError("degree must be between 1 and 8");
    if (!is_integer_poly(f)) throw UsageError("polynomial must have integer coefficients");

    std::vector<CycPoly> factors = factor_monic_over_Z(f);
    CycPoly check = CycPoly::constant(CycInt::integer(2, 1));
    for (const CycPoly& g : factors) check = poly_mul(check, g);
    if (!(check == f)) throw std::runtime_error("internal error: factor product mismatch");

    nlohmann::ordered_json out;
    out["schema"] = "torwalk.factor/1";
    out["input"] = poly_to_string(f);
    out["irreducible"] = factors.size() == 1;
    nlohmann::ordered_json fl = nlohmann::ordered_json::array();
    for (const CycPoly& g : factors) fl.push_back(poly_to_string(g));
    out["factors"] = std::move(fl);
    std::cout << out.dump(1) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact representations, certificates and random-walk decay for T_n"};
    app.set_version_flag("--version", torwalk::kVersion);
    app.require_subcommand(1);

    int reps_n = 3;
    std::string reps_out;
    CLI::App* reps = app.add_subcommand("reps", "build and cache the representation set");
    reps->add_option("--n", reps_n, "free group rank (3, 4 or 5)")->required();
    reps->add_option("--out", reps_out, "cache path (default repset-n<n>.json)");

    int cert_n = 3, cert_bound = 12;
    std::vector<std::string> cert_word;
    CLI::App* certify = app.add_subcommand("certify", "run both certificates on a word");
    certify->add_option("--n", cert_n, "free group rank");
    certify->add_option("--power-bound", cert_bound, "max power M scanned")
        ->check(CLI::PositiveNumber);
    certify->add_option("word", cert_word, "word in Magnus generators, e.g. K12 K123^-1");

    std::string walk_config, walk_out, walk_plot;
    std::optional<std::uint64_t> walk_seed;
    std::optional<int> walk_threads;
    CLI::App* walk = app.add_subcommand("walk", "run a random-walk decay experiment");
    walk->add_option("--config", walk_config, "experiment config (JSON)")->required();
    walk->add_option("--out", walk_out, "output prefix (writes <prefix>.csv/.json)");
    walk->add_option("--plot", walk_plot, "also write an SVG decay plot");
    walk->add_option("--seed", walk_seed, "override master seed");
    walk->add_option("--threads", walk_threads, "cap worker threads (0 = runtime default)");

    CLI::App* selftest = app.add_subcommand("selftest", "run the invariant suites");

    std::vector<std::string> factor_text;
    CLI::App* factor = app.add_subcommand("factor", "factor a monic integer polynomial");
    factor->add_option("poly", factor_text, "polynomial text, e.g. t^2-1")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*reps) return cmd_reps(reps_n, reps_out);
        if (*certify) return cmd_certify(cert_n, cert_bound, cert_word);
        if (*walk) return cmd_walk(walk_config, walk_out, walk_plot, walk_seed, walk_threads);
        if (*selftest) return torwalk::run_selftest(std::cout) == 0 ? 0 : 1;
        if (*factor) return cmd_factor(factor_text);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
