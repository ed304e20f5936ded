#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef TORWALK_BIN
#error "TORWALK_BIN must point at the torwalk executable"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int status = -1;
    std::string out;
};

// Runs the CLI through the shell, capturing stdout (stderr folded in).
RunResult run_cli(const std::string& args, const std::string& env = "") {
    std::string cmd = env.empty() ? "" : env + " ";
    cmd += std::string(TORWALK_BIN) + " " + args + " 2>&1";
    RunResult r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int rc = pclose(p);
    r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return r;
}

fs::path scratch_dir() {
    fs::path d = fs::temp_directory_path() / "torwalk-cli-tests";
    fs::create_directories(d);
    return d;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_CASE("version and usage") {
    CHECK(run_cli("--version").out.find("0.1.0") != std::string::npos);
    RunResult r = run_cli("definitely-not-a-subcommand");
    CHECK(r.status == 2);
    CHECK(run_cli("").status == 2);  // a subcommand is required
}

TEST_CASE("factor subcommand") {
    RunResult r = run_cli("factor t^2-1");
    REQUIRE(r.status == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("irreducible") == false);
    REQUIRE(j.at("factors").size() == 2);
    CHECK(j.at("factors")[0] == "t - 1");
    CHECK(j.at("factors")[1] == "t + 1");

    RunResult irr = run_cli("factor t^2+t+1");
    REQUIRE(irr.status == 0);
    auto ji = nlohmann::json::parse(irr.out);
    CHECK(ji.at("irreducible") == true);
    CHECK(ji.at("factors").size() == 1);

    CHECK(run_cli("factor qq").status == 2);
    CHECK(run_cli("factor 2*t^2-1").status == 2);   // not monic
    CHECK(run_cli("factor t^9+1").status == 2);     // degree cap
}

TEST_CASE("certify subcommand") {
    RunResult r = run_cli("certify --n 3 K13");
    REQUIRE(r.status == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("word") == "K13");
    REQUIRE(!j.at("iwip_certificate").is_null());
    CHECK(j.at("iwip_certificate").at("condition") == "reducible");
    CHECK(j.at("iwip_verdict") == "non-iwip certificate found");
    CHECK(j.at("disclaimer").get<std::string>().find("necessary") != std::string::npos);

    RunResult empty = run_cli("certify --n 3");
    REQUIRE(empty.status == 0);
    auto je = nlohmann::json::parse(empty.out);
    REQUIRE(!je.at("iwip_certificate").is_null());
    REQUIRE(!je.at("hyperbolic_certificate").is_null());
    CHECK(je.at("iwip_certificate").at("m") == 1);
    CHECK(je.at("hyperbolic_certificate").at("m") == 1);

    CHECK(run_cli("certify --n 3 K1").status == 2);
    CHECK(run_cli("certify --n 3 K12^x").status == 2);
    CHECK(run_cli("certify --n 2 K12").status == 2);
}

TEST_CASE("reps subcommand and walk pipeline") {
    fs::path dir = scratch_dir();
    fs::path cache = dir / "repset3.json";
    fs::remove(cache);

    CHECK(run_cli("reps --n 2").status == 2);

    RunResult r = run_cli("reps --n 3 --out " + cache.string());
    REQUIRE(r.status == 0);
    CHECK(r.out.find("kernels") != std::string::npos);
    REQUIRE(fs::exists(cache));

    // rerun: byte-identical apart from the manifest timestamp
    std::string before = read_file(cache);
    RunResult r2 = run_cli("reps --n 3 --out " + cache.string());
    REQUIRE(r2.status == 0);
    std::string after = read_file(cache);
    auto strip = [](const std::string& text) {
        std::string out;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line))
            if (line.find("\"written\"") == std::string::npos) out += line + "\n";
        return out;
    };
    CHECK(strip(before) == strip(after));

    // walk against the cache: deterministic 4-row CSV for two detectors
    fs::path config = dir / "walk.json";
    write_file(config, R"({
      "schema": "torwalk.config/1",
      "target": {"kind": "torelli", "n": 3},
      "k_grid": [2, 4],
      "samples_per_k": 10,
      "master_seed": 1,
      "repset_cache": ")" + cache.string() + R"("
    })");
    fs::path prefix = dir / "run1";
    RunResult w = run_cli("walk --config " + config.string() + " --out " + prefix.string());
    REQUIRE(w.status == 0);
    std::string csv = read_file(prefix.string() + ".csv");
    int lines = 0;
    for (char c : csv) lines += c == '\n';
    CHECK(lines == 5);  // header + 2 k values x 2 detectors
    CHECK(csv.rfind("target,detector,k,samples,positives,p_hat,ci_lo,ci_hi", 0) == 0);

    fs::path prefix2 = dir / "run2";
    RunResult w2 = run_cli("walk --config " + config.string() + " --out " + prefix2.string());
    REQUIRE(w2.status == 0);
    CHECK(read_file(prefix2.string() + ".csv") == csv);

    auto report = nlohmann::json::parse(read_file(prefix.string() + ".json"));
    CHECK(report.at("schema") == "torwalk.report/1");
    CHECK(report.at("manifest").contains("config_hash"));
    CHECK(report.at("cells").size() == 4);

    // missing cache: the error must point at the reps subcommand
    fs::path config_missing = dir / "walk-missing.json";
    write_file(config_missing, R"({
      "target": {"kind": "torelli", "n": 3},
      "k_grid": [2],
      "samples_per_k": 5,
      "master_seed": 1,
      "repset_cache": ")" + (dir / "no-such-cache.json").string() + R"("
    })");
    RunResult miss = run_cli("walk --config " + config_missing.string());
    CHECK(miss.status == 1);
    CHECK(miss.out.find("reps --n 3") != std::string::npos);
}

TEST_CASE("walk flags, env and svg") {
    fs::path dir = scratch_dir();
    fs::path config = dir / "gamma.json";
    write_file(config, R"({
      "target": {"kind": "sl_eisenstein", "d": 2},
      "k_grid": [2, 4],
      "samples_per_k": 15,
      "master_seed": 3
    })");

    fs::path p1 = dir / "g1";
    fs::path svg = dir / "plot.svg";
    RunResult r = run_cli("walk --config " + config.string() + " --out " + p1.string() +
                          " --plot " + svg.string());
    REQUIRE(r.status == 0);
    std::string svg_text = read_file(svg);
    CHECK(svg_text.find("<svg") != std::string::npos);
    CHECK(svg_text.find("gamma_zt") != std::string::npos);

    // env override changes the seed; flag wins over env
    fs::path p2 = dir / "g2";
    RunResult env_run = run_cli("walk --config " + config.string() + " --out " + p2.string(),
                                "TORWALK_SEED=99");
    REQUIRE(env_run.status == 0);
    auto j2 = nlohmann::json::parse(read_file(p2.string() + ".json"));
    CHECK(j2.at("config").at("master_seed") == 99);

    fs::path p3 = dir / "g3";
    RunResult flag_run = run_cli("walk --config " + config.string() + " --out " + p3.string() +
                                     " --seed 7",
                                 "TORWALK_SEED=99");
    REQUIRE(flag_run.status == 0);
    auto j3 = nlohmann::json::parse(read_file(p3.string() + ".json"));
    CHECK(j3.at("config").at("master_seed") == 7);

    // thread count must not change results
    fs::path p4 = dir / "g4";
    RunResult t_run = run_cli("walk --config " + config.string() + " --out " + p4.string(),
                              "TORWALK_THREADS=3");
    REQUIRE(t_run.status == 0);
    CHECK(read_file(p4.string() + ".csv") == read_file(p1.string() + ".csv"));

    // schema violations are listed exhaustively
    fs::path bad = dir / "bad.json";
    write_file(bad, R"({
      "target": {"kind": "sl_eisenstein", "d": 2},
      "k_grid": [4, 2],
      "samples_per_k": 0,
      "master_seed": 3,
      "detectors": ["iwip"]
    })");
    RunResult b = run_cli("walk --config " + bad.string());
    CHECK(b.status == 2);
    CHECK(b.out.find("config errors") != std::string::npos);
    CHECK(b.out.find("samples_per_k") != std::string::npos);
    CHECK(b.out.find("iwip") != std::string::npos);

    RunResult nocfg = run_cli("walk --config " + (dir / "nope.json").string());
    CHECK(nocfg.status == 1);
}
