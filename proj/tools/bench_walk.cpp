// Compares the serial reference engine with the OpenMP engine on the same
// config and checks that their reports agree row for row.

#include <algorithm>
#include <chrono>
#include <cstring>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <omp.h>

#include "torwalk/experiment.hpp"

using namespace torwalk;

namespace {

double seconds(const std::function<void()>& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::string> rows_of(const DecayReport& rep) {
    std::vector<std::string> rows;
    for (const CellStats& c : rep.cells) rows.push_back(csv_row(c));
    return rows;
}

int bench_target(const WalkConfig& base, const RepSet* rs) {
    WalkConfig cfg = base;
    std::cout << "== " << cfg.target_label() << ": " << cfg.samples_per_k << " samples/k, k up to "
              << cfg.k_grid.back() << " ==\n";

    DecayReport serial_rep;
    double t_serial = seconds([&] { serial_rep = run_experiment_serial(cfg, rs); });
    std::cout << "  serial reference: " << t_serial << " s\n";

    int status = 0;
    std::vector<int> counts{1, 2, omp_get_max_threads()};
    std::sort(counts.begin(), counts.end());
    counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
    for (int threads : counts) {
        cfg.threads = threads;
        DecayReport par_rep;
        double t_par = seconds([&] { par_rep = run_experiment(cfg, rs); });
        bool same = rows_of(par_rep) == rows_of(serial_rep);
        std::cout << "  openmp x" << threads << ":        " << t_par << " s  (speedup "
                  << (t_par > 0 ? t_serial / t_par : 0) << ", rows "
                  << (same ? "identical" : "DIFFER") << ")\n";
        if (!same) status = 1;
    }
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    bool quick = false;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--quick") == 0) quick = true;

    int status = 0;

    WalkConfig gamma;
    gamma.target = TargetKind::sl_eisenstein;
    gamma.target_dim = 2;
    gamma.k_grid = quick ? std::vector<int>{4, 8} : std::vector<int>{4, 8, 16, 24};
    gamma.samples_per_k = quick ? 200 : 1500;
    gamma.master_seed = 20240901;
    status |= bench_target(gamma, nullptr);

    RepSet rs = build_torelli_repset(3);
    WalkConfig torelli;
    torelli.target = TargetKind::torelli;
    torelli.target_dim = 3;
    torelli.k_grid = quick ? std::vector<int>{4, 8} : std::vector<int>{4, 8, 16};
    torelli.samples_per_k = quick ? 100 : 600;
    torelli.master_seed = 20240902;
    status |= bench_target(torelli, &rs);

    if (status != 0) std::cerr << "engines disagree\n";
    return status;
}
