#include "torwalk/selftest.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "torwalk/detectors.hpp"
#include "torwalk/experiment.hpp"
#include "torwalk/freegroup.hpp"
#include "torwalk/reps.hpp"

namespace torwalk {

namespace {

struct Reporter {
    std::ostream& out;
    int failures = 0;
    int checks = 0;

    void check(bool ok, const std::string& what) {
        ++checks;
        if (!ok) {
            ++failures;
            out << "  FAIL: " << what << "\n";
        }
    }
    void section(const std::string& name) { out << "[selftest] " << name << "\n"; }
};

Word random_word(SplitMix64& rng, int n, int len) {
    std::vector<int> letters;
    letters.reserve(len);
    for (int i = 0; i < len; ++i) {
        int g = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n))) + 1;
        letters.push_back(uniform_below(rng, 2) ? g : -g);
    }
    return reduce(n, letters);
}

Word random_kernel_word(SplitMix64& rng, int n, int s, int len) {
    Word w = random_word(rng, n, len);
    long e = 0;
    for (int l : w.letters)
        if (std::abs(l) == n) e += l > 0 ? 1 : -1;
    int r = static_cast<int>(((e % s) + s) % s);
    std::vector<int> fix(w.letters);
    for (int i = 0; i < r; ++i) fix.push_back(-n);
    return reduce(n, fix);
}

Automorphism random_torelli(SplitMix64& rng, const std::vector<Automorphism>& gens, int len) {
    Automorphism a = identity_automorphism(gens[0].rank);
    for (int i = 0; i < len; ++i) {
        const Automorphism& g = gens[uniform_below(rng, gens.size())];
        a = compose(a, uniform_below(rng, 2) ? g : invert(g));
    }
    return a;
}

CycInt random_eisenstein(SplitMix64& rng, long range) {
    long a = static_cast<long>(uniform_below(rng, 2 * range + 1)) - range;
    long b = static_cast<long>(uniform_below(rng, 2 * range + 1)) - range;
    return CycInt(3, a, b);
}

// Independent characteristic polynomial: cofactor expansion of det(tI - M)
// over the polynomial ring.
CycPoly cofactor_charpoly(const RingMatrix& m) {
    const int d = m.dim;
    std::vector<CycPoly> a(static_cast<std::size_t>(d) * d, CycPoly::zero(m.level));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            CycPoly e = CycPoly::constant(cyc_neg(m.at(i, j)));
            if (i == j) e = poly_add(e, CycPoly::t(m.level));
            a[static_cast<std::size_t>(i) * d + j] = std::move(e);
        }
    std::function<CycPoly(std::vector<int>, int)> det = [&](std::vector<int> cols,
                                                            int row) -> CycPoly {
        if (cols.empty()) return CycPoly::constant(CycInt::integer(m.level, 1));
        CycPoly acc = CycPoly::zero(m.level);
        for (std::size_t t = 0; t < cols.size(); ++t) {
            std::vector<int> rest;
            for (std::size_t u = 0; u < cols.size(); ++u)
                if (u != t) rest.push_back(cols[u]);
            CycPoly term = poly_mul(a[static_cast<std::size_t>(row) * d + cols[t]],
                                    det(rest, row + 1));
            acc = t % 2 == 0 ? poly_add(acc, term) : poly_sub(acc, term);
        }
        return acc;
    };
    std::vector<int> cols(d);
    for (int j = 0; j < d; ++j) cols[j] = j;
    return det(cols, 0);
}

void suite_freegroup(Reporter& rep, SplitMix64& rng) {
    rep.section("free group");
    for (int t = 0; t < 50; ++t) {
        Word w = random_word(rng, 3, 12);
        rep.check(word_multiply(w, word_invert(w)).letters.empty(), "w * w^-1 reduces to 1");
    }
    auto gens = magnus_generators(3);
    rep.check(gens.size() == 9, "9 Magnus generators at n = 3");
    for (const Automorphism& g : gens) {
        rep.check(is_in_torelli(g), "Magnus generator in T_n");
        rep.check(compose(g, invert(g)) == identity_automorphism(3), "g g^-1 = id");
    }
    for (int t = 0; t < 20; ++t) {
        Automorphism a = random_torelli(rng, gens, 4);
        Word w = random_word(rng, 3, 8);
        Word u = random_word(rng, 3, 8);
        rep.check(apply(a, word_multiply(w, u)) == word_multiply(apply(a, w), apply(a, u)),
                  "automorphisms are homomorphisms");
    }
}

void suite_cyclotomic(Reporter& rep, SplitMix64& rng) {
    rep.section("cyclotomic arithmetic");
    const CycInt omega = CycInt::omega();
    rep.check(cyc_mul(omega, omega) == CycInt(3, -1, -1), "omega^2 = -1 - omega");
    rep.check(cyc_conj(omega) == cyc_mul(omega, omega), "conj(omega) = omega^2");
    for (int t = 0; t < 200; ++t) {
        CycInt x = random_eisenstein(rng, 9), y = random_eisenstein(rng, 9);
        rep.check(cyc_norm(cyc_mul(x, y)) == cyc_norm(x) * cyc_norm(y), "norm multiplicative");
        auto px = psi(x), py = psi(y), pxy = psi(cyc_mul(x, y));
        std::array<mpz_class, 4> prod{px[0] * py[0] + px[1] * py[2], px[0] * py[1] + px[1] * py[3],
                                      px[2] * py[0] + px[3] * py[2], px[2] * py[1] + px[3] * py[3]};
        rep.check(prod == pxy, "psi multiplicative");
        rep.check(is_rational(x) == (psi(x)[2] == 0), "(2,1)-entry criterion");
    }
    for (int t = 0; t < 30; ++t) {
        RingMatrix m(3, 2);
        for (CycInt& e : m.entries) e = random_eisenstein(rng, 5);
        CycPoly lhs = charpoly(restrict_scalars(m));
        CycPoly rhs = poly_mul(charpoly(m), poly_conj(charpoly(m)));
        rep.check(lhs == poly_to_level(rhs, 2), "f_phi(g) = f_g conj(f_g)");
    }
}

void suite_polymat(Reporter& rep, SplitMix64& rng) {
    rep.section("polynomials and matrices");
    for (int t = 0; t < 40; ++t) {
        int d = 1 + static_cast<int>(uniform_below(rng, 4));
        RingMatrix m(3, d);
        for (CycInt& e : m.entries) e = random_eisenstein(rng, 6);
        rep.check(charpoly(m) == cofactor_charpoly(m), "Berkowitz matches cofactor oracle");
    }
    rep.check(discriminant(make_int_poly(2, {1, 3, 1})) == 5, "disc(t^2+3t+1) = 5");
    rep.check(discriminant(make_int_poly(2, {0, -1, 0, 1})) == 4, "disc(t^3-t) = 4");
    rep.check(discriminant(make_int_poly(2, {1, -2, 1})) == 0, "disc((t-1)^2) = 0");
    for (int t = 0; t < 60; ++t) {
        auto rand_monic = [&](int deg) {
            std::vector<long> cs;
            for (int i = 0; i < deg; ++i)
                cs.push_back(static_cast<long>(uniform_below(rng, 11)) - 5);
            cs.push_back(1);
            return make_int_poly(2, cs);
        };
        CycPoly f = rand_monic(2), g = rand_monic(1 + static_cast<int>(uniform_below(rng, 2)));
        CycPoly prod = poly_mul(f, g);
        CycPoly factor;
        rep.check(is_reducible_over_Z(prod, &factor), "constructed product is reducible");
        auto [q, r] = poly_divmod_monic(prod, factor);
        rep.check(r.is_zero(), "returned factor divides");
    }
    rep.check(!is_reducible_over_Z(make_int_poly(2, {1, 1, 1})), "t^2+t+1 irreducible");
    rep.check(!is_reducible_over_Z(make_int_poly(2, {-1, -1, 1})), "t^2-t-1 irreducible");
    for (int t = 0; t < 40; ++t) {
        CycPoly f = poly_from_string(3, poly_to_string(CycPoly{
                        3, {random_eisenstein(rng, 9), random_eisenstein(rng, 9),
                            CycInt::integer(3, 1)}}));
        rep.check(f.is_monic() && f.degree() == 2, "poly text form round trip");
    }
}

void suite_reps(Reporter& rep, SplitMix64& rng) {
    rep.section("kernels and representations");
    rep.check(enumerate_kernels(3, 2).size() == 7, "7 kernels at n=3, s=2");
    rep.check(enumerate_kernels(3, 3).size() == 13, "13 kernels at n=3, s=3");
    for (int s : {2, 3})
        for (int t = 0; t < 100; ++t) {
            Word w = random_kernel_word(rng, 3, s, 14);
            rep.check(expand(rewrite(w, s)) == w, "expand(rewrite(w)) = w");
        }
    auto gens = magnus_generators(3);
    for (int s : {2, 3}) {
        KernelDescriptor std_chi = KernelDescriptor::standard(s, 3);
        CycInt xi = s == 2 ? CycInt::integer(2, -1) : CycInt::omega();
        RingMatrix conj_n = rho(inner_automorphism(generator_word(3, 3)), std_chi);
        RingMatrix expect(s, 2);
        expect.at(0, 0) = xi;
        expect.at(1, 1) = xi;
        rep.check(conj_n == expect, "rho(conj_xn) = xi I");
        rep.check(rho(inner_automorphism(generator_word(3, 1)), std_chi).is_identity(),
                  "rho(conj_x1) = I");
        for (int t = 0; t < 15; ++t) {
            Automorphism a = random_torelli(rng, gens, 3);
            Automorphism b = random_torelli(rng, gens, 3);
            for (const KernelDescriptor& chi : enumerate_kernels(3, s))
                rep.check(rho(compose(a, b), chi) == mat_mul(rho(a, chi), rho(b, chi)),
                          "rho is a homomorphism");
        }
    }
    RepSet rs = build_torelli_repset(3);
    bool valid = true;
    std::string why;
    try {
        validate_repset(rs);
    } catch (const std::exception& e) {
        valid = false;
        why = e.what();
    }
    rep.check(valid, "fresh repset validates (" + why + ")");

    namespace fs = std::filesystem;
    fs::path tmp = fs::temp_directory_path() / "torwalk-selftest-repset.json";
    save_repset(rs, tmp.string());
    RepSet loaded = load_repset(tmp.string());
    bool loaded_ok = true;
    try {
        validate_repset(loaded);
    } catch (const std::exception&) {
        loaded_ok = false;
    }
    rep.check(loaded_ok, "cache round trip validates");
    // fault injection: corrupt one matrix entry and expect a named failure
    RepSet bad = loaded;
    for (RepBlock& b : bad.blocks)
        if (b.kernel.is_standard() && b.kernel.s == 2)
            b.matrices[0].at(0, 0) = cyc_add(b.matrices[0].at(0, 0), CycInt::integer(2, 2));
    std::string msg;
    try {
        validate_repset(bad);
    } catch (const std::exception& e) {
        msg = e.what();
    }
    rep.check(msg.find("s2:001") != std::string::npos &&
                  msg.find(bad.generator_names[0]) != std::string::npos,
              "corrupted cache names the offending (kernel, generator): got '" + msg + "'");
    fs::remove(tmp);
}

void suite_detectors(Reporter& rep, SplitMix64& rng) {
    rep.section("detectors");
    DetectorConfig cfg;
    RingMatrix diag_omega = RingMatrix::identity(3, 2);
    diag_omega.at(0, 0) = CycInt::omega();
    rep.check(!gamma_trace_detector(diag_omega), "trace(diag(w,1)) irrational");
    auto zt = gamma_zt_detector(diag_omega, cfg);
    rep.check(zt && zt->m == 3, "diag(w,1) integral at m = 3");
    auto mr = gamma_multiroot_detector(diag_omega, cfg);
    rep.check(mr && mr->m == 1, "diag(w,1) has repeated embedded root at m = 1");
    RingMatrix rot(2, 2);
    rot.at(0, 1) = CycInt::integer(2, -1);
    rot.at(1, 0) = CycInt::integer(2, 1);
    auto rp = reducible_power_detector(rot, cfg);
    rep.check(rp && rp->m == 2, "rotation matrix reducible at m = 2");
    RingMatrix fib(2, 2);
    fib.at(0, 1) = CycInt::integer(2, 1);
    fib.at(1, 0) = CycInt::integer(2, 1);
    fib.at(1, 1) = CycInt::integer(2, 1);
    rep.check(!reducible_power_detector(fib, cfg), "companion of t^2-t-1 never fires");
    auto sl2 = gamma_generators(TargetKind::sl_eisenstein, 2);
    for (int t = 0; t < 100; ++t) {
        RingMatrix g = RingMatrix::identity(3, 2);
        for (int i = 0; i < 10; ++i) g = mat_mul(g, sl2[uniform_below(rng, sl2.size())]);
        rep.check(!check_zt_containment(g, cfg).has_value(), "containment invariant");
    }
}

void suite_experiment(Reporter& rep) {
    rep.section("experiment engine");
    auto [lo, hi] = wilson_interval(50, 100);
    rep.check(std::abs(lo - 0.404) < 5e-3 && std::abs(hi - 0.596) < 5e-3,
              "wilson_interval(50,100) near (0.404, 0.596)");
    FitResult f = fit_decay({{1, 0.5}, {2, 0.25}, {3, 0.125}});
    rep.check(std::abs(f.alpha_hat - std::log(2.0)) < 1e-12, "geometric decay fits ln 2");
    rep.check(f.r2 > 1.0 - 1e-12, "geometric decay fit is exact");
    WalkConfig cfg;
    cfg.target = TargetKind::sl_eisenstein;
    cfg.target_dim = 2;
    cfg.k_grid = {2, 4};
    cfg.samples_per_k = 40;
    cfg.master_seed = 11;
    DecayReport a = run_experiment(cfg);
    DecayReport b = run_experiment_serial(cfg);
    bool same = a.cells.size() == b.cells.size();
    for (std::size_t i = 0; same && i < a.cells.size(); ++i)
        same = csv_row(a.cells[i]) == csv_row(b.cells[i]);
    rep.check(same, "parallel and serial engines agree");
    rep.check(a.containment_violations.empty(), "no containment violations");
}

}  // namespace

int run_selftest(std::ostream& out) {
    Reporter rep{out};
    SplitMix64 rng{0x5eed5eedULL};
    suite_freegroup(rep, rng);
    suite_cyclotomic(rep, rng);
    suite_polymat(rep, rng);
    suite_reps(rep, rng);
    suite_detectors(rep, rng);
    suite_experiment(rep);
    out << "[selftest] " << (rep.checks - rep.failures) << "/" << rep.checks << " checks passed\n";
    return rep.failures;
}

}  // namespace torwalk
