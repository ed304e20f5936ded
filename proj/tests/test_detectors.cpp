#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <random>

#include "torwalk/detectors.hpp"
#include "torwalk/experiment.hpp"

using namespace torwalk;

namespace {

const RepSet& repset3() {
    static RepSet rs = build_torelli_repset(3);
    return rs;
}

std::vector<RingMatrix> images_of(const Automorphism& phi) {
    std::vector<RingMatrix> mats;
    for (const RepBlock& b : repset3().blocks) mats.push_back(rho(phi, b.kernel));
    return mats;
}

RingMatrix diag_omega_one() {
    RingMatrix m = RingMatrix::identity(3, 2);
    m.at(0, 0) = CycInt::omega();
    return m;
}

}  // namespace

TEST_CASE("certificates fire on the identity") {
    DetectorConfig cfg;
    auto mats = images_of(identity_automorphism(3));
    auto iwip = iwip_certificate(repset3(), mats, cfg);
    REQUIRE(iwip.has_value());
    CHECK(iwip->m == 1);
    CHECK(iwip->detector == "iwip");
    auto hyp = hyperbolic_certificate(repset3(), mats, cfg);
    REQUIRE(hyp.has_value());
    CHECK(hyp->m == 1);
    CHECK(hyp->kernel.has_value());
    CHECK(hyp->kernel->s == 2);
}

TEST_CASE("certificates fire on K13") {
    DetectorConfig cfg;
    auto names = magnus_generator_names(3);
    auto gens = magnus_generators(3);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == "K13") idx = i;
    auto mats = images_of(gens[idx]);
    auto iwip = iwip_certificate(repset3(), mats, cfg);
    REQUIRE(iwip.has_value());
    // rho_2(K13) = diag(-1,1): charpoly (t+1)(t-1) is already reducible
    CHECK(iwip->m == 1);
    CHECK(iwip->condition == "reducible");
    CHECK(verify_witness(*iwip, [&] {
        for (std::size_t b = 0; b < repset3().blocks.size(); ++b)
            if (repset3().blocks[b].kernel == *iwip->kernel) return mats[b];
        throw std::logic_error("kernel not found");
    }()));
}

TEST_CASE("gamma trace detector") {
    CHECK(!gamma_trace_detector(diag_omega_one()));
    RingMatrix shear = RingMatrix::identity(3, 2);
    shear.at(0, 1) = CycInt::omega();
    CHECK(gamma_trace_detector(shear));  // trace 2
    RingMatrix m(3, 2);
    m.at(0, 0) = CycInt(3, 1, 1);
    m.at(1, 1) = CycInt(3, 0, -1);
    CHECK(gamma_trace_detector(m));  // trace (1+w) + (-w) = 1
}

TEST_CASE("gamma integer-poly detector") {
    DetectorConfig cfg;
    auto w = gamma_zt_detector(diag_omega_one(), cfg);
    REQUIRE(w.has_value());
    CHECK(w->m == 3);  // omega^3 = 1
    CHECK(w->condition == "integer-poly");
    CHECK(is_integer_poly(w->poly));
    CHECK(verify_witness(*w, diag_omega_one()));

    cfg.power_bound = 2;
    CHECK(!gamma_zt_detector(diag_omega_one(), cfg).has_value());

    // generic-looking element: no integer power charpoly within reach
    RingMatrix g(3, 2);
    g.at(0, 0) = CycInt(3, 1, 1);
    g.at(0, 1) = CycInt::integer(3, 1);
    g.at(1, 0) = CycInt::integer(3, 1);
    g.at(1, 1) = CycInt::integer(3, 1);
    DetectorConfig deep;
    deep.power_bound = 8;
    CHECK(!gamma_zt_detector(g, deep).has_value());
}

TEST_CASE("gamma multiroot detector") {
    DetectorConfig cfg;
    auto w = gamma_multiroot_detector(diag_omega_one(), cfg);
    REQUIRE(w.has_value());
    CHECK(w->m == 1);  // embedded eigenvalue 1 appears twice
    CHECK(w->condition == "discriminant");
    CHECK(verify_witness(*w, diag_omega_one()));

    // Numeric oracle: the embedded roots are the two eigenvalues of g and
    // their Galois conjugates.  When all m-th powers stay pairwise separated
    // (comfortably above rounding error), the detector must stay silent.
    auto as_complex = [](const CycInt& c) {
        const std::complex<double> om(-0.5, std::sqrt(3.0) / 2.0);
        return std::complex<double>(c.a.get_d()) + c.b.get_d() * om;
    };
    auto eigen_pair = [&](const CycPoly& f) {
        std::complex<double> tr = as_complex(f.coeff(1));
        std::complex<double> dt = as_complex(f.coeff(0));
        std::complex<double> disc = std::sqrt(tr * tr - 4.0 * dt);
        return std::array<std::complex<double>, 2>{(-tr + disc) / 2.0, (-tr - disc) / 2.0};
    };
    auto gens = gamma_generators(TargetKind::sl_eisenstein, 2);
    std::mt19937 r(52);
    std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
    DetectorConfig shallow;
    shallow.power_bound = 5;
    int certified = 0;
    for (int t = 0; t < 40 && certified < 10; ++t) {
        RingMatrix g = RingMatrix::identity(3, 2);
        for (int i = 0; i < 6; ++i) g = mat_mul(g, gens[pick(r)]);
        CycPoly f = charpoly(g);
        auto lam = eigen_pair(f);
        auto mu = eigen_pair(poly_conj(f));
        std::array<std::complex<double>, 4> roots{lam[0], lam[1], mu[0], mu[1]};
        bool separated = true;
        for (int m = 1; m <= shallow.power_bound && separated; ++m)
            for (int i = 0; i < 4 && separated; ++i)
                for (int j = i + 1; j < 4; ++j) {
                    auto d = std::abs(std::pow(roots[i], m) - std::pow(roots[j], m));
                    if (d < 1e-4) {
                        separated = false;
                        break;
                    }
                }
        if (!separated) continue;
        ++certified;
        CAPTURE(poly_to_string(f));
        CHECK(!gamma_multiroot_detector(g, shallow).has_value());
    }
    CHECK(certified > 0);
}

TEST_CASE("reducible power detector") {
    DetectorConfig cfg;
    RingMatrix rot(2, 2);
    rot.at(0, 1) = CycInt::integer(2, -1);
    rot.at(1, 0) = CycInt::integer(2, 1);
    auto w = reducible_power_detector(rot, cfg);
    REQUIRE(w.has_value());
    CHECK(w->m == 2);  // rot^2 = -I, charpoly (t+1)^2
    CHECK(w->condition == "reducible");
    CHECK(w->factor.has_value());
    CHECK(verify_witness(*w, rot));

    RingMatrix fib(2, 2);
    fib.at(0, 1) = CycInt::integer(2, 1);
    fib.at(1, 0) = CycInt::integer(2, 1);
    fib.at(1, 1) = CycInt::integer(2, 1);
    CHECK(!reducible_power_detector(fib, cfg).has_value());
}

TEST_CASE("witness json and verification") {
    DetectorConfig cfg;
    auto w = gamma_zt_detector(diag_omega_one(), cfg);
    REQUIRE(w.has_value());
    auto j = witness_to_json(*w);
    CHECK(j.at("detector") == "gamma_zt");
    CHECK(j.at("m") == 3);
    CHECK(j.at("condition") == "integer-poly");
    CHECK(j.contains("polynomial"));

    Witness doctored = *w;
    doctored.m = 2;
    CHECK(!verify_witness(doctored, diag_omega_one()));
    Witness wrong_cond = *w;
    wrong_cond.condition = "trace";
    wrong_cond.m = 1;  // trace(g) = 1+w is irrational, so this claim is false
    CHECK(!verify_witness(wrong_cond, diag_omega_one()));
}

TEST_CASE("containment invariant on random products") {
    DetectorConfig cfg;
    auto gens = gamma_generators(TargetKind::sl_eisenstein, 2);
    std::mt19937 r(51);
    std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
    for (int t = 0; t < 150; ++t) {
        RingMatrix g = RingMatrix::identity(3, 2);
        int len = 2 + t % 12;
        for (int i = 0; i < len; ++i) g = mat_mul(g, gens[pick(r)]);
        auto v = check_zt_containment(g, cfg);
        if (v.has_value()) FAIL("containment violation: ", *v);
    }
}

TEST_CASE("power bound is respected") {
    DetectorConfig cfg;
    cfg.power_bound = 1;
    auto w = gamma_zt_detector(diag_omega_one(), cfg);
    CHECK(!w.has_value());
    CHECK_THROWS(([&] {
        DetectorConfig zero;
        zero.power_bound = 0;
        return gamma_zt_detector(diag_omega_one(), zero);
    })());
}
