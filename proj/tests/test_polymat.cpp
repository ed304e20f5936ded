#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "torwalk/polymat.hpp"

using namespace torwalk;

namespace {

std::mt19937& rng() {
    static std::mt19937 r(31);
    return r;
}

CycInt rand_cyc(int level, long range) {
    std::uniform_int_distribution<long> d(-range, range);
    return level == 2 ? CycInt::integer(2, d(rng())) : CycInt(3, d(rng()), d(rng()));
}

CycPoly rand_monic(int level, int deg, long range) {
    std::vector<CycInt> cs;
    for (int i = 0; i < deg; ++i) cs.push_back(rand_cyc(level, range));
    cs.push_back(CycInt::integer(level, 1));
    return make_poly(level, std::move(cs));
}

RingMatrix rand_mat(int level, int dim, long range) {
    RingMatrix m(level, dim);
    for (CycInt& e : m.entries) e = rand_cyc(level, range);
    return m;
}

// random product of elementary shears, so the determinant is 1
RingMatrix rand_unimodular(int level, int dim, int steps) {
    std::uniform_int_distribution<int> pos(0, dim - 1);
    std::uniform_int_distribution<int> sel(0, level == 3 ? 3 : 1);
    RingMatrix m = RingMatrix::identity(level, dim);
    for (int t = 0; t < steps; ++t) {
        int i = pos(rng()), j = pos(rng());
        if (i == j) continue;
        RingMatrix e = RingMatrix::identity(level, dim);
        switch (sel(rng())) {
            case 0: e.at(i, j) = CycInt::integer(level, 1); break;
            case 1: e.at(i, j) = CycInt::integer(level, -1); break;
            case 2: e.at(i, j) = CycInt::omega(); break;
            default: e.at(i, j) = cyc_neg(CycInt::omega()); break;
        }
        m = mat_mul(m, e);
    }
    return m;
}

}  // namespace

TEST_CASE("polynomial basics") {
    CycPoly z = CycPoly::zero(2);
    CHECK(z.is_zero());
    CHECK(z.degree() == -1);
    CycPoly f = make_int_poly(2, {-1, 0, 1});  // t^2 - 1
    CHECK(f.degree() == 2);
    CHECK(f.is_monic());
    CHECK(f.coeff(0) == CycInt::integer(2, -1));
    CHECK(f.coeff(5).is_zero());
    CHECK(make_int_poly(2, {1, 2, 0, 0}).degree() == 1);  // trailing zeros stripped
    CHECK(poly_mul(make_int_poly(2, {-1, 1}), make_int_poly(2, {1, 1})) == f);
    CHECK(poly_eval(f, CycInt::integer(2, 3)) == CycInt::integer(2, 8));
    CHECK(poly_derivative(f) == make_int_poly(2, {0, 2}));
    CHECK(poly_derivative(CycPoly::constant(CycInt::integer(2, 9))).is_zero());
    CHECK(poly_add(f, poly_neg(f)).is_zero());
}

TEST_CASE("division by monic") {
    for (int level : {2, 3})
        for (int t = 0; t < 60; ++t) {
            CycPoly g = rand_monic(level, 1 + t % 3, 6);
            CycPoly q = rand_monic(level, t % 4, 6);
            CycPoly r = make_poly(level, {rand_cyc(level, 6)});
            if (g.degree() >= 2 && t % 2) r = poly_add(r, poly_scale(rand_cyc(level, 6), CycPoly::t(level)));
            CycPoly f = poly_add(poly_mul(q, g), r);
            auto [qq, rr] = poly_divmod_monic(f, g);
            CHECK(qq == q);
            CHECK(rr == r);
        }
    CHECK_THROWS(poly_divmod_monic(make_int_poly(2, {1, 1}), make_int_poly(2, {1, 2})));
}

TEST_CASE("conjugate and integrality") {
    CycPoly f = make_poly(3, {CycInt(3, 1, 2), CycInt(3, 0, -1), CycInt::integer(3, 1)});
    CHECK(poly_conj(poly_conj(f)) == f);
    CHECK(!is_integer_poly(f));
    CHECK(is_integer_poly(poly_mul(f, poly_conj(f))));
    CHECK(is_integer_poly(make_int_poly(3, {4, 5})));
    CHECK(poly_to_level(make_int_poly(3, {4, 5}), 2) == make_int_poly(2, {4, 5}));
    CHECK_THROWS(poly_to_level(f, 2));
}

TEST_CASE("charpoly via Berkowitz") {
    RingMatrix a(2, 2);
    a.at(0, 0) = CycInt::integer(2, 1);
    a.at(0, 1) = CycInt::integer(2, 2);
    a.at(1, 0) = CycInt::integer(2, 3);
    a.at(1, 1) = CycInt::integer(2, 4);
    CHECK(charpoly(a) == make_int_poly(2, {-2, -5, 1}));  // t^2 - 5t - 2
    CHECK(mat_det(a) == CycInt::integer(2, -2));
    CHECK(mat_trace(a) == CycInt::integer(2, 5));

    for (int level : {2, 3})
        for (int dim = 1; dim <= 4; ++dim)
            for (int t = 0; t < 25; ++t) {
                RingMatrix m = rand_mat(level, dim, 8);
                CHECK(charpoly(m) == oracles::cofactor_charpoly(m));
            }

    // similarity invariance
    for (int t = 0; t < 20; ++t) {
        RingMatrix m = rand_mat(3, 3, 5);
        RingMatrix p = rand_unimodular(3, 3, 6);
        RingMatrix conj = mat_mul(mat_mul(p, m), mat_inverse_unit(p));
        CHECK(charpoly(conj) == charpoly(m));
    }

    RingMatrix id = RingMatrix::identity(2, 3);
    CHECK(charpoly(id) == make_int_poly(2, {-1, 3, -3, 1}));  // (t-1)^3
}

TEST_CASE("powers and inverses") {
    for (int t = 0; t < 30; ++t) {
        RingMatrix m = rand_mat(t % 2 ? 2 : 3, 2 + t % 2, 4);
        long e = t % 7;
        CHECK(mat_pow(m, e) == oracles::slow_pow(m, e));
    }
    for (int level : {2, 3})
        for (int t = 0; t < 20; ++t) {
            RingMatrix m = rand_unimodular(level, 2, 8);
            RingMatrix mi = mat_inverse_unit(m);
            CHECK(mat_mul(m, mi).is_identity());
            CHECK(mat_mul(mi, m).is_identity());
        }
    RingMatrix bad = RingMatrix::identity(2, 2);
    bad.at(0, 0) = CycInt::integer(2, 2);
    CHECK_THROWS_AS((void)mat_inverse_unit(bad), std::invalid_argument);
}

TEST_CASE("restriction of scalars") {
    RingMatrix w(3, 1);
    w.at(0, 0) = CycInt::omega();
    RingMatrix e = restrict_scalars(w);
    CHECK(e.dim == 2);
    CHECK(e.level == 2);
    CHECK(e.at(0, 0).a == 0);
    CHECK(e.at(0, 1).a == -1);
    CHECK(e.at(1, 0).a == 1);
    CHECK(e.at(1, 1).a == -1);

    for (int t = 0; t < 50; ++t) {
        int dim = 2 + t % 2;
        RingMatrix m = rand_mat(3, dim, 6);
        RingMatrix n = rand_mat(3, dim, 6);
        CHECK(restrict_scalars(mat_mul(m, n)) ==
              mat_mul(restrict_scalars(m), restrict_scalars(n)));
        CHECK(mat_det(restrict_scalars(m)) == CycInt::integer(2, cyc_norm(mat_det(m))));
        // rational trace criterion: sum of (2i, 2i+1) entries is -sum of b parts
        mpz_class off = 0, bsum = 0;
        RingMatrix r = restrict_scalars(m);
        for (int i = 0; i < dim; ++i) {
            off += r.at(2 * i + 1, 2 * i).a;
            bsum += m.at(i, i).b;
        }
        CHECK(off == bsum);
        CHECK(is_rational(mat_trace(m)) == (off == 0));
        // the embedded characteristic polynomial splits as f * conj(f)
        CHECK(charpoly(r) == poly_to_level(poly_mul(charpoly(m), poly_conj(charpoly(m))), 2));
    }
}

TEST_CASE("bareiss determinant") {
    CHECK(det_bareiss(0, {}) == 1);
    CHECK(det_bareiss(1, {mpz_class(-7)}) == -7);
    CHECK(det_bareiss(2, {mpz_class(1), mpz_class(2), mpz_class(3), mpz_class(4)}) == -2);
    // row-swap path: zero pivot
    CHECK(det_bareiss(2, {mpz_class(0), mpz_class(1), mpz_class(1), mpz_class(0)}) == -1);
    CHECK(det_bareiss(3, {mpz_class(1), mpz_class(2), mpz_class(3), mpz_class(2), mpz_class(4),
                          mpz_class(6), mpz_class(7), mpz_class(8), mpz_class(9)}) == 0);
    std::uniform_int_distribution<long> d(-9, 9);
    for (int t = 0; t < 30; ++t) {
        int dim = 1 + t % 4;
        std::vector<mpz_class> a;
        RingMatrix m(2, dim);
        for (int i = 0; i < dim * dim; ++i) {
            long v = d(rng());
            a.emplace_back(v);
            m.entries[i] = CycInt::integer(2, v);
        }
        CHECK(det_bareiss(dim, a) == mat_det(m).a);
    }
}

TEST_CASE("discriminant") {
    CHECK(discriminant(make_int_poly(2, {1, 3, 1})) == 5);
    CHECK(discriminant(make_int_poly(2, {1, -2, 1})) == 0);   // (t-1)^2
    CHECK(discriminant(make_int_poly(2, {0, -1, 0, 1})) == 4);  // t^3 - t
    CHECK(discriminant(make_int_poly(2, {-2, 0, 0, 1})) == -108);  // t^3 - 2
    // (t-1)(t-2)(t-3): prod of squared differences = 4
    CHECK(discriminant(poly_mul(poly_mul(make_int_poly(2, {-1, 1}), make_int_poly(2, {-2, 1})),
                                make_int_poly(2, {-3, 1}))) == 4);
    CHECK(discriminant(make_int_poly(2, {5, 1})) == 1);  // linear
    // repeated-factor products always vanish
    for (int t = 0; t < 25; ++t) {
        CycPoly g = rand_monic(2, 1 + t % 2, 5);
        CycPoly h = rand_monic(2, 1 + t % 3, 5);
        CHECK(discriminant(poly_mul(poly_mul(g, g), h)) == 0);
    }
}

TEST_CASE("integer factorization helpers") {
    auto fs = factor_integer(mpz_class(840));  // 2^3 * 3 * 5 * 7
    REQUIRE(fs.size() == 4);
    CHECK(fs[0] == std::pair<mpz_class, int>{2, 3});
    CHECK(fs[3] == std::pair<mpz_class, int>{7, 1});
    auto divs = positive_divisors(mpz_class(12));
    CHECK(divs == std::vector<mpz_class>{1, 2, 3, 4, 6, 12});
    CHECK(positive_divisors(mpz_class(1)) == std::vector<mpz_class>{1});

    // Pollard path: semiprime beyond the trial-division bound
    mpz_class p = 1000003, q = 1000033;
    auto big = factor_integer(p * q);
    REQUIRE(big.size() == 2);
    CHECK(big[0].first == p);
    CHECK(big[1].first == q);
}

TEST_CASE("irreducibility mod p") {
    CHECK(irreducible_mod_p(make_int_poly(2, {1, 1, 1}), 2));      // t^2+t+1 mod 2
    CHECK(!irreducible_mod_p(make_int_poly(2, {-1, 0, 1}), 3));    // t^2-1
    CHECK(!irreducible_mod_p(make_int_poly(2, {1, 0, 1}), 2));     // (t+1)^2 mod 2
    CHECK(irreducible_mod_p(make_int_poly(2, {1, 2, 0, 1}), 3));   // no root mod 3, deg 3
    CHECK(!irreducible_mod_p(make_int_poly(2, {2, 0, 1}), 2));     // drops degree? no: t^2 mod 2
}

TEST_CASE("reducibility over Z") {
    CycPoly factor;
    CHECK(is_reducible_over_Z(make_int_poly(2, {-1, 0, 1}), &factor));
    CHECK(poly_divmod_monic(make_int_poly(2, {-1, 0, 1}), factor).second.is_zero());
    CHECK(!is_reducible_over_Z(make_int_poly(2, {1, 1, 1})));
    CHECK(!is_reducible_over_Z(make_int_poly(2, {-1, -1, 1})));
    CHECK(!is_reducible_over_Z(make_int_poly(2, {2, 2, 1})));
    // t^4 + 1: irreducible over Z yet reducible mod every prime
    CHECK(!is_reducible_over_Z(make_int_poly(2, {1, 0, 0, 0, 1})));
    // t^4 + 4 = (t^2-2t+2)(t^2+2t+2)
    CHECK(is_reducible_over_Z(make_int_poly(2, {4, 0, 0, 0, 1}), &factor));
    CHECK(poly_divmod_monic(make_int_poly(2, {4, 0, 0, 0, 1}), factor).second.is_zero());
    CHECK(!is_reducible_over_Z(make_int_poly(2, {1, 1, 1, 1, 1})));  // Phi_5
    // degree-6 product of two cubics with no rational roots
    CycPoly c1 = make_int_poly(2, {-1, -1, 0, 1});
    CycPoly c2 = make_int_poly(2, {1, -1, 0, 1});
    CycPoly prod = poly_mul(c1, c2);
    CHECK(is_reducible_over_Z(prod, &factor));
    CHECK(poly_divmod_monic(prod, factor).second.is_zero());
    CHECK(factor.degree() >= 1);
    CHECK(factor.degree() < 6);

    for (int t = 0; t < 100; ++t) {
        CycPoly f = rand_monic(2, 1 + t % 3, 7);
        CycPoly g = rand_monic(2, 1 + t % 2, 7);
        CycPoly fg = poly_mul(f, g);
        CAPTURE(poly_to_string(fg));
        CHECK(is_reducible_over_Z(fg, &factor));
        CHECK(poly_divmod_monic(fg, factor).second.is_zero());
    }
}

TEST_CASE("kronecker search") {
    CHECK(!kronecker_factor(make_int_poly(2, {1, 1, 1})).has_value());
    CHECK(!kronecker_factor(make_int_poly(2, {1, 0, 0, 0, 1})).has_value());
    auto f = kronecker_factor(poly_mul(make_int_poly(2, {-1, -1, 0, 1}),
                                       make_int_poly(2, {1, -1, 0, 1})));
    REQUIRE(f.has_value());
    CHECK((*f == make_int_poly(2, {-1, -1, 0, 1}) || *f == make_int_poly(2, {1, -1, 0, 1})));
}

TEST_CASE("full factorization") {
    CycPoly f = poly_mul(poly_mul(make_int_poly(2, {-1, 1}), make_int_poly(2, {-1, 1})),
                         make_int_poly(2, {2, 1}));
    auto fs = factor_monic_over_Z(f);
    REQUIRE(fs.size() == 3);
    CycPoly check = CycPoly::constant(CycInt::integer(2, 1));
    int linear_minus = 0, linear_plus2 = 0;
    for (const CycPoly& g : fs) {
        check = poly_mul(check, g);
        if (g == make_int_poly(2, {-1, 1})) ++linear_minus;
        if (g == make_int_poly(2, {2, 1})) ++linear_plus2;
    }
    CHECK(check == f);
    CHECK(linear_minus == 2);
    CHECK(linear_plus2 == 1);
    CHECK(factor_monic_over_Z(make_int_poly(2, {1, 1, 1})).size() == 1);
}

TEST_CASE("budget guard") {
    // 2^6 3^4 5^3 7^2 11^2 13 17 19 23 29 31 37 41 has over 200000 divisors
    mpz_class n = 1;
    for (long p : {2, 2, 2, 2, 2, 2, 3, 3, 3, 3, 5, 5, 5, 7, 7, 11, 11}) n *= p;
    for (long p : {13, 17, 19, 23, 29, 31, 37, 41}) n *= p;
    CHECK_THROWS_AS((void)positive_divisors(n), FactorBudgetExceeded);
}

TEST_CASE("polynomial text") {
    CycPoly f = make_poly(3, {CycInt::omega(), CycInt(3, -1, -1), CycInt::integer(3, 1)});
    CHECK(poly_to_string(f) == "t^2 - (1+1*w)*t + (0+1*w)");
    CHECK(poly_from_string(3, "t^2 - (1+1*w)*t + (0+1*w)") == f);
    CHECK(poly_to_string(make_int_poly(2, {-1, 0, 1})) == "t^2 - 1");
    CHECK(poly_from_string(2, "t^2-1") == make_int_poly(2, {-1, 0, 1}));
    CHECK(poly_from_string(2, "t^2 + 0*t - 1") == make_int_poly(2, {-1, 0, 1}));
    CHECK(poly_to_string(CycPoly::zero(2)) == "0");
    CHECK(poly_from_string(2, "0").is_zero());
    CHECK(poly_from_string(2, "t") == CycPoly::t(2));
    CHECK_THROWS(poly_from_string(2, "t^"));
    CHECK_THROWS(poly_from_string(2, "1 + q"));

    for (int level : {2, 3})
        for (int t = 0; t < 60; ++t) {
            CycPoly g = rand_monic(level, 1 + t % 4, 9);
            CHECK(poly_from_string(level, poly_to_string(g)) == g);
        }
}

TEST_CASE("matrix text") {
    RingMatrix m(3, 2);
    m.at(0, 0) = CycInt::omega();
    m.at(1, 1) = CycInt::integer(3, -2);
    std::string s = matrix_to_string(m);
    CHECK(s.find('w') != std::string::npos);
    CHECK(s.find("-2") != std::string::npos);
}
