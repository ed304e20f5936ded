#include <doctest.h>

#include <random>

#include "torwalk/freegroup.hpp"

using namespace torwalk;

namespace {

Word rand_word(std::mt19937& rng, int rank, int len) {
    std::uniform_int_distribution<int> gen(1, rank);
    std::uniform_int_distribution<int> sign(0, 1);
    std::vector<int> raw;
    for (int i = 0; i < len; ++i) {
        int g = gen(rng);
        raw.push_back(sign(rng) ? g : -g);
    }
    return reduce(rank, raw);
}

}  // namespace

TEST_CASE("free reduction") {
    CHECK(reduce(2, std::vector<int>{1, -1}).empty());
    CHECK(reduce(2, std::vector<int>{1, 2, -2, -1}).empty());
    CHECK(reduce(2, std::vector<int>{1, 2, -2, 1}).letters == std::vector<int>{1, 1});
    CHECK(reduce(3, std::vector<int>{-3, 1, 3}).letters == std::vector<int>{-3, 1, 3});
    CHECK_THROWS(reduce(2, std::vector<int>{0}));
    CHECK_THROWS(reduce(2, std::vector<int>{3}));

    std::mt19937 rng(7);
    for (int t = 0; t < 100; ++t) {
        Word w = rand_word(rng, 3, 20);
        CHECK(word_multiply(w, word_invert(w)).empty());
        CHECK(word_invert(word_invert(w)) == w);
    }
}

TEST_CASE("word text round trip") {
    Word w = reduce(3, std::vector<int>{1, -2, -2, 3});
    CHECK(word_to_string(w) == "x1 x2^-1 x2^-1 x3");
    CHECK(word_from_string(3, "x1 x2^-2 x3") == w);
    CHECK(word_from_string(3, "").empty());
    CHECK(word_to_string(Word{3, {}}).empty());
    CHECK(word_from_string(3, "1").empty());
    CHECK_THROWS(word_from_string(2, "x3"));
    CHECK_THROWS(word_from_string(2, "y1"));

    std::mt19937 rng(8);
    for (int t = 0; t < 50; ++t) {
        Word w2 = rand_word(rng, 4, 15);
        CHECK(word_from_string(4, word_to_string(w2)) == w2);
    }
}

TEST_CASE("nielsen and inner automorphisms") {
    Automorphism tv = nielsen_transvection(3, 1, 2, 1);
    CHECK(apply(tv, generator_word(3, 1)).letters == std::vector<int>{1, 2});
    CHECK(apply(tv, generator_word(3, 3)) == generator_word(3, 3));
    CHECK(compose(tv, invert(tv)) == identity_automorphism(3));

    Automorphism sw = nielsen_swap(3, 1, 3);
    CHECK(apply(sw, generator_word(3, 1)) == generator_word(3, 3));
    CHECK(compose(sw, sw) == identity_automorphism(3));

    Automorphism inv1 = nielsen_inversion(3, 2);
    CHECK(apply(inv1, generator_word(3, 2)).letters == std::vector<int>{-2});

    Word c = word_from_string(3, "x1 x2");
    Automorphism inner = inner_automorphism(c);
    std::mt19937 rng(9);
    for (int t = 0; t < 30; ++t) {
        Word w = rand_word(rng, 3, 10);
        Word expect = word_multiply(word_multiply(word_invert(c), w), c);
        CHECK(apply(inner, w) == expect);
    }
    CHECK(is_in_torelli(inner));
    CHECK(!is_in_torelli(sw));
    CHECK(!is_in_torelli(inv1));
    CHECK(!is_in_torelli(tv));
}

TEST_CASE("composition") {
    std::mt19937 rng(10);
    auto gens = magnus_generators(3);
    std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
    for (int t = 0; t < 25; ++t) {
        const Automorphism& a = gens[pick(rng)];
        const Automorphism& b = gens[pick(rng)];
        const Automorphism& c = gens[pick(rng)];
        CHECK(compose(compose(a, b), c) == compose(a, compose(b, c)));
        Word w = rand_word(rng, 3, 8);
        CHECK(apply(compose(a, b), w) == apply(a, apply(b, w)));
    }
}

TEST_CASE("magnus generators") {
    auto g3 = magnus_generators(3);
    auto n3 = magnus_generator_names(3);
    CHECK(g3.size() == 9);
    CHECK(n3.size() == 9);
    auto g4 = magnus_generators(4);
    CHECK(g4.size() == 24);  // n(n-1) + n(n-1)(n-2)/2

    for (std::size_t i = 0; i < g3.size(); ++i) {
        CAPTURE(n3[i]);
        CHECK(is_in_torelli(g3[i]));
        CHECK(g3[i].inverse_images.has_value());
        CHECK(compose(g3[i], invert(g3[i])) == identity_automorphism(3));
        CHECK(compose(invert(g3[i]), g3[i]) == identity_automorphism(3));
    }

    auto at = [&](const std::string& name) -> const Automorphism& {
        for (std::size_t i = 0; i < n3.size(); ++i)
            if (n3[i] == name) return g3[i];
        throw std::runtime_error("missing " + name);
    };
    // K_ab: x_a -> x_b^-1 x_a x_b
    CHECK(apply(at("K12"), generator_word(3, 1)) == word_from_string(3, "x2^-1 x1 x2"));
    CHECK(apply(at("K12"), generator_word(3, 2)) == generator_word(3, 2));
    CHECK(apply(at("K13"), generator_word(3, 1)) == word_from_string(3, "x3^-1 x1 x3"));
    // K_abc: x_a -> x_a [x_b, x_c]
    CHECK(apply(at("K123"), generator_word(3, 1)) ==
          word_from_string(3, "x1 x2^-1 x3^-1 x2 x3"));
    CHECK(apply(at("K123"), generator_word(3, 2)) == generator_word(3, 2));

    CHECK_THROWS(magnus_generators(2));
}

TEST_CASE("abelianization matrix") {
    Automorphism tv = nielsen_transvection(3, 1, 2, 1);
    AbelianMatrix m = abelianization_matrix(tv);
    CHECK(m.at(0, 0) == 1);
    CHECK(m.at(1, 0) == 1);  // column 0 is the image of x_1 = x_1 x_2
    CHECK(m.at(0, 1) == 0);
    CHECK(!m.is_identity());

    std::mt19937 rng(11);
    auto gens = magnus_generators(3);
    std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
    for (int t = 0; t < 10; ++t) {
        Automorphism a = compose(gens[pick(rng)], gens[pick(rng)]);
        CHECK(abelianization_matrix(a).is_identity());
        Automorphism b = compose(a, tv);
        CHECK(abelianization_matrix(b) ==
              abelian_multiply(abelianization_matrix(a), abelianization_matrix(tv)));
    }
}
