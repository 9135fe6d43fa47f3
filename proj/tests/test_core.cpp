#include <catch_amalgamated.hpp>

#include "wks/core.hpp"
#include "wks/rng.hpp"

using namespace wks;

TEST_CASE("flat distance charges each moved server's weight") {
    WeightProfile w = WeightProfile::flat({Rat(1), Rat(10)});
    CHECK(distance({{1, 2}}, {{1, 2}}, w) == 0);
    CHECK(distance({{1, 2}}, {{3, 2}}, w) == 1);
    CHECK(distance({{1, 2}}, {{1, 3}}, w) == 10);
    CHECK(distance({{1, 2}}, {{2, 1}}, w) == 11);  // swapped servers still pay
    CHECK_THROWS_AS(distance({{1}}, {{1, 2}}, w), dimension_error);
}

TEST_CASE("class distance charges a lump per changed class") {
    WeightProfile w1 = WeightProfile::classed({2}, {Rat(1)});
    CHECK(class_distance({{{1, 2}}}, {{{1, 2}}}, w1) == 0);  // same set, any order

    WeightProfile w2 = WeightProfile::classed({1, 1}, {Rat(1), Rat(10)});
    CHECK(class_distance({{{1}, {5}}}, {{{2}, {5}}}, w2) == 1);

    WeightProfile w3 = WeightProfile::classed({2, 1}, {Rat(1), Rat(10)});
    CHECK(class_distance({{{1, 2}, {5}}}, {{{1, 3}, {6}}}, w3) == 12);
    CHECK_THROWS_AS(class_distance({{{1}, {5}}}, {{{1, 2}, {5}}}, w3), dimension_error);
}

TEST_CASE("distance is a metric") {
    WeightProfile w = WeightProfile::flat({Rat(1), Rat(3), Rat(7)});
    Rng rng(99);
    for (int it = 0; it < 200; ++it) {
        auto conf = [&] {
            Configuration c;
            for (int i = 0; i < 3; ++i) c.at.push_back(rng.range(1, 4));
            return c;
        };
        Configuration a = conf(), b = conf(), c = conf();
        CHECK(distance(a, b, w) == distance(b, a, w));
        CHECK((distance(a, b, w) == 0) == (a == b));
        CHECK(distance(a, c, w) <= distance(a, b, w) + distance(b, c, w));
        CHECK(distance(a, b, w) <= w.prefix(3));
    }
}

TEST_CASE("serves checks occupancy") {
    CHECK(serves(Configuration{{1, 2}}, 2));
    CHECK_FALSE(serves(Configuration{{1, 2}}, 3));
    CHECK(serves(ClassConfiguration{{{1, 2}, {5}}}, 5));
    CHECK_FALSE(serves(ClassConfiguration{{{1, 2}, {5}}}, 3));
}

TEST_CASE("separated weights satisfy the recurrence") {
    CHECK(separated_weights(2, 2).weights == std::vector<Rat>{Rat(1), Rat(2)});
    CHECK(separated_weights(3, 4).weights == std::vector<Rat>{Rat(1), Rat(4), Rat(20)});
    CHECK(separated_weights(1, 7).weights == std::vector<Rat>{Rat(1)});

    WeightProfile w = separated_weights(5, 9);
    for (int i = 1; i < 5; ++i) {
        CHECK(w.weight(i + 1) == Rat(9) * w.prefix(i));  // n_k times the lighter total
        CHECK(w.weight(i + 1) >= Rat(9) * w.weight(i));
    }
}

TEST_CASE("weight profile validation") {
    CHECK_THROWS_AS(WeightProfile::flat({Rat(2), Rat(1)}), dimension_error);
    CHECK_THROWS_AS(WeightProfile::flat({}), dimension_error);
    CHECK_THROWS_AS(WeightProfile::classed({1, 1}, {Rat(2), Rat(2)}), dimension_error);
    CHECK_THROWS_AS(WeightProfile::classed({0}, {Rat(1)}), dimension_error);
    CHECK(WeightProfile::classed({2, 1}, {Rat(1), Rat(10)}).weights ==
          std::vector<Rat>{Rat(1), Rat(1), Rat(10)});
}

TEST_CASE("weight separation check") {
    // entry [i] = log2 of the constant n_i; entries 0 and 1 unused
    std::vector<Int> ns{0, 0, 16};
    CHECK(wfa_weight_check(WeightProfile::flat({Rat(1)}), {}));
    CHECK_FALSE(wfa_weight_check(WeightProfile::flat({Rat(1), Rat(2)}), ns));
    // W_1 = 1 <= w_2 / (40 * 2^16) exactly at w_2 = 40 * 65536
    CHECK(wfa_weight_check(WeightProfile::flat({Rat(1), Rat(40 * 65536)}), ns));
    CHECK_FALSE(wfa_weight_check(WeightProfile::flat({Rat(1), Rat(40 * 65536 - 1)}), ns));
    // an astronomically large constant rejects without materializing 2^e
    CHECK_FALSE(wfa_weight_check(WeightProfile::flat({Rat(1), Rat(1000000)}),
                                 {0, 0, Int("123456789123456789")}));
}

TEST_CASE("rational serialization round-trips") {
    for (const char* s : {"0", "7", "20/3", "-5/8", "2621440"}) {
        CHECK(to_string(parse_rational(s)) == s);
    }
    CHECK_THROWS_AS(parse_rational("1/0"), schema_error);
    CHECK_THROWS_AS(parse_rational("abc"), schema_error);
}

TEST_CASE("rng is deterministic and in range") {
    Rng a(5), b(5);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    Rng r(1);
    for (int i = 0; i < 1000; ++i) {
        auto v = r.below(7);
        CHECK(v < 7);
    }
    std::vector<Point> x{1, 2, 3, 4, 5}, y{1, 2, 3, 4, 5};
    Rng s1(3), s2(3);
    s1.shuffle(x);
    s2.shuffle(y);
    CHECK(x == y);
}
