#include <doctest.h>

#include <algorithm>
#include <random>

#include "fpre/oracle.hpp"
#include "support.hpp"

using namespace fpre;
using fpre_test::bits;
using fpre_test::random_finite;
using fpre_test::same_bits;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("dyadic conversion round-trips every finite double") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100000; ++i) {
        double x = random_finite(rng, -1021, 1021);
        CHECK(same_bits(round_to_double(dyadic::from_double(x)), x));
    }
    // subnormals, zero, extremes
    for (double x : {0.0, 0x1p-1074, -0x1p-1074, 0x1.8p-1040, std::numeric_limits<double>::max(),
                     std::numeric_limits<double>::denorm_min(), -std::numeric_limits<double>::max()})
        CHECK(round_to_double(dyadic::from_double(x)) == x);
    CHECK_THROWS_AS(dyadic::from_double(std::numeric_limits<double>::infinity()), std::domain_error);
    CHECK_THROWS_AS(dyadic::from_double(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
}

TEST_CASE("exact_sum basics") {
    dyadic r = exact_sum({0.5, 0.25});
    CHECK(r.mantissa.to_int64() == 3);
    CHECK(r.exponent == -2);

    std::mt19937_64 rng(2);
    for (int i = 0; i < 1000; ++i) {
        double x = random_finite(rng, -300, 300);
        CHECK(exact_sum({x, -x}).is_zero());
    }
}

TEST_CASE("exact_sum is permutation and association invariant") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 300; ++i) {
        std::vector<double> v(20);
        for (auto& x : v) x = random_finite(rng, -60, 60);
        dyadic ref = exact_sum(v);
        std::shuffle(v.begin(), v.end(), rng);
        CHECK(exact_sum(v) == ref);
        // fold in two halves, then combine
        dyadic left = exact_sum(std::span<const double>(v.data(), 10));
        dyadic right = exact_sum(std::span<const double>(v.data() + 10, 10));
        CHECK(left + right == ref);
    }
}

TEST_CASE("rounding the exact sum reproduces host addition") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 100000; ++i) {
        double a = random_finite(rng, -400, 400);
        double b = random_finite(rng, -400, 400);
        CHECK(same_bits(round_to_double(exact_sum({a, b})), a + b));
    }
}

TEST_CASE("round_to handles ties, subnormals and overflow") {
    // 2^53 + 1 is an exact tie between 2^53 and 2^53 + 2: even mantissa wins
    dyadic tie = exact_sum({0x1p53, 1.0});
    CHECK(round_to_double(tie) == 0x1p53);
    // half an ulp above an odd mantissa rounds up
    dyadic up = exact_sum({0x1p52 + 1.0, 0.5});
    CHECK(round_to_double(up) == 0x1p52 + 2.0);
    // 3/4 in binary64
    CHECK(round_to_double(dyadic::normalized(bigint{3}, -2)) == 0.75);
    // below half the smallest subnormal collapses to zero
    CHECK(round_to_double(dyadic::normalized(bigint{1}, -1076)) == 0.0);
    // exactly half the smallest subnormal ties to even (zero)
    CHECK(round_to_double(dyadic::normalized(bigint{1}, -1075)) == 0.0);
    // just above half rounds to the smallest subnormal
    CHECK(round_to_double(dyadic::normalized(bigint{3}, -1076)) == 0x1p-1074);
    // overflow goes to infinity
    dyadic big = dyadic::from_double(std::numeric_limits<double>::max()) +
                 dyadic::from_double(0x1p970);
    CHECK(round_to_double(big) == std::numeric_limits<double>::infinity());

    // tiny format: largest finite in (4,3) is 240, top-binade ulp is 16, so
    // the overflow threshold sits at 248
    mini_format f43{4, 3};
    CHECK(round_to(dyadic::from_double(248.0), f43) == sf_inf(false, f43));
    CHECK(round_to(dyadic::from_double(-248.0), f43) == sf_inf(true, f43));
    CHECK(sf_to_double(round_to(dyadic::from_double(247.9), f43), f43) == 240.0);
    CHECK(sf_to_double(round_to(dyadic::from_double(243.0), f43), f43) == 240.0);
}

TEST_CASE("exact_mul and exact_dot and exact_horner trivia") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 1000; ++i) {
        double x = random_finite(rng, -200, 200);
        CHECK(exact_mul(0.0, x).is_zero());
        double c0 = random_finite(rng, -10, 10);
        CHECK(round_to_double(exact_horner(std::vector<double>{c0}, x)) == c0);
    }
    std::vector<double> one{1.0};
    CHECK(round_to_double(exact_dot(one, one)) == 1.0);
    CHECK_THROWS_AS(exact_dot(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}),
                    std::invalid_argument);
    // (0.1 + 0.2) exact: verified against the frozen two_sum round-off -2^-55
    dyadic exact = exact_sum({0.1, 0.2});
    double fl = 0.1 + 0.2;
    dyadic err = exact - dyadic::from_double(fl);
    CHECK(round_to_double(err) == -0x1p-55);
    CHECK(err == dyadic::from_double(-0x1p-55));
}

TEST_CASE("exact_mul agrees with long multiplication on wide operands") {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 20000; ++i) {
        double a = random_finite(rng, -30, 30);
        double b = random_finite(rng, -30, 30);
        // p + e from the FMA transformation is the exact product
        double p = a * b;
        double e = std::fma(a, b, -p);
        CHECK(exact_mul(a, b) == exact_sum({p, e}));
    }
}

TEST_CASE("condition numbers") {
    std::vector<double> pos{1.0, 2.5, 0.25, 7.0};
    CHECK(condition_number(pos) == 1.0);

    // cancellation near 2^53
    std::vector<double> cancel{1.0, -1.0 + 0x1p-52};
    double c = condition_number(cancel);
    CHECK(c > 0x1p51);
    CHECK(c < 0x1p55);
    CHECK(std::isfinite(c));

    std::vector<double> zero_sum{1.0, -1.0};
    CHECK(condition_number(zero_sum) == std::numeric_limits<double>::infinity());

    // dot with sign cancellation: large but finite and exactly computed
    std::vector<double> a{0x1p30, -0x1p30, 1.0};
    std::vector<double> b{1.0, 1.0 - 0x1p-40, 1.0};
    double cd = condition_number(a, b);
    CHECK(std::isfinite(cd));
    CHECK(cd > 1e5);

    // Horner condition at a near-root is huge
    std::vector<double> p{-1.0, 0.0, 1.0};  // x^2 - 1
    double ch = condition_number(p, 1.0 + 0x1p-20);
    CHECK(ch > 1e5);
    CHECK(std::isfinite(ch));
}

TEST_CASE("round_to agrees with sf_round on sampled dyadics") {
    std::mt19937_64 rng(7);
    for (mini_format fmt : {mini_format{4, 3}, mini_format{5, 6}, mini_format::binary32()}) {
        for (int i = 0; i < 20000; ++i) {
            std::uniform_int_distribution<std::uint64_t> word;
            std::uniform_int_distribution<int> exp(-40, 40);
            std::uint64_t mag = word(rng) >> (i % 50);
            if (mag == 0) continue;
            bool neg = word(rng) & 1;
            int e = exp(rng);
            dyadic d = dyadic::normalized(bigint::from_magnitude(mag, neg), e);
            CHECK(round_to(d, fmt) == sf_round(neg, mag, false, e, fmt));
        }
    }
}

TEST_SUITE_END();
