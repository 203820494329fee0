#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "fpre/eft.hpp"
#include "fpre/softfloat.hpp"
#include "support.hpp"

using namespace fpre;
using fpre_test::bits;
using fpre_test::random_finite;
using fpre_test::same_bits;

namespace {

// Brute-force round-to-nearest-even: scan every representable value for the
// nearest one, break ties toward the even stored mantissa, and apply the
// overflow threshold of half an ulp beyond the largest finite value. Entirely
// independent of sf_round and round_to.
struct nearest_oracle {
    mini_format fmt;
    std::vector<std::pair<double, std::uint64_t>> finite;  // value -> canonical bits
    double max_finite;
    double top_ulp;

    explicit nearest_oracle(mini_format f) : fmt(f) {
        const std::uint64_t count = std::uint64_t{1} << fmt.total_bits();
        max_finite = 0.0;
        for (std::uint64_t b = 0; b < count; ++b) {
            packed_float p{b};
            sf_decoded d = sf_decode(p, fmt);
            if (d.cls == sf_class::infinity || d.cls == sf_class::nan) continue;
            finite.emplace_back(sf_to_double(p, fmt), b);
            max_finite = std::max(max_finite, std::fabs(finite.back().first));
        }
        top_ulp = std::ldexp(1.0, static_cast<int>(fmt.emax() - fmt.mantissa_bits));
    }

    packed_float round(double exact) const {
        if (std::fabs(exact) >= max_finite + top_ulp / 2.0)
            return sf_inf(std::signbit(exact), fmt);
        double best = std::numeric_limits<double>::infinity();
        std::uint64_t best_bits = 0;
        bool tie = false;
        std::uint64_t tie_bits = 0;
        for (auto [v, b] : finite) {
            double d = std::fabs(v - exact);
            if (d < best) {
                best = d;
                best_bits = b;
                tie = false;
            } else if (d == best && v != sf_to_double(packed_float{best_bits}, fmt)) {
                tie = true;
                tie_bits = b;
            }
        }
        if (tie) {
            // even stored mantissa wins
            std::uint64_t a_frac = best_bits & fmt.frac_mask();
            std::uint64_t b_frac = tie_bits & fmt.frac_mask();
            if ((a_frac & 1) != 0 && (b_frac & 1) == 0) best_bits = tie_bits;
        }
        // underflow to zero keeps the sign of the exact value
        if (sf_to_double(packed_float{best_bits}, fmt) == 0.0)
            return sf_zero(std::signbit(exact), fmt);
        return packed_float{best_bits};
    }
};

}  // namespace

TEST_SUITE_BEGIN("softfloat");

TEST_CASE("decode/encode round-trips every canonical encoding of (4,3)") {
    mini_format fmt{4, 3};
    for (std::uint64_t b = 0; b < 256; ++b) {
        packed_float p{b};
        sf_decoded d = sf_decode(p, fmt);
        if (d.cls == sf_class::nan) continue;
        if (d.cls == sf_class::finite) {
            packed_float back = sf_encode_exact(d.sign, d.sig, d.quantum, fmt);
            CHECK(back == p);
        }
        // via double as well
        packed_float via = sf_from_double(sf_to_double(p, fmt), fmt);
        CHECK(via == p);
    }
    // any NaN payload collapses to the canonical quiet NaN
    packed_float payload{0b0'1111'001};
    CHECK(sf_add(payload, payload, fmt) == sf_canonical_nan(fmt));
}

static void exhaustive_format_check(mini_format fmt) {
    const nearest_oracle oracle(fmt);
    const std::uint64_t count = std::uint64_t{1} << fmt.total_bits();
    std::size_t checked = 0;
    for (std::uint64_t xb = 0; xb < count; ++xb) {
        for (std::uint64_t yb = 0; yb < count; ++yb) {
            packed_float x{xb}, y{yb};
            sf_decoded dx = sf_decode(x, fmt), dy = sf_decode(y, fmt);
            if (dx.cls == sf_class::nan || dy.cls == sf_class::nan) continue;
            if (dx.cls == sf_class::infinity || dy.cls == sf_class::infinity) continue;
            double xv = sf_to_double(x, fmt), yv = sf_to_double(y, fmt);
            double exact = xv + yv;  // exact in binary64 for these tiny formats
            sf_add_result r = sf_add_full(x, y, fmt);

            packed_float want;
            if (exact == 0.0)
                want = sf_zero(std::signbit(xv) && std::signbit(yv), fmt);
            else
                want = oracle.round(exact);
            REQUIRE_MESSAGE(r.sum == want, sf_dump(x, fmt) << " + " << sf_dump(y, fmt) << " -> "
                                                           << sf_dump(r.sum, fmt) << " want "
                                                           << sf_dump(want, fmt));
            sf_decoded ds = sf_decode(r.sum, fmt);
            if (ds.cls != sf_class::infinity) {
                double sv = sf_to_double(r.sum, fmt);
                double ev = sf_to_double(r.error, fmt);
                // the error is exactly representable and closes the identity
                REQUIRE_MESSAGE(sv + ev == exact, sf_dump(x, fmt) << " + " << sf_dump(y, fmt));
                // symmetry
                CHECK(sf_addre(x, y, fmt) == sf_addre(y, x, fmt));
                // exact sums report +0 error
                if (exact == sv) CHECK(r.error == sf_zero(false, fmt));
            } else {
                CHECK(r.error == sf_canonical_nan(fmt));
            }
            checked += 1;
        }
    }
    CHECK(checked > count * count / 2);
}

TEST_CASE("exhaustive (4,3): addition rounds correctly and the error identity holds") {
    exhaustive_format_check(mini_format{4, 3});
}

TEST_CASE("exhaustive (3,2): addition rounds correctly and the error identity holds") {
    exhaustive_format_check(mini_format{3, 2});
}

TEST_CASE("(4,3) special pairs") {
    mini_format fmt{4, 3};
    packed_float pz = sf_zero(false, fmt), nz = sf_zero(true, fmt);
    CHECK(sf_add(pz, nz, fmt) == pz);
    CHECK(sf_add(nz, nz, fmt) == nz);
    // largest finite + largest finite overflows to infinity
    packed_float max{0b0'1110'111};
    CHECK(sf_add(max, max, fmt) == sf_inf(false, fmt));
    CHECK(sf_addre(max, max, fmt) == sf_canonical_nan(fmt));
    // exact cancellation
    for (std::uint64_t b = 0; b < 128; ++b) {
        packed_float x{b};
        sf_decoded d = sf_decode(x, fmt);
        if (d.cls != sf_class::finite) continue;
        packed_float neg{b | fmt.sign_mask()};
        CHECK(sf_add(x, neg, fmt) == pz);
        CHECK(sf_addre(x, neg, fmt) == pz);
    }
    // infinities
    packed_float pinf = sf_inf(false, fmt), ninf = sf_inf(true, fmt);
    CHECK(sf_add(pinf, max, fmt) == pinf);
    CHECK(sf_add(ninf, max, fmt) == ninf);
    CHECK(sf_add(pinf, ninf, fmt) == sf_canonical_nan(fmt));
}

TEST_CASE("sf_round guard/round/sticky behaviour") {
    mini_format fmt{4, 3};
    // quantum near 1.0 is 2^-3; mantissa given at 2^-4 carries one guard bit
    // guard 1, nothing below, even kept mantissa: exact tie rounds down
    CHECK(sf_to_double(sf_round(false, 0b10001, false, -4, fmt), fmt) == 1.0);
    // guard 1 with sticky: rounds up
    CHECK(sf_to_double(sf_round(false, 0b10001, true, -4, fmt), fmt) == 1.125);
    // guard 1, odd kept mantissa at an exact tie: rounds up to the even one
    CHECK(sf_to_double(sf_round(false, 0b10011, false, -4, fmt), fmt) == 1.25);
    // guard 0 with sticky: stays down
    CHECK(sf_to_double(sf_round(false, 0b10000, true, -4, fmt), fmt) == 1.0);
}

TEST_CASE("sf_round full enumeration against the rational oracle on (4,3)") {
    mini_format fmt{4, 3};
    const nearest_oracle oracle(fmt);
    for (std::uint64_t mantissa = 1; mantissa < (1u << 9); ++mantissa) {
        for (int e = -14; e <= 2; ++e) {
            for (bool sticky : {false, true}) {
                // a sticky tail is well-defined only when the mantissa reaches
                // below the guard position; the smallest quantum is 2^-9
                if (sticky && e > -10) continue;
                for (bool sign : {false, true}) {
                    packed_float got = sf_round(sign, mantissa, sticky, e, fmt);
                    // rounding is constant over the open sticky interval, so
                    // its midpoint is a faithful representative
                    double exact = std::ldexp(static_cast<double>(mantissa) + (sticky ? 0.5 : 0.0), e);
                    packed_float want = oracle.round(sign ? -exact : exact);
                    REQUIRE_MESSAGE(got == want,
                                    "m=" << mantissa << " e=" << e << " sticky=" << sticky
                                         << " sign=" << sign << " got " << sf_dump(got, fmt)
                                         << " want " << sf_dump(want, fmt));
                }
            }
        }
    }
}

TEST_CASE("binary64 addition matches the host bit for bit") {
    mini_format fmt = mini_format::binary64();
    std::mt19937_64 rng(21);
    for (int i = 0; i < 100000; ++i) {
        double a = random_finite(rng, -600, 600);
        double b = random_finite(rng, -600, 600);
        packed_float r = sf_add(packed_float{bits(a)}, packed_float{bits(b)}, fmt);
        CHECK(r.bits == bits(a + b));
    }
    // subnormal band
    for (int i = 0; i < 50000; ++i) {
        double a = random_finite(rng, -1074, -1015);
        double b = random_finite(rng, -1074, -1015);
        packed_float r = sf_add(packed_float{bits(a)}, packed_float{bits(b)}, fmt);
        CHECK(r.bits == bits(a + b));
    }
    // signed zeros and infinities
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (double a : {0.0, -0.0, inf, -inf, 0x1p-1074, std::numeric_limits<double>::max()})
        for (double b : {0.0, -0.0, inf, -inf, -0x1p-1074, 1.0}) {
            packed_float r = sf_add(packed_float{bits(a)}, packed_float{bits(b)}, fmt);
            if (std::isnan(a + b))
                CHECK(std::isnan(std::bit_cast<double>(r.bits)));
            else
                CHECK(r.bits == bits(a + b));
        }
}

TEST_CASE("binary64 boundary-pair matrix matches the host") {
    mini_format fmt = mini_format::binary64();
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double pool[] = {
        0.0, -0.0, 1.0, -1.0, 1.0 + 0x1p-52, 1.0 - 0x1p-53, 0x1p-1022, -0x1p-1022,
        0x1p-1074, -0x1p-1074, 0x1.ffffffffffffep-1023,  // largest subnormal
        std::numeric_limits<double>::max(), -std::numeric_limits<double>::max(),
        0x1.fffffffffffffp1022, 0x1p1023, 0x1p52, 0x1p53, 0x1p53 + 2.0, -0x1p53,
        0.5, 2.0 / 3.0, 0x1.5555555555555p-2, 1e308, -1e308, 3.5e-310, inf, -inf,
    };
    for (double a : pool)
        for (double b : pool) {
            packed_float r = sf_add(packed_float{bits(a)}, packed_float{bits(b)}, fmt);
            double host = a + b;
            if (std::isnan(host))
                CHECK(std::isnan(std::bit_cast<double>(r.bits)));
            else
                CHECK_MESSAGE(r.bits == bits(host), a << " + " << b);
            // the error output closes the identity whenever the sum is finite
            if (std::isfinite(a) && std::isfinite(b) && std::isfinite(host)) {
                packed_float e = sf_addre(packed_float{bits(a)}, packed_float{bits(b)}, fmt);
                double ev = std::bit_cast<double>(e.bits);
                CHECK(exact_sum({a, b}) == exact_sum({host, ev}));
            }
        }
}

TEST_CASE("binary64 sf_addre matches the fpaddre reference") {
    mini_format fmt = mini_format::binary64();
    std::mt19937_64 rng(22);
    for (int i = 0; i < 100000; ++i) {
        double a = random_finite(rng, -500, 500);
        double b = random_finite(rng, -500, 500);
        packed_float e = sf_addre(packed_float{bits(a)}, packed_float{bits(b)}, fmt);
        if (std::isfinite(a + b))
            CHECK(e.bits == bits(fpaddre(a, b)));
        else
            CHECK(std::isnan(std::bit_cast<double>(e.bits)));
    }
}

TEST_CASE("sf_dump renders sign, exponent and mantissa fields") {
    mini_format fmt{4, 3};
    CHECK(sf_dump(sf_from_double(1.0, fmt), fmt) == "0|0111|000");
    CHECK(sf_dump(sf_from_double(-1.5, fmt), fmt) == "1|0111|100");
    CHECK(sf_dump(sf_zero(false, fmt), fmt) == "0|0000|000");
    CHECK(sf_dump(sf_inf(true, fmt), fmt) == "1|1111|000");
}

TEST_SUITE_END();
