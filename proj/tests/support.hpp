// Shared helpers for the test suites: deterministic random generators,
// dyadic-based comparison predicates and the naive double-double GEMM
// reference loop.
#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <vector>

#include "fpre/dd.hpp"
#include "fpre/ddgemm.hpp"
#include "fpre/oracle.hpp"

namespace fpre_test {

inline std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }
inline bool same_bits(double a, double b) { return bits(a) == bits(b); }

inline double random_finite(std::mt19937_64& rng, int exp_min, int exp_max) {
    std::uniform_int_distribution<std::uint64_t> word;
    std::uniform_int_distribution<int> exp(exp_min, exp_max);
    double m = 1.0 + std::ldexp(static_cast<double>(word(rng) >> 12), -52);
    double v = std::ldexp(m, exp(rng));
    return (word(rng) & 1) ? -v : v;
}

// canonical double-double with exponents in the well-scaled band
inline fpre::double_double random_dd(std::mt19937_64& rng, int exp_min = -30, int exp_max = 30) {
    double hi = random_finite(rng, exp_min, exp_max);
    double lo = hi * random_finite(rng, -55, -54);
    fpre::eft_result<double> r = fpre::two_sum(hi, lo);
    return {r.result, r.error};
}

inline fpre::dyadic dd_value(fpre::double_double x) {
    return fpre::exact_sum({x.hi, x.lo});
}

// |computed - exact| <= 2^-k * |exact|, evaluated exactly
inline bool within_rel_pow2(const fpre::dyadic& computed, const fpre::dyadic& exact, int k) {
    fpre::dyadic diff = (computed - exact).abs();
    if (exact.is_zero()) return diff.is_zero();
    fpre::dyadic scaled = fpre::dyadic::normalized(diff.mantissa, diff.exponent + k);
    return fpre::dyadic::compare(scaled, exact.abs()) <= 0;
}

// ulps of |computed - exact| measured in units of ulp(exact), as a double
inline double ulp_distance(double computed, const fpre::dyadic& exact) {
    double ref = fpre::round_to_double(exact);
    double u = std::nextafter(std::fabs(ref), std::numeric_limits<double>::infinity()) - std::fabs(ref);
    fpre::dyadic diff = (fpre::dyadic::from_double(computed) - exact).abs();
    return fpre::round_to_double(diff) / u;
}

// dot-product pair with condition below the cap; rejection-sampled
inline void random_conditioned_dot(std::mt19937_64& rng, std::size_t n, double cond_cap,
                                   std::vector<double>& a, std::vector<double>& b) {
    a.resize(n);
    b.resize(n);
    for (;;) {
        for (auto& x : a) x = random_finite(rng, -8, 8);
        for (auto& x : b) x = random_finite(rng, -8, 8);
        double c = fpre::condition_number(a, b);
        if (std::isfinite(c) && c <= cond_cap) return;
    }
}

// ill-conditioned dot pair built by cancelling the exact running dot, in the
// style of the classic generator; condition lands near `target_cond`
inline void gen_dot(std::mt19937_64& rng, std::size_t n, double target_cond,
                    std::vector<double>& a, std::vector<double>& b) {
    a.assign(n, 0.0);
    b.assign(n, 0.0);
    const std::size_t half = n / 2;
    const double log2_cond = std::log2(target_cond);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t i = 0; i < half; ++i) {
        double e = (i == 0) ? log2_cond / 2.0
                            : u(rng) * log2_cond / 2.0 * (static_cast<double>(half - i) / half);
        a[i] = u(rng) * std::exp2(e);
        b[i] = u(rng) * std::exp2(e);
    }
    for (std::size_t i = half; i < n; ++i) {
        double e = log2_cond / 2.0 * (static_cast<double>(n - i) / (n - half));
        a[i] = u(rng) * std::exp2(e);
        // choose b[i] so the running exact dot collapses toward zero
        std::vector<double> prefix_a(a.begin(), a.begin() + i);
        std::vector<double> prefix_b(b.begin(), b.begin() + i);
        double partial = fpre::round_to_double(fpre::exact_dot(prefix_a, prefix_b));
        b[i] = a[i] == 0.0 ? 0.0 : -partial / a[i];
    }
}

// degree-`deg` polynomial and evaluation point with condition below the cap
inline void random_conditioned_poly(std::mt19937_64& rng, int deg, double cond_cap,
                                    std::vector<double>& coeffs, double& x) {
    coeffs.resize(static_cast<std::size_t>(deg) + 1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> ux(1.0, 2.0);
    for (;;) {
        for (auto& c : coeffs) c = u(rng);
        x = ux(rng);
        double c = fpre::condition_number(coeffs, x);
        if (std::isfinite(c) && c <= cond_cap) return;
    }
}

// reference triple loop with the same per-element accumulation order as the
// blocked driver (k innermost, increasing)
inline fpre::dd_matrix naive_ddgemm(const fpre::dd_matrix& a, const fpre::dd_matrix& b,
                                    fpre::dd_matrix c,
                                    fpre::eft_backend bk = fpre::eft_backend::baseline) {
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < b.cols; ++j)
            for (int k = 0; k < a.cols; ++k)
                c.at(i, j) = fpre::dd_add(c.at(i, j), fpre::dd_mul(a.at(i, k), b.at(k, j), bk), bk);
    return c;
}

// exact value of one output element of c + a*b
inline fpre::dyadic exact_gemm_element(const fpre::dd_matrix& a, const fpre::dd_matrix& b,
                                       const fpre::dd_matrix& c, int i, int j) {
    fpre::dyadic acc = dd_value(c.at(i, j));
    for (int k = 0; k < a.cols; ++k)
        acc = acc + dd_value(a.at(i, k)) * dd_value(b.at(k, j));
    return acc;
}

inline fpre::dd_matrix random_dd_matrix(std::mt19937_64& rng, int rows, int cols) {
    fpre::dd_matrix m(rows, cols);
    for (auto& e : m.data) e = random_dd(rng, -4, 4);
    return m;
}

}  // namespace fpre_test
