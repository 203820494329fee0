// Error-free transformations: each rounded operation is rewritten as an exact
// pair (result, error) with result + error equal to the true value. Besides
// the classic float-only sequences this module provides reference semantics
// for three instruction-level primitives: fpaddre (round-off error of an
// addition), fpmulre (round-off error of a multiplication) and fpadd3
// (three-input addition with a single final rounding).
//
// The algorithms are templates over the scalar type so that the instrumented
// counting scalar runs through exactly the same code as the numeric
// evaluation.
#pragma once

#ifdef __FAST_MATH__
#error "fast-math (-ffast-math, /fp:fast) breaks error-free transformations"
#endif

#include <cmath>
#include <stdexcept>
#include <type_traits>

#include "fpre/oracle.hpp"

namespace fpre {

template <typename T>
struct eft_result {
    T result;
    T error;
};

enum class eft_backend {
    baseline,           // classic float-only sequences
    fpaddre_exact,      // reference fpaddre: bitwise-identical values to baseline
    fpaddre_simulated,  // cost proxy (two-operand minimum): wrong error values, same shape
};

#if defined(FPRE_VALIDATE)
struct precondition_error : std::logic_error {
    using std::logic_error::logic_error;
};
#endif

// Knuth's branch-free error-free addition. Works for any operand order; the
// literal instruction sequence also yields the documented special-value
// behavior (error is NaN whenever the sum is not finite, +0 when the sum is
// exact).
template <typename T>
inline eft_result<T> two_sum(T a, T b) {
    T sum = a + b;
    T b_virtual = sum - a;
    T a_virtual = sum - b_virtual;
    T b_roundoff = b - b_virtual;
    T a_roundoff = a - a_virtual;
    return {sum, a_roundoff + b_roundoff};
}

namespace detail {
template <typename T>
inline eft_result<T> fast_two_sum_unchecked(T a, T b) {
    T sum = a + b;
    T b_virtual = sum - a;
    return {sum, b - b_virtual};
}
}  // namespace detail

// Dekker's two-instruction error path; requires |a| >= |b| (caller-checked,
// or enforced when built with FPRE_VALIDATE).
template <typename T>
inline eft_result<T> fast_two_sum(T a, T b) {
#if defined(FPRE_VALIDATE)
    if constexpr (std::is_same_v<T, double>) {
        if (std::fabs(a) < std::fabs(b))
            throw precondition_error("fast_two_sum: |a| < |b|");
    }
#endif
    return detail::fast_two_sum_unchecked(a, b);
}

// Round-off error of the addition a + b, independent of the rounded sum as a
// contract: the value equals two_sum(a, b).error bit for bit on all inputs.
// The reference implementation reuses the six-operation construction.
inline double fpaddre(double a, double b) {
    return two_sum(a, b).error;
}

// fl(a + b + c) with one single rounding, evaluated on the exact dyadic path.
// Non-finite inputs fall through to the host's sequential semantics; an exact
// zero keeps the IEEE all-negative-zeros sign rule.
inline double fpadd3(double a, double b, double c) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) return a + b + c;
    dyadic exact = exact_sum({a, b, c});
    if (exact.is_zero())
        return (std::signbit(a) && std::signbit(b) && std::signbit(c)) ? -0.0 : 0.0;
    return round_to_double(exact);
}

// FMA-based error-free multiplication. The error term is inexact when the
// product falls into the subnormal range; see the library notes.
template <typename T>
inline eft_result<T> two_prod(T a, T b) {
    using std::fma;
    T p = a * b;
    return {p, fma(a, b, -p)};
}

// Round-off error of the multiplication a * b; equals two_prod(a, b).error.
inline double fpmulre(double a, double b) {
    return two_prod(a, b).error;
}

// error-free addition built on the fpaddre primitive: two independent
// instructions, no dependency between result and error
template <typename T>
inline eft_result<T> two_sum_fpaddre(T a, T b) {
    return {a + b, fpaddre(a, b)};
}

// error-free addition built on a three-input add: two instructions forming a
// dependency chain
template <typename T>
inline eft_result<T> two_sum_fpadd3(T a, T b) {
    T sum = a + b;
    return {sum, fpadd3(a, b, -sum)};
}

// the substitution proxy: same cost class as an addition, value-incorrect
inline double proxy_min(double a, double b) {
    return b < a ? b : a;
}

// backend-dispatched general-case error-free addition (compile-time form)
template <eft_backend BK, typename T>
inline eft_result<T> two_sum_via(T a, T b) {
    if constexpr (BK == eft_backend::baseline)
        return two_sum(a, b);
    else if constexpr (BK == eft_backend::fpaddre_exact)
        return two_sum_fpaddre(a, b);
    else
        return {a + b, proxy_min(a, b)};
}

inline eft_result<double> two_sum_via(eft_backend bk, double a, double b) {
    switch (bk) {
        case eft_backend::baseline: return two_sum_via<eft_backend::baseline>(a, b);
        case eft_backend::fpaddre_exact: return two_sum_via<eft_backend::fpaddre_exact>(a, b);
        case eft_backend::fpaddre_simulated: return two_sum_via<eft_backend::fpaddre_simulated>(a, b);
    }
    throw std::invalid_argument("two_sum_via: unknown backend");
}

inline const char* to_string(eft_backend bk) {
    switch (bk) {
        case eft_backend::baseline: return "baseline";
        case eft_backend::fpaddre_exact: return "fpaddre-exact";
        case eft_backend::fpaddre_simulated: return "fpaddre-sim";
    }
    return "?";
}

}  // namespace fpre
