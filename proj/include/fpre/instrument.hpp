// Instrumented evaluation of the error-free transformations: a counting
// scalar carries (value, dependency depth) through the very same templated
// code paths as the numeric evaluation and tallies every floating-point
// instruction on a shared counter. Negation and absolute value are sign-bit
// manipulations and count as free; fpaddre, fpadd3, fma and the min proxy
// each count as one instruction.
#pragma once

#include <algorithm>
#include <string_view>
#include <utility>
#include <vector>

#include "fpre/eft.hpp"

namespace fpre {

struct op_counter {
    int ops = 0;
};

struct counted {
    double value;
    int depth;
    op_counter* tape;
};

inline counted make_counted(double v, op_counter& tape) { return {v, 0, &tape}; }

namespace detail {
inline counted record(double v, const counted& a, const counted& b) {
    a.tape->ops += 1;
    return {v, std::max(a.depth, b.depth) + 1, a.tape};
}
inline counted record(double v, const counted& a, const counted& b, const counted& c) {
    a.tape->ops += 1;
    return {v, std::max({a.depth, b.depth, c.depth}) + 1, a.tape};
}
}  // namespace detail

inline counted operator+(counted a, counted b) { return detail::record(a.value + b.value, a, b); }
inline counted operator-(counted a, counted b) { return detail::record(a.value - b.value, a, b); }
inline counted operator*(counted a, counted b) { return detail::record(a.value * b.value, a, b); }
inline counted operator-(counted a) { return {-a.value, a.depth, a.tape}; }

inline counted fma(counted a, counted b, counted c) {
    return detail::record(std::fma(a.value, b.value, c.value), a, b, c);
}
inline counted fpaddre(counted a, counted b) {
    return detail::record(fpaddre(a.value, b.value), a, b);
}
inline counted fpadd3(counted a, counted b, counted c) {
    return detail::record(fpadd3(a.value, b.value, c.value), a, b, c);
}
inline counted proxy_min(counted a, counted b) {
    return detail::record(proxy_min(a.value, b.value), a, b);
}

enum class two_sum_algorithm { general, special, with_fpaddre, with_fpadd3 };

inline const char* to_string(two_sum_algorithm alg) {
    switch (alg) {
        case two_sum_algorithm::general: return "general";
        case two_sum_algorithm::special: return "special";
        case two_sum_algorithm::with_fpaddre: return "with-fpaddre";
        case two_sum_algorithm::with_fpadd3: return "with-fpadd3";
    }
    return "?";
}

struct eft_trace {
    int op_count = 0;       // floating-point instructions executed
    int critical_path = 0;  // longest dependency chain (latency slots)
    std::vector<std::pair<std::string_view, double>> intermediates;
};

// Evaluates the chosen error-free addition with the counting scalar. The
// counts come from the instrumented run of the same template the numeric API
// uses; the named intermediates are recomputed alongside for inspection.
inline std::pair<eft_result<double>, eft_trace> trace(two_sum_algorithm alg, double a, double b) {
    op_counter tape;
    counted ca = make_counted(a, tape);
    counted cb = make_counted(b, tape);
    eft_result<counted> r{};
    eft_trace t;
    switch (alg) {
        case two_sum_algorithm::general: {
            r = two_sum(ca, cb);
            double sum = a + b;
            double b_virtual = sum - a;
            double a_virtual = sum - b_virtual;
            t.intermediates = {{"sum", sum},
                               {"b_virtual", b_virtual},
                               {"a_virtual", a_virtual},
                               {"b_roundoff", b - b_virtual},
                               {"a_roundoff", a - a_virtual}};
            break;
        }
        case two_sum_algorithm::special: {
            r = fast_two_sum(ca, cb);
            double sum = a + b;
            t.intermediates = {{"sum", sum}, {"b_virtual", sum - a}};
            break;
        }
        case two_sum_algorithm::with_fpaddre:
            r = two_sum_fpaddre(ca, cb);
            t.intermediates = {{"sum", a + b}};
            break;
        case two_sum_algorithm::with_fpadd3:
            r = two_sum_fpadd3(ca, cb);
            t.intermediates = {{"sum", a + b}};
            break;
    }
    t.op_count = tape.ops;
    t.critical_path = std::max(r.result.depth, r.error.depth);
    return {eft_result<double>{r.result.value, r.error.value}, t};
}

}  // namespace fpre
