// Compensated algorithms: plain working-precision kernels augmented with
// error-free transformations so the result is as accurate as if computed in
// twice the working precision and rounded once. Three kernels, each paired
// with its plain counterpart: Horner polynomial evaluation
// (Graillat/Langlois/Louvet), dot product (Ogita/Rump/Oishi Dot2) and
// cascaded summation (Sum2). Accumulation order is fixed left-to-right so
// results are bitwise deterministic.
#pragma once

#include <span>
#include <stdexcept>

#include "fpre/eft.hpp"

namespace fpre {

// coefficients[i] holds the coefficient of x^i; plain Horner recurrence
inline double horner(std::span<const double> coefficients, double x) {
    if (coefficients.empty()) throw std::invalid_argument("horner: empty polynomial");
    double s = coefficients.back();
    for (std::size_t i = coefficients.size() - 1; i-- > 0;)
        s = s * x + coefficients[i];
    return s;
}

template <eft_backend BK>
inline double comp_horner(std::span<const double> coefficients, double x) {
    if (coefficients.empty()) throw std::invalid_argument("comp_horner: empty polynomial");
    double s = coefficients.back();
    double err = 0.0;
    for (std::size_t i = coefficients.size() - 1; i-- > 0;) {
        eft_result<double> p = two_prod(s, x);
        eft_result<double> t = two_sum_via<BK>(p.result, coefficients[i]);
        s = t.result;
        err = err * x + (p.error + t.error);  // error polynomial, plain Horner
    }
    return s + err;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    if (a.empty()) throw std::invalid_argument("dot: empty vectors");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s = std::fma(a[i], b[i], s);
    return s;
}

template <eft_backend BK>
inline double comp_dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("comp_dot: length mismatch");
    if (a.empty()) throw std::invalid_argument("comp_dot: empty vectors");
    eft_result<double> p = two_prod(a[0], b[0]);
    double s = p.result;
    double c = p.error;
    for (std::size_t i = 1; i < a.size(); ++i) {
        p = two_prod(a[i], b[i]);
        eft_result<double> t = two_sum_via<BK>(s, p.result);
        s = t.result;
        c = c + (p.error + t.error);
    }
    return s + c;
}

template <eft_backend BK>
inline double comp_sum(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("comp_sum: empty input");
    double s = values[0];
    double c = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        eft_result<double> t = two_sum_via<BK>(s, values[i]);
        s = t.result;
        c = c + t.error;
    }
    return s + c;
}

inline double comp_horner(std::span<const double> coefficients, double x,
                          eft_backend bk = eft_backend::baseline) {
    switch (bk) {
        case eft_backend::baseline: return comp_horner<eft_backend::baseline>(coefficients, x);
        case eft_backend::fpaddre_exact: return comp_horner<eft_backend::fpaddre_exact>(coefficients, x);
        case eft_backend::fpaddre_simulated: return comp_horner<eft_backend::fpaddre_simulated>(coefficients, x);
    }
    throw std::invalid_argument("comp_horner: unknown backend");
}

inline double comp_dot(std::span<const double> a, std::span<const double> b,
                       eft_backend bk = eft_backend::baseline) {
    switch (bk) {
        case eft_backend::baseline: return comp_dot<eft_backend::baseline>(a, b);
        case eft_backend::fpaddre_exact: return comp_dot<eft_backend::fpaddre_exact>(a, b);
        case eft_backend::fpaddre_simulated: return comp_dot<eft_backend::fpaddre_simulated>(a, b);
    }
    throw std::invalid_argument("comp_dot: unknown backend");
}

inline double comp_sum(std::span<const double> values,
                       eft_backend bk = eft_backend::baseline) {
    switch (bk) {
        case eft_backend::baseline: return comp_sum<eft_backend::baseline>(values);
        case eft_backend::fpaddre_exact: return comp_sum<eft_backend::fpaddre_exact>(values);
        case eft_backend::fpaddre_simulated: return comp_sum<eft_backend::fpaddre_simulated>(values);
    }
    throw std::invalid_argument("comp_sum: unknown backend");
}

}  // namespace fpre
