// Double-double arithmetic: a value is the unevaluated sum hi + lo of two
// binary64 numbers, canonical when hi == fl(hi + lo). The addition uses the
// accurate Knuth-based formulation (2 general-case + 2 special-case
// error-free additions); the multiplication uses one FMA-based error-free
// product plus one special-case renormalization. The general-case additions
// are routed through the selected backend, so substituting the fpaddre
// primitive changes cost but not (in exact mode) results.
#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include "fpre/eft.hpp"

namespace fpre {

template <typename T>
struct dd_pair {
    T hi, lo;
};

using double_double = dd_pair<double>;

inline double_double dd_from(double x) { return {x, 0.0}; }

// canonical iff hi absorbs lo entirely; non-finite or zero hi requires lo == 0
inline bool dd_is_canonical(double_double x) {
    if (std::isnan(x.hi)) return x.lo == 0.0;
    if (std::isinf(x.hi) || x.hi == 0.0) return x.lo == 0.0;
    return std::isfinite(x.lo) && x.hi + x.lo == x.hi;
}

// renormalize an overlapping pair with one fast_two_sum; requires
// |hi| >= |lo| or hi == 0 (the zero case is exact for Dekker's sequence)
template <typename T>
inline dd_pair<T> dd_renorm(T hi, T lo) {
#if defined(FPRE_VALIDATE)
    if constexpr (std::is_same_v<T, double>) {
        if (std::fabs(hi) < std::fabs(lo) && hi != 0.0)
            throw precondition_error("dd_renorm: |hi| < |lo|");
    }
#endif
    eft_result<T> r = detail::fast_two_sum_unchecked(hi, lo);
    return {r.result, r.error};
}

template <eft_backend BK, typename T>
inline dd_pair<T> dd_add(dd_pair<T> x, dd_pair<T> y) {
    eft_result<T> s = two_sum_via<BK>(x.hi, y.hi);
    eft_result<T> t = two_sum_via<BK>(x.lo, y.lo);
    T c = s.error + t.result;
    eft_result<T> h = fast_two_sum(s.result, c);
    T w = h.error + t.error;
    eft_result<T> r = fast_two_sum(h.result, w);
    return {r.result, r.error};
}

template <eft_backend BK, typename T>
inline dd_pair<T> dd_mul(dd_pair<T> x, dd_pair<T> y) {
    eft_result<T> p = two_prod(x.hi, y.hi);
    T cross = x.hi * y.lo + x.lo * y.hi;  // x.lo * y.lo is below the error bound
    T e = p.error + cross;
    eft_result<T> r = fast_two_sum(p.result, e);
    return {r.result, r.error};
}

template <eft_backend BK, typename T>
inline dd_pair<T> dd_add_d(dd_pair<T> x, T y) {
    eft_result<T> s = two_sum_via<BK>(x.hi, y);
    T c = s.error + x.lo;
    eft_result<T> r = fast_two_sum(s.result, c);
    return {r.result, r.error};
}

inline double_double dd_add(double_double x, double_double y,
                            eft_backend bk = eft_backend::baseline) {
    switch (bk) {
        case eft_backend::baseline: return dd_add<eft_backend::baseline>(x, y);
        case eft_backend::fpaddre_exact: return dd_add<eft_backend::fpaddre_exact>(x, y);
        case eft_backend::fpaddre_simulated: return dd_add<eft_backend::fpaddre_simulated>(x, y);
    }
    throw std::invalid_argument("dd_add: unknown backend");
}

inline double_double dd_mul(double_double x, double_double y,
                            eft_backend bk = eft_backend::baseline) {
    switch (bk) {
        case eft_backend::baseline: return dd_mul<eft_backend::baseline>(x, y);
        case eft_backend::fpaddre_exact: return dd_mul<eft_backend::fpaddre_exact>(x, y);
        case eft_backend::fpaddre_simulated: return dd_mul<eft_backend::fpaddre_simulated>(x, y);
    }
    throw std::invalid_argument("dd_mul: unknown backend");
}

inline double_double dd_add_d(double_double x, double y,
                              eft_backend bk = eft_backend::baseline) {
    switch (bk) {
        case eft_backend::baseline: return dd_add_d<eft_backend::baseline>(x, y);
        case eft_backend::fpaddre_exact: return dd_add_d<eft_backend::fpaddre_exact>(x, y);
        case eft_backend::fpaddre_simulated: return dd_add_d<eft_backend::fpaddre_simulated>(x, y);
    }
    throw std::invalid_argument("dd_add_d: unknown backend");
}

// two hex-float components, e.g. "(0x1.8p+0, -0x1p-54)"
inline std::string dd_to_string(double_double x) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "(%a, %a)", x.hi, x.lo);
    return buf;
}

}  // namespace fpre
