// Exact dyadic-rational arithmetic: the reference implementation that all
// accuracy claims in this library are tested against. Values are kept as
// mantissa * 2^exponent with an arbitrary-precision mantissa, so sums,
// products, dot products and polynomial evaluations of binary64 inputs are
// computed without any rounding, and a single correctly-rounding conversion
// maps them back into any supported format.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "fpre/softfloat.hpp"

namespace fpre {

// Sign-magnitude big integer, little-endian 64-bit limbs, no trailing zero
// limbs. Only the operations the dyadic layer needs.
class bigint {
public:
    bigint() = default;
    bigint(std::int64_t v) {
        if (v != 0) {
            sign_ = v < 0 ? -1 : 1;
            std::uint64_t mag = v < 0 ? ~static_cast<std::uint64_t>(v) + 1 : static_cast<std::uint64_t>(v);
            limbs_.push_back(mag);
        }
    }
    static bigint from_magnitude(std::uint64_t mag, bool negative) {
        bigint r;
        if (mag != 0) {
            r.sign_ = negative ? -1 : 1;
            r.limbs_.push_back(mag);
        }
        return r;
    }

    bool is_zero() const { return limbs_.empty(); }
    int sign() const { return sign_; }

    bigint abs() const {
        bigint r = *this;
        if (r.sign_ < 0) r.sign_ = 1;
        return r;
    }
    bigint negated() const {
        bigint r = *this;
        r.sign_ = -r.sign_;
        return r;
    }

    std::size_t bit_length() const {
        if (limbs_.empty()) return 0;
        return 64 * (limbs_.size() - 1) + (64 - static_cast<std::size_t>(std::countl_zero(limbs_.back())));
    }
    bool test_bit(std::size_t i) const {
        std::size_t limb = i / 64;
        if (limb >= limbs_.size()) return false;
        return (limbs_[limb] >> (i % 64)) & 1u;
    }
    // any magnitude bit set at position < i
    bool any_below(std::size_t i) const {
        std::size_t full = i / 64, rem = i % 64;
        for (std::size_t k = 0; k < full && k < limbs_.size(); ++k)
            if (limbs_[k] != 0) return true;
        if (rem != 0 && full < limbs_.size())
            if ((limbs_[full] & ((std::uint64_t{1} << rem) - 1)) != 0) return true;
        return false;
    }
    std::size_t trailing_zero_bits() const {
        for (std::size_t k = 0; k < limbs_.size(); ++k)
            if (limbs_[k] != 0)
                return 64 * k + static_cast<std::size_t>(std::countr_zero(limbs_[k]));
        return 0;
    }

    bigint shl(std::size_t n) const {
        if (is_zero() || n == 0) return *this;
        bigint r;
        r.sign_ = sign_;
        std::size_t limb_shift = n / 64, bit_shift = n % 64;
        r.limbs_.assign(limbs_.size() + limb_shift + 1, 0);
        for (std::size_t k = 0; k < limbs_.size(); ++k) {
            r.limbs_[k + limb_shift] |= limbs_[k] << bit_shift;
            if (bit_shift != 0)
                r.limbs_[k + limb_shift + 1] |= limbs_[k] >> (64 - bit_shift);
        }
        r.trim();
        return r;
    }
    // magnitude shift toward zero
    bigint shr(std::size_t n) const {
        if (is_zero() || n == 0) return *this;
        std::size_t limb_shift = n / 64, bit_shift = n % 64;
        if (limb_shift >= limbs_.size()) return bigint{};
        bigint r;
        r.sign_ = sign_;
        r.limbs_.assign(limbs_.size() - limb_shift, 0);
        for (std::size_t k = 0; k < r.limbs_.size(); ++k) {
            r.limbs_[k] = limbs_[k + limb_shift] >> bit_shift;
            if (bit_shift != 0 && k + limb_shift + 1 < limbs_.size())
                r.limbs_[k] |= limbs_[k + limb_shift + 1] << (64 - bit_shift);
        }
        r.trim();
        return r;
    }

    friend bigint operator+(const bigint& a, const bigint& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        bigint r;
        if (a.sign_ == b.sign_) {
            r.sign_ = a.sign_;
            r.limbs_ = add_mag(a.limbs_, b.limbs_);
        } else {
            int c = cmp_mag(a.limbs_, b.limbs_);
            if (c == 0) return bigint{};
            const bigint& big = c > 0 ? a : b;
            const bigint& small = c > 0 ? b : a;
            r.sign_ = big.sign_;
            r.limbs_ = sub_mag(big.limbs_, small.limbs_);
        }
        r.trim();
        return r;
    }
    friend bigint operator-(const bigint& a, const bigint& b) { return a + b.negated(); }
    friend bigint operator*(const bigint& a, const bigint& b) {
        if (a.is_zero() || b.is_zero()) return bigint{};
        bigint r;
        r.sign_ = a.sign_ * b.sign_;
        r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
        for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
            unsigned __int128 carry = 0;
            for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
                unsigned __int128 cur = static_cast<unsigned __int128>(a.limbs_[i]) * b.limbs_[j] +
                                        r.limbs_[i + j] + carry;
                r.limbs_[i + j] = static_cast<std::uint64_t>(cur);
                carry = cur >> 64;
            }
            r.limbs_[i + b.limbs_.size()] += static_cast<std::uint64_t>(carry);
        }
        r.trim();
        return r;
    }

    friend bool operator==(const bigint& a, const bigint& b) {
        return a.sign_ == b.sign_ && a.limbs_ == b.limbs_;
    }
    // signed three-way compare
    static int compare(const bigint& a, const bigint& b) {
        if (a.sign_ != b.sign_) return a.sign_ < b.sign_ ? -1 : 1;
        int c = cmp_mag(a.limbs_, b.limbs_);
        return a.sign_ >= 0 ? c : -c;
    }

    // exact conversion; magnitude must fit 63 bits
    std::int64_t to_int64() const {
        if (is_zero()) return 0;
        if (limbs_.size() > 1 || limbs_[0] > static_cast<std::uint64_t>(INT64_MAX))
            throw std::overflow_error("bigint::to_int64: magnitude too large");
        auto v = static_cast<std::int64_t>(limbs_[0]);
        return sign_ < 0 ? -v : v;
    }

private:
    void trim() {
        while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
        if (limbs_.empty()) sign_ = 0;
    }
    static int cmp_mag(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
        if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
        for (std::size_t k = a.size(); k-- > 0;)
            if (a[k] != b[k]) return a[k] < b[k] ? -1 : 1;
        return 0;
    }
    static std::vector<std::uint64_t> add_mag(const std::vector<std::uint64_t>& a,
                                              const std::vector<std::uint64_t>& b) {
        const auto& big = a.size() >= b.size() ? a : b;
        const auto& small = a.size() >= b.size() ? b : a;
        std::vector<std::uint64_t> r(big.size() + 1, 0);
        unsigned __int128 carry = 0;
        for (std::size_t k = 0; k < big.size(); ++k) {
            unsigned __int128 cur = static_cast<unsigned __int128>(big[k]) + (k < small.size() ? small[k] : 0) + carry;
            r[k] = static_cast<std::uint64_t>(cur);
            carry = cur >> 64;
        }
        r[big.size()] = static_cast<std::uint64_t>(carry);
        return r;
    }
    // requires |a| >= |b|
    static std::vector<std::uint64_t> sub_mag(const std::vector<std::uint64_t>& a,
                                              const std::vector<std::uint64_t>& b) {
        std::vector<std::uint64_t> r(a.size(), 0);
        std::uint64_t borrow = 0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            std::uint64_t bv = k < b.size() ? b[k] : 0;
            std::uint64_t d = a[k] - bv;
            std::uint64_t borrow2 = a[k] < bv;
            r[k] = d - borrow;
            borrow = borrow2 | (d < borrow);
        }
        return r;
    }

    int sign_ = 0;
    std::vector<std::uint64_t> limbs_;
};

// value = mantissa * 2^exponent, canonical: mantissa odd or zero (exponent 0
// when zero). Canonical form makes operator== a value equality.
struct dyadic {
    bigint mantissa;
    std::int64_t exponent = 0;

    dyadic() = default;

    static dyadic normalized(bigint m, std::int64_t e) {
        dyadic d;
        if (m.is_zero()) return d;
        std::size_t tz = m.trailing_zero_bits();
        d.mantissa = m.shr(tz);
        d.exponent = e + static_cast<std::int64_t>(tz);
        return d;
    }
    static dyadic from_double(double x) {
        if (!std::isfinite(x)) throw std::domain_error("dyadic::from_double: non-finite input");
        if (x == 0.0) return dyadic{};
        std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
        bool neg = bits >> 63;
        std::uint64_t frac = bits & ((std::uint64_t{1} << 52) - 1);
        std::int64_t biased = static_cast<std::int64_t>((bits >> 52) & 0x7FF);
        std::uint64_t sig;
        std::int64_t e;
        if (biased == 0) {  // subnormal
            sig = frac;
            e = 1 - 1023 - 52;
        } else {
            sig = frac | (std::uint64_t{1} << 52);
            e = biased - 1023 - 52;
        }
        return normalized(bigint::from_magnitude(sig, neg), e);
    }

    bool is_zero() const { return mantissa.is_zero(); }
    int sign() const { return mantissa.sign(); }
    dyadic abs() const {
        dyadic d = *this;
        d.mantissa = d.mantissa.abs();
        return d;
    }
    dyadic operator-() const {
        dyadic d = *this;
        d.mantissa = d.mantissa.negated();
        return d;
    }

    friend dyadic operator+(const dyadic& a, const dyadic& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        std::int64_t e = std::min(a.exponent, b.exponent);
        bigint ma = a.mantissa.shl(static_cast<std::size_t>(a.exponent - e));
        bigint mb = b.mantissa.shl(static_cast<std::size_t>(b.exponent - e));
        return normalized(ma + mb, e);
    }
    friend dyadic operator-(const dyadic& a, const dyadic& b) { return a + (-b); }
    friend dyadic operator*(const dyadic& a, const dyadic& b) {
        if (a.is_zero() || b.is_zero()) return dyadic{};
        return normalized(a.mantissa * b.mantissa, a.exponent + b.exponent);
    }
    friend bool operator==(const dyadic& a, const dyadic& b) = default;

    // signed three-way value compare
    static int compare(const dyadic& a, const dyadic& b) {
        dyadic d = a - b;
        return d.mantissa.sign();
    }
};

inline dyadic exact_mul(double a, double b) {
    return dyadic::from_double(a) * dyadic::from_double(b);
}

inline dyadic exact_sum(std::span<const double> values) {
    dyadic acc;
    for (double v : values) acc = acc + dyadic::from_double(v);
    return acc;
}
inline dyadic exact_sum(std::initializer_list<double> values) {
    return exact_sum(std::span<const double>(values.begin(), values.size()));
}

inline dyadic exact_dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("exact_dot: length mismatch");
    dyadic acc;
    for (std::size_t i = 0; i < a.size(); ++i) acc = acc + exact_mul(a[i], b[i]);
    return acc;
}

// coefficients[i] holds the coefficient of x^i
inline dyadic exact_horner(std::span<const double> coefficients, double x) {
    if (coefficients.empty()) throw std::invalid_argument("exact_horner: empty polynomial");
    dyadic dx = dyadic::from_double(x);
    dyadic acc = dyadic::from_double(coefficients.back());
    for (std::size_t i = coefficients.size() - 1; i-- > 0;)
        acc = acc * dx + dyadic::from_double(coefficients[i]);
    return acc;
}

// Round-to-nearest-even conversion of a dyadic into `fmt`, with subnormal
// support and overflow to infinity. This is the rounding definition the rest
// of the library is checked against; it deliberately shares no code with
// softfloat::sf_round.
inline packed_float round_to(const dyadic& d, mini_format fmt) {
    if (d.is_zero()) return sf_zero(false, fmt);
    bool neg = d.sign() < 0;
    bigint m = d.mantissa.abs();
    std::int64_t e = d.exponent;
    const std::int64_t L = static_cast<std::int64_t>(m.bit_length());
    const std::int64_t value_exp = e + L - 1;
    const std::int64_t q_min = fmt.quantum_min();
    std::int64_t q = std::max(value_exp - fmt.mantissa_bits, q_min);

    bigint kept;
    if (q > e) {
        std::size_t shift = static_cast<std::size_t>(q - e);
        kept = m.shr(shift);
        bool round_bit = m.test_bit(shift - 1);
        bool sticky = m.any_below(shift - 1);
        if (round_bit && (sticky || kept.test_bit(0))) kept = kept + bigint{1};
    } else {
        kept = m.shl(static_cast<std::size_t>(e - q));
    }
    if (kept.is_zero()) return sf_zero(neg, fmt);
    // carry out of p bits: shift down exactly (dropped bit is zero)
    while (static_cast<std::int64_t>(kept.bit_length()) > fmt.precision()) {
        kept = kept.shr(1);
        q += 1;
    }
    std::int64_t result_exp = q + static_cast<std::int64_t>(kept.bit_length()) - 1;
    if (result_exp > fmt.emax()) return sf_inf(neg, fmt);
    std::uint64_t sig = static_cast<std::uint64_t>(kept.to_int64());
    return sf_encode_exact(neg, sig, q, fmt);
}

inline double round_to_double(const dyadic& d) {
    return sf_to_double(round_to(d, mini_format::binary64()), mini_format::binary64());
}

// sum-of-absolute-terms over absolute-exact-result estimate, computed exactly
// and converted at the end; exact zero reports +infinity.
inline double condition_ratio(const dyadic& sum_abs, const dyadic& result) {
    if (result.is_zero()) return std::numeric_limits<double>::infinity();
    double num = round_to_double(sum_abs);
    double den = std::fabs(round_to_double(result));
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return num / den;
}

inline double condition_number(std::span<const double> values) {
    dyadic num, den;
    for (double v : values) {
        dyadic d = dyadic::from_double(v);
        num = num + d.abs();
        den = den + d;
    }
    return condition_ratio(num, den);
}

inline double condition_number(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("condition_number: length mismatch");
    dyadic num, den;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dyadic p = exact_mul(a[i], b[i]);
        num = num + p.abs();
        den = den + p;
    }
    return condition_ratio(num, den);
}

inline double condition_number(std::span<const double> coefficients, double x) {
    dyadic ax = dyadic::from_double(x).abs();
    dyadic num;
    dyadic pow = dyadic::normalized(bigint{1}, 0);
    for (double c : coefficients) {
        num = num + dyadic::from_double(c).abs() * pow;
        pow = pow * ax;
    }
    return condition_ratio(num, exact_horner(coefficients, x));
}

}  // namespace fpre
