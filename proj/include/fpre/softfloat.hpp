// Bit-level emulation of round-to-nearest-even floating-point addition and of
// its round-off-error counterpart, parameterized by format so that tiny
// formats can be verified exhaustively. The datapath is the straightforward
// one: decode to integer significands, add exactly in a wide register,
// normalize and round once. The error output is extracted exactly from the
// same aligned sum; it never needs rounding of its own (the round-off of a
// same-format addition is always representable while the sum is finite).
#pragma once

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace fpre {

struct mini_format {
    int exponent_bits;  // >= 2
    int mantissa_bits;  // stored fraction width, >= 1; hidden leading bit implied

    constexpr bool valid() const {
        return exponent_bits >= 2 && mantissa_bits >= 1 &&
               1 + exponent_bits + mantissa_bits <= 64;
    }
    constexpr int total_bits() const { return 1 + exponent_bits + mantissa_bits; }
    constexpr int precision() const { return mantissa_bits + 1; }
    constexpr std::int64_t bias() const { return (std::int64_t{1} << (exponent_bits - 1)) - 1; }
    constexpr std::int64_t emax() const { return bias(); }
    constexpr std::int64_t emin() const { return 1 - bias(); }
    constexpr std::int64_t quantum_min() const { return emin() - mantissa_bits; }
    constexpr std::int64_t exp_field_max() const { return (std::int64_t{1} << exponent_bits) - 1; }
    constexpr std::uint64_t frac_mask() const { return (std::uint64_t{1} << mantissa_bits) - 1; }
    constexpr std::uint64_t sign_mask() const { return std::uint64_t{1} << (exponent_bits + mantissa_bits); }

    static constexpr mini_format binary64() { return {11, 52}; }
    static constexpr mini_format binary32() { return {8, 23}; }

    friend constexpr bool operator==(mini_format, mini_format) = default;
};

// raw encoding: sign | biased exponent | fraction, in the low total_bits()
struct packed_float {
    std::uint64_t bits = 0;
    friend constexpr bool operator==(packed_float, packed_float) = default;
};

enum class sf_class { zero, finite, infinity, nan };

// finite value = (-1)^sign * sig * 2^quantum; sig carries the hidden bit for
// normal numbers
struct sf_decoded {
    sf_class cls;
    bool sign;
    std::uint64_t sig;
    std::int64_t quantum;
};

inline sf_decoded sf_decode(packed_float x, mini_format fmt) {
    bool sign = (x.bits & fmt.sign_mask()) != 0;
    std::int64_t exp_field = static_cast<std::int64_t>((x.bits >> fmt.mantissa_bits) &
                                                       static_cast<std::uint64_t>(fmt.exp_field_max()));
    std::uint64_t frac = x.bits & fmt.frac_mask();
    if (exp_field == fmt.exp_field_max())
        return {frac == 0 ? sf_class::infinity : sf_class::nan, sign, 0, 0};
    if (exp_field == 0) {
        if (frac == 0) return {sf_class::zero, sign, 0, 0};
        return {sf_class::finite, sign, frac, fmt.quantum_min()};
    }
    return {sf_class::finite, sign,
            frac | (std::uint64_t{1} << fmt.mantissa_bits),
            exp_field - fmt.bias() - fmt.mantissa_bits};
}

inline packed_float sf_zero(bool sign, mini_format fmt) {
    return {sign ? fmt.sign_mask() : 0};
}
inline packed_float sf_inf(bool sign, mini_format fmt) {
    std::uint64_t bits = static_cast<std::uint64_t>(fmt.exp_field_max()) << fmt.mantissa_bits;
    if (sign) bits |= fmt.sign_mask();
    return {bits};
}
// single canonical quiet NaN: positive, fraction MSB set
inline packed_float sf_canonical_nan(mini_format fmt) {
    std::uint64_t bits = static_cast<std::uint64_t>(fmt.exp_field_max()) << fmt.mantissa_bits;
    bits |= std::uint64_t{1} << (fmt.mantissa_bits - 1);
    return {bits};
}

// Encodes (-1)^sign * sig * 2^quantum, which must be exactly representable in
// fmt. Used for the error output; the representability assertion is the
// invariant that addition round-off never underflows the format.
inline packed_float sf_encode_exact(bool sign, std::uint64_t sig, std::int64_t quantum, mini_format fmt) {
    if (sig == 0) return sf_zero(sign, fmt);
    // renormalize so quantum >= quantum_min and sig fits precision() bits
    while (quantum < fmt.quantum_min()) {
        assert((sig & 1) == 0 && "sf_encode_exact: value not representable (below minimum quantum)");
        sig >>= 1;
        quantum += 1;
    }
    int width = 64 - std::countl_zero(sig);
    while (width > fmt.precision()) {
        assert((sig & 1) == 0 && "sf_encode_exact: value not representable (too many bits)");
        sig >>= 1;
        quantum += 1;
        width -= 1;
    }
    std::int64_t value_exp = quantum + width - 1;
    if (value_exp > fmt.emax())
        throw std::overflow_error("sf_encode_exact: value exceeds format range");
    std::uint64_t bits;
    if (value_exp >= fmt.emin()) {
        // normal: shift sig so the hidden bit sits at position mantissa_bits
        std::uint64_t normal_sig = sig << (fmt.precision() - width);
        std::int64_t exp_field = value_exp + fmt.bias();
        bits = (static_cast<std::uint64_t>(exp_field) << fmt.mantissa_bits) |
               (normal_sig & fmt.frac_mask());
    } else {
        // subnormal: quantum must land exactly on quantum_min
        std::uint64_t sub_sig = sig << (quantum - fmt.quantum_min());
        assert(sub_sig <= fmt.frac_mask());
        bits = sub_sig;
    }
    if (sign) bits |= fmt.sign_mask();
    return {bits};
}

// Round-to-nearest-even of (-1)^sign * mantissa * 2^exponent into fmt, where
// `sticky` ORs together further nonzero bits below the mantissa. The single
// rounding authority of this module: sf_add and the double-import path both
// land here.
inline packed_float sf_round(bool sign, unsigned __int128 mantissa, bool sticky,
                             std::int64_t exponent, mini_format fmt) {
    if (mantissa == 0 && !sticky) return sf_zero(sign, fmt);
    assert((mantissa >> 127) == 0 && "sf_round: mantissa must leave headroom for the sticky bit");
    // fold the sticky bit in as one extra low-order bit; only the below-half /
    // half / above-half classification matters for nearest-even
    unsigned __int128 m = (mantissa << 1) | static_cast<unsigned>(sticky);
    std::int64_t e = exponent - 1;

    auto bit_len = [](unsigned __int128 v) -> std::int64_t {
        std::uint64_t hi = static_cast<std::uint64_t>(v >> 64);
        if (hi != 0) return 128 - std::countl_zero(hi);
        return 64 - std::countl_zero(static_cast<std::uint64_t>(v));
    };

    const std::int64_t L = bit_len(m);
    const std::int64_t value_exp = e + L - 1;
    std::int64_t q = std::max(value_exp - fmt.mantissa_bits, fmt.quantum_min());
    std::uint64_t kept;
    if (q > e) {
        std::int64_t shift = q - e;
        if (shift > L) {
            kept = 0;  // strictly below half of the smallest quantum
        } else if (shift == L) {
            // value lies in [half, one) quantum: up unless it is an exact tie
            bool tail = (m & ((static_cast<unsigned __int128>(1) << (L - 1)) - 1)) != 0;
            kept = tail ? 1 : 0;
        } else {
            kept = static_cast<std::uint64_t>(m >> shift);
            bool round_bit = (m >> (shift - 1)) & 1;
            bool tail = (m & ((static_cast<unsigned __int128>(1) << (shift - 1)) - 1)) != 0;
            if (round_bit && (tail || (kept & 1))) kept += 1;
        }
    } else {
        kept = static_cast<std::uint64_t>(m << (e - q));
    }
    if (kept == 0) return sf_zero(sign, fmt);
    if (64 - std::countl_zero(kept) > fmt.precision()) {  // carry into the next binade
        kept >>= 1;
        q += 1;
    }
    std::int64_t result_exp = q + (64 - std::countl_zero(kept)) - 1;
    if (result_exp > fmt.emax()) return sf_inf(sign, fmt);
    return sf_encode_exact(sign, kept, q, fmt);
}

struct sf_add_result {
    packed_float sum;
    packed_float error;
};

// Shared core of sf_add / sf_addre: one exact aligned integer addition, one
// rounding for the sum, exact extraction for the error. When the rounded sum
// is not finite the error output is the canonical NaN.
inline sf_add_result sf_add_full(packed_float x, packed_float y, mini_format fmt) {
    const packed_float qnan = sf_canonical_nan(fmt);
    sf_decoded a = sf_decode(x, fmt);
    sf_decoded b = sf_decode(y, fmt);

    if (a.cls == sf_class::nan || b.cls == sf_class::nan) return {qnan, qnan};
    if (a.cls == sf_class::infinity || b.cls == sf_class::infinity) {
        if (a.cls == sf_class::infinity && b.cls == sf_class::infinity && a.sign != b.sign)
            return {qnan, qnan};
        bool sign = a.cls == sf_class::infinity ? a.sign : b.sign;
        return {sf_inf(sign, fmt), qnan};
    }
    if (a.cls == sf_class::zero && b.cls == sf_class::zero)
        return {sf_zero(a.sign && b.sign, fmt), sf_zero(false, fmt)};
    if (a.cls == sf_class::zero) return {y, sf_zero(false, fmt)};
    if (b.cls == sf_class::zero) return {x, sf_zero(false, fmt)};

    if (a.quantum < b.quantum) std::swap(a, b);
    const std::int64_t shift = a.quantum - b.quantum;
    // Far case: the small operand sits entirely below the rounding range of
    // the large one, so the sum is the large operand and the error is the
    // small operand, both exactly.
    if (shift >= fmt.precision() + 3) {
        packed_float sum = sf_encode_exact(a.sign, a.sig, a.quantum, fmt);
        packed_float err = sf_encode_exact(b.sign, b.sig, b.quantum, fmt);
        return {sum, err};
    }

    // exact signed sum in units of 2^b.quantum
    __int128 v = (static_cast<__int128>(a.sig) << shift) * (a.sign ? -1 : 1) +
                 static_cast<__int128>(b.sig) * (b.sign ? -1 : 1);
    if (v == 0) return {sf_zero(false, fmt), sf_zero(false, fmt)};
    bool sign = v < 0;
    unsigned __int128 mag = sign ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);

    packed_float sum = sf_round(sign, mag, false, b.quantum, fmt);
    sf_decoded r = sf_decode(sum, fmt);
    if (r.cls == sf_class::infinity) return {sum, qnan};

    // rounded sum as an integer multiple of 2^b.quantum (exact by construction)
    __int128 rounded;
    if (r.quantum >= b.quantum)
        rounded = static_cast<__int128>(r.sig) << (r.quantum - b.quantum);
    else
        rounded = static_cast<__int128>(r.sig >> (b.quantum - r.quantum));
    if (r.sign) rounded = -rounded;

    __int128 err = v - rounded;
    if (err == 0) return {sum, sf_zero(false, fmt)};
    bool err_sign = err < 0;
    unsigned __int128 err_mag = err_sign ? static_cast<unsigned __int128>(-err)
                                         : static_cast<unsigned __int128>(err);
    packed_float error = sf_encode_exact(err_sign, static_cast<std::uint64_t>(err_mag), b.quantum, fmt);
    return {sum, error};
}

inline packed_float sf_add(packed_float x, packed_float y, mini_format fmt) {
    return sf_add_full(x, y, fmt).sum;
}
inline packed_float sf_addre(packed_float x, packed_float y, mini_format fmt) {
    return sf_add_full(x, y, fmt).error;
}

// exact for formats whose values fit binary64; bit identity for binary64 itself
inline double sf_to_double(packed_float x, mini_format fmt) {
    if (fmt == mini_format::binary64()) return std::bit_cast<double>(x.bits);
    sf_decoded d = sf_decode(x, fmt);
    switch (d.cls) {
        case sf_class::nan: return std::numeric_limits<double>::quiet_NaN();
        case sf_class::infinity:
            return d.sign ? -std::numeric_limits<double>::infinity()
                          : std::numeric_limits<double>::infinity();
        case sf_class::zero: return d.sign ? -0.0 : 0.0;
        case sf_class::finite: break;
    }
    double v = std::ldexp(static_cast<double>(d.sig), static_cast<int>(d.quantum));
    return d.sign ? -v : v;
}

inline packed_float sf_from_double(double x, mini_format fmt) {
    if (fmt == mini_format::binary64()) return {std::bit_cast<std::uint64_t>(x)};
    if (std::isnan(x)) return sf_canonical_nan(fmt);
    if (std::isinf(x)) return sf_inf(std::signbit(x), fmt);
    if (x == 0.0) return sf_zero(std::signbit(x), fmt);
    std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
    bool sign = bits >> 63;
    std::uint64_t frac = bits & ((std::uint64_t{1} << 52) - 1);
    std::int64_t biased = static_cast<std::int64_t>((bits >> 52) & 0x7FF);
    std::uint64_t sig = biased == 0 ? frac : frac | (std::uint64_t{1} << 52);
    std::int64_t quantum = (biased == 0 ? 1 : biased) - 1023 - 52;
    return sf_round(sign, sig, false, quantum, fmt);
}

// renders e.g. "0|1011|010" for test failure messages
inline std::string sf_dump(packed_float x, mini_format fmt) {
    std::string s;
    s += ((x.bits & fmt.sign_mask()) != 0) ? '1' : '0';
    s += '|';
    for (int i = fmt.exponent_bits; i-- > 0;)
        s += ((x.bits >> (fmt.mantissa_bits + i)) & 1) ? '1' : '0';
    s += '|';
    for (int i = fmt.mantissa_bits; i-- > 0;)
        s += ((x.bits >> i) & 1) ? '1' : '0';
    return s;
}

}  // namespace fpre
