#pragma once

#include "mouldcalc/scalar.hpp"

#include <cstdint>
#include <random>

namespace mouldcalc {

/// Deterministic sampler: mt19937_64 is fully pinned by the standard, and all
/// draws reduce engine words directly, so one seed yields one byte stream on
/// every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    /// Uniform-ish integer in [lo, hi] (modulo reduction; the tiny bias is
    /// irrelevant for test sampling and keeps the stream portable).
    int int_in(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<int>(next() % span);
    }

    bool chance(int num, int den) { return int_in(1, den) <= num; }

    /// Rational p/q with |p| <= max_num (p possibly 0) and 1 <= q <= max_den.
    Rational rational(int max_num = 9, int max_den = 9) {
        const int p = int_in(-max_num, max_num);
        const int q = int_in(1, max_den);
        return Rational(p, q);
    }

    Rational nonzero_rational(int max_num = 9, int max_den = 9) {
        for (;;) {
            Rational r = rational(max_num, max_den);
            if (r != 0) return r;
        }
    }

    /// Gaussian rational; imaginary parts appear in roughly one draw in three
    /// when allowed.
    Scalar scalar(bool allow_imaginary = true) {
        Rational re = rational();
        Rational im = (allow_imaginary && chance(1, 3)) ? rational() : Rational(0);
        return {re, im};
    }

    Scalar nonzero_scalar(bool allow_imaginary = true) {
        for (;;) {
            Scalar s = scalar(allow_imaginary);
            if (!s.is_zero()) return s;
        }
    }

private:
    std::mt19937_64 eng_;
};

} // namespace mouldcalc
