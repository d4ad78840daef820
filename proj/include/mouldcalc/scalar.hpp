#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mouldcalc {

/// Arbitrary-precision rational, always in canonical form: gcd(p, q) = 1,
/// q > 0, zero stored as 0/1.  Backed by boost::multiprecision; construction
/// and every arithmetic operation re-canonicalize.
using Rational = boost::multiprecision::cpp_rational;
using Integer  = boost::multiprecision::cpp_int;

/// Thrown on any division by an exact zero.  Never signalled by a sentinel.
struct division_by_zero : std::domain_error {
    division_by_zero() : std::domain_error("division by zero") {}
    explicit division_by_zero(const std::string& what) : std::domain_error(what) {}
};

/// Thrown on malformed textual input (numbers, words, letters, fields).
struct parse_error : std::invalid_argument {
    explicit parse_error(const std::string& what) : std::invalid_argument(what) {}
};

inline std::string to_string(const Rational& r) { return r.str(); }

namespace detail {

inline std::string_view strip(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

inline bool is_integer_body(std::string_view s) {
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

} // namespace detail

/// Parses "p" or "p/q" (optional sign, arbitrary size).  q = 0 is rejected.
inline Rational parse_rational(std::string_view text) {
    const std::string_view s = detail::strip(text);
    const auto slash = s.find('/');
    std::string_view num = s, den = "1";
    if (slash != std::string_view::npos) {
        num = detail::strip(s.substr(0, slash));
        den = detail::strip(s.substr(slash + 1));
    }
    if (!detail::is_integer_body(num) || !detail::is_integer_body(den))
        throw parse_error("bad rational: '" + std::string(text) + "'");
    // the big-int constructor takes '-' but not an explicit '+'
    const auto drop_plus = [](std::string_view v) {
        if (!v.empty() && v.front() == '+') v.remove_prefix(1);
        return std::string(v);
    };
    const Integer p{drop_plus(num)};
    const Integer q{drop_plus(den)};
    if (q == 0) throw division_by_zero("rational with zero denominator: '" + std::string(text) + "'");
    return Rational(p, q);
}

/// Gaussian rational re + im*i with exact component arithmetic.
///
/// Textual form: a bare Rational when im = 0, otherwise "[re, im]".
/// Both forms parse back to an equal value.
class Scalar {
public:
    Scalar() = default;
    Scalar(int v) : re_(v) {}                                      // NOLINT: implicit by design
    Scalar(Rational re) : re_(std::move(re)) {}                    // NOLINT: implicit by design
    Scalar(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }

    bool is_zero() const { return re_ == 0 && im_ == 0; }
    bool is_real() const { return im_ == 0; }

    friend Scalar operator+(const Scalar& a, const Scalar& b) {
        return {Rational(a.re_ + b.re_), Rational(a.im_ + b.im_)};
    }
    friend Scalar operator-(const Scalar& a, const Scalar& b) {
        return {Rational(a.re_ - b.re_), Rational(a.im_ - b.im_)};
    }
    friend Scalar operator-(const Scalar& a) { return {Rational(-a.re_), Rational(-a.im_)}; }
    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        return {Rational(a.re_ * b.re_ - a.im_ * b.im_),
                Rational(a.re_ * b.im_ + a.im_ * b.re_)};
    }

    Scalar conj() const { return {re_, Rational(-im_)}; }

    /// Exact inverse; throws division_by_zero at 0.
    Scalar inv() const {
        const Rational n2 = norm2();
        if (n2 == 0) throw division_by_zero("inverse of zero scalar");
        return {Rational(re_ / n2), Rational(-im_ / n2)};
    }

    friend Scalar operator/(const Scalar& a, const Scalar& b) { return a * b.inv(); }

    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
    Scalar& operator/=(const Scalar& o) { return *this = *this / o; }

    friend bool operator==(const Scalar& a, const Scalar& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    // Lexicographic on (re, im); a total order for use as an ordered-map key,
    // not a numeric order on complex values.
    friend bool operator<(const Scalar& a, const Scalar& b) {
        if (a.re_ != b.re_) return a.re_ < b.re_;
        return a.im_ < b.im_;
    }
    friend std::strong_ordering operator<=>(const Scalar& a, const Scalar& b) {
        if (a < b) return std::strong_ordering::less;
        if (b < a) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    std::string str() const {
        if (is_real()) return re_.str();
        return "[" + re_.str() + ", " + im_.str() + "]";
    }

private:
    Rational norm2() const { return Rational(re_ * re_ + im_ * im_); }

    Rational re_{0};
    Rational im_{0};
};

inline std::string to_string(const Scalar& s) { return s.str(); }

/// Parses the Scalar grammar: either a Rational or a bracketed pair
/// "[re, im]" of Rationals.
inline Scalar parse_scalar(std::string_view text) {
    const std::string_view s = detail::strip(text);
    if (s.empty()) throw parse_error("empty scalar");
    if (s.front() == '[') {
        if (s.back() != ']') throw parse_error("unterminated scalar pair: '" + std::string(text) + "'");
        const std::string_view body = s.substr(1, s.size() - 2);
        const auto comma = body.find(',');
        if (comma == std::string_view::npos)
            throw parse_error("scalar pair needs two components: '" + std::string(text) + "'");
        if (body.find(',', comma + 1) != std::string_view::npos)
            throw parse_error("scalar pair has too many components: '" + std::string(text) + "'");
        return {parse_rational(body.substr(0, comma)), parse_rational(body.substr(comma + 1))};
    }
    return Scalar(parse_rational(s));
}

/// Splits a comma-separated list at top level (commas inside [] do not split)
/// and parses each entry as a Scalar.  Whitespace around entries is ignored.
inline std::vector<Scalar> parse_scalar_list(std::string_view text) {
    std::vector<Scalar> out;
    const std::string_view s = detail::strip(text);
    if (s.empty()) return out;
    std::size_t depth = 0, start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || (s[i] == ',' && depth == 0)) {
            out.push_back(parse_scalar(s.substr(start, i - start)));
            start = i + 1;
        } else if (s[i] == '[') {
            ++depth;
        } else if (s[i] == ']') {
            if (depth == 0) throw parse_error("unbalanced ']' in list: '" + std::string(text) + "'");
            --depth;
        }
    }
    if (depth != 0) throw parse_error("unbalanced '[' in list: '" + std::string(text) + "'");
    return out;
}

} // namespace mouldcalc
