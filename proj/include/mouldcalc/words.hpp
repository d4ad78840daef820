#pragma once

#include "mouldcalc/scalar.hpp"

#include <algorithm>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <set>
#include <vector>

namespace mouldcalc {

/// A letter is an integer exponent shift n in Z^d.  Letters are free vectors:
/// contraction may produce values outside the prepared-form range, so
/// prepared-form validity is checked on demand, never at construction.
struct Letter {
    std::vector<int> comp;

    Letter() = default;
    explicit Letter(std::vector<int> c) : comp(std::move(c)) {}
    Letter(std::initializer_list<int> c) : comp(c) {}

    std::size_t dim() const { return comp.size(); }

    /// Total degree shift |n| = sum of components.
    int degree() const {
        int s = 0;
        for (int c : comp) s += c;
        return s;
    }

    /// Prepared form: every component >= 0 except at most one equal to -1,
    /// and total degree >= 1.
    bool prepared_valid() const {
        int negatives = 0;
        for (int c : comp) {
            if (c < -1) return false;
            if (c == -1) ++negatives;
        }
        return negatives <= 1 && degree() >= 1;
    }

    friend Letter operator+(const Letter& a, const Letter& b) {
        if (a.dim() != b.dim()) throw std::invalid_argument("letter dimension mismatch");
        Letter r = a;
        for (std::size_t i = 0; i < r.comp.size(); ++i) r.comp[i] += b.comp[i];
        return r;
    }

    friend auto operator<=>(const Letter&, const Letter&) = default;

    std::string str() const {
        std::string s = "(";
        for (std::size_t i = 0; i < comp.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(comp[i]);
        }
        return s + ")";
    }
};

/// The linear part's eigenvalue vector lambda in (Q(i))^d.
struct Spectrum {
    std::vector<Scalar> lambda;

    Spectrum() = default;
    explicit Spectrum(std::vector<Scalar> l) : lambda(std::move(l)) {}

    std::size_t dim() const { return lambda.size(); }
};

/// omega(n) = <n, lambda>.
inline Scalar weight(const Letter& n, const Spectrum& lam) {
    if (n.dim() != lam.dim()) throw std::invalid_argument("letter/spectrum dimension mismatch");
    Scalar s;
    for (std::size_t i = 0; i < n.comp.size(); ++i) s += Scalar(n.comp[i]) * lam.lambda[i];
    return s;
}

/// A weight is its own weight; lets weight sequences reuse the word code path.
inline Scalar weight(const Scalar& w, const Spectrum&) { return w; }

inline bool is_resonant(const Letter& n, const Spectrum& lam) { return weight(n, lam).is_zero(); }

/// A finite word over an alphabet of L (L = Letter for the operator alphabet,
/// L = Scalar for weight sequences).  Positions are 1-based throughout, as in
/// every contraction formula.
template <class L>
class BasicWord {
public:
    BasicWord() = default;
    explicit BasicWord(std::vector<L> xs) : xs_(std::move(xs)) {}
    BasicWord(std::initializer_list<L> xs) : xs_(xs) {}

    std::size_t length() const { return xs_.size(); }
    bool empty() const { return xs_.empty(); }

    /// 1-based access.
    const L& at(std::size_t i) const {
        if (i < 1 || i > xs_.size()) throw std::out_of_range("word position out of range");
        return xs_[i - 1];
    }

    const std::vector<L>& letters() const { return xs_; }

    BasicWord prefix(std::size_t k) const {            // first k letters
        if (k > xs_.size()) throw std::out_of_range("prefix longer than word");
        return BasicWord(std::vector<L>(xs_.begin(), xs_.begin() + static_cast<std::ptrdiff_t>(k)));
    }
    BasicWord suffix(std::size_t k) const {            // last k letters
        if (k > xs_.size()) throw std::out_of_range("suffix longer than word");
        return BasicWord(std::vector<L>(xs_.end() - static_cast<std::ptrdiff_t>(k), xs_.end()));
    }
    /// Drops the first letter (n^{>1}).
    BasicWord tail() const {
        if (xs_.empty()) throw std::out_of_range("tail of empty word");
        return suffix(xs_.size() - 1);
    }
    /// Drops the last letter (n^{<r}).
    BasicWord init() const {
        if (xs_.empty()) throw std::out_of_range("init of empty word");
        return prefix(xs_.size() - 1);
    }

    BasicWord concat(const BasicWord& o) const {
        std::vector<L> xs = xs_;
        xs.insert(xs.end(), o.xs_.begin(), o.xs_.end());
        return BasicWord(std::move(xs));
    }

    std::size_t count(const L& x) const {
        return static_cast<std::size_t>(std::count(xs_.begin(), xs_.end(), x));
    }

    friend auto operator<=>(const BasicWord& a, const BasicWord& b) {
        return std::lexicographical_compare_three_way(a.xs_.begin(), a.xs_.end(),
                                                      b.xs_.begin(), b.xs_.end());
    }
    friend bool operator==(const BasicWord& a, const BasicWord& b) { return a.xs_ == b.xs_; }

private:
    std::vector<L> xs_;
};

using Word       = BasicWord<Letter>;
using WeightWord = BasicWord<Scalar>;

/// Maps a letter word to its weight sequence under lambda.
inline WeightWord weight_word(const Word& w, const Spectrum& lam) {
    std::vector<Scalar> ws;
    ws.reserve(w.length());
    for (const Letter& n : w.letters()) ws.push_back(weight(n, lam));
    return WeightWord(std::move(ws));
}

/// Total weight |omega(w)| = sum of entry weights.
template <class L>
Scalar total_weight(const BasicWord<L>& w, const Spectrum& lam) {
    Scalar s;
    for (const L& x : w.letters()) s += weight(x, lam);
    return s;
}

inline Scalar total_weight(const WeightWord& w) { return total_weight(w, Spectrum{}); }

/// Forward contraction conf_i: merges position i into its right neighbour,
/// w^{<i} (w_i + w_{i+1}) w^{>i+1}.  Requires 1 <= i <= l-1; out-of-range
/// positions are a hard error here (callers that drop boundary terms decide
/// that themselves).
template <class L>
BasicWord<L> conf(const BasicWord<L>& w, std::size_t i) {
    const std::size_t l = w.length();
    if (i < 1 || i + 1 > l) throw std::out_of_range("conf position needs a right neighbour");
    std::vector<L> xs = w.letters();
    xs[i - 1] = xs[i - 1] + xs[i];
    xs.erase(xs.begin() + static_cast<std::ptrdiff_t>(i));
    return BasicWord<L>(std::move(xs));
}

/// Backward contraction conb_i: merges position i into its left neighbour,
/// w^{<i-1} (w_{i-1} + w_i) w^{>i}.  Requires 2 <= i <= l.
template <class L>
BasicWord<L> conb(const BasicWord<L>& w, std::size_t i) {
    const std::size_t l = w.length();
    if (i < 2 || i > l) throw std::out_of_range("conb position needs a left neighbour");
    std::vector<L> xs = w.letters();
    xs[i - 2] = xs[i - 2] + xs[i - 1];
    xs.erase(xs.begin() + static_cast<std::ptrdiff_t>(i - 1));
    return BasicWord<L>(std::move(xs));
}

/// Splits around position i: (w^{<i}, w^{>i}), both excluding w_i.
template <class L>
std::pair<BasicWord<L>, BasicWord<L>> split(const BasicWord<L>& w, std::size_t i) {
    if (i < 1 || i > w.length()) throw std::out_of_range("split position out of range");
    return {w.prefix(i - 1), w.suffix(w.length() - i)};
}

/// All interleavings of a and b as a multiset (duplicates kept); the result
/// has C(l(a)+l(b), l(a)) entries.
template <class L>
std::vector<BasicWord<L>> shuffles(const BasicWord<L>& a, const BasicWord<L>& b) {
    std::vector<BasicWord<L>> out;
    std::vector<L> acc;
    acc.reserve(a.length() + b.length());
    const auto& xa = a.letters();
    const auto& xb = b.letters();
    auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> void {
        if (i == xa.size() && j == xb.size()) {
            out.emplace_back(acc);
            return;
        }
        if (i < xa.size()) {
            acc.push_back(xa[i]);
            self(self, i + 1, j);
            acc.pop_back();
        }
        if (j < xb.size()) {
            acc.push_back(xb[j]);
            self(self, i, j + 1);
            acc.pop_back();
        }
    };
    rec(rec, 0, 0);
    return out;
}

/// Every word over `alphabet` with length <= max_len, ordered by length and
/// then lexicographically by alphabet position.  Deterministic.
template <class L>
std::vector<BasicWord<L>> words_up_to(const std::vector<L>& alphabet, std::size_t max_len) {
    std::vector<BasicWord<L>> out;
    out.emplace_back();                                // empty word
    std::size_t level_begin = 0;
    for (std::size_t len = 1; len <= max_len; ++len) {
        const std::size_t level_end = out.size();
        for (std::size_t k = level_begin; k < level_end; ++k)
            for (const L& x : alphabet) {
                std::vector<L> xs = out[k].letters();
                xs.push_back(x);
                out.emplace_back(std::move(xs));
            }
        level_begin = level_end;
    }
    return out;
}

template <class L>
std::vector<L> sorted_alphabet(const std::set<L>& s) {
    return std::vector<L>(s.begin(), s.end());
}

inline std::string to_string(const Letter& n) { return n.str(); }

inline std::string to_string(const Word& w) {
    std::string s = "[";
    for (std::size_t i = 0; i < w.length(); ++i) {
        if (i) s += ",";
        s += w.at(i + 1).str();
    }
    return s + "]";
}

inline std::string to_string(const WeightWord& w) {
    std::string s = "(";
    for (std::size_t i = 0; i < w.length(); ++i) {
        if (i) s += ", ";
        s += w.at(i + 1).str();
    }
    return s + ")";
}

/// Parses "(1,1)" into a Letter.
inline Letter parse_letter(std::string_view text) {
    const std::string_view s = detail::strip(text);
    if (s.size() < 2 || s.front() != '(' || s.back() != ')')
        throw parse_error("bad letter: '" + std::string(text) + "'");
    const std::string_view body = s.substr(1, s.size() - 2);
    std::vector<int> comp;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= body.size(); ++i) {
        if (i == body.size() || body[i] == ',') {
            const std::string_view tok = detail::strip(body.substr(start, i - start));
            if (!detail::is_integer_body(tok))
                throw parse_error("bad letter component: '" + std::string(text) + "'");
            comp.push_back(std::stoi(std::string(tok)));
            start = i + 1;
        }
    }
    if (comp.empty()) throw parse_error("empty letter: '" + std::string(text) + "'");
    return Letter(std::move(comp));
}

/// Parses "[(1,1),(2,0)]" into a Word; "[]" is the empty word.
inline Word parse_word(std::string_view text) {
    const std::string_view s = detail::strip(text);
    if (s.size() < 2 || s.front() != '[' || s.back() != ']')
        throw parse_error("bad word: '" + std::string(text) + "'");
    const std::string_view body = detail::strip(s.substr(1, s.size() - 2));
    std::vector<Letter> letters;
    std::size_t start = 0, depth = 0;
    for (std::size_t i = 0; i <= body.size(); ++i) {
        if (i == body.size() || (body[i] == ',' && depth == 0)) {
            const std::string_view tok = detail::strip(body.substr(start, i - start));
            if (!tok.empty()) letters.push_back(parse_letter(tok));
            start = i + 1;
        } else if (body[i] == '(') {
            ++depth;
        } else if (body[i] == ')') {
            if (depth == 0) throw parse_error("unbalanced ')' in word: '" + std::string(text) + "'");
            --depth;
        }
    }
    if (depth != 0) throw parse_error("unbalanced '(' in word: '" + std::string(text) + "'");
    return Word(std::move(letters));
}

/// Parses a comma-separated weight list ("0, 2, -2", entries may be pairs).
inline WeightWord parse_weight_word(std::string_view text) {
    return WeightWord(parse_scalar_list(text));
}

inline Spectrum parse_spectrum(std::string_view text) {
    auto xs = parse_scalar_list(text);
    if (xs.empty()) throw parse_error("empty spectrum");
    return Spectrum(std::move(xs));
}

} // namespace mouldcalc
