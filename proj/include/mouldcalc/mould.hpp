#pragma once

#include "mouldcalc/words.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <utility>

namespace mouldcalc {

/// Thrown on mould evaluation failures: singular input, evaluation past a
/// table's max_len, or a universal mould asked for letter words without a
/// spectrum.
struct mould_error : std::domain_error {
    explicit mould_error(const std::string& what) : std::domain_error(what) {}
};

/// Finite table over a fixed alphabet.  Words of length <= max_len that are
/// absent evaluate to 0; words containing letters outside the alphabet
/// evaluate to 0 at any length (zero extension); lengths beyond max_len were
/// never computed and are a hard error.
struct TabulatedData {
    std::set<Letter> alphabet;
    std::size_t max_len = 0;
    std::map<Word, Scalar> table;

    Scalar eval(const Word& w) const {
        for (const Letter& n : w.letters())
            if (!alphabet.count(n)) return Scalar(0);
        if (w.length() > max_len)
            throw mould_error("tabulated mould evaluated past max_len=" + std::to_string(max_len));
        const auto it = table.find(w);
        return it == table.end() ? Scalar(0) : it->second;
    }
};

/// A mould is a Scalar-valued function on words.  Three flavours share one
/// interface:
///   - tabulated: finite table over a letter alphabet;
///   - universal: a rule on weight sequences (value depends on the word only
///     through its weights); evaluates letter words once a Spectrum is
///     attached;
///   - derived: a lazy letter rule (products, variances of tables, ...).
/// Rules must be pure; evaluation never mutates visible state.
class Mould {
public:
    using LetterRule  = std::function<Scalar(const Word&)>;
    using WeightRule  = std::function<Scalar(const WeightWord&)>;
    using SingularFn  = std::function<bool(const WeightWord&)>;

    Mould() = default;

    static Mould tabulated(TabulatedData data, std::string name = "table") {
        Mould m;
        m.name_  = std::move(name);
        m.table_ = std::make_shared<const TabulatedData>(std::move(data));
        auto t   = m.table_;
        m.letter_rule_ = [t](const Word& w) { return t->eval(w); };
        return m;
    }

    static Mould universal(std::string name, WeightRule rule, SingularFn singular = nullptr) {
        Mould m;
        m.name_        = std::move(name);
        m.weight_rule_ = std::move(rule);
        m.singular_    = std::move(singular);
        return m;
    }

    static Mould letter_lazy(std::string name, LetterRule rule) {
        Mould m;
        m.name_        = std::move(name);
        m.letter_rule_ = std::move(rule);
        return m;
    }

    const std::string& name() const { return name_; }
    bool is_universal() const { return static_cast<bool>(weight_rule_); }
    bool is_tabulated() const { return static_cast<bool>(table_); }
    const std::shared_ptr<const TabulatedData>& table() const { return table_; }
    const std::optional<Spectrum>& spectrum() const { return spec_; }

    /// Copy with a spectrum attached; lets a universal mould evaluate letter
    /// words through their weights.
    Mould with_spectrum(Spectrum lam) const {
        Mould m = *this;
        m.spec_ = std::move(lam);
        return m;
    }

    Scalar operator()(const Word& w) const {
        if (letter_rule_) return letter_rule_(w);
        if (weight_rule_) {
            if (!spec_)
                throw mould_error("universal mould '" + name_ +
                                  "' needs a spectrum to evaluate letter words");
            return weight_rule_(weight_word(w, *spec_));
        }
        throw mould_error("mould '" + name_ + "' cannot evaluate letter words");
    }

    Scalar operator()(const WeightWord& w) const {
        if (!weight_rule_)
            throw mould_error("mould '" + name_ + "' is not defined on weight sequences");
        return weight_rule_(w);
    }

    /// True when the weight sequence lies in the mould's singular set.  Total
    /// moulds report false everywhere.
    bool is_singular(const WeightWord& w) const { return singular_ && singular_(w); }

private:
    LetterRule letter_rule_;
    WeightRule weight_rule_;
    SingularFn singular_;
    std::shared_ptr<const TabulatedData> table_;
    std::optional<Spectrum> spec_;
    std::string name_;
};

namespace detail {

template <class WordT>
Scalar split_product(const Mould& m, const Mould& n, const WordT& w) {
    Scalar acc;
    const std::size_t l = w.length();
    for (std::size_t k = 0; k <= l; ++k)
        acc += m(w.prefix(k)) * n(w.suffix(l - k));
    return acc;
}

inline std::optional<Spectrum> merge_spectra(const Mould& a, const Mould& b) {
    if (a.spectrum()) return a.spectrum();
    return b.spectrum();
}

} // namespace detail

/// Mould product (M x N)^w = sum over all splittings w = ab of M^a N^b,
/// empty factors included.  Tabulated operands produce an eager table over
/// the union alphabet with max_len = min of the operand max_lens; otherwise
/// the product is lazy.  Universality is preserved.
inline Mould mould_mul(const Mould& m, const Mould& n) {
    const std::string name = "(" + m.name() + "*" + n.name() + ")";
    if (m.is_tabulated() && n.is_tabulated()) {
        TabulatedData out;
        const auto& ta = *m.table();
        const auto& tb = *n.table();
        out.alphabet = ta.alphabet;
        out.alphabet.insert(tb.alphabet.begin(), tb.alphabet.end());
        out.max_len = std::min(ta.max_len, tb.max_len);
        for (const Word& w : words_up_to(sorted_alphabet(out.alphabet), out.max_len)) {
            Scalar v = detail::split_product(m, n, w);
            if (!v.is_zero()) out.table.emplace(w, std::move(v));
        }
        return Mould::tabulated(std::move(out), name);
    }
    Mould r;
    if (m.is_universal() && n.is_universal()) {
        Mould mc = m, nc = n;
        r = Mould::universal(name, [mc, nc](const WeightWord& w) {
            return detail::split_product(mc, nc, w);
        });
    } else {
        Mould mc = m, nc = n;
        r = Mould::letter_lazy(name, [mc, nc](const Word& w) {
            return detail::split_product(mc, nc, w);
        });
    }
    if (auto sp = detail::merge_spectra(m, n)) r = r.with_spectrum(*sp);
    return r;
}

/// Pointwise linear combination a*M + b*N.
inline Mould mould_linear(const Scalar& a, const Mould& m, const Scalar& b, const Mould& n) {
    const std::string name = "(" + a.str() + "*" + m.name() + " + " + b.str() + "*" + n.name() + ")";
    if (m.is_tabulated() && n.is_tabulated()) {
        TabulatedData out;
        const auto& ta = *m.table();
        const auto& tb = *n.table();
        out.alphabet = ta.alphabet;
        out.alphabet.insert(tb.alphabet.begin(), tb.alphabet.end());
        out.max_len = std::min(ta.max_len, tb.max_len);
        for (const Word& w : words_up_to(sorted_alphabet(out.alphabet), out.max_len)) {
            Scalar v = a * m(w) + b * n(w);
            if (!v.is_zero()) out.table.emplace(w, std::move(v));
        }
        return Mould::tabulated(std::move(out), name);
    }
    Mould r;
    if (m.is_universal() && n.is_universal()) {
        Mould mc = m, nc = n;
        Scalar ac = a, bc = b;
        r = Mould::universal(name, [ac, mc, bc, nc](const WeightWord& w) {
            return ac * mc(w) + bc * nc(w);
        });
    } else {
        Mould mc = m, nc = n;
        Scalar ac = a, bc = b;
        r = Mould::letter_lazy(name, [ac, mc, bc, nc](const Word& w) {
            return ac * mc(w) + bc * nc(w);
        });
    }
    if (auto sp = detail::merge_spectra(m, n)) r = r.with_spectrum(*sp);
    return r;
}

/// I^w = 1 on words of length 1, else 0 (the single-letter indicator).
/// Universal: the rule sees only the length.
inline Mould identity_mould() {
    return Mould::universal("I", [](const WeightWord& w) {
        return Scalar(w.length() == 1 ? 1 : 0);
    });
}

/// Unit of the mould product: 1 on the empty word, 0 elsewhere.
inline Mould unit_mould() {
    return Mould::universal("1_empty", [](const WeightWord& w) {
        return Scalar(w.empty() ? 1 : 0);
    });
}

/// Constant mould: v on every word, the empty word included.
inline Mould constant_mould(const Scalar& v) {
    Scalar vc = v;
    return Mould::universal("const:" + v.str(), [vc](const WeightWord&) { return vc; });
}

/// invfact^w = 1 / l(w)!.
inline Mould invfact_mould() {
    return Mould::universal("invfact", [](const WeightWord& w) {
        Integer f = 1;
        for (std::size_t k = 2; k <= w.length(); ++k) f *= k;
        return Scalar(Rational(Integer(1), f));
    });
}

/// Dirac mould at a letter c: 1 on the word (c), 0 elsewhere.
inline Mould dirac_mould(const Letter& c) {
    Letter cc = c;
    return Mould::letter_lazy("I_" + c.str(), [cc](const Word& w) {
        return Scalar(w.length() == 1 && w.at(1) == cc ? 1 : 0);
    });
}

/// Dirac mould at a weight c: 1 on the weight sequence (c), 0 elsewhere.
inline Mould dirac_weight_mould(const Scalar& c) {
    Scalar cc = c;
    return Mould::universal("I_" + c.str(), [cc](const WeightWord& w) {
        return Scalar(w.length() == 1 && w.at(1) == cc ? 1 : 0);
    });
}

/// La^w = 1 / (s_1 s_2 ... s_r) with s_k the k-th prefix sum of the weights;
/// La on the empty word is 1.  Singular exactly where some prefix sum
/// vanishes; evaluation there is a hard error, never a sentinel.
inline Mould linearization_mould() {
    auto singular = [](const WeightWord& w) {
        Scalar s;
        for (std::size_t i = 1; i <= w.length(); ++i) {
            s += w.at(i);
            if (s.is_zero()) return true;
        }
        return false;
    };
    return Mould::universal(
        "La",
        [](const WeightWord& w) {
            Scalar prod(1), s;
            for (std::size_t i = 1; i <= w.length(); ++i) {
                s += w.at(i);
                if (s.is_zero())
                    throw mould_error("La is singular on " + to_string(w) +
                                      " (prefix sum " + std::to_string(i) + " vanishes)");
                prod *= s;
            }
            return prod.inv();
        },
        singular);
}

/// Evaluates M on every word over `alphabet` with length <= max_len and
/// freezes the values into a table.
inline Mould tabulate(const Mould& m, const std::set<Letter>& alphabet, std::size_t max_len) {
    TabulatedData out;
    out.alphabet = alphabet;
    out.max_len  = max_len;
    for (const Word& w : words_up_to(sorted_alphabet(alphabet), max_len)) {
        Scalar v = m(w);
        if (!v.is_zero()) out.table.emplace(w, std::move(v));
    }
    return Mould::tabulated(std::move(out), m.name() + ":tab");
}

/// First word (by length, then alphabet order) where M and N differ, if any.
inline std::optional<Word> equal_up_to(const Mould& m, const Mould& n,
                                       const std::set<Letter>& alphabet, std::size_t max_len) {
    for (const Word& w : words_up_to(sorted_alphabet(alphabet), max_len))
        if (m(w) != n(w)) return w;
    return std::nullopt;
}

struct AlternalityResult {
    bool alternal = true;
    // First failing shuffle relation: the pair (a, b) and the shuffle sum.
    std::optional<std::pair<Word, Word>> counterexample;
    Scalar sum;
};

/// Checks M^empty = 0 and, for every pair of nonempty words a, b over
/// `alphabet` with l(a) + l(b) <= max_total_len, that the shuffle sum
/// (multiplicities counted) vanishes.
inline AlternalityResult is_alternal(const Mould& m, const std::set<Letter>& alphabet,
                                     std::size_t max_total_len) {
    AlternalityResult res;
    if (!m(Word{}).is_zero()) {
        res.alternal       = false;
        res.counterexample = {Word{}, Word{}};
        res.sum            = m(Word{});
        return res;
    }
    const auto words = words_up_to(sorted_alphabet(alphabet), max_total_len - 1);
    for (const Word& a : words) {
        if (a.empty()) continue;
        for (const Word& b : words) {
            if (b.empty() || a.length() + b.length() > max_total_len) continue;
            Scalar sum;
            for (const Word& s : shuffles(a, b)) sum += m(s);
            if (!sum.is_zero()) {
                res.alternal       = false;
                res.counterexample = {a, b};
                res.sum            = sum;
                return res;
            }
        }
    }
    return res;
}

} // namespace mouldcalc
