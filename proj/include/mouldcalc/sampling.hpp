#pragma once

#include "mouldcalc/mould.hpp"
#include "mouldcalc/rng.hpp"
#include "mouldcalc/vfield.hpp"

#include <set>
#include <stdexcept>
#include <vector>

namespace mouldcalc {

/// Prepared-form letter: components in [0, max_comp] with degree >= 1,
/// occasionally one component lowered to -1 (keeping degree >= 1).
inline Letter random_letter(Rng& rng, std::size_t dim, int max_comp = 2) {
    for (int attempt = 0; attempt < 500; ++attempt) {
        std::vector<int> comp(dim);
        for (int& c : comp) c = rng.int_in(0, max_comp);
        if (rng.chance(1, 5)) comp[static_cast<std::size_t>(rng.int_in(0, static_cast<int>(dim) - 1))] = -1;
        Letter n{std::move(comp)};
        if (n.prepared_valid()) return n;
    }
    throw std::runtime_error("random_letter: no valid letter in 500 attempts");
}

inline std::set<Letter> random_alphabet(Rng& rng, std::size_t dim, std::size_t count,
                                        int max_comp = 2) {
    std::set<Letter> a;
    for (int attempt = 0; attempt < 2000 && a.size() < count; ++attempt)
        a.insert(random_letter(rng, dim, max_comp));
    if (a.size() < count) throw std::runtime_error("random_alphabet: could not fill alphabet");
    return a;
}

/// Small exact eigenvalues, mostly real, zeros excluded by default so that
/// diagonal linear terms stay meaningful.
inline Spectrum random_spectrum(Rng& rng, std::size_t dim, bool allow_zero = false) {
    Spectrum lam;
    for (std::size_t i = 0; i < dim; ++i)
        lam.lambda.push_back(allow_zero && rng.chance(1, 6) ? Scalar(0) : rng.nonzero_scalar());
    return lam;
}

/// Random values on every word over the alphabet up to max_len; roughly a
/// quarter of the entries are zero and the empty word gets a value too.
inline Mould random_tabulated_mould(Rng& rng, const std::set<Letter>& alphabet,
                                    std::size_t max_len, const std::string& name) {
    TabulatedData t;
    t.alphabet = alphabet;
    t.max_len  = max_len;
    for (const Word& w : words_up_to(sorted_alphabet(alphabet), max_len))
        t.table.emplace(w, rng.chance(1, 4) ? Scalar(0) : rng.scalar());
    return Mould::tabulated(std::move(t), name);
}

/// Weights for solver stress tests: mixes zeros in, and occasionally rigs the
/// final entry so the total weight vanishes (driving the per-position routes).
inline WeightWord random_weight_word(Rng& rng, std::size_t len) {
    std::vector<Scalar> w;
    for (std::size_t i = 0; i < len; ++i)
        w.push_back(rng.chance(1, 4) ? Scalar(0) : rng.scalar());
    if (len >= 2 && rng.chance(1, 4)) {
        Scalar head(0);
        for (std::size_t i = 0; i + 1 < len; ++i) head += w[i];
        w.back() = -head;
    }
    return WeightWord(std::move(w));
}

/// Random operator at the given letter with nonzero coefficients on its full
/// valid support (every slot when the letter is nonnegative, the single
/// matching slot when one component is -1).
inline HomogeneousOp random_op(Rng& rng, const Letter& n) {
    std::size_t neg = n.comp.size();
    for (std::size_t i = 0; i < n.comp.size(); ++i)
        if (n.comp[i] < 0) neg = i;
    std::vector<Scalar> coeff(n.comp.size());
    for (std::size_t i = 0; i < coeff.size(); ++i)
        if (neg == n.comp.size() || neg == i) coeff[i] = rng.nonzero_scalar();
    return HomogeneousOp{n, std::move(coeff)};
}

inline PreparedVectorField random_field(Rng& rng, const Spectrum& lam,
                                        const std::set<Letter>& alphabet) {
    std::vector<HomogeneousOp> ops;
    for (const Letter& n : alphabet) ops.push_back(random_op(rng, n));
    return make_field(lam, std::move(ops));
}

} // namespace mouldcalc
