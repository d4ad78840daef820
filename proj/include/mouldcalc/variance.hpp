#pragma once

#include "mouldcalc/mould.hpp"

#include <set>
#include <string>

namespace mouldcalc {

/// Context for the variance operators Var_{c,i} and Var_c over one alphabet.
///
/// L = Letter works on the operator alphabet; L = Scalar works directly on
/// weight sequences (c is then itself a weight).  `base` is the alphabet the
/// words originally come from: when c is a member, positions are summed with
/// no further rule; when c is adjoined from outside, words carrying c twice
/// or more map to 0 (at first order a perturbation contributes at most one c
/// per word).
template <class L>
struct VarContext {
    L c;
    Scalar omega_c;
    std::set<L> base;

    bool c_in_base() const { return base.count(c) > 0; }

    std::set<L> extended() const {
        std::set<L> e = base;
        e.insert(c);
        return e;
    }
};

using VarianceContext       = VarContext<Letter>;
using WeightVarianceContext = VarContext<Scalar>;

inline VarianceContext make_variance_context(Letter c, const Spectrum& lam,
                                             std::set<Letter> base) {
    VarianceContext ctx;
    ctx.omega_c = weight(c, lam);
    ctx.c       = std::move(c);
    ctx.base    = std::move(base);
    return ctx;
}

inline WeightVarianceContext make_weight_variance_context(Scalar c, std::set<Scalar> base) {
    WeightVarianceContext ctx;
    ctx.omega_c = c;
    ctx.c       = std::move(c);
    ctx.base    = std::move(base);
    return ctx;
}

namespace detail {

/// Position variance against an arbitrary evaluation callable.  Boundary
/// contraction terms are dropped, not zero-padded: at i = 1 only the forward
/// contraction survives, at i = l only the backward one.
template <class L, class Eval>
Scalar var_ci_impl(Eval&& ev, const VarContext<L>& ctx, const BasicWord<L>& w, std::size_t i) {
    const std::size_t l = w.length();
    if (i < 1 || i > l) throw std::out_of_range("variance position out of range");
    if (!ctx.c_in_base() && w.count(ctx.c) >= 2) return Scalar(0);
    if (!(w.at(i) == ctx.c)) return Scalar(0);
    Scalar acc = ctx.omega_c * ev(w);
    if (i < l) acc += ev(conf(w, i));
    if (i > 1) acc -= ev(conb(w, i));
    return acc;
}

template <class L, class Eval>
Scalar var_c_impl(Eval&& ev, const VarContext<L>& ctx, const BasicWord<L>& w) {
    if (w.count(ctx.c) == 0) return Scalar(0);          // locality: nothing to vary
    if (!ctx.c_in_base() && w.count(ctx.c) >= 2) return Scalar(0);
    Scalar acc;
    for (std::size_t i = 1; i <= w.length(); ++i)
        acc += var_ci_impl(ev, ctx, w, i);
    return acc;
}

} // namespace detail

inline Scalar var_ci(const Mould& m, const VarianceContext& ctx, const Word& w, std::size_t i) {
    return detail::var_ci_impl([&m](const Word& u) { return m(u); }, ctx, w, i);
}

inline Scalar var_ci(const Mould& m, const WeightVarianceContext& ctx, const WeightWord& w,
                     std::size_t i) {
    return detail::var_ci_impl([&m](const WeightWord& u) { return m(u); }, ctx, w, i);
}

/// Var_c(M) as a lazy mould: the sum of the position variances over every
/// position carrying c.  Vanishes on words without c without touching M, so
/// partial moulds (La) are only evaluated where the operator can contribute.
inline Mould var_c(const Mould& m, const VarianceContext& ctx) {
    Mould mc     = m;
    VarianceContext cc = ctx;
    Mould r = Mould::letter_lazy("Var_" + ctx.c.str() + "(" + m.name() + ")",
                                 [mc, cc](const Word& w) {
                                     return detail::var_c_impl(
                                         [&mc](const Word& u) { return mc(u); }, cc, w);
                                 });
    if (m.spectrum()) r = r.with_spectrum(*m.spectrum());
    return r;
}

/// Weight-sequence flavour of Var_c; the result is again a rule on weight
/// sequences (universal in the sense of the shared code path).
inline Mould var_c(const Mould& m, const WeightVarianceContext& ctx) {
    Mould mc = m;
    WeightVarianceContext cc = ctx;
    return Mould::universal("Var_" + ctx.c.str() + "(" + m.name() + ")",
                            [mc, cc](const WeightWord& w) {
                                return detail::var_c_impl(
                                    [&mc](const WeightWord& u) { return mc(u); }, cc, w);
                            });
}

/// (nabla M)^w = omega(w) M^w, the total-weight grading operator.
/// Universality is preserved; letter words use `lam`.
inline Mould nabla(const Mould& m, const Spectrum& lam) {
    Mould mc = m;
    if (m.is_universal()) {
        Mould r = Mould::universal("nabla(" + m.name() + ")", [mc](const WeightWord& w) {
            return total_weight(w) * mc(w);
        });
        return r.with_spectrum(lam);
    }
    Spectrum lc = lam;
    return Mould::letter_lazy("nabla(" + m.name() + ")", [mc, lc](const Word& w) {
        return total_weight(w, lc) * mc(w);
    });
}

struct CheckResult {
    bool pass = true;
    std::string detail;                                 // first counterexample, if any
};

using MouldOp = std::function<Mould(const Mould&)>;

/// Verifies the Leibniz law D(M x N) = D(M) x N + M x D(N) at every word
/// over `alphabet` with length <= max_len, exactly.
inline CheckResult check_derivation(const MouldOp& op, const Mould& m, const Mould& n,
                                    const std::set<Letter>& alphabet, std::size_t max_len) {
    const Mould prod = mould_mul(m, n);
    const Mould lhs  = op(prod);
    const Mould dm   = op(m);
    const Mould dn   = op(n);
    const Mould rhs  = mould_linear(Scalar(1), mould_mul(dm, n), Scalar(1), mould_mul(m, dn));
    for (const Word& w : words_up_to(sorted_alphabet(alphabet), max_len)) {
        const Scalar a = lhs(w);
        const Scalar b = rhs(w);
        if (a != b)
            return {false, "Leibniz fails at " + to_string(w) + ": D(MN) = " + a.str() +
                               ", D(M)N + MD(N) = " + b.str()};
    }
    return {};
}

/// Verifies sum over a in `alphabet` of Var_a(M)^w = omega(w) M^w for every
/// word over the alphabet with length <= max_len.  Each Var_a is built with
/// base = alphabet, so positions are summed.
inline CheckResult check_nabla_decomposition(const Mould& m, const std::set<Letter>& alphabet,
                                             const Spectrum& lam, std::size_t max_len) {
    std::vector<Mould> parts;
    for (const Letter& a : alphabet)
        parts.push_back(var_c(m, make_variance_context(a, lam, alphabet)));
    const Mould nm = nabla(m, lam);
    for (const Word& w : words_up_to(sorted_alphabet(alphabet), max_len)) {
        Scalar sum;
        for (const Mould& p : parts) sum += p(w);
        const Scalar want = nm(w);
        if (sum != want)
            return {false, "nabla decomposition fails at " + to_string(w) + ": sum = " +
                               sum.str() + ", nabla = " + want.str()};
    }
    return {};
}

} // namespace mouldcalc
