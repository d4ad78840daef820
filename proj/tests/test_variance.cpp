#include "mouldcalc/rng.hpp"
#include "mouldcalc/sampling.hpp"
#include "mouldcalc/variance.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace mouldcalc;

namespace {

const Letter A{{1, 1}};  // weight 0 under lam
const Letter B{{2, 0}};  // weight 2
const Letter S{{3, 1}};  // A + B, weight 2
const Spectrum lam{{Scalar(1), Scalar(-1)}};

Mould hand_table() {
    TabulatedData t;
    t.alphabet = {A, B, S};
    t.max_len  = 3;
    t.table.emplace(Word({A}), Scalar(2));
    t.table.emplace(Word({B}), Scalar(3));
    t.table.emplace(Word({S}), Scalar(5));
    t.table.emplace(Word({A, B}), Scalar(7));
    t.table.emplace(Word({B, A}), Scalar(11));
    t.table.emplace(Word({A, S}), Scalar(17));
    return Mould::tabulated(std::move(t), "M");
}

} // namespace

TEST_CASE("variance at one position merges neighbours with the letter's weight") {
    const Mould m  = hand_table();
    const auto ctx = make_variance_context(A, lam, {A, B, S});
    // position 1 of (A,B) holds the letter: 0*M^(A,B) + M^(A+B) = M^(S)
    CHECK(var_ci(m, ctx, Word({A, B}), 1) == Scalar(5));
    CHECK(var_ci(m, ctx, Word({A, B}), 2) == Scalar(0));   // letter mismatch
    // position 2 of (B,A): 0*M^(B,A) - M^(B+A) = -M^(S)
    CHECK(var_ci(m, ctx, Word({B, A}), 2) == Scalar(-5));

    const auto ctxb = make_variance_context(B, lam, {A, B, S});
    // position 2 of (A,B): 2*M^(A,B) - M^(A+B) = 14 - 5
    CHECK(var_ci(m, ctxb, Word({A, B}), 2) == Scalar(9));
}

TEST_CASE("variance sums the positions and is local to the letter") {
    const Mould m = hand_table();
    const auto va = var_c(m, make_variance_context(A, lam, {A, B, S}));
    CHECK(va(Word({A, B})) == Scalar(5));
    CHECK(va(Word({B, A})) == Scalar(-5));
    CHECK(va(Word({B})) == Scalar(0));        // no occurrence, no evaluation
    CHECK(va(Word({B, S})) == Scalar(0));
    CHECK(va(Word{}) == Scalar(0));
    const auto vb = var_c(m, make_variance_context(B, lam, {A, B, S}));
    CHECK(vb(Word({A, B})) == Scalar(9));
}

TEST_CASE("a letter outside the base kills words with repeated occurrences") {
    const Mould m = hand_table();
    // c = A outside the base: two A's wipe the value, one A still works
    const auto killed = var_c(m, make_variance_context(A, lam, {B, S}));
    CHECK(killed(Word({A, A, B})) == Scalar(0));
    CHECK(killed(Word({A, B})) == Scalar(5));
    // c = A inside the base: the same word survives through its merges
    const auto kept = var_c(m, make_variance_context(A, lam, {A, B, S}));
    CHECK(kept(Word({A, A, B})) == Scalar(17));  // only conf_2 lands back in the table
}

TEST_CASE("the weight-graded operator multiplies by the total weight") {
    const Mould m  = hand_table();
    const Mould nm = nabla(m, lam);
    CHECK(nm(Word({A, B})) == Scalar(2) * Scalar(7));
    CHECK(nm(Word({A})) == Scalar(0));
    CHECK(nm(Word({B, A})) == Scalar(2) * Scalar(11));
    CHECK(nm(Word{}) == Scalar(0));
}

TEST_CASE("the per-letter variances telescope to the weight grading") {
    const Mould m = hand_table();
    CHECK(check_nabla_decomposition(m, {A, B, S}, lam, 3).pass);
    Rng rng(42);
    for (int t = 0; t < 10; ++t) {
        const auto alpha   = random_alphabet(rng, 2, 3);
        const Spectrum l2  = random_spectrum(rng, 2);
        const Mould random = random_tabulated_mould(rng, alpha, 4, "R");
        const auto res     = check_nabla_decomposition(random, alpha, l2, 4);
        INFO(res.detail);
        CHECK(res.pass);
    }
}

TEST_CASE("variance obeys the Leibniz law over the mould product") {
    Rng rng(7);
    for (int t = 0; t < 10; ++t) {
        auto alpha        = random_alphabet(rng, 2, 2);
        const Letter c    = random_letter(rng, 2);
        const Spectrum l2 = random_spectrum(rng, 2);
        alpha.insert(c);
        const Mould m  = random_tabulated_mould(rng, alpha, 4, "M");
        const Mould n  = random_tabulated_mould(rng, alpha, 4, "N");
        const auto ctx = make_variance_context(c, l2, alpha);
        const auto res = check_derivation([&](const Mould& q) { return var_c(q, ctx); }, m, n,
                                          alpha, 4);
        INFO(res.detail);
        CHECK(res.pass);
    }
}

TEST_CASE("pointwise squaring is rejected by the Leibniz check") {
    Rng rng(13);
    const auto alpha  = random_alphabet(rng, 2, 2);
    const Spectrum l2 = random_spectrum(rng, 2);
    const Mould m     = random_tabulated_mould(rng, alpha, 3, "M");
    const Mould n     = random_tabulated_mould(rng, alpha, 3, "N");
    const MouldOp sq  = [](const Mould& q) {
        return Mould::letter_lazy("sq", [q](const Word& w) { return q(w) * q(w); });
    };
    CHECK_FALSE(check_derivation(sq, m, n, alpha, 3).pass);
}

TEST_CASE("weight-keyed variance contexts drive universal moulds") {
    const auto ctx = make_weight_variance_context(Scalar(0), {Scalar(0), Scalar(2)});
    const Mould va = var_c(invfact_mould(), ctx);
    // position 1 holds the weight 0: 0 * (1/2) + invfact^(2) = 1
    CHECK(va(WeightWord({Scalar(0), Scalar(2)})) == Scalar(1));
    // position 2 never matches, and the empty word has no positions
    CHECK(va(WeightWord({Scalar(2), Scalar(2)})) == Scalar(0));
    CHECK(va(WeightWord(std::vector<Scalar>{})) == Scalar(0));
    // the result is itself a weight rule: attachable to a spectrum later
    CHECK(va.is_universal());
}
