#include "mouldcalc/words.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace mouldcalc;

namespace {
Letter L2(int a, int b) { return Letter{{a, b}}; }
}

TEST_CASE("letter degree and prepared-form validity") {
    CHECK(L2(1, 1).degree() == 2);
    CHECK(L2(-1, 2).degree() == 1);
    CHECK(L2(1, 1).prepared_valid());
    CHECK(L2(0, 1).prepared_valid());
    CHECK(L2(-1, 2).prepared_valid());
    CHECK_FALSE(L2(-1, 1).prepared_valid());   // degree 0
    CHECK_FALSE(L2(-1, -1).prepared_valid());  // two lowered components
    CHECK_FALSE(L2(-2, 3).prepared_valid());   // component below -1
    CHECK_FALSE(L2(0, 0).prepared_valid());
    CHECK(L2(1, 2) + L2(-1, 1) == L2(0, 3));
    CHECK_THROWS_AS((L2(1, 2) + Letter{{1, 2, 3}}), std::invalid_argument);
}

TEST_CASE("word accessors are 1-based and slicing matches the conventions") {
    const Word w({L2(1, 0), L2(0, 1), L2(2, 0)});
    CHECK(w.length() == 3);
    CHECK(w.at(1) == L2(1, 0));
    CHECK(w.at(3) == L2(2, 0));
    CHECK(w.tail() == Word({L2(0, 1), L2(2, 0)}));
    CHECK(w.init() == Word({L2(1, 0), L2(0, 1)}));
    // conf(w, i) removes position i+1 after merging it into position i;
    // conb(w, i) removes position i-1 after merging it into position i.
    CHECK(conf(w, 1) == Word({L2(1, 1), L2(2, 0)}));
    CHECK(conf(w, 2) == Word({L2(1, 0), L2(2, 1)}));
    CHECK(conb(w, 2) == Word({L2(1, 1), L2(2, 0)}));
    CHECK(conb(w, 3) == Word({L2(1, 0), L2(2, 1)}));
    CHECK(Word{}.length() == 0);
}

TEST_CASE("weights are spectrum pairings and weight words track slicing") {
    const Spectrum lam{{Scalar(1), Scalar(-1)}};
    CHECK(weight(L2(1, 1), lam) == Scalar(0));
    CHECK(weight(L2(2, 0), lam) == Scalar(2));
    CHECK(weight(L2(0, 2), lam) == Scalar(-2));
    const Word w({L2(1, 1), L2(2, 0)});
    const WeightWord ww = weight_word(w, lam);
    CHECK(ww == WeightWord({Scalar(0), Scalar(2)}));
    CHECK(total_weight(ww) == Scalar(2));
    CHECK(conf(ww, 1) == WeightWord({Scalar(2)}));
    CHECK(to_string(ww) == "(0, 2)");
}

TEST_CASE("word enumeration is complete and deterministically ordered") {
    const std::set<Letter> a{L2(1, 0), L2(0, 1)};
    const auto ws = words_up_to(sorted_alphabet(a), 3);
    CHECK(ws.size() == 1 + 2 + 4 + 8);  // the empty word comes first
    CHECK(ws.front() == Word{});
    // no duplicates
    std::set<Word> uniq(ws.begin(), ws.end());
    CHECK(uniq.size() == ws.size());
    const auto again = words_up_to(sorted_alphabet(a), 3);
    CHECK(ws == again);
}

TEST_CASE("letter, word and weight parsing round-trip and reject malformed input") {
    CHECK(parse_letter("(1,1)") == L2(1, 1));
    CHECK(parse_letter(" ( -1 , 2 ) ") == L2(-1, 2));
    CHECK_THROWS_AS(parse_letter("1,1"), parse_error);
    CHECK_THROWS_AS(parse_letter("()"), parse_error);
    CHECK_THROWS_AS(parse_letter("(a,1)"), parse_error);

    const Word w = parse_word("[(1,1),(2,0)]");
    CHECK(w == Word({L2(1, 1), L2(2, 0)}));
    CHECK(parse_word("[]") == Word{});
    CHECK(parse_word(to_string(w)) == w);
    CHECK_THROWS_AS(parse_word("[(1,1)"), parse_error);
    CHECK_THROWS_AS(parse_word("(1,1)"), parse_error);

    const WeightWord ww = parse_weight_word("0, 1/2, [0, 1]");
    CHECK(ww.at(3) == Scalar(Rational(0), Rational(1)));
    CHECK_THROWS_AS(parse_spectrum(""), parse_error);
    CHECK(parse_spectrum("1,-1").lambda.size() == 2);
}
