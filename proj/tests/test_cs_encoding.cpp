#include <stdexcept>
#include <string>
#include <vector>

#include "csu/cs_encoding.hpp"
#include "csu/fo_match.hpp"
#include "csu/grammar.hpp"
#include "csu/parse_oracle.hpp"
#include "doctest.h"
#include "json.hpp"
#include "test_grammars.hpp"

using namespace csu;

TEST_CASE("the bracket alphabet lists open brackets in sorted tuple order") {
  Grammar g = parse_grammar(testg::kThree);
  BracketAlphabet gamma = build_bracket_alphabet(g);

  std::vector<Bracket> expected{
      {0, 0, 1, 1, 0, 1}, {0, 0, 1, 1, 0, 2}, {0, 2, 2, 1, 1, 1},
      {0, 2, 2, 1, 1, 2}, {0, 2, 2, 2, 2, 1}, {1, 1, 2, 1, 1, 1},
      {1, 1, 2, 1, 1, 2}, {1, 1, 2, 2, 2, 1}, {1, 2, 1, 1, 2, 1}};
  CHECK(gamma.opens == expected);

  for (int k = 0; k < 9; ++k)
    CHECK(gamma.alias_of(expected[static_cast<std::size_t>(k)]) == k + 1);
  CHECK(gamma.alias_of({5, 5, 5, 5, 5, 5}) == 0);  // not in the alphabet

  CHECK(token_to_string({expected[0], false}) == "0.0.1.1.0.1");
  CHECK(token_to_string({expected[8], true}) == "~1.2.1.1.2.1");
  CHECK(token_to_alias(gamma, {expected[2], false}) == "3");
  CHECK(token_to_alias(gamma, {expected[2], true}) == "~3");
}

TEST_CASE("letter images follow the production segments") {
  Grammar g = parse_grammar(testg::kThree);
  BracketAlphabet gamma = build_bracket_alphabet(g);
  HomTable hom = build_homomorphism(g, gamma);

  auto img = [&](const Word& w) { return format_word(g, w); };
  REQUIRE(hom.open_image.size() == 10);  // slot 0 unused

  // An open reads segment 0 of the production it applies.
  CHECK(img(hom.open_image[1]) == "abba");
  CHECK(img(hom.open_image[2]) == "a");
  CHECK(img(hom.open_image[3]) == "aa");
  CHECK(img(hom.open_image[4]) == "a");
  CHECK(img(hom.open_image[5]) == "ab");
  CHECK(img(hom.open_image[6]) == "aa");
  CHECK(img(hom.open_image[7]) == "a");
  CHECK(img(hom.open_image[8]) == "ab");
  CHECK(img(hom.open_image[9]) == "ab");

  // A close reads the parent segment after its child rank; root closes read
  // nothing.
  CHECK(hom.close_image[1].empty());
  CHECK(hom.close_image[2].empty());
  CHECK(img(hom.close_image[3]) == "ab");
  CHECK(img(hom.close_image[4]) == "ab");
  CHECK(img(hom.close_image[5]) == "ba");
  CHECK(img(hom.close_image[6]) == "ba");
  CHECK(img(hom.close_image[7]) == "ba");
  CHECK(img(hom.close_image[8]) == "bb");
  CHECK(img(hom.close_image[9]) == "b");
}

TEST_CASE("the four-nonterminal sample grammar has seven brackets") {
  Grammar g = parse_grammar(testg::kFour);
  BracketAlphabet gamma = build_bracket_alphabet(g);
  std::vector<Bracket> expected{
      {0, 0, 1, 1, 0, 1}, {0, 1, 2, 1, 1, 1}, {0, 1, 2, 2, 2, 1},
      {0, 1, 2, 2, 2, 2}, {1, 1, 2, 1, 3, 1}, {1, 1, 2, 2, 2, 1},
      {1, 1, 2, 2, 2, 2}};
  CHECK(gamma.opens == expected);
}

TEST_CASE("a single-production grammar has a single bracket") {
  Grammar g = parse_grammar("start: S\nS -> a b\n");
  BracketAlphabet gamma = build_bracket_alphabet(g);
  REQUIRE(gamma.opens.size() == 1);
  CHECK(gamma.opens[0] == Bracket{0, 0, 1, 1, 0, 1});
  HomTable hom = build_homomorphism(g, gamma);
  CHECK(format_word(g, hom.open_image[1]) == "ab");
  CHECK(hom.close_image[1].empty());
}

TEST_CASE("bracket alphabets require the double Greibach shape") {
  Grammar g = parse_grammar("start: S\nS -> a S\nS -> b\n");
  CHECK_THROWS_AS(build_bracket_alphabet(g), std::invalid_argument);
}

TEST_CASE("encoding the sample tree reproduces the bracket word") {
  Grammar g = parse_grammar(testg::kThree);
  BracketAlphabet gamma = build_bracket_alphabet(g);
  HomTable hom = build_homomorphism(g, gamma);

  DerivationTree t = tree_from_sexpr(g, "(0.2 (1.2 (2.1)) (2.1))");
  DyckWord z = encode_tree(g, t);
  CHECK(dyck_to_alias_string(gamma, z) == "2 4 9 ~9 ~4 5 ~5 ~2");
  CHECK(dyck_to_string(z) ==
        "0.0.1.1.0.2 0.2.2.1.1.2 1.2.1.1.2.1 ~1.2.1.1.2.1 ~0.2.2.1.1.2 "
        "0.2.2.2.2.1 ~0.2.2.2.2.1 ~0.0.1.1.0.2");

  // Reading the letters back recovers the encoded word.
  CHECK(format_word(g, apply_hom(hom, gamma, z)) == "aaabbababba");

  // The other member below length 12 encodes to the single root pair.
  DyckWord z1 = encode_tree(g, tree_from_sexpr(g, "(0.1)"));
  CHECK(dyck_to_alias_string(gamma, z1) == "1 ~1");
  CHECK(format_word(g, apply_hom(hom, gamma, z1)) == "abba");
}

TEST_CASE("bracket words parse from aliases, tuples, or both") {
  Grammar g = parse_grammar(testg::kThree);
  BracketAlphabet gamma = build_bracket_alphabet(g);

  DyckWord a = parse_dyck(gamma, "2 4 9 ~9 ~4 5 ~5 ~2");
  DyckWord b = parse_dyck(gamma,
                          "0.0.1.1.0.2 0.2.2.1.1.2 1.2.1.1.2.1 ~1.2.1.1.2.1 "
                          "~0.2.2.1.1.2 0.2.2.2.2.1 ~0.2.2.2.2.1 ~0.0.1.1.0.2");
  DyckWord c = parse_dyck(gamma, "2 0.2.2.1.1.2 9 ~9 ~4 5 ~5 ~0.0.1.1.0.2");
  CHECK(a == b);
  CHECK(a == c);
  CHECK(parse_dyck(gamma, "").empty());

  CHECK_THROWS_AS(parse_dyck(gamma, "10"), std::invalid_argument);
  CHECK_THROWS_AS(parse_dyck(gamma, "0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_dyck(gamma, "~x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_dyck(gamma, "1.2.3"), std::invalid_argument);

  // Reading tuples is purely syntactic; the condition checker rejects tokens
  // outside the alphabet.
  DyckWord unknown = parse_dyck(gamma, "9.9.9.9.9.9");
  CHECK_THROWS_AS(check_local_conditions(g, gamma, unknown),
                  std::invalid_argument);
}

TEST_CASE("nesting and successor conditions are checked separately") {
  Grammar g = parse_grammar(testg::kThree);
  BracketAlphabet gamma = build_bracket_alphabet(g);
  auto dy = [&](const std::string& s) { return parse_dyck(gamma, s); };

  CHECK(is_dyck(dy("1 ~1")));
  CHECK(is_dyck(dy("2 4 9 ~9 ~4 5 ~5 ~2")));
  CHECK_FALSE(is_dyck(dy("1 1")));        // unclosed
  CHECK_FALSE(is_dyck(dy("~1")));         // close without open
  CHECK_FALSE(is_dyck(dy("2 4 ~2 ~4")));  // crossed pair
  CHECK(is_dyck(DyckWord{}));

  CHECK(check_local_conditions(g, gamma, dy("1 ~1")).ok);
  CHECK(check_local_conditions(g, gamma, dy("2 4 9 ~9 ~4 5 ~5 ~2")).ok);

  // The worked counterexample: rank-1 child must open the inner production.
  auto v = check_local_conditions(g, gamma, dy("2 5 ~5 4 ~4 ~2"));
  CHECK_FALSE(v.ok);
  CHECK(v.condition == 3);
  CHECK(v.position == 2);

  // Boundary violations: empty word, wrong first bracket, wrong last bracket.
  auto v0 = check_local_conditions(g, gamma, DyckWord{});
  CHECK_FALSE(v0.ok);
  CHECK(v0.condition == 1);
  CHECK(v0.position == 1);

  auto v1 = check_local_conditions(g, gamma, dy("3 ~3"));
  CHECK_FALSE(v1.ok);
  CHECK(v1.condition == 1);
  CHECK(v1.position == 1);

  auto v2 = check_local_conditions(g, gamma, dy("2 4 9 ~9 ~4 5 ~5"));
  CHECK_FALSE(v2.ok);
  CHECK(v2.condition == 1);
  CHECK(v2.position == 7);

  // A close of rank d < c must be followed by the rank d+1 open; the verdict
  // points at the offending successor.
  auto v3 = check_local_conditions(g, gamma, dy("2 4 9 ~9 ~4 ~2"));
  CHECK_FALSE(v3.ok);
  CHECK(v3.condition == 4);
  CHECK(v3.position == 6);
}

TEST_CASE("decoding rebuilds the derivation tree or pinpoints the fault") {
  Grammar g = parse_grammar(testg::kThree);
  BracketAlphabet gamma = build_bracket_alphabet(g);
  auto dy = [&](const std::string& s) { return parse_dyck(gamma, s); };

  DerivationTree t = decode_dyck(g, dy("2 4 9 ~9 ~4 5 ~5 ~2"));
  CHECK(tree_to_sexpr(g, t) == "(0.2 (1.2 (2.1)) (2.1))");
  CHECK(format_word(g, yield_of(g, t)) == "aaabbababba");

  try {
    decode_dyck(g, dy("2 5 ~5 4 ~4 ~2"));
    FAIL("expected decode_error");
  } catch (const decode_error& e) {
    CHECK(e.condition == 3);
    CHECK(e.position == 2);
  }

  try {
    decode_dyck(g, dy("2 4"));  // never closed
    FAIL("expected decode_error");
  } catch (const decode_error& e) {
    CHECK(e.condition == 0);  // nesting fault, not a successor condition
  }
}

TEST_CASE("encode and decode are mutually inverse on short members") {
  Grammar g = parse_grammar(testg::kThree);
  for (const auto& w : words_upto(g, 1, 8)) {
    for (const auto& t : enumerate_trees(g, w).trees) {
      DyckWord z = encode_tree(g, t);
      CHECK(decode_dyck(g, z) == t);
    }
  }

  Grammar h = parse_grammar(testg::kFour);
  Word fig = parse_word(h, "aaababbaabba");
  auto te = enumerate_trees(h, fig);
  REQUIRE(te.trees.size() == 1);
  CHECK(tree_to_sexpr(h, te.trees[0]) == "(0.1 (1.1 (3.1) (2.2)) (2.1))");
  CHECK(decode_dyck(h, encode_tree(h, te.trees[0])) == te.trees[0]);
}

TEST_CASE("valid bracket words correspond to derivation trees") {
  Grammar g = parse_grammar(testg::kThree);
  BracketAlphabet gamma = build_bracket_alphabet(g);

  auto za = enumerate_valid_dyck_words(g, parse_word(g, "abba"));
  REQUIRE(za.size() == 1);
  CHECK(dyck_to_alias_string(gamma, za[0]) == "1 ~1");

  auto zd = enumerate_valid_dyck_words(g, parse_word(g, "aaabbababba"));
  REQUIRE(zd.size() == 1);
  CHECK(dyck_to_alias_string(gamma, zd[0]) == "2 4 9 ~9 ~4 5 ~5 ~2");

  CHECK(enumerate_valid_dyck_words(g, parse_word(g, "aabb")).empty());
  CHECK(enumerate_valid_dyck_words(g, Word{}).empty());

  // Counts agree with the tree oracle on every short word.
  for (const auto& w : words_upto(g, 1, 8))
    CHECK(enumerate_valid_dyck_words(g, w).size() ==
          enumerate_trees(g, w).trees.size());
}

TEST_CASE("the emitted local formula mirrors the condition checker") {
  Grammar g = parse_grammar(testg::kThree);
  BracketAlphabet gamma = build_bracket_alphabet(g);
  FormulaPtr local = emit_local_formula(g, gamma);
  Evaluator ev(local);

  auto agree = [&](const std::string& s) {
    DyckWord z = parse_dyck(gamma, s);
    bool by_formula = ev.eval(dyck_word_model(z), Matching{});
    bool by_checker = check_local_conditions(g, gamma, z).ok;
    return by_formula == by_checker;
  };

  CHECK(agree("1 ~1"));
  CHECK(agree("2 4 9 ~9 ~4 5 ~5 ~2"));
  CHECK(agree("2 5 ~5 4 ~4 ~2"));
  CHECK(agree("3 ~3"));
  CHECK(agree("2 4 9 ~9 ~4 ~2"));
  CHECK(agree("1 ~2"));
  CHECK(agree("2 ~2 1 ~1"));
  CHECK(agree(""));
  CHECK(agree("9 ~9"));

  // The formula sees only the letter sequence, so it accepts exactly the
  // locally-valid words among well-nested ones (nesting is not its job).
  CHECK(ev.eval(dyck_word_model(parse_dyck(gamma, "1 ~1")), Matching{}));
  CHECK_FALSE(
      ev.eval(dyck_word_model(parse_dyck(gamma, "2 5 ~5 4 ~4 ~2")), Matching{}));
}

TEST_CASE("the bracket alphabet serializes to structured output") {
  Grammar g = parse_grammar(testg::kThree);
  BracketAlphabet gamma = build_bracket_alphabet(g);
  HomTable hom = build_homomorphism(g, gamma);
  auto j = nlohmann::json::parse(gamma_to_json(g, gamma, hom));

  CHECK(j["bracket_count"] == 9);
  REQUIRE(j["brackets"].size() == 9);
  CHECK(j["brackets"][0]["alias"] == 1);
  CHECK(j["brackets"][0]["token"] == "0.0.1.1.0.1");
  CHECK(j["brackets"][0]["tuple"] == nlohmann::json({0, 0, 1, 1, 0, 1}));
  CHECK(j["brackets"][0]["open_reads"] == "abba");
  CHECK(j["brackets"][0]["close_reads"] == "");
  CHECK(j["brackets"][8]["alias"] == 9);
  CHECK(j["brackets"][8]["close_reads"] == "b");
}
