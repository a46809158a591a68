#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "csu/fo_match.hpp"
#include "csu/grammar.hpp"
#include "csu/parse_oracle.hpp"
#include "doctest.h"
#include "json.hpp"
#include "test_grammars.hpp"

using namespace csu;

namespace {

Matching mk(std::vector<std::pair<int, int>> arcs) {
  std::sort(arcs.begin(), arcs.end());
  return Matching{std::move(arcs)};
}

}  // namespace

TEST_CASE("matching validity separates its three defining clauses") {
  CHECK(is_matching({}, 0).ok);
  CHECK(is_matching({{1, 4}, {2, 3}}, 4).ok);
  CHECK(is_matching({{1, 2}, {3, 4}}, 4).ok);

  auto v1 = is_matching({{2, 2}}, 4);  // endpoints must be ordered
  CHECK_FALSE(v1.ok);
  CHECK(v1.clause == 1);
  CHECK_FALSE(is_matching({{0, 2}}, 4).ok);
  CHECK_FALSE(is_matching({{1, 5}}, 4).ok);

  auto v2 = is_matching({{1, 3}, {3, 4}}, 4);  // 3 used twice
  CHECK_FALSE(v2.ok);
  CHECK(v2.clause == 2);

  auto v3 = is_matching({{1, 3}, {2, 4}}, 4);  // crossing
  CHECK_FALSE(v3.ok);
  CHECK(v3.clause == 3);
  CHECK_FALSE(v3.message.empty());
}

TEST_CASE("matching enumeration counts follow the Motzkin numbers") {
  std::vector<std::size_t> motzkin{1, 1, 2, 4, 9, 21, 51};
  for (int n = 0; n <= 6; ++n)
    CHECK(enumerate_matchings(n).size() == motzkin[static_cast<std::size_t>(n)]);

  // Exact content at n = 3, canonical order: empty first, then arc-list
  // lexicographic.
  auto m3 = enumerate_matchings(3);
  REQUIRE(m3.size() == 4);
  CHECK(m3[0].arcs.empty());
  CHECK(m3[1] == mk({{1, 2}}));
  CHECK(m3[2] == mk({{1, 3}}));
  CHECK(m3[3] == mk({{2, 3}}));
}

TEST_CASE("matching enumeration agrees with the brute-force filter") {
  // All 2^6 arc subsets over 4 positions, filtered by the validity check.
  std::vector<std::pair<int, int>> pairs;
  for (int x = 1; x <= 4; ++x)
    for (int y = x + 1; y <= 4; ++y) pairs.emplace_back(x, y);
  std::set<std::vector<std::pair<int, int>>> brute;
  for (std::uint32_t mask = 0; mask < (1u << pairs.size()); ++mask) {
    std::vector<std::pair<int, int>> arcs;
    for (std::size_t j = 0; j < pairs.size(); ++j)
      if (mask & (1u << j)) arcs.push_back(pairs[j]);
    if (is_matching(arcs, 4).ok) {
      std::sort(arcs.begin(), arcs.end());
      brute.insert(arcs);
    }
  }
  std::set<std::vector<std::pair<int, int>>> enumerated;
  for (const auto& m : enumerate_matchings(4)) enumerated.insert(m.arcs);
  CHECK(brute == enumerated);
  CHECK(brute.size() == 9);
}

TEST_CASE("matching enumeration respects its bound") {
  CHECK_THROWS_AS(enumerate_matchings(15), cap_exceeded);  // default bound 14
  CHECK(enumerate_matchings(10, 12).size() == 2188);       // explicit bound
  CHECK_THROWS_AS(enumerate_matchings(-1), std::invalid_argument);
}

TEST_CASE("matchings render and query consistently") {
  Matching m = mk({{2, 5}, {1, 11}, {8, 9}, {3, 4}});
  CHECK(m.to_string() == "[(1,11),(2,5),(3,4),(8,9)]");
  CHECK(m.contains(2, 5));
  CHECK_FALSE(m.contains(5, 2));
  CHECK_FALSE(m.contains(6, 7));
  CHECK(Matching{}.to_string() == "[]");
}

TEST_CASE("formulas round-trip through s-expressions") {
  FormulaPtr f = f_imp(
      f_less(t_min(), t_var("x")),
      f_iff(f_letter("a", t_succ(t_var("x"))), f_arc(t_var("x"), t_max())));
  std::string s = formula_to_sexpr(f);
  CHECK(s == "(imp (< min x) (iff (letter a (s x)) (arc x max)))");
  CHECK(formula_to_sexpr(formula_from_sexpr(s)) == s);

  std::string q = "(exists x (forall y (or (not (< x y)) (= (s x) y))))";
  CHECK(formula_to_sexpr(formula_from_sexpr(q)) == q);

  // Reading goes through the constructing builders, which fold constants:
  // a redundant `false` disjunct disappears.
  std::string folded =
      "(exists x (forall y (or (not (< x y)) (= (s x) y) false)))";
  CHECK(formula_to_sexpr(formula_from_sexpr(folded)) == q);

  CHECK_THROWS_AS(formula_from_sexpr("(and)"), std::invalid_argument);
  CHECK_THROWS_AS(formula_from_sexpr("(frob x)"), std::invalid_argument);
  CHECK_THROWS_AS(formula_from_sexpr("(and (= min min)"),
                  std::invalid_argument);
  CHECK_THROWS_AS(formula_from_sexpr("(= min min) junk"),
                  std::invalid_argument);
}

TEST_CASE("the evaluator implements the word-model semantics") {
  Word ab{"a", "b"};
  Word a{"a"};
  Matching none;

  CHECK(eval_formula(formula_from_sexpr("(= min max)"), a, none));
  CHECK_FALSE(eval_formula(formula_from_sexpr("(= min max)"), ab, none));
  CHECK(eval_formula(formula_from_sexpr("(letter a min)"), ab, none));
  CHECK(eval_formula(formula_from_sexpr("(letter b max)"), ab, none));
  CHECK_FALSE(eval_formula(formula_from_sexpr("(letter c min)"), ab, none));
  CHECK(eval_formula(formula_from_sexpr("(< min max)"), ab, none));
  CHECK(eval_formula(formula_from_sexpr("(= (s min) max)"), ab, none));
  // The successor of the last position is undefined, making atoms false.
  CHECK_FALSE(eval_formula(formula_from_sexpr("(= (s min) max)"), a, none));
  CHECK_FALSE(eval_formula(formula_from_sexpr("(= (s max) (s max))"), a, none));

  CHECK(eval_formula(formula_from_sexpr("(exists x (letter b x))"), ab, none));
  CHECK_FALSE(
      eval_formula(formula_from_sexpr("(forall x (letter a x))"), ab, none));
  CHECK(eval_formula(
      formula_from_sexpr("(forall x (or (letter a x) (letter b x)))"), ab,
      none));

  // Quantifiers over the empty word.
  Word eps;
  CHECK(eval_formula(formula_from_sexpr("(forall x (< x x))"), eps, none));
  CHECK_FALSE(eval_formula(formula_from_sexpr("(exists x (= x x))"), eps, none));
  CHECK_FALSE(eval_formula(formula_from_sexpr("(= min min)"), eps, none));

  // Arcs are read from the matching, both endpoint orders rejected.
  Matching m14 = mk({{1, 4}});
  Word abba{"a", "b", "b", "a"};
  CHECK(eval_formula(formula_from_sexpr("(arc min max)"), abba, m14));
  CHECK_FALSE(eval_formula(formula_from_sexpr("(arc max min)"), abba, m14));
  CHECK_FALSE(eval_formula(formula_from_sexpr("(arc min max)"), abba, none));

  CHECK_THROWS_AS(eval_formula(formula_from_sexpr("(= x x)"), ab, none),
                  std::invalid_argument);
}

TEST_CASE("trees induce one arc per multi-position node") {
  Grammar g = parse_grammar(testg::kThree);
  DerivationTree single = tree_from_sexpr(g, "(0.1)");
  CHECK(matching_from_tree(g, single) == mk({{1, 4}}));

  DerivationTree t = tree_from_sexpr(g, "(0.2 (1.2 (2.1)) (2.1))");
  CHECK(matching_from_tree(g, t) == mk({{1, 11}, {2, 5}, {3, 4}, {8, 9}}));

  // A word of length one yields the empty matching.
  Grammar h = parse_grammar("start: S\nS -> a\n");
  CHECK(matching_from_tree(h, tree_from_sexpr(h, "(0.1)")) == Matching{});

  // Inner nodes spanning a single position have no arc to contribute.
  Grammar k = parse_grammar("start: S\nS -> a S b\nS -> c\n");
  DerivationTree bad = tree_from_sexpr(k, "(0.1 (0.2))");
  CHECK_THROWS_AS(matching_from_tree(k, bad), std::invalid_argument);
}

TEST_CASE("the membership sentence collapses correctly on one production") {
  Grammar g = parse_grammar("start: S\nS -> a\n");
  CHECK(formula_to_sexpr(build_psi_g(g)) ==
        "(and (= min max) (letter a min) "
        "(forall x (forall y (not (arc x y)))))");
  CHECK(eval_formula(build_psi_g(g), Word{"a"}, Matching{}));
  CHECK_FALSE(eval_formula(build_psi_g(g), Word{"b"}, Matching{}));
  CHECK_FALSE(eval_formula(build_psi_g(g), Word{"a", "a"}, Matching{}));
}

TEST_CASE("the membership sentence needs the double Greibach shape") {
  Grammar g = parse_grammar("start: S\nS -> a S\nS -> b\n");
  CHECK_THROWS_AS(build_psi_g(g), std::invalid_argument);
}

TEST_CASE("the membership sentence accepts exactly the tree matchings") {
  Grammar g = parse_grammar(testg::kThree);
  FormulaPtr psi = build_psi_g(g);
  Evaluator ev(psi);

  Word abba = parse_word(g, "abba");
  CHECK(ev.eval(abba, mk({{1, 4}})));
  CHECK_FALSE(ev.eval(abba, Matching{}));
  CHECK_FALSE(ev.eval(abba, mk({{2, 3}})));
  CHECK_FALSE(ev.eval(abba, mk({{1, 4}, {2, 3}})));

  Word wd = parse_word(g, "aaabbababba");
  Matching mt = mk({{1, 11}, {2, 5}, {3, 4}, {8, 9}});
  CHECK(ev.eval(wd, mt));
  CHECK_FALSE(ev.eval(wd, mk({{1, 11}, {2, 5}, {3, 4}})));
  CHECK_FALSE(ev.eval(wd, mk({{1, 11}, {2, 5}, {8, 9}})));
  CHECK_FALSE(ev.eval(wd, Matching{}));
}

TEST_CASE("the exactness clauses reject floating arcs") {
  Grammar g = parse_grammar(testg::kThree);
  Evaluator exact(build_psi_g(g, PsiVariant::exact));
  Evaluator permissive(build_psi_g(g, PsiVariant::permissive));

  Word wd = parse_word(g, "aaabbababba");
  Matching mt = mk({{1, 11}, {2, 5}, {3, 4}, {8, 9}});
  Matching floated = mk({{1, 11}, {2, 5}, {3, 4}, {8, 9}, {6, 7}});
  REQUIRE(is_matching(floated.arcs, 11).ok);

  CHECK(exact.eval(wd, mt));
  CHECK(permissive.eval(wd, mt));
  CHECK_FALSE(exact.eval(wd, floated));
  CHECK(permissive.eval(wd, floated));
}

TEST_CASE("satisfying matchings are found exhaustively") {
  Grammar g = parse_grammar(testg::kThree);
  auto ms = satisfying_matchings(g, parse_word(g, "abba"));
  REQUIRE(ms.size() == 1);
  CHECK(ms[0] == mk({{1, 4}}));

  auto md = satisfying_matchings(g, parse_word(g, "aaabbababba"));
  REQUIRE(md.size() == 1);
  CHECK(md[0] == mk({{1, 11}, {2, 5}, {3, 4}, {8, 9}}));

  CHECK(satisfying_matchings(g, parse_word(g, "aabb")).empty());
  CHECK(satisfying_matchings(g, parse_word(g, "a")).empty());
  CHECK(satisfying_matchings(g, Word{}).empty());

  Grammar amb = parse_grammar(testg::kAmbig);
  auto ma = satisfying_matchings(amb, parse_word(amb, "aaabbb"));
  REQUIRE(ma.size() == 2);
  CHECK(ma[0] == mk({{1, 6}, {2, 5}, {3, 4}}));
  CHECK(ma[1] == mk({{1, 6}, {3, 4}}));

  CHECK_THROWS_AS(satisfying_matchings(g, Word(15, "a")), cap_exceeded);
}

TEST_CASE("the permissive variant floods all-terminal start words") {
  // abba matches the all-terminal start production, so under the permissive
  // variant every matching over four positions satisfies the sentence.
  Grammar g = parse_grammar(testg::kThree);
  auto ms = satisfying_matchings(g, parse_word(g, "abba"), 14,
                                 PsiVariant::permissive);
  CHECK(ms.size() == 9);  // all matchings over 4 positions
}

TEST_CASE("the ambiguity probe ties tree counts to matching counts") {
  Grammar g = parse_grammar(testg::kThree);
  auto rep = unambiguity_probe(g, 6);
  CHECK(rep.max_len == 6);
  CHECK(rep.words_checked == 126);
  CHECK_FALSE(rep.any_flagged);
  REQUIRE(rep.records.size() == 1);  // only abba has trees below length 7
  CHECK(rep.records[0].word == parse_word(g, "abba"));
  CHECK(rep.records[0].tree_count == 1);
  CHECK(rep.records[0].matching_count == 1);

  Grammar amb = parse_grammar(testg::kAmbig);
  auto rep2 = unambiguity_probe(amb, 6);
  CHECK(rep2.any_flagged);
  bool found = false;
  for (const auto& r : rep2.records)
    if (r.word == parse_word(amb, "aaabbb")) {
      found = true;
      CHECK(r.flagged);
      CHECK(r.tree_count == 2);
      CHECK(r.matching_count == 2);
    }
  CHECK(found);

  std::string text = report_to_text(amb, rep2);
  CHECK(text.find("FLAGGED") != std::string::npos);
  auto j = nlohmann::json::parse(report_to_json(amb, rep2));
  CHECK(j["any_flagged"] == true);
  CHECK(j["max_len"] == 6);

  CHECK_THROWS_AS(unambiguity_probe(g, 15, 14), cap_exceeded);
}
