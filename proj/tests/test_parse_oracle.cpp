#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "csu/grammar.hpp"
#include "csu/parse_oracle.hpp"
#include "doctest.h"
#include "test_grammars.hpp"

using namespace csu;

TEST_CASE("recognition on the three-nonterminal sample grammar") {
  Grammar g = parse_grammar(testg::kThree);
  CHECK(earley_recognize(g, parse_word(g, "abba")));
  CHECK(earley_recognize(g, parse_word(g, "aaabbababba")));
  CHECK_FALSE(earley_recognize(g, parse_word(g, "aabb")));
  CHECK_FALSE(earley_recognize(g, parse_word(g, "")));
  CHECK_FALSE(earley_recognize(g, parse_word(g, "abb")));
  CHECK_THROWS_AS(earley_recognize(g, Word{"a", "c"}), std::invalid_argument);

  // Exhaustively: the only members of length at most 12 are those two words.
  std::vector<std::string> members;
  for (const auto& w : words_upto(g, 0, 12))
    if (earley_recognize(g, w)) members.push_back(format_word(g, w));
  CHECK(members == std::vector<std::string>{"abba", "aaabbababba"});
}

TEST_CASE("recognition handles empty and unit productions") {
  Grammar g = parse_grammar(
      "start: S\n"
      "S -> A\n"
      "S ->\n"
      "A -> a A\n"
      "A -> a\n");
  CHECK(earley_recognize(g, Word{}));
  CHECK(earley_recognize(g, Word{"a"}));
  CHECK(earley_recognize(g, Word{"a", "a", "a"}));

  // Left-recursive and cyclic-unit grammars still terminate.
  Grammar h = parse_grammar(
      "start: S\n"
      "S -> S a\n"
      "S -> B\n"
      "B -> S\n"
      "B -> b\n");
  CHECK(earley_recognize(h, parse_word(h, "baaa")));
  CHECK_FALSE(earley_recognize(h, parse_word(h, "ab")));
}

TEST_CASE("tree enumeration lists every derivation tree in canonical order") {
  Grammar g = parse_grammar(testg::kAmbig);
  Word w = parse_word(g, "aaabbb");

  auto te = enumerate_trees(g, w);
  CHECK_FALSE(te.truncated);
  REQUIRE(te.trees.size() == 2);
  CHECK(count_trees(g, w) == 2);

  // Canonical order is lexicographic in the preorder code sequence.
  CHECK(tree_to_sexpr(g, te.trees[0]) == "(0.1 (0.1 (0.3)))");
  CHECK(tree_to_sexpr(g, te.trees[1]) == "(0.2 (0.3))");
  for (const auto& t : te.trees) {
    CHECK_NOTHROW(validate_tree(g, t));
    CHECK(yield_of(g, t) == w);
  }

  CHECK(count_trees(g, parse_word(g, "ab")) == 1);
  CHECK(count_trees(g, parse_word(g, "ba")) == 0);
  CHECK(enumerate_trees(g, parse_word(g, "ba")).trees.empty());
}

TEST_CASE("tree counts match the Catalan numbers on the binary-split grammar") {
  Grammar g = parse_grammar(testg::kCatalan);
  // a^n has as many trees as binary trees with n leaves.
  std::vector<std::uint64_t> catalan{1, 1, 2, 5, 14, 42, 132};
  for (int n = 1; n <= 7; ++n) {
    Word w(static_cast<std::size_t>(n), "a");
    CHECK(count_trees(g, w) == catalan[static_cast<std::size_t>(n) - 1]);
  }

  Word w5(5, "a");
  auto te = enumerate_trees(g, w5);
  REQUIRE(te.trees.size() == 14);
  std::set<std::string> distinct;
  for (const auto& t : te.trees) {
    CHECK(yield_of(g, t) == w5);
    distinct.insert(tree_to_sexpr(g, t));
  }
  CHECK(distinct.size() == 14);

  // Counting does not materialize trees, so large counts stay exact.
  CHECK(count_trees(g, Word(20, "a")) == 1767263190u);
}

TEST_CASE("tree enumeration truncates at the requested limit") {
  Grammar g = parse_grammar(testg::kCatalan);
  auto te = enumerate_trees(g, Word(5, "a"), 3);
  CHECK(te.truncated);
  CHECK(te.trees.size() == 3);

  auto all = enumerate_trees(g, Word(5, "a"), 14);
  CHECK_FALSE(all.truncated);
  CHECK(all.trees.size() == 14);
}

TEST_CASE("tree enumeration rejects empty productions and unit cycles") {
  Grammar g1 = parse_grammar("start: S\nS ->\nS -> a\n");
  CHECK_THROWS_AS(enumerate_trees(g1, Word{"a"}), std::invalid_argument);
  CHECK_THROWS_AS(count_trees(g1, Word{"a"}), std::invalid_argument);

  Grammar g2 = parse_grammar(
      "start: S\n"
      "S -> A\n"
      "A -> S\n"
      "A -> a\n");
  CHECK_THROWS_AS(enumerate_trees(g2, Word{"a"}), std::invalid_argument);

  // Unit productions without cycles are fine.
  Grammar g3 = parse_grammar(
      "start: S\n"
      "S -> A\n"
      "A -> a\n");
  CHECK(count_trees(g3, Word{"a"}) == 1);
}
