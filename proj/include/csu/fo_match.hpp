#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "csu/grammar.hpp"

namespace csu {

// ---------------------------------------------------------------------------
// Matchings: sets of pairwise non-crossing arcs over word positions 1..n in
// which every position carries at most one arc endpoint.
// ---------------------------------------------------------------------------

struct Matching {
  // Arcs (x, y) with 1 <= x < y <= n, sorted ascending.
  std::vector<std::pair<int, int>> arcs;

  bool contains(int x, int y) const;
  // Renders as "[]" or "[(1,11),(2,5)]".
  std::string to_string() const;

  bool operator==(const Matching& o) const { return arcs == o.arcs; }
  bool operator<(const Matching& o) const { return arcs < o.arcs; }
};

struct MatchingVerdict {
  bool ok = true;
  // 1 = arc endpoints out of range or not increasing,
  // 2 = a position carries two arc endpoints,
  // 3 = two arcs cross.
  int clause = 0;
  std::string message;
};

// Checks the three matching axioms for an arc set over positions 1..n.
MatchingVerdict is_matching(const std::vector<std::pair<int, int>>& arcs,
                            int n);

// The enumeration bound used by default: the CSU_ENUM_BOUND environment
// variable when set to a positive integer, otherwise 14.
std::size_t default_enum_bound();

// All matchings over positions 1..n in canonical order (lexicographic on the
// sorted arc lists, so the empty matching comes first). Throws cap_exceeded
// when n exceeds the bound.
std::vector<Matching> enumerate_matchings(int n,
                                          std::size_t bound = 14);

// ---------------------------------------------------------------------------
// First-order formulas over word models: positions ordered by < with
// successor s, constants min/max, letter predicates, and one binary
// relation arc(x, y) interpreted by a matching.
// ---------------------------------------------------------------------------

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind { minimum, maximum, variable, successor };
  Kind kind = Kind::minimum;
  std::string name;  // variable kind
  TermPtr arg;       // successor kind
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind {
    truth,
    falsity,
    conjunction,   // n-ary
    disjunction,   // n-ary
    negation,      // kids[0]
    implication,   // kids[0] -> kids[1]
    equivalence,   // kids[0] <-> kids[1]
    exists,        // var, kids[0]
    forall,        // var, kids[0]
    less,          // t1 < t2
    equal,         // t1 = t2
    letter,        // position t1 carries `letter`
    arc            // arc(t1, t2)
  };
  Kind kind = Kind::truth;
  std::vector<FormulaPtr> kids;
  std::string var;
  Symbol letter;
  TermPtr t1, t2;
};

TermPtr t_min();
TermPtr t_max();
TermPtr t_var(const std::string& name);
TermPtr t_succ(TermPtr t);

FormulaPtr f_true();
FormulaPtr f_false();
// The connective builders fold constants: an empty conjunction is truth, an
// empty disjunction is falsity, and truth/falsity operands are absorbed.
FormulaPtr f_and(std::vector<FormulaPtr> kids);
FormulaPtr f_or(std::vector<FormulaPtr> kids);
FormulaPtr f_not(FormulaPtr f);
FormulaPtr f_imp(FormulaPtr a, FormulaPtr b);
FormulaPtr f_iff(FormulaPtr a, FormulaPtr b);
FormulaPtr f_exists(const std::string& var, FormulaPtr body);
FormulaPtr f_forall(const std::string& var, FormulaPtr body);
FormulaPtr f_less(TermPtr a, TermPtr b);
FormulaPtr f_leq(TermPtr a, TermPtr b);  // shorthand for (or (< a b) (= a b))
FormulaPtr f_eq(TermPtr a, TermPtr b);
FormulaPtr f_letter(const Symbol& a, TermPtr t);
FormulaPtr f_arc(TermPtr a, TermPtr b);

// S-expression round trip, e.g. "(and (letter a min) (exists x (< min x)))".
std::string term_to_sexpr(const TermPtr& t);
std::string formula_to_sexpr(const FormulaPtr& f);
FormulaPtr formula_from_sexpr(const std::string& text);

// Evaluates closed formulas over (word, matching) models. Construction
// resolves variables once so one formula can be checked against many models;
// it throws std::invalid_argument on free variables. Atoms whose terms are
// undefined (successor of the last position, min/max of the empty word)
// evaluate to false.
class Evaluator {
 public:
  explicit Evaluator(const FormulaPtr& f);
  bool eval(const Word& w, const Matching& m) const;

 private:
  struct TNode {
    int kind;  // 0 min, 1 max, 2 var, 3 succ
    int slot = -1;
    int arg = -1;
  };
  struct FNode {
    Formula::Kind kind;
    std::vector<int> kids;
    int slot = -1;
    int t1 = -1, t2 = -1;
    int letter_id = -1;
  };
  std::vector<TNode> terms_;
  std::vector<FNode> nodes_;
  int root_ = -1;
  int slot_count_ = 0;
  std::vector<Symbol> letter_names_;

  int compile_term(const TermPtr& t, const std::vector<std::string>& scope);
  int compile(const FormulaPtr& f, std::vector<std::string>& scope);
  int eval_term(int id, const std::vector<int>& env, int n) const;
  bool eval_node(int id, std::vector<int>& env, const std::vector<int>& w,
                 const Matching& m) const;
};

// One-shot convenience wrapper around Evaluator.
bool eval_formula(const FormulaPtr& f, const Word& w, const Matching& m);

// ---------------------------------------------------------------------------
// Matchings induced by derivation trees, and the sentence that ties them to
// membership for double Greibach grammars.
// ---------------------------------------------------------------------------

// The matching that arcs the first and last position of every subtree span.
// A single-position span contributes no arc and is only legal at the root;
// anywhere else it throws std::invalid_argument (eliminate short productions
// first).
Matching matching_from_tree(const Grammar& g, const DerivationTree& t);

enum class PsiVariant {
  exact,       // satisfied by exactly the matchings induced by parse trees
  permissive   // drops the exactness constraints; extra arcs may float
};

// The membership sentence for a double Greibach grammar: a word together
// with a matching satisfies it iff the matching describes a parse. Throws
// std::invalid_argument unless the grammar passes validate_dgnf. Every arc
// spans one production application, so single-terminal start productions are
// meaningful only at the whole-word level (the arc-free disjunct); a start
// symbol that both occurs on a right-hand side and has a single-terminal
// production should go through eliminate_short_productions first.
FormulaPtr build_psi_g(const Grammar& g, PsiVariant variant = PsiVariant::exact);

// All matchings over |w| positions satisfying the membership sentence, in
// canonical order. Equivalent to filtering enumerate_matchings(|w|) through
// eval_formula, but prunes arcs that no production could justify. Throws
// cap_exceeded when |w| exceeds the bound.
std::vector<Matching> satisfying_matchings(
    const Grammar& g, const Word& w, std::size_t bound = default_enum_bound(),
    PsiVariant variant = PsiVariant::exact);

// ---------------------------------------------------------------------------
// Ambiguity probing: compare parse-tree counts with satisfying-matching
// counts across all words up to a length.
// ---------------------------------------------------------------------------

struct WordRecord {
  Word word;
  std::uint64_t tree_count = 0;
  std::uint64_t matching_count = 0;
  std::vector<Matching> matchings;  // truncated to the report cap
  bool flagged = false;
};

struct AmbiguityReport {
  int max_len = 0;
  std::uint64_t words_checked = 0;
  bool any_flagged = false;
  // Words with at least one tree or one satisfying matching, in length-then-
  // lexicographic order.
  std::vector<WordRecord> records;
};

// Checks every word of length 1..max_len: a word is flagged when it has two
// or more parse trees or when the tree count and the satisfying-matching
// count disagree. Requires a double Greibach grammar.
AmbiguityReport unambiguity_probe(const Grammar& g, int max_len,
                                  std::size_t bound = default_enum_bound(),
                                  std::size_t matchings_cap = 8);

std::string report_to_text(const Grammar& g, const AmbiguityReport& r);
std::string report_to_json(const Grammar& g, const AmbiguityReport& r);

}  // namespace csu
