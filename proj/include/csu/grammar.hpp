#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace csu {

/// A terminal or nonterminal token. Terminals are arbitrary tokens that do
/// not start with an ASCII uppercase letter; nonterminal names do.
using Symbol = std::string;

/// A word is a sequence of terminal tokens.
using Word = std::vector<Symbol>;

/// Error raised by the grammar file parser; carries a 1-based line number
/// (0 when no specific line applies).
struct parse_error : std::runtime_error {
  int line;
  parse_error(int line_, const std::string& msg)
      : std::runtime_error(msg), line(line_) {}
};

/// Error raised when a transformation or enumeration exceeds its guard cap.
struct cap_exceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One right-hand-side element: either a terminal token or a nonterminal
/// index into Grammar::nonterminals.
struct Sym {
  bool is_nt = false;
  int nt = -1;
  Symbol term;

  static Sym terminal(Symbol t) { return {false, -1, std::move(t)}; }
  static Sym nonterminal(int i) { return {true, i, {}}; }
  bool operator==(const Sym& o) const {
    return is_nt == o.is_nt && nt == o.nt && term == o.term;
  }
};

/// A production X_a -> rhs with code (a, b); b is 1-based among the
/// productions sharing the same left-hand side.
struct Production {
  int lhs = 0;
  int sub = 1;
  std::vector<Sym> rhs;

  /// Number of nonterminal occurrences on the right-hand side.
  int nt_count() const;
  /// Nonterminal index of the d-th occurrence (d is 1-based).
  int nt_at(int d) const;
  /// Maximal terminal runs between nonterminal occurrences: segment 0 is the
  /// prefix before the first occurrence, segment d follows the d-th
  /// occurrence; there are nt_count()+1 segments, each possibly empty.
  std::vector<Word> segments() const;
};

/// A context-free grammar. Nonterminal 0 is the start symbol; productions
/// are kept sorted by code (lhs index, then sub).
struct Grammar {
  std::vector<Symbol> terminals;     // first-appearance order, deduplicated
  std::vector<Symbol> nonterminals;  // index 0 = start symbol
  std::vector<Production> productions;

  /// Global indices of the productions with the given left-hand side.
  std::vector<int> prods_of(int nt) const;
  /// Number of productions with left-hand side nt (i_nt).
  int prod_count(int nt) const;
  /// Global index of the production with code (a, b), or -1.
  int find_prod(int a, int b) const;
  /// Index of a terminal token in `terminals`, or -1.
  int terminal_index(const Symbol& t) const;

  bool operator==(const Grammar& o) const {
    return terminals == o.terminals && nonterminals == o.nonterminals &&
           [&] {
             if (productions.size() != o.productions.size()) return false;
             for (size_t i = 0; i < productions.size(); ++i) {
               const auto& p = productions[i];
               const auto& q = o.productions[i];
               if (p.lhs != q.lhs || p.sub != q.sub || !(p.rhs == q.rhs))
                 return false;
             }
             return true;
           }();
  }
};

/// Parse a grammar file: a `start: <symbol>` line followed by
/// `<LHS> -> <tok> <tok> ...` lines; `#` starts a comment; an empty
/// right-hand side denotes the empty word. Nonterminal indices follow first
/// appearance as a left-hand side, start symbol first; production codes
/// follow file order per left-hand side. Throws parse_error.
Grammar parse_grammar(const std::string& text);

/// Canonical text form: `start:` line, then productions grouped by
/// nonterminal index in code order. parse_grammar(serialize_grammar(g)) == g.
std::string serialize_grammar(const Grammar& g);

/// The pattern of a production: its right-hand side with every nonterminal
/// occurrence replaced by the placeholder `|`. Terminal tokens are rendered
/// verbatim; multi-token patterns join with nothing when every token is a
/// single character, otherwise with spaces.
std::string pattern_of(const Grammar& g, const Production& p);

/// Verdict of the double-Greibach shape check: every production is either
/// the start symbol deriving a single terminal, or has a terminal first
/// symbol and a terminal last symbol (length >= 2).
struct DgnfVerdict {
  bool ok = true;
  std::vector<int> offenders;  // global production indices
};
DgnfVerdict validate_dgnf(const Grammar& g);

/// True when any two productions that contain at least one nonterminal and
/// share a pattern also share their left-hand side.
bool patterns_injective(const Grammar& g);

/// A derivation tree: each node names a production by global index; children
/// correspond to the nonterminal occurrences of that production in order.
struct DerivationTree {
  int prod = -1;
  std::vector<DerivationTree> children;

  bool operator==(const DerivationTree& o) const {
    return prod == o.prod && children == o.children;
  }
};

/// Check tree well-formedness: child counts match nonterminal occurrence
/// counts and child left-hand sides match the occurrences; when
/// require_start_root, the root production's left-hand side must be the
/// start symbol. Throws std::invalid_argument on violation.
void validate_tree(const Grammar& g, const DerivationTree& t,
                   bool require_start_root = true);

/// Tree serialization: `(0.2 (1.2 (2.1)) (2.1))` - each node is its
/// production code a.b followed by its children.
std::string tree_to_sexpr(const Grammar& g, const DerivationTree& t);
DerivationTree tree_from_sexpr(const Grammar& g, const std::string& text);

/// The preorder sequence of production codes, used as the canonical tree
/// ordering key.
std::vector<std::pair<int, int>> tree_code_seq(const Grammar& g,
                                               const DerivationTree& t);

/// Render a word for display: tokens concatenate when every terminal of g is
/// a single character, otherwise they join with single spaces.
std::string format_word(const Grammar& g, const Word& w);

/// Parse a word argument: split on whitespace when every piece is a terminal
/// of g; otherwise, when all terminals are single characters, split into
/// characters. Throws std::invalid_argument for symbols outside the grammar.
Word parse_word(const Grammar& g, const std::string& text);

/// All words over the grammar's terminals with length in [min_len, max_len],
/// in length-then-lexicographic order (terminal index order).
std::vector<Word> words_upto(const Grammar& g, int min_len, int max_len);

}  // namespace csu
