#pragma once

#include <cstdint>

#include "csu/grammar.hpp"

namespace csu {

/// Earley recognition of w against any context-free grammar, including ones
/// with empty and unit productions. Throws std::invalid_argument when w
/// contains a symbol outside the grammar's terminals.
bool earley_recognize(const Grammar& g, const Word& w);

/// Result of derivation-tree enumeration: trees in canonical order
/// (lexicographic by preorder code sequence); truncated is set when more
/// than `limit` trees exist, in which case exactly `limit` are returned.
struct TreeEnum {
  std::vector<DerivationTree> trees;
  bool truncated = false;
};

/// Enumerate all derivation trees of w. Requires an epsilon-free grammar
/// without unit cycles (throws std::invalid_argument otherwise); a global
/// node budget guards against blowup (throws cap_exceeded).
TreeEnum enumerate_trees(const Grammar& g, const Word& w,
                         std::size_t limit = 4096);

/// Count derivation trees of w without materializing them. Same
/// preconditions as enumerate_trees.
std::uint64_t count_trees(const Grammar& g, const Word& w);

/// The word spelled by a derivation tree.
Word yield_of(const Grammar& g, const DerivationTree& t);

}  // namespace csu
