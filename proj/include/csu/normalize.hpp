#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "csu/grammar.hpp"

namespace csu {

// Removes every production `X -> a` (a single terminal) for nonterminals X
// that occur on some right-hand side, substituting `a` into those occurrences
// in all combinations. If the start symbol itself has such a production and
// also occurs on a right-hand side, a fresh start symbol is introduced first
// so the single-terminal words stay derivable. Languages and per-word
// derivation-tree counts are preserved. Requires an epsilon-free grammar.
// Throws cap_exceeded when the substitution closure exceeds max_productions.
Grammar eliminate_short_productions(const Grammar& g,
                                    std::size_t max_productions = 1000000);

// Rewrites productions until no two productions that contain at least one
// nonterminal share a pattern while having distinct left-hand sides. Works on
// double-Greibach grammars; preserves the language and per-word tree counts.
// Throws cap_exceeded when the rewriting exceeds max_productions.
Grammar make_patterns_injective(const Grammar& g,
                                std::size_t max_productions = 1000000);

// Converts an arbitrary grammar whose language does not contain the empty
// word into double Greibach normal form (validate_dgnf passes on the result;
// the language is preserved). Grammars already in that form are returned
// unchanged. Throws std::invalid_argument when the grammar derives the empty
// word. An input with an empty language yields a grammar with no productions
// and appends a note to *warnings when provided.
Grammar to_double_greibach(const Grammar& g,
                           std::vector<std::string>* warnings = nullptr);

}  // namespace csu
