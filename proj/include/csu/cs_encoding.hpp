#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "csu/fo_match.hpp"
#include "csu/grammar.hpp"

namespace csu {

// ---------------------------------------------------------------------------
// Typed brackets. An open bracket <a,b,c,d,e,f> says: inside an application
// of production (a,b) — which has c nonterminal occurrences — the child at
// rank d is derived by production (e,f). The root is wrapped in the special
// bracket <0,0,1,1,0,f> naming the start production (0,f).
// ---------------------------------------------------------------------------

struct Bracket {
  int a = 0, b = 0, c = 0, d = 0, e = 0, f = 0;
  auto operator<=>(const Bracket&) const = default;
};

struct BracketTok {
  Bracket br;
  bool close = false;
  auto operator<=>(const BracketTok&) const = default;
};

using DyckWord = std::vector<BracketTok>;

// The open-bracket alphabet of a grammar, sorted lexicographically by tuple;
// aliases number the opens 1..|Gamma| in that order.
struct BracketAlphabet {
  std::vector<Bracket> opens;
  // 1-based alias, or 0 when the bracket is not in the alphabet.
  int alias_of(const Bracket& b) const;
};

// Requires a double Greibach grammar (throws std::invalid_argument).
BracketAlphabet build_bracket_alphabet(const Grammar& g);

// The letter-erasing homomorphism: an open bracket reads the terminal
// prefix of the production it applies; a close bracket reads the terminal
// run after child d of the production it sits inside (the root close reads
// nothing).
struct HomTable {
  std::vector<Word> open_image;   // indexed by alias; [0] unused
  std::vector<Word> close_image;  // indexed by alias; [0] unused
};

HomTable build_homomorphism(const Grammar& g, const BracketAlphabet& gamma);

// Concatenates the images of all tokens. Throws std::invalid_argument on a
// bracket outside the alphabet.
Word apply_hom(const HomTable& hom, const BracketAlphabet& gamma,
               const DyckWord& z);

// ---------------------------------------------------------------------------
// Token text. Full form "a.b.c.d.e.f" / "~a.b.c.d.e.f"; alias form "3" /
// "~3". Parsing accepts both, mixed freely, separated by whitespace.
// ---------------------------------------------------------------------------

std::string token_to_string(const BracketTok& t);
std::string token_to_alias(const BracketAlphabet& gamma, const BracketTok& t);
std::string dyck_to_string(const DyckWord& z);
std::string dyck_to_alias_string(const BracketAlphabet& gamma,
                                 const DyckWord& z);
DyckWord parse_dyck(const BracketAlphabet& gamma, const std::string& text);

// ---------------------------------------------------------------------------
// Checks and codecs
// ---------------------------------------------------------------------------

// True when the brackets nest properly (each close matches the most recent
// unmatched open, nothing left unmatched).
bool is_dyck(const DyckWord& z);

struct LocalVerdict {
  bool ok = true;
  int condition = 0;  // 1..5
  int position = 0;   // 1-based token position of the violation
  std::string message;
};

// The successor conditions:
//  1 the word starts with a root open and ends with that root's close;
//  2 an open applying a childless production is followed by its own close;
//  3 an open applying a production with children is followed by an open of
//    that production at rank 1;
//  4 a close at rank d < c is followed by an open of the same production at
//    rank d+1;
//  5 a close at the last rank is followed by a close (the root close ends
//    the word).
// A violated condition reports the position of the offending successor, or
// of the token itself when the required successor is missing. Tokens whose
// bracket is outside the alphabet raise std::invalid_argument.
LocalVerdict check_local_conditions(const Grammar& g,
                                    const BracketAlphabet& gamma,
                                    const DyckWord& z);

// Encodes a derivation tree (root must use the start symbol) as a bracket
// word: open on entering a node, close on leaving it.
DyckWord encode_tree(const Grammar& g, const DerivationTree& t);

struct decode_error : std::runtime_error {
  int condition;  // 0 = improper nesting, 1..5 = successor condition
  int position;   // 1-based token position
  decode_error(int c, int p, const std::string& msg)
      : std::runtime_error(msg), condition(c), position(p) {}
};

// Inverse of encode_tree; throws decode_error when the word is not properly
// nested or violates a successor condition.
DerivationTree decode_dyck(const Grammar& g, const DyckWord& z);

// ---------------------------------------------------------------------------
// Local conditions as a first-order sentence over the token letters of
// dyck_word_model (each position carries its full token string).
// ---------------------------------------------------------------------------

Word dyck_word_model(const DyckWord& z);
FormulaPtr emit_local_formula(const Grammar& g, const BracketAlphabet& gamma);

// All properly nested bracket words that satisfy the successor conditions
// and whose letter image is exactly w, in lexicographic alias order. The
// search is bounded: every open contributes at least one letter, so words
// longer than 2|w| tokens never arise.
std::vector<DyckWord> enumerate_valid_dyck_words(const Grammar& g,
                                                 const Word& w);

// JSON description of the alphabet and homomorphism (aliases, tuples,
// token strings, images).
std::string gamma_to_json(const Grammar& g, const BracketAlphabet& gamma,
                          const HomTable& hom);

}  // namespace csu
