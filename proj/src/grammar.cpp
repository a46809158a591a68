#include "csu/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace csu {

namespace {

bool is_nonterminal_token(const Symbol& s) {
  return !s.empty() && s[0] >= 'A' && s[0] <= 'Z';
}

bool all_single_char(const std::vector<Symbol>& toks) {
  return std::all_of(toks.begin(), toks.end(),
                     [](const Symbol& s) { return s.size() == 1; });
}

}  // namespace

int Production::nt_count() const {
  int c = 0;
  for (const auto& s : rhs) c += s.is_nt ? 1 : 0;
  return c;
}

int Production::nt_at(int d) const {
  int seen = 0;
  for (const auto& s : rhs)
    if (s.is_nt && ++seen == d) return s.nt;
  throw std::invalid_argument("nonterminal occurrence index out of range");
}

std::vector<Word> Production::segments() const {
  std::vector<Word> segs(1);
  for (const auto& s : rhs) {
    if (s.is_nt)
      segs.emplace_back();
    else
      segs.back().push_back(s.term);
  }
  return segs;
}

std::vector<int> Grammar::prods_of(int nt) const {
  std::vector<int> out;
  for (size_t i = 0; i < productions.size(); ++i)
    if (productions[i].lhs == nt) out.push_back(static_cast<int>(i));
  return out;
}

int Grammar::prod_count(int nt) const {
  return static_cast<int>(prods_of(nt).size());
}

int Grammar::find_prod(int a, int b) const {
  for (size_t i = 0; i < productions.size(); ++i)
    if (productions[i].lhs == a && productions[i].sub == b)
      return static_cast<int>(i);
  return -1;
}

int Grammar::terminal_index(const Symbol& t) const {
  auto it = std::find(terminals.begin(), terminals.end(), t);
  return it == terminals.end() ? -1
                               : static_cast<int>(it - terminals.begin());
}

Grammar parse_grammar(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;

  struct RawProd {
    int line;
    Symbol lhs;
    std::vector<Symbol> rhs;
  };
  std::optional<Symbol> start;
  int start_line = 0;
  std::vector<RawProd> raw;

  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream ls(line);
    std::vector<Symbol> toks;
    for (Symbol t; ls >> t;) toks.push_back(t);
    if (toks.empty()) continue;

    if (!start) {
      if (toks.size() == 2 && toks[0] == "start:") {
        start = toks[1];
        start_line = lineno;
        continue;
      }
      if (!toks.empty() && toks[0].size() > 6 && toks[0].rfind("start:", 0) == 0 &&
          toks.size() == 1) {
        start = toks[0].substr(6);
        start_line = lineno;
        continue;
      }
      throw parse_error(lineno, "expected `start: <symbol>` before productions");
    }
    if (toks.size() < 2 || toks[1] != "->")
      throw parse_error(lineno, "expected `<LHS> -> <tok> ...`");
    if (!is_nonterminal_token(toks[0]))
      throw parse_error(lineno, "left-hand side `" + toks[0] +
                                    "` is not a nonterminal symbol "
                                    "(must start with an uppercase letter)");
    raw.push_back({lineno, toks[0], {toks.begin() + 2, toks.end()}});
  }

  if (!start) throw parse_error(lineno, "missing `start:` line");
  if (!is_nonterminal_token(*start))
    throw parse_error(start_line, "start symbol `" + *start +
                                      "` is not a nonterminal symbol");

  Grammar g;
  std::map<Symbol, int> nt_index;
  g.nonterminals.push_back(*start);
  nt_index[*start] = 0;
  for (const auto& rp : raw)
    if (!nt_index.count(rp.lhs)) {
      nt_index[rp.lhs] = static_cast<int>(g.nonterminals.size());
      g.nonterminals.push_back(rp.lhs);
    }
  if (!nt_index.count(*start) || std::none_of(raw.begin(), raw.end(),
                                              [&](const RawProd& rp) {
                                                return rp.lhs == *start;
                                              }))
    throw parse_error(start_line,
                      "start symbol `" + *start + "` has no productions");

  std::map<Symbol, int> term_index;
  std::vector<int> per_lhs(g.nonterminals.size(), 0);
  for (const auto& rp : raw) {
    Production p;
    p.lhs = nt_index[rp.lhs];
    p.sub = ++per_lhs[p.lhs];
    for (const auto& tok : rp.rhs) {
      if (is_nonterminal_token(tok)) {
        auto it = nt_index.find(tok);
        if (it == nt_index.end())
          throw parse_error(rp.line, "`" + tok +
                                         "` is neither a terminal nor a "
                                         "declared nonterminal (no production "
                                         "has it as a left-hand side)");
        p.rhs.push_back(Sym::nonterminal(it->second));
      } else {
        if (!term_index.count(tok)) {
          term_index[tok] = static_cast<int>(g.terminals.size());
          g.terminals.push_back(tok);
        }
        p.rhs.push_back(Sym::terminal(tok));
      }
    }
    g.productions.push_back(std::move(p));
  }
  std::stable_sort(g.productions.begin(), g.productions.end(),
                   [](const Production& a, const Production& b) {
                     return a.lhs != b.lhs ? a.lhs < b.lhs : a.sub < b.sub;
                   });
  return g;
}

std::string serialize_grammar(const Grammar& g) {
  std::ostringstream out;
  out << "start: " << (g.nonterminals.empty() ? "?" : g.nonterminals[0])
      << "\n";
  for (const auto& p : g.productions) {
    out << g.nonterminals[p.lhs] << " ->";
    for (const auto& s : p.rhs)
      out << ' ' << (s.is_nt ? g.nonterminals[s.nt] : s.term);
    out << "\n";
  }
  return out.str();
}

std::string pattern_of(const Grammar& g, const Production& p) {
  std::vector<Symbol> toks;
  for (const auto& s : p.rhs) toks.push_back(s.is_nt ? "|" : s.term);
  bool tight = all_single_char(g.terminals);
  std::string out;
  for (size_t i = 0; i < toks.size(); ++i) {
    if (i && !tight) out += ' ';
    out += toks[i];
  }
  return out;
}

DgnfVerdict validate_dgnf(const Grammar& g) {
  DgnfVerdict v;
  for (size_t i = 0; i < g.productions.size(); ++i) {
    const auto& p = g.productions[i];
    bool ok;
    if (p.rhs.size() == 1 && !p.rhs[0].is_nt)
      ok = (p.lhs == 0);  // single terminal: start symbol only
    else
      ok = p.rhs.size() >= 2 && !p.rhs.front().is_nt && !p.rhs.back().is_nt;
    if (!ok) {
      v.ok = false;
      v.offenders.push_back(static_cast<int>(i));
    }
  }
  return v;
}

bool patterns_injective(const Grammar& g) {
  std::map<std::string, int> seen;  // pattern -> lhs
  for (const auto& p : g.productions) {
    if (p.nt_count() == 0) continue;
    auto pat = pattern_of(g, p);
    auto [it, inserted] = seen.emplace(pat, p.lhs);
    if (!inserted && it->second != p.lhs) return false;
  }
  return true;
}

void validate_tree(const Grammar& g, const DerivationTree& t,
                   bool require_start_root) {
  if (t.prod < 0 || t.prod >= static_cast<int>(g.productions.size()))
    throw std::invalid_argument("tree node names an unknown production");
  const auto& p = g.productions[t.prod];
  if (require_start_root && p.lhs != 0)
    throw std::invalid_argument("tree root is not a start production");
  if (static_cast<int>(t.children.size()) != p.nt_count())
    throw std::invalid_argument("tree node child count does not match "
                                "production nonterminal count");
  int d = 0;
  for (const auto& c : t.children) {
    ++d;
    validate_tree(g, c, false);
    if (g.productions[c.prod].lhs != p.nt_at(d))
      throw std::invalid_argument("tree child left-hand side does not match "
                                  "the parent occurrence");
  }
}

static void tree_sexpr_rec(const Grammar& g, const DerivationTree& t,
                           std::string& out) {
  const auto& p = g.productions.at(t.prod);
  out += '(';
  out += std::to_string(p.lhs);
  out += '.';
  out += std::to_string(p.sub);
  for (const auto& c : t.children) {
    out += ' ';
    tree_sexpr_rec(g, c, out);
  }
  out += ')';
}

std::string tree_to_sexpr(const Grammar& g, const DerivationTree& t) {
  std::string out;
  tree_sexpr_rec(g, t, out);
  return out;
}

namespace {

struct SexprCursor {
  const std::string& s;
  size_t i = 0;
  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument("tree s-expression: " + msg + " at offset " +
                                std::to_string(i));
  }
};

DerivationTree parse_tree_node(const Grammar& g, SexprCursor& c) {
  c.skip_ws();
  if (c.i >= c.s.size() || c.s[c.i] != '(') c.fail("expected `(`");
  ++c.i;
  c.skip_ws();
  size_t j = c.i;
  while (j < c.s.size() && (std::isdigit(static_cast<unsigned char>(c.s[j])) ||
                            c.s[j] == '.'))
    ++j;
  std::string code = c.s.substr(c.i, j - c.i);
  auto dot = code.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == code.size())
    c.fail("expected a production code `a.b`");
  int a = std::stoi(code.substr(0, dot));
  int b = std::stoi(code.substr(dot + 1));
  c.i = j;
  DerivationTree t;
  t.prod = g.find_prod(a, b);
  if (t.prod < 0)
    c.fail("unknown production code " + std::to_string(a) + "." +
           std::to_string(b));
  for (;;) {
    c.skip_ws();
    if (c.i >= c.s.size()) c.fail("expected `)`");
    if (c.s[c.i] == ')') {
      ++c.i;
      return t;
    }
    t.children.push_back(parse_tree_node(g, c));
  }
}

}  // namespace

DerivationTree tree_from_sexpr(const Grammar& g, const std::string& text) {
  SexprCursor c{text};
  auto t = parse_tree_node(g, c);
  c.skip_ws();
  if (c.i != text.size()) c.fail("trailing input");
  validate_tree(g, t, false);
  return t;
}

static void code_seq_rec(const Grammar& g, const DerivationTree& t,
                         std::vector<std::pair<int, int>>& out) {
  const auto& p = g.productions.at(t.prod);
  out.emplace_back(p.lhs, p.sub);
  for (const auto& c : t.children) code_seq_rec(g, c, out);
}

std::vector<std::pair<int, int>> tree_code_seq(const Grammar& g,
                                               const DerivationTree& t) {
  std::vector<std::pair<int, int>> out;
  code_seq_rec(g, t, out);
  return out;
}

std::string format_word(const Grammar& g, const Word& w) {
  bool tight = all_single_char(g.terminals);
  std::string out;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i && !tight) out += ' ';
    out += w[i];
  }
  return out;
}

Word parse_word(const Grammar& g, const std::string& text) {
  std::istringstream in(text);
  std::vector<Symbol> toks;
  for (Symbol t; in >> t;) toks.push_back(t);
  auto known = [&](const Symbol& s) { return g.terminal_index(s) >= 0; };
  if (std::all_of(toks.begin(), toks.end(), known)) return toks;
  if (toks.size() == 1 && all_single_char(g.terminals)) {
    Word w;
    for (char ch : toks[0]) {
      Symbol s(1, ch);
      if (!known(s))
        throw std::invalid_argument("word symbol `" + s +
                                    "` is not a terminal of the grammar");
      w.push_back(s);
    }
    return w;
  }
  for (const auto& t : toks)
    if (!known(t))
      throw std::invalid_argument("word symbol `" + t +
                                  "` is not a terminal of the grammar");
  return toks;
}

std::vector<Word> words_upto(const Grammar& g, int min_len, int max_len) {
  std::vector<Word> out;
  const int k = static_cast<int>(g.terminals.size());
  for (int len = min_len; len <= max_len; ++len) {
    if (len == 0) {
      out.emplace_back();
      continue;
    }
    if (k == 0) continue;
    std::vector<int> idx(len, 0);
    for (;;) {
      Word w;
      w.reserve(len);
      for (int i : idx) w.push_back(g.terminals[i]);
      out.push_back(std::move(w));
      int pos = len - 1;
      while (pos >= 0 && ++idx[pos] == k) idx[pos--] = 0;
      if (pos < 0) break;
    }
  }
  return out;
}

}  // namespace csu
