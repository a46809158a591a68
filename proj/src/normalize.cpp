#include "csu/normalize.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>

namespace csu {

namespace {

// Mutable working form used by the transformations. Nonterminal indices
// refer to nt_names; production order is meaningful and deterministic.
struct Builder {
  std::vector<Symbol> terminals;
  std::vector<Symbol> nt_names;
  std::vector<std::pair<int, std::vector<Sym>>> prods;  // (lhs, rhs)
};

Builder to_builder(const Grammar& g) {
  Builder b;
  b.terminals = g.terminals;
  b.nt_names = g.nonterminals;
  for (const auto& p : g.productions) b.prods.emplace_back(p.lhs, p.rhs);
  return b;
}

int fresh_nt(Builder& b, const std::string& base) {
  std::set<Symbol> taken(b.nt_names.begin(), b.nt_names.end());
  taken.insert(b.terminals.begin(), b.terminals.end());
  Symbol name = base;
  for (int k = 2; taken.count(name); ++k) name = base + "_" + std::to_string(k);
  b.nt_names.push_back(name);
  return static_cast<int>(b.nt_names.size()) - 1;
}

// Rebuild a canonical Grammar: drop nonterminals without productions (the
// caller must have pruned references to them), renumber by first appearance
// as a left-hand side with the start symbol first, and regroup productions
// by the new indices keeping their relative order.
Grammar to_grammar(const Builder& b, int start = 0) {
  std::vector<int> remap(b.nt_names.size(), -1);
  std::vector<Symbol> names;
  remap[start] = 0;
  names.push_back(b.nt_names[start]);
  for (const auto& [lhs, rhs] : b.prods)
    if (remap[lhs] < 0) {
      remap[lhs] = static_cast<int>(names.size());
      names.push_back(b.nt_names[lhs]);
    }

  Grammar g;
  g.terminals = b.terminals;
  g.nonterminals = names;
  for (int ni = 0; ni < static_cast<int>(names.size()); ++ni) {
    for (const auto& [lhs, rhs] : b.prods) {
      if (remap[lhs] != ni) continue;
      Production p;
      p.lhs = ni;
      p.sub = 1 + static_cast<int>(g.prods_of(ni).size());
      p.rhs = rhs;
      for (auto& s : p.rhs)
        if (s.is_nt) {
          if (remap[s.nt] < 0)
            throw std::logic_error(
                "internal: right-hand side references a nonterminal that has "
                "no productions");
          s.nt = remap[s.nt];
        }
      g.productions.push_back(std::move(p));
    }
  }
  return g;
}

std::vector<bool> nullable_set(const Builder& b) {
  std::vector<bool> nullable(b.nt_names.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [lhs, rhs] : b.prods) {
      if (nullable[lhs]) continue;
      bool all = true;
      for (const auto& s : rhs)
        if (!s.is_nt || !nullable[s.nt]) {
          all = false;
          break;
        }
      if (all) {
        nullable[lhs] = true;
        changed = true;
      }
    }
  }
  return nullable;
}

// Remove epsilon productions; for every production, every combination of
// nullable occurrences is dropped. The caller guarantees the start symbol is
// not nullable, so the language is preserved.
void eliminate_epsilon(Builder& b) {
  auto nullable = nullable_set(b);
  std::vector<std::pair<int, std::vector<Sym>>> out;
  std::set<std::pair<int, std::vector<std::string>>> seen;
  auto rhs_key = [](int lhs, const std::vector<Sym>& rhs) {
    std::vector<std::string> k;
    for (const auto& s : rhs)
      k.push_back(s.is_nt ? "N" + std::to_string(s.nt) : "t" + s.term);
    return std::make_pair(lhs, k);
  };
  for (const auto& [lhs, rhs] : b.prods) {
    std::vector<int> null_pos;
    for (int i = 0; i < static_cast<int>(rhs.size()); ++i)
      if (rhs[i].is_nt && nullable[rhs[i].nt]) null_pos.push_back(i);
    if (null_pos.size() > 20)
      throw cap_exceeded("epsilon elimination: too many nullable positions");
    for (std::uint32_t mask = 0; mask < (1u << null_pos.size()); ++mask) {
      std::vector<Sym> v;
      for (int i = 0, j = 0; i < static_cast<int>(rhs.size()); ++i) {
        if (j < static_cast<int>(null_pos.size()) && null_pos[j] == i) {
          if (!(mask & (1u << j))) v.push_back(rhs[i]);
          ++j;
        } else {
          v.push_back(rhs[i]);
        }
      }
      if (v.empty()) continue;
      if (seen.insert(rhs_key(lhs, v)).second) out.emplace_back(lhs, v);
    }
  }
  b.prods = std::move(out);
}

void eliminate_units(Builder& b) {
  const int n = static_cast<int>(b.nt_names.size());
  // unit_reach[x] = nonterminals reachable from x through unit productions.
  std::vector<std::set<int>> reach(n);
  for (int x = 0; x < n; ++x) reach[x].insert(x);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [lhs, rhs] : b.prods)
      if (rhs.size() == 1 && rhs[0].is_nt)
        for (int x = 0; x < n; ++x)
          if (reach[x].count(lhs) && !reach[x].count(rhs[0].nt)) {
            reach[x].insert(rhs[0].nt);
            changed = true;
          }
  }
  std::vector<std::pair<int, std::vector<Sym>>> out;
  for (int x = 0; x < n; ++x)
    for (int y : reach[x])
      for (const auto& [lhs, rhs] : b.prods)
        if (lhs == y && !(rhs.size() == 1 && rhs[0].is_nt))
          out.emplace_back(x, rhs);
  // Deduplicate while keeping the first occurrence order.
  std::set<std::pair<int, std::vector<std::string>>> seen;
  std::vector<std::pair<int, std::vector<Sym>>> dedup;
  for (auto& pr : out) {
    std::vector<std::string> k;
    for (const auto& s : pr.second)
      k.push_back(s.is_nt ? "N" + std::to_string(s.nt) : "t" + s.term);
    if (seen.insert({pr.first, k}).second) dedup.push_back(std::move(pr));
  }
  b.prods = std::move(dedup);
}

// Keep only productions over productive nonterminals that are reachable from
// the start symbol. Returns false when the start symbol generates nothing.
bool prune_useless(Builder& b, int start = 0) {
  const int n = static_cast<int>(b.nt_names.size());
  std::vector<bool> productive(n, false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [lhs, rhs] : b.prods) {
      if (productive[lhs]) continue;
      bool ok = true;
      for (const auto& s : rhs)
        if (s.is_nt && !productive[s.nt]) {
          ok = false;
          break;
        }
      if (ok) {
        productive[lhs] = true;
        changed = true;
      }
    }
  }
  if (!productive[start]) {
    b.prods.clear();
    return false;
  }
  std::vector<bool> reachable(n, false);
  reachable[start] = true;
  changed = true;
  while (changed) {
    changed = false;
    for (const auto& [lhs, rhs] : b.prods) {
      if (!reachable[lhs]) continue;
      bool usable = true;
      for (const auto& s : rhs)
        if (s.is_nt && !productive[s.nt]) {
          usable = false;
          break;
        }
      if (!usable) continue;
      for (const auto& s : rhs)
        if (s.is_nt && !reachable[s.nt]) {
          reachable[s.nt] = true;
          changed = true;
        }
    }
  }
  std::vector<std::pair<int, std::vector<Sym>>> out;
  for (const auto& pr : b.prods) {
    if (!reachable[pr.first] || !productive[pr.first]) continue;
    bool keep = true;
    for (const auto& s : pr.second)
      if (s.is_nt && (!productive[s.nt] || !reachable[s.nt])) {
        keep = false;
        break;
      }
    if (keep) out.push_back(pr);
  }
  b.prods = std::move(out);
  return true;
}

bool is_short(const std::vector<Sym>& rhs) {
  return rhs.size() == 1 && !rhs[0].is_nt;
}

bool occurs_on_rhs(const Builder& b, int nt) {
  for (const auto& [lhs, rhs] : b.prods)
    for (const auto& s : rhs)
      if (s.is_nt && s.nt == nt) return true;
  return false;
}

}  // namespace

Grammar eliminate_short_productions(const Grammar& g,
                                    std::size_t max_productions) {
  for (const auto& p : g.productions)
    if (p.rhs.empty())
      throw std::invalid_argument(
          "single-terminal-production elimination requires an epsilon-free "
          "grammar");

  Builder b = to_builder(g);
  int start = 0;
  bool changed_anything = false;
  std::size_t rounds = 0;

  for (;;) {
    if (++rounds > max_productions)
      throw cap_exceeded(
          "single-terminal-production elimination did not reach a fixpoint");
    // Pick the first single-terminal production whose left-hand side occurs
    // on some right-hand side.
    int pick = -1;
    for (int i = 0; i < static_cast<int>(b.prods.size()); ++i)
      if (is_short(b.prods[i].second) && occurs_on_rhs(b, b.prods[i].first)) {
        pick = i;
        break;
      }
    if (pick < 0) break;
    changed_anything = true;

    int x = b.prods[pick].first;
    if (x == start) {
      // The start symbol is about to lose a single-terminal production while
      // also occurring on right-hand sides. Introduce a fresh start that
      // copies its productions; the fresh start occurs on no right-hand
      // side, so its single-terminal productions survive. This happens at
      // most once, as nothing ever references the fresh start.
      int s2 = fresh_nt(b, b.nt_names[start] + "0");
      std::vector<std::pair<int, std::vector<Sym>>> refreshed;
      for (const auto& pr : b.prods)
        if (pr.first == start) refreshed.emplace_back(s2, pr.second);
      for (const auto& pr : b.prods) refreshed.push_back(pr);
      b.prods = std::move(refreshed);
      start = s2;
      continue;
    }

    const Sym alpha = b.prods[pick].second[0];
    // Substitution closure: every combination of x-occurrences replaced by
    // alpha, appended after the existing productions in deterministic order.
    std::vector<std::pair<int, std::vector<Sym>>> added;
    for (const auto& [lhs, rhs] : b.prods) {
      std::vector<int> occ;
      for (int i = 0; i < static_cast<int>(rhs.size()); ++i)
        if (rhs[i].is_nt && rhs[i].nt == x) occ.push_back(i);
      if (occ.empty()) continue;
      if (occ.size() > 20)
        throw cap_exceeded(
            "single-terminal-production elimination: too many occurrences in "
            "one production");
      for (std::uint32_t mask = 1; mask < (1u << occ.size()); ++mask) {
        std::vector<Sym> v = rhs;
        for (int j = 0; j < static_cast<int>(occ.size()); ++j)
          if (mask & (1u << j)) v[occ[j]] = alpha;
        added.emplace_back(lhs, std::move(v));
      }
      if (b.prods.size() + added.size() > max_productions)
        throw cap_exceeded(
            "single-terminal-production elimination exceeded the production "
            "cap");
    }
    b.prods.erase(b.prods.begin() + pick);
    for (auto& pr : added) b.prods.push_back(std::move(pr));
  }

  if (!changed_anything) return g;
  prune_useless(b, start);
  return to_grammar(b, start);
}

Grammar make_patterns_injective(const Grammar& g,
                                std::size_t max_productions) {
  {
    auto v = validate_dgnf(g);
    if (!v.ok)
      throw std::invalid_argument(
          "pattern-injectivity rewriting requires a double Greibach grammar");
  }
  if (patterns_injective(g)) return g;

  Builder b = to_builder(g);
  auto pattern_key = [&](const std::vector<Sym>& rhs) {
    // A stable pattern key: '|' for nonterminals, the token otherwise,
    // separated to keep multi-character terminals unambiguous.
    std::string k;
    for (const auto& s : rhs) {
      k += s.is_nt ? std::string("|") : s.term;
      k += '\x1f';
    }
    return k;
  };
  auto has_nt = [](const std::vector<Sym>& rhs) {
    for (const auto& s : rhs)
      if (s.is_nt) return true;
    return false;
  };

  std::size_t steps = 0;
  for (int i = 1; i < static_cast<int>(b.nt_names.size()); ++i) {
    for (;;) {
      if (++steps > max_productions)
        throw cap_exceeded(
            "pattern-injectivity rewriting did not reach a fixpoint");
      // Patterns of nonterminal productions with smaller left-hand index.
      std::set<std::string> smaller;
      for (const auto& [lhs, rhs] : b.prods)
        if (lhs < i && has_nt(rhs)) smaller.insert(pattern_key(rhs));
      int pick = -1;
      for (int k = 0; k < static_cast<int>(b.prods.size()); ++k)
        if (b.prods[k].first == i && has_nt(b.prods[k].second) &&
            smaller.count(pattern_key(b.prods[k].second))) {
          pick = k;
          break;
        }
      if (pick < 0) break;

      // Substitute the first nonterminal occurrence with every production of
      // that nonterminal, splicing in place; the original is removed.
      std::vector<Sym> rhs = b.prods[pick].second;
      int pos = -1;
      for (int t = 0; t < static_cast<int>(rhs.size()); ++t)
        if (rhs[t].is_nt) {
          pos = t;
          break;
        }
      int target = rhs[pos].nt;
      std::vector<std::pair<int, std::vector<Sym>>> variants;
      for (const auto& [lhs2, rhs2] : b.prods) {
        if (lhs2 != target) continue;
        std::vector<Sym> v(rhs.begin(), rhs.begin() + pos);
        v.insert(v.end(), rhs2.begin(), rhs2.end());
        v.insert(v.end(), rhs.begin() + pos + 1, rhs.end());
        variants.emplace_back(i, std::move(v));
      }
      if (b.prods.size() + variants.size() > max_productions)
        throw cap_exceeded(
            "pattern-injectivity rewriting exceeded the production cap");
      // Splice the variants where the rewritten production stood.
      b.prods.erase(b.prods.begin() + pick);
      b.prods.insert(b.prods.begin() + pick, variants.begin(), variants.end());
    }
  }
  prune_useless(b);
  return to_grammar(b);
}

namespace {

// --- double Greibach pipeline -------------------------------------------

// Replace terminals inside right-hand sides of length >= 2 with fresh
// nonterminals, then binarize. Afterwards every production is X -> a or
// X -> Y Z.
void to_chomsky_shape(Builder& b) {
  std::map<Symbol, int> term_nt;
  for (auto& [lhs, rhs] : b.prods) {
    if (rhs.size() < 2) continue;
    for (auto& s : rhs) {
      if (s.is_nt) continue;
      auto it = term_nt.find(s.term);
      int idx;
      if (it == term_nt.end()) {
        idx = fresh_nt(b, "Q" + s.term);
        term_nt.emplace(s.term, idx);
      } else {
        idx = it->second;
      }
      s = Sym::nonterminal(idx);
    }
  }
  for (auto& [t, idx] : term_nt)
    b.prods.emplace_back(idx, std::vector<Sym>{Sym::terminal(t)});

  std::vector<std::pair<int, std::vector<Sym>>> out;
  for (auto& [lhs, rhs] : b.prods) {
    if (rhs.size() <= 2) {
      out.emplace_back(lhs, rhs);
      continue;
    }
    int cur = lhs;
    for (std::size_t i = 0; i + 2 < rhs.size(); ++i) {
      int nxt = fresh_nt(b, "P" + std::to_string(out.size() + 1));
      out.emplace_back(cur, std::vector<Sym>{rhs[i], Sym::nonterminal(nxt)});
      cur = nxt;
    }
    out.emplace_back(cur, std::vector<Sym>{rhs[rhs.size() - 2], rhs.back()});
  }
  b.prods = std::move(out);
}

// Classical Greibach construction on the Chomsky-shaped grammar: ascending
// substitution plus left-recursion removal, then descending
// back-substitution. Afterwards every production is X -> a N1..Nk.
void to_greibach(Builder& b, std::size_t cap) {
  const int n = static_cast<int>(b.nt_names.size());
  auto prods_of = [&](int x) {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(b.prods.size()); ++i)
      if (b.prods[i].first == x) out.push_back(i);
    return out;
  };

  std::vector<int> tail_nts;  // left-recursion helpers, never lead a rhs
  for (int i = 0; i < n; ++i) {
    for (;;) {
      if (b.prods.size() > cap)
        throw cap_exceeded("normal-form construction exceeded its budget");
      int pick = -1;
      for (int k : prods_of(i)) {
        const auto& rhs = b.prods[k].second;
        if (!rhs.empty() && rhs[0].is_nt && rhs[0].nt < i && rhs[0].nt < n) {
          pick = k;
          break;
        }
      }
      if (pick < 0) break;
      auto rhs = b.prods[pick].second;
      int j = rhs[0].nt;
      std::vector<std::pair<int, std::vector<Sym>>> repl;
      for (int k : prods_of(j)) {
        std::vector<Sym> v = b.prods[k].second;
        v.insert(v.end(), rhs.begin() + 1, rhs.end());
        repl.emplace_back(i, std::move(v));
      }
      b.prods.erase(b.prods.begin() + pick);
      b.prods.insert(b.prods.begin() + pick, repl.begin(), repl.end());
    }
    // Remove direct left recursion for nonterminal i.
    std::vector<std::vector<Sym>> alphas, betas;
    for (int k : prods_of(i)) {
      const auto& rhs = b.prods[k].second;
      if (!rhs.empty() && rhs[0].is_nt && rhs[0].nt == i)
        alphas.emplace_back(rhs.begin() + 1, rhs.end());
      else
        betas.push_back(rhs);
    }
    if (alphas.empty()) continue;
    int helper = fresh_nt(b, b.nt_names[i] + "R");
    tail_nts.push_back(helper);
    std::vector<std::pair<int, std::vector<Sym>>> out;
    for (const auto& pr : b.prods)
      if (pr.first != i) out.push_back(pr);
    for (const auto& beta : betas) {
      out.emplace_back(i, beta);
      auto withb = beta;
      withb.push_back(Sym::nonterminal(helper));
      out.emplace_back(i, std::move(withb));
    }
    for (const auto& alpha : alphas) {
      if (alpha.empty())
        throw std::logic_error("internal: left recursion with empty tail");
      out.emplace_back(helper, alpha);
      auto withb = alpha;
      withb.push_back(Sym::nonterminal(helper));
      out.emplace_back(helper, std::move(withb));
    }
    b.prods = std::move(out);
  }

  // Back-substitution: repeatedly expand productions whose leading symbol is
  // a nonterminal with all-terminal-initial productions.
  for (std::size_t guard = 0;; ++guard) {
    if (guard > cap || b.prods.size() > cap)
      throw cap_exceeded("normal-form construction exceeded its budget");
    std::vector<bool> done(b.nt_names.size(), true);
    for (const auto& [lhs, rhs] : b.prods)
      if (!rhs.empty() && rhs[0].is_nt) done[lhs] = false;
    int pick = -1;
    for (int k = 0; k < static_cast<int>(b.prods.size()); ++k) {
      const auto& rhs = b.prods[k].second;
      if (!rhs.empty() && rhs[0].is_nt && done[rhs[0].nt]) {
        pick = k;
        break;
      }
    }
    if (pick < 0) {
      bool clean = true;
      for (const auto& [lhs, rhs] : b.prods)
        if (!rhs.empty() && rhs[0].is_nt) clean = false;
      if (clean) break;
      throw std::logic_error(
          "internal: leading-nonterminal cycle in the normal-form "
          "construction");
    }
    auto rhs = b.prods[pick].second;
    int lhs = b.prods[pick].first;
    int j = rhs[0].nt;
    std::vector<std::pair<int, std::vector<Sym>>> repl;
    for (int k = 0; k < static_cast<int>(b.prods.size()); ++k) {
      if (b.prods[k].first != j) continue;
      std::vector<Sym> v = b.prods[k].second;
      v.insert(v.end(), rhs.begin() + 1, rhs.end());
      repl.emplace_back(lhs, std::move(v));
    }
    b.prods.erase(b.prods.begin() + pick);
    b.prods.insert(b.prods.begin() + pick, repl.begin(), repl.end());
  }
}

// From a Greibach grammar (every production X -> a N1..Nk), build an
// equivalent grammar in which every production begins and ends with a
// terminal, via path nonterminals T[X,Y] generating the words that take a
// derivation stack from [X] to [Y].
Builder stack_path_construction(const Builder& gnf, std::size_t cap) {
  Builder c;
  c.terminals = gnf.terminals;
  c.nt_names = gnf.nt_names;

  std::map<std::pair<int, int>, int> pair_nt;
  auto path_nt = [&](int x, int y) {
    auto it = pair_nt.find({x, y});
    if (it != pair_nt.end()) return it->second;
    int idx =
        fresh_nt(c, "T" + gnf.nt_names[x] + "_" + gnf.nt_names[y]);
    pair_nt.emplace(std::make_pair(x, y), idx);
    return idx;
  };

  std::set<std::pair<int, std::vector<std::string>>> seen;
  auto add = [&](int lhs, std::vector<Sym> rhs) {
    std::vector<std::string> k;
    for (const auto& s : rhs)
      k.push_back(s.is_nt ? "N" + std::to_string(s.nt) : "t" + s.term);
    if (!seen.insert({lhs, k}).second) return;
    c.prods.emplace_back(lhs, std::move(rhs));
    if (c.prods.size() > cap)
      throw cap_exceeded("normal-form construction exceeded its budget");
  };

  struct GnfProd {
    int lhs;
    Symbol head;
    std::vector<int> tail;  // nonterminal indices
  };
  std::vector<GnfProd> P;
  for (const auto& [lhs, rhs] : gnf.prods) {
    if (rhs.empty() || rhs[0].is_nt)
      throw std::logic_error("internal: not in Greibach form");
    GnfProd q{lhs, rhs[0].term, {}};
    for (std::size_t i = 1; i < rhs.size(); ++i) {
      if (!rhs[i].is_nt)
        throw std::logic_error("internal: not in Greibach form");
      q.tail.push_back(rhs[i].nt);
    }
    P.push_back(std::move(q));
  }

  // Word productions. A word derived from X is either a lone terminal, or a
  // stack path from [X] to some [Y] followed by Y's final terminal.
  for (const auto& p : P) {
    if (p.tail.empty()) {
      add(p.lhs, {Sym::terminal(p.head)});
      continue;
    }
    const int zm = p.tail.back();
    for (const auto& q : P) {
      if (!q.tail.empty()) continue;  // need Y -> b
      std::vector<Sym> rhs{Sym::terminal(p.head)};
      for (std::size_t i = 0; i + 1 < p.tail.size(); ++i)
        rhs.push_back(Sym::nonterminal(p.tail[i]));
      auto with_path = rhs;
      with_path.push_back(Sym::nonterminal(path_nt(zm, q.lhs)));
      with_path.push_back(Sym::terminal(q.head));
      add(p.lhs, std::move(with_path));
      if (zm == q.lhs) {
        rhs.push_back(Sym::terminal(q.head));
        add(p.lhs, std::move(rhs));
      }
    }
  }

  // Path productions. A nonempty path from [X] pushes a tail, consumes all
  // of it but the bottom, and either stops at the bottom symbol (first
  // family) or later rises from some [V] one last time (second family).
  for (const auto& p : P) {
    if (p.tail.empty()) continue;
    const int zm = p.tail.back();
    {
      std::vector<Sym> rhs{Sym::terminal(p.head)};
      for (std::size_t i = 0; i + 1 < p.tail.size(); ++i)
        rhs.push_back(Sym::nonterminal(p.tail[i]));
      add(path_nt(p.lhs, zm), std::move(rhs));
    }
    for (const auto& q : P) {
      if (q.tail.empty()) continue;
      const int y = q.tail.back();
      std::vector<Sym> rhs{Sym::terminal(p.head)};
      for (std::size_t i = 0; i + 1 < p.tail.size(); ++i)
        rhs.push_back(Sym::nonterminal(p.tail[i]));
      auto with_path = rhs;
      with_path.push_back(Sym::nonterminal(path_nt(zm, q.lhs)));
      with_path.push_back(Sym::terminal(q.head));
      for (std::size_t i = 0; i + 1 < q.tail.size(); ++i)
        with_path.push_back(Sym::nonterminal(q.tail[i]));
      add(path_nt(p.lhs, y), std::move(with_path));
      if (zm == q.lhs) {
        rhs.push_back(Sym::terminal(q.head));
        for (std::size_t i = 0; i + 1 < q.tail.size(); ++i)
          rhs.push_back(Sym::nonterminal(q.tail[i]));
        add(path_nt(p.lhs, y), std::move(rhs));
      }
    }
  }
  return c;
}

// Replace each production that ends with a nonterminal by the variants that
// inline that nonterminal's productions. Word nonterminals already begin and
// end with terminals, so a single level suffices.
void inline_trailing_nonterminals(Builder& b, std::size_t cap) {
  std::vector<std::pair<int, std::vector<Sym>>> out;
  std::set<std::pair<int, std::vector<std::string>>> seen;
  auto add = [&](int lhs, std::vector<Sym> rhs) {
    std::vector<std::string> k;
    for (const auto& s : rhs)
      k.push_back(s.is_nt ? "N" + std::to_string(s.nt) : "t" + s.term);
    if (!seen.insert({lhs, k}).second) return;
    out.emplace_back(lhs, std::move(rhs));
    if (out.size() > cap)
      throw cap_exceeded("normal-form construction exceeded its budget");
  };
  for (const auto& [lhs, rhs] : b.prods) {
    if (rhs.empty() || !rhs.back().is_nt) {
      add(lhs, rhs);
      continue;
    }
    int w = rhs.back().nt;
    for (const auto& [lhs2, rhs2] : b.prods) {
      if (lhs2 != w) continue;
      if (rhs2.back().is_nt)
        throw std::logic_error(
            "internal: trailing inlining hit a nested trailing nonterminal");
      std::vector<Sym> v(rhs.begin(), rhs.end() - 1);
      v.insert(v.end(), rhs2.begin(), rhs2.end());
      add(lhs, std::move(v));
    }
  }
  b.prods = std::move(out);
}

}  // namespace

Grammar to_double_greibach(const Grammar& g,
                           std::vector<std::string>* warnings) {
  if (validate_dgnf(g).ok) return g;
  constexpr std::size_t kCap = 1000000;

  Builder b = to_builder(g);
  if (nullable_set(b)[0])
    throw std::invalid_argument(
        "the grammar derives the empty word, which no double Greibach "
        "grammar can produce");
  eliminate_epsilon(b);
  eliminate_units(b);
  if (!prune_useless(b)) {
    if (warnings)
      warnings->push_back(
          "the grammar generates the empty language; returning a grammar "
          "with no productions");
    Grammar empty;
    empty.terminals = g.terminals;
    empty.nonterminals = {g.nonterminals.empty() ? Symbol("S")
                                                 : g.nonterminals[0]};
    return empty;
  }

  to_chomsky_shape(b);
  to_greibach(b, kCap);
  prune_useless(b);

  Builder c = stack_path_construction(b, kCap);
  prune_useless(c);
  inline_trailing_nonterminals(c, kCap);
  prune_useless(c);

  Grammar out = eliminate_short_productions(to_grammar(c), kCap);
  auto verdict = validate_dgnf(out);
  if (!verdict.ok)
    throw std::logic_error(
        "internal: normal-form construction produced an invalid grammar");
  return out;
}

}  // namespace csu
