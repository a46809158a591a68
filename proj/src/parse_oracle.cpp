#include "csu/parse_oracle.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

namespace csu {

namespace {

void check_word_symbols(const Grammar& g, const Word& w) {
  for (const auto& s : w)
    if (g.terminal_index(s) < 0)
      throw std::invalid_argument("word symbol `" + s +
                                  "` is not a terminal of the grammar");
}

}  // namespace

bool earley_recognize(const Grammar& g, const Word& w) {
  check_word_symbols(g, w);
  if (g.productions.empty()) return false;
  const int n = static_cast<int>(w.size());

  struct Item {
    int prod, dot, origin;
  };
  auto key = [](const Item& it) {
    return (static_cast<std::uint64_t>(it.prod) << 40) |
           (static_cast<std::uint64_t>(it.dot) << 20) |
           static_cast<std::uint64_t>(it.origin);
  };
  std::vector<std::vector<Item>> chart(n + 1);
  std::vector<std::unordered_set<std::uint64_t>> seen(n + 1);
  auto add = [&](int pos, Item it) {
    if (seen[pos].insert(key(it)).second) chart[pos].push_back(it);
  };

  for (int pi : g.prods_of(0)) add(0, {pi, 0, 0});

  for (int pos = 0; pos <= n; ++pos) {
    // Predict and complete to a fixpoint (handles empty productions).
    for (size_t i = 0; i < chart[pos].size(); ++i) {
      Item it = chart[pos][i];
      const auto& rhs = g.productions[it.prod].rhs;
      if (it.dot < static_cast<int>(rhs.size())) {
        const Sym& next = rhs[it.dot];
        if (next.is_nt)
          for (int pi : g.prods_of(next.nt)) add(pos, {pi, 0, pos});
      } else {
        int lhs = g.productions[it.prod].lhs;
        for (size_t j = 0; j < chart[it.origin].size(); ++j) {
          Item par = chart[it.origin][j];
          const auto& prhs = g.productions[par.prod].rhs;
          if (par.dot < static_cast<int>(prhs.size()) &&
              prhs[par.dot].is_nt && prhs[par.dot].nt == lhs)
            add(pos, {par.prod, par.dot + 1, par.origin});
        }
      }
    }
    // Scan.
    if (pos < n)
      for (const Item& it : chart[pos]) {
        const auto& rhs = g.productions[it.prod].rhs;
        if (it.dot < static_cast<int>(rhs.size()) && !rhs[it.dot].is_nt &&
            rhs[it.dot].term == w[pos])
          add(pos + 1, {it.prod, it.dot + 1, it.origin});
      }
  }

  for (const auto& it : chart[n])
    if (g.productions[it.prod].lhs == 0 && it.origin == 0 &&
        it.dot == static_cast<int>(g.productions[it.prod].rhs.size()))
      return true;
  return false;
}

namespace {

// Span-based enumeration/counting. Sound for epsilon-free grammars without
// unit cycles: every nonterminal then spans at least one position and unit
// chains cannot recur, so recursion on (production, span) is well-founded.
struct SpanParser {
  const Grammar& g;
  const Word& w;
  std::size_t budget;
  std::size_t used = 0;
  // memo: (nt, i, j) -> trees deriving w[i..j)
  std::map<std::tuple<int, int, int>, std::vector<DerivationTree>> memo;
  std::map<std::tuple<int, int, int>, std::uint64_t> count_memo;

  SpanParser(const Grammar& g_, const Word& w_, std::size_t budget_)
      : g(g_), w(w_), budget(budget_) {
    for (const auto& p : g.productions) {
      if (p.rhs.empty())
        throw std::invalid_argument(
            "tree enumeration requires an epsilon-free grammar");
    }
    check_unit_cycles();
  }

  void check_unit_cycles() const {
    const int n = static_cast<int>(g.nonterminals.size());
    std::vector<std::vector<int>> unit(n);
    for (const auto& p : g.productions)
      if (p.rhs.size() == 1 && p.rhs[0].is_nt)
        unit[p.lhs].push_back(p.rhs[0].nt);
    // DFS for a cycle in the unit graph.
    std::vector<int> state(n, 0);  // 0 new, 1 active, 2 done
    auto dfs = [&](auto&& self, int v) -> bool {
      state[v] = 1;
      for (int u : unit[v]) {
        if (state[u] == 1) return true;
        if (state[u] == 0 && self(self, u)) return true;
      }
      state[v] = 2;
      return false;
    };
    for (int v = 0; v < n; ++v)
      if (state[v] == 0 && dfs(dfs, v))
        throw std::invalid_argument(
            "tree enumeration requires a grammar without unit cycles");
  }

  void spend(std::size_t k) {
    used += k;
    if (used > budget)
      throw cap_exceeded("tree enumeration exceeded its node budget");
  }

  // Match rhs[r..] of production pi against w[i..j); on full match append a
  // child vector per parse to out.
  void match(int pi, size_t r, int i, int j,
             std::vector<DerivationTree>& partial,
             std::vector<std::vector<DerivationTree>>& out) {
    const auto& rhs = g.productions[pi].rhs;
    if (r == rhs.size()) {
      if (i == j) out.push_back(partial);
      return;
    }
    const Sym& s = rhs[r];
    if (!s.is_nt) {
      if (i < j && w[i] == s.term) match(pi, r + 1, i + 1, j, partial, out);
      return;
    }
    // Remaining elements each span >= 1 position.
    int rest = static_cast<int>(rhs.size() - r - 1);
    for (int mid = i + 1; mid + rest <= j; ++mid) {
      for (const auto& sub : derive(s.nt, i, mid)) {
        partial.push_back(sub);
        match(pi, r + 1, mid, j, partial, out);
        partial.pop_back();
      }
    }
  }

  const std::vector<DerivationTree>& derive(int nt, int i, int j) {
    auto k = std::make_tuple(nt, i, j);
    if (auto it = memo.find(k); it != memo.end()) return it->second;
    memo[k];  // mark (grammar is unit-acyclic; no reentry on same key)
    std::vector<DerivationTree> trees;
    for (int pi : g.prods_of(nt)) {
      std::vector<std::vector<DerivationTree>> matches;
      std::vector<DerivationTree> partial;
      match(pi, 0, i, j, partial, matches);
      for (auto& m : matches) {
        spend(1);
        trees.push_back(DerivationTree{pi, std::move(m)});
      }
    }
    return memo[k] = std::move(trees);
  }

  std::uint64_t count_match(int pi, size_t r, int i, int j) {
    const auto& rhs = g.productions[pi].rhs;
    if (r == rhs.size()) return i == j ? 1 : 0;
    const Sym& s = rhs[r];
    if (!s.is_nt)
      return (i < j && w[i] == s.term) ? count_match(pi, r + 1, i + 1, j) : 0;
    int rest = static_cast<int>(rhs.size() - r - 1);
    std::uint64_t total = 0;
    for (int mid = i + 1; mid + rest <= j; ++mid) {
      std::uint64_t left = count(s.nt, i, mid);
      if (left) total += left * count_match(pi, r + 1, mid, j);
    }
    return total;
  }

  std::uint64_t count(int nt, int i, int j) {
    auto k = std::make_tuple(nt, i, j);
    if (auto it = count_memo.find(k); it != count_memo.end())
      return it->second;
    std::uint64_t total = 0;
    for (int pi : g.prods_of(nt)) total += count_match(pi, 0, i, j);
    return count_memo[k] = total;
  }
};

}  // namespace

TreeEnum enumerate_trees(const Grammar& g, const Word& w, std::size_t limit) {
  check_word_symbols(g, w);
  TreeEnum out;
  if (g.productions.empty()) return out;
  SpanParser sp(g, w, 1u << 22);
  auto trees = sp.derive(0, 0, static_cast<int>(w.size()));
  out.trees = trees;
  std::sort(out.trees.begin(), out.trees.end(),
            [&](const DerivationTree& a, const DerivationTree& b) {
              return tree_code_seq(g, a) < tree_code_seq(g, b);
            });
  if (out.trees.size() > limit) {
    out.trees.resize(limit);
    out.truncated = true;
  }
  return out;
}

std::uint64_t count_trees(const Grammar& g, const Word& w) {
  check_word_symbols(g, w);
  if (g.productions.empty()) return 0;
  SpanParser sp(g, w, 1u << 22);
  return sp.count(0, 0, static_cast<int>(w.size()));
}

static void yield_rec(const Grammar& g, const DerivationTree& t, Word& out) {
  const auto& p = g.productions.at(t.prod);
  size_t child = 0;
  for (const auto& s : p.rhs) {
    if (s.is_nt)
      yield_rec(g, t.children.at(child++), out);
    else
      out.push_back(s.term);
  }
}

Word yield_of(const Grammar& g, const DerivationTree& t) {
  validate_tree(g, t, false);
  Word out;
  yield_rec(g, t, out);
  return out;
}

}  // namespace csu
