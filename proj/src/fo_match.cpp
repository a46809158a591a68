#include "csu/fo_match.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "csu/parse_oracle.hpp"
#include "json.hpp"

namespace csu {

// ---------------------------------------------------------------------------
// Matchings
// ---------------------------------------------------------------------------

bool Matching::contains(int x, int y) const {
  return std::binary_search(arcs.begin(), arcs.end(), std::make_pair(x, y));
}

std::string Matching::to_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    if (i) out += ',';
    out += '(' + std::to_string(arcs[i].first) + ',' +
           std::to_string(arcs[i].second) + ')';
  }
  out += ']';
  return out;
}

MatchingVerdict is_matching(const std::vector<std::pair<int, int>>& arcs,
                            int n) {
  for (const auto& [x, y] : arcs)
    if (x < 1 || y > n || x >= y)
      return {false, 1,
              "arc (" + std::to_string(x) + "," + std::to_string(y) +
                  ") does not satisfy 1 <= x < y <= " + std::to_string(n)};
  std::vector<int> degree(n + 1, 0);
  for (const auto& [x, y] : arcs) {
    for (int e : {x, y})
      if (++degree[e] > 1)
        return {false, 2,
                "position " + std::to_string(e) +
                    " is an endpoint of two arcs"};
  }
  for (std::size_t i = 0; i < arcs.size(); ++i)
    for (std::size_t j = i + 1; j < arcs.size(); ++j) {
      auto [x, y] = arcs[i];
      auto [z, t] = arcs[j];
      if (z < x) {
        std::swap(x, z);
        std::swap(y, t);
      }
      if (x < z && z < y && y < t)
        return {false, 3,
                "arcs (" + std::to_string(x) + "," + std::to_string(y) +
                    ") and (" + std::to_string(z) + "," + std::to_string(t) +
                    ") cross"};
    }
  return {true, 0, ""};
}

std::size_t default_enum_bound() {
  if (const char* e = std::getenv("CSU_ENUM_BOUND")) {
    char* end = nullptr;
    long v = std::strtol(e, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 14;
}

namespace {

// Enumerates non-crossing arc sets over the position sets in `pending`
// (bit i-1 stands for position i), extending `acc`. Matching position p to q
// splits its set into the part strictly inside (p, q) and the part after q,
// which keeps crossings out by construction.
void enum_rec(std::vector<std::uint32_t>& pending,
              std::vector<std::pair<int, int>>& acc,
              const std::function<bool(int, int)>& compat,
              std::vector<Matching>& out) {
  if (pending.empty()) {
    out.push_back(Matching{acc});
    return;
  }
  const std::uint32_t mask = pending.back();
  pending.pop_back();
  if (mask == 0) {
    enum_rec(pending, acc, compat, out);
    pending.push_back(mask);
    return;
  }
  const int p = std::countr_zero(mask) + 1;
  const std::uint32_t rest = mask & (mask - 1);

  pending.push_back(rest);  // position p stays unmatched
  enum_rec(pending, acc, compat, out);
  pending.pop_back();

  for (std::uint32_t mm = rest; mm; mm &= mm - 1) {
    const int q = std::countr_zero(mm) + 1;
    if (compat && !compat(p, q)) continue;
    const std::uint32_t inside =
        rest & ((1u << (q - 1)) - 1) & ~((1u << p) - 1);
    const std::uint32_t outside = rest & ~((q < 32 ? (1u << q) : 0u) - 1);
    acc.emplace_back(p, q);
    pending.push_back(outside);
    pending.push_back(inside);
    enum_rec(pending, acc, compat, out);
    pending.pop_back();
    pending.pop_back();
    acc.pop_back();
  }
  pending.push_back(mask);
}

std::vector<Matching> enumerate_core(
    int n, const std::vector<std::pair<int, int>>& forced,
    const std::function<bool(int, int)>& compat) {
  if (n > 28)
    throw cap_exceeded("matching enumeration supports at most 28 positions");
  std::uint32_t mask = n > 0 ? ((n < 32 ? (1u << n) : 0u) - 1) : 0u;
  std::vector<std::pair<int, int>> acc;
  for (const auto& [x, y] : forced) {
    acc.emplace_back(x, y);
    mask &= ~(1u << (x - 1));
    mask &= ~(1u << (y - 1));
  }
  std::vector<std::uint32_t> pending{mask};
  std::vector<Matching> out;
  enum_rec(pending, acc, compat, out);
  for (auto& m : out) std::sort(m.arcs.begin(), m.arcs.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<Matching> enumerate_matchings(int n, std::size_t bound) {
  if (n < 0) throw std::invalid_argument("matchings need n >= 0 positions");
  if (static_cast<std::size_t>(n) > bound)
    throw cap_exceeded("matching enumeration bound exceeded (n=" +
                       std::to_string(n) +
                       ", bound=" + std::to_string(bound) + ")");
  return enumerate_core(n, {}, nullptr);
}

// ---------------------------------------------------------------------------
// Formula construction
// ---------------------------------------------------------------------------

namespace {
TermPtr make_term(Term::Kind k) {
  auto t = std::make_shared<Term>();
  t->kind = k;
  return t;
}
std::shared_ptr<Formula> make_formula(Formula::Kind k) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  return f;
}
}  // namespace

TermPtr t_min() { return make_term(Term::Kind::minimum); }
TermPtr t_max() { return make_term(Term::Kind::maximum); }
TermPtr t_var(const std::string& name) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::variable;
  t->name = name;
  return t;
}
TermPtr t_succ(TermPtr arg) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::successor;
  t->arg = std::move(arg);
  return t;
}

FormulaPtr f_true() { return make_formula(Formula::Kind::truth); }
FormulaPtr f_false() { return make_formula(Formula::Kind::falsity); }

FormulaPtr f_and(std::vector<FormulaPtr> kids) {
  std::vector<FormulaPtr> flat;
  for (auto& k : kids) {
    if (!k) throw std::invalid_argument("null formula operand");
    if (k->kind == Formula::Kind::truth) continue;
    if (k->kind == Formula::Kind::falsity) return f_false();
    if (k->kind == Formula::Kind::conjunction)
      flat.insert(flat.end(), k->kids.begin(), k->kids.end());
    else
      flat.push_back(k);
  }
  if (flat.empty()) return f_true();
  if (flat.size() == 1) return flat[0];
  auto f = make_formula(Formula::Kind::conjunction);
  f->kids = std::move(flat);
  return f;
}

FormulaPtr f_or(std::vector<FormulaPtr> kids) {
  std::vector<FormulaPtr> flat;
  for (auto& k : kids) {
    if (!k) throw std::invalid_argument("null formula operand");
    if (k->kind == Formula::Kind::falsity) continue;
    if (k->kind == Formula::Kind::truth) return f_true();
    if (k->kind == Formula::Kind::disjunction)
      flat.insert(flat.end(), k->kids.begin(), k->kids.end());
    else
      flat.push_back(k);
  }
  if (flat.empty()) return f_false();
  if (flat.size() == 1) return flat[0];
  auto f = make_formula(Formula::Kind::disjunction);
  f->kids = std::move(flat);
  return f;
}

FormulaPtr f_not(FormulaPtr a) {
  if (a->kind == Formula::Kind::truth) return f_false();
  if (a->kind == Formula::Kind::falsity) return f_true();
  auto f = make_formula(Formula::Kind::negation);
  f->kids = {std::move(a)};
  return f;
}

FormulaPtr f_imp(FormulaPtr a, FormulaPtr b) {
  if (a->kind == Formula::Kind::falsity) return f_true();
  if (a->kind == Formula::Kind::truth) return b;
  if (b->kind == Formula::Kind::truth) return f_true();
  if (b->kind == Formula::Kind::falsity) return f_not(std::move(a));
  auto f = make_formula(Formula::Kind::implication);
  f->kids = {std::move(a), std::move(b)};
  return f;
}

FormulaPtr f_iff(FormulaPtr a, FormulaPtr b) {
  if (a->kind == Formula::Kind::truth) return b;
  if (b->kind == Formula::Kind::truth) return a;
  if (a->kind == Formula::Kind::falsity) return f_not(std::move(b));
  if (b->kind == Formula::Kind::falsity) return f_not(std::move(a));
  auto f = make_formula(Formula::Kind::equivalence);
  f->kids = {std::move(a), std::move(b)};
  return f;
}

FormulaPtr f_exists(const std::string& var, FormulaPtr body) {
  auto f = make_formula(Formula::Kind::exists);
  f->var = var;
  f->kids = {std::move(body)};
  return f;
}

FormulaPtr f_forall(const std::string& var, FormulaPtr body) {
  auto f = make_formula(Formula::Kind::forall);
  f->var = var;
  f->kids = {std::move(body)};
  return f;
}

FormulaPtr f_less(TermPtr a, TermPtr b) {
  auto f = make_formula(Formula::Kind::less);
  f->t1 = std::move(a);
  f->t2 = std::move(b);
  return f;
}

FormulaPtr f_eq(TermPtr a, TermPtr b) {
  auto f = make_formula(Formula::Kind::equal);
  f->t1 = std::move(a);
  f->t2 = std::move(b);
  return f;
}

FormulaPtr f_leq(TermPtr a, TermPtr b) {
  return f_or({f_less(a, b), f_eq(a, b)});
}

FormulaPtr f_letter(const Symbol& a, TermPtr t) {
  auto f = make_formula(Formula::Kind::letter);
  f->letter = a;
  f->t1 = std::move(t);
  return f;
}

FormulaPtr f_arc(TermPtr a, TermPtr b) {
  auto f = make_formula(Formula::Kind::arc);
  f->t1 = std::move(a);
  f->t2 = std::move(b);
  return f;
}

// ---------------------------------------------------------------------------
// S-expressions
// ---------------------------------------------------------------------------

std::string term_to_sexpr(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::minimum:
      return "min";
    case Term::Kind::maximum:
      return "max";
    case Term::Kind::variable:
      return t->name;
    case Term::Kind::successor:
      return "(s " + term_to_sexpr(t->arg) + ")";
  }
  return "";
}

std::string formula_to_sexpr(const FormulaPtr& f) {
  using K = Formula::Kind;
  auto nary = [&](const char* op) {
    std::string out = "(";
    out += op;
    for (const auto& k : f->kids) out += ' ' + formula_to_sexpr(k);
    out += ')';
    return out;
  };
  switch (f->kind) {
    case K::truth:
      return "true";
    case K::falsity:
      return "false";
    case K::conjunction:
      return nary("and");
    case K::disjunction:
      return nary("or");
    case K::negation:
      return nary("not");
    case K::implication:
      return nary("imp");
    case K::equivalence:
      return nary("iff");
    case K::exists:
      return "(exists " + f->var + ' ' + formula_to_sexpr(f->kids[0]) + ')';
    case K::forall:
      return "(forall " + f->var + ' ' + formula_to_sexpr(f->kids[0]) + ')';
    case K::less:
      return "(< " + term_to_sexpr(f->t1) + ' ' + term_to_sexpr(f->t2) + ')';
    case K::equal:
      return "(= " + term_to_sexpr(f->t1) + ' ' + term_to_sexpr(f->t2) + ')';
    case K::letter:
      return "(letter " + f->letter + ' ' + term_to_sexpr(f->t1) + ')';
    case K::arc:
      return "(arc " + term_to_sexpr(f->t1) + ' ' + term_to_sexpr(f->t2) +
             ')';
  }
  return "";
}

namespace {

struct SexprParser {
  std::vector<std::string> toks;
  std::size_t pos = 0;

  explicit SexprParser(const std::string& text) {
    std::string cur;
    auto flush = [&] {
      if (!cur.empty()) {
        toks.push_back(cur);
        cur.clear();
      }
    };
    for (char c : text) {
      if (c == '(' || c == ')') {
        flush();
        toks.push_back(std::string(1, c));
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        flush();
      } else {
        cur += c;
      }
    }
    flush();
  }

  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("formula syntax error: " + what);
  }
  const std::string& peek() {
    if (pos >= toks.size()) fail("unexpected end of input");
    return toks[pos];
  }
  std::string next() {
    if (pos >= toks.size()) fail("unexpected end of input");
    return toks[pos++];
  }
  void expect(const std::string& t) {
    if (next() != t) fail("expected `" + t + "`");
  }

  TermPtr term() {
    std::string t = next();
    if (t == "(") {
      expect("s");
      TermPtr a = term();
      expect(")");
      return t_succ(a);
    }
    if (t == ")") fail("expected a term");
    if (t == "min") return t_min();
    if (t == "max") return t_max();
    return t_var(t);
  }

  FormulaPtr formula() {
    std::string t = next();
    if (t == "true") return f_true();
    if (t == "false") return f_false();
    if (t != "(") fail("expected `(`, `true`, or `false`");
    std::string op = next();
    if (op == "and" || op == "or") {
      std::vector<FormulaPtr> kids;
      while (peek() != ")") kids.push_back(formula());
      expect(")");
      if (kids.size() < 2) fail("`" + op + "` needs at least two operands");
      return op == "and" ? f_and(std::move(kids)) : f_or(std::move(kids));
    }
    if (op == "not") {
      FormulaPtr a = formula();
      expect(")");
      return f_not(std::move(a));
    }
    if (op == "imp" || op == "iff") {
      FormulaPtr a = formula();
      FormulaPtr b = formula();
      expect(")");
      return op == "imp" ? f_imp(std::move(a), std::move(b))
                         : f_iff(std::move(a), std::move(b));
    }
    if (op == "exists" || op == "forall") {
      std::string v = next();
      if (v == "(" || v == ")" || v == "min" || v == "max" || v == "s")
        fail("`" + op + "` needs a variable name");
      FormulaPtr body = formula();
      expect(")");
      return op == "exists" ? f_exists(v, std::move(body))
                            : f_forall(v, std::move(body));
    }
    if (op == "<" || op == "=") {
      TermPtr a = term();
      TermPtr b = term();
      expect(")");
      return op == "<" ? f_less(std::move(a), std::move(b))
                       : f_eq(std::move(a), std::move(b));
    }
    if (op == "letter") {
      std::string a = next();
      if (a == "(" || a == ")") fail("`letter` needs a letter symbol");
      TermPtr t1 = term();
      expect(")");
      return f_letter(a, std::move(t1));
    }
    if (op == "arc") {
      TermPtr a = term();
      TermPtr b = term();
      expect(")");
      return f_arc(std::move(a), std::move(b));
    }
    fail("unknown operator `" + op + "`");
  }
};

}  // namespace

FormulaPtr formula_from_sexpr(const std::string& text) {
  SexprParser p(text);
  FormulaPtr f = p.formula();
  if (p.pos != p.toks.size())
    throw std::invalid_argument(
        "formula syntax error: trailing tokens after the formula");
  return f;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

int Evaluator::compile_term(const TermPtr& t,
                            const std::vector<std::string>& scope) {
  TNode n;
  switch (t->kind) {
    case Term::Kind::minimum:
      n.kind = 0;
      break;
    case Term::Kind::maximum:
      n.kind = 1;
      break;
    case Term::Kind::variable: {
      n.kind = 2;
      auto it = std::find(scope.rbegin(), scope.rend(), t->name);
      if (it == scope.rend())
        throw std::invalid_argument("formula has a free variable `" +
                                    t->name + "`");
      n.slot = static_cast<int>(scope.rend() - it) - 1;
      break;
    }
    case Term::Kind::successor:
      n.kind = 3;
      n.arg = compile_term(t->arg, scope);
      break;
  }
  terms_.push_back(n);
  return static_cast<int>(terms_.size()) - 1;
}

int Evaluator::compile(const FormulaPtr& f, std::vector<std::string>& scope) {
  using K = Formula::Kind;
  FNode n;
  n.kind = f->kind;
  switch (f->kind) {
    case K::truth:
    case K::falsity:
      break;
    case K::conjunction:
    case K::disjunction:
    case K::negation:
    case K::implication:
    case K::equivalence:
      for (const auto& k : f->kids) n.kids.push_back(compile(k, scope));
      break;
    case K::exists:
    case K::forall:
      scope.push_back(f->var);
      n.slot = static_cast<int>(scope.size()) - 1;
      slot_count_ = std::max(slot_count_, static_cast<int>(scope.size()));
      n.kids.push_back(compile(f->kids[0], scope));
      scope.pop_back();
      break;
    case K::less:
    case K::equal:
    case K::arc:
      n.t1 = compile_term(f->t1, scope);
      n.t2 = compile_term(f->t2, scope);
      break;
    case K::letter: {
      n.t1 = compile_term(f->t1, scope);
      auto it =
          std::find(letter_names_.begin(), letter_names_.end(), f->letter);
      if (it == letter_names_.end()) {
        letter_names_.push_back(f->letter);
        n.letter_id = static_cast<int>(letter_names_.size()) - 1;
      } else {
        n.letter_id = static_cast<int>(it - letter_names_.begin());
      }
      break;
    }
  }
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

Evaluator::Evaluator(const FormulaPtr& f) {
  if (!f) throw std::invalid_argument("null formula");
  std::vector<std::string> scope;
  root_ = compile(f, scope);
}

int Evaluator::eval_term(int id, const std::vector<int>& env, int n) const {
  const TNode& t = terms_[id];
  switch (t.kind) {
    case 0:
      return n >= 1 ? 1 : 0;
    case 1:
      return n;
    case 2:
      return env[t.slot];
    default: {
      int a = eval_term(t.arg, env, n);
      return (a == 0 || a >= n) ? 0 : a + 1;
    }
  }
}

bool Evaluator::eval_node(int id, std::vector<int>& env,
                          const std::vector<int>& w, const Matching& m) const {
  using K = Formula::Kind;
  const FNode& f = nodes_[id];
  const int n = static_cast<int>(w.size());
  switch (f.kind) {
    case K::truth:
      return true;
    case K::falsity:
      return false;
    case K::conjunction:
      for (int k : f.kids)
        if (!eval_node(k, env, w, m)) return false;
      return true;
    case K::disjunction:
      for (int k : f.kids)
        if (eval_node(k, env, w, m)) return true;
      return false;
    case K::negation:
      return !eval_node(f.kids[0], env, w, m);
    case K::implication:
      return !eval_node(f.kids[0], env, w, m) || eval_node(f.kids[1], env, w, m);
    case K::equivalence:
      return eval_node(f.kids[0], env, w, m) == eval_node(f.kids[1], env, w, m);
    case K::exists:
      for (int v = 1; v <= n; ++v) {
        env[f.slot] = v;
        if (eval_node(f.kids[0], env, w, m)) return true;
      }
      return false;
    case K::forall:
      for (int v = 1; v <= n; ++v) {
        env[f.slot] = v;
        if (!eval_node(f.kids[0], env, w, m)) return false;
      }
      return true;
    case K::less: {
      int a = eval_term(f.t1, env, n), b = eval_term(f.t2, env, n);
      return a != 0 && b != 0 && a < b;
    }
    case K::equal: {
      int a = eval_term(f.t1, env, n), b = eval_term(f.t2, env, n);
      return a != 0 && b != 0 && a == b;
    }
    case K::letter: {
      int a = eval_term(f.t1, env, n);
      return a != 0 && w[a - 1] == f.letter_id;
    }
    case K::arc: {
      int a = eval_term(f.t1, env, n), b = eval_term(f.t2, env, n);
      return a != 0 && b != 0 && m.contains(a, b);
    }
  }
  return false;
}

bool Evaluator::eval(const Word& w, const Matching& m) const {
  std::vector<int> letters(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    auto it = std::find(letter_names_.begin(), letter_names_.end(), w[i]);
    letters[i] =
        it == letter_names_.end()
            ? -1
            : static_cast<int>(it - letter_names_.begin());
  }
  std::vector<int> env(slot_count_, 0);
  return eval_node(root_, env, letters, m);
}

bool eval_formula(const FormulaPtr& f, const Word& w, const Matching& m) {
  return Evaluator(f).eval(w, m);
}

// ---------------------------------------------------------------------------
// Tree matchings and the membership sentence
// ---------------------------------------------------------------------------

namespace {
int span_arcs(const Grammar& g, const DerivationTree& t, int pos,
              std::vector<std::pair<int, int>>& arcs, bool root) {
  const Production& p = g.productions[t.prod];
  int child = 0;
  int cur = pos;
  for (const auto& s : p.rhs) {
    if (s.is_nt)
      cur = span_arcs(g, t.children[child++], cur, arcs, false);
    else
      cur += 1;
  }
  if (cur == pos)
    throw std::invalid_argument(
        "a subtree derives the empty word, which has no matching");
  if (cur - pos == 1) {
    if (!root)
      throw std::invalid_argument(
          "a non-root subtree spans a single position; eliminate "
          "single-terminal productions first");
  } else {
    arcs.emplace_back(pos, cur - 1);
  }
  return cur;
}
}  // namespace

Matching matching_from_tree(const Grammar& g, const DerivationTree& t) {
  validate_tree(g, t, true);
  std::vector<std::pair<int, int>> arcs;
  span_arcs(g, t, 1, arcs, true);
  std::sort(arcs.begin(), arcs.end());
  return Matching{std::move(arcs)};
}

namespace {

// Builds the membership sentence piece by piece. Fresh bound-variable names
// are drawn from one counter so nested blocks never capture each other.
struct PsiBuilder {
  const Grammar& g;
  bool exact;
  int counter = 0;

  std::string fresh(const char* base) {
    return std::string(base) + std::to_string(++counter);
  }

  // j sits |v|+1 positions after i and the positions strictly between them
  // spell v. The arithmetic link comes first so evaluation pins j cheaply.
  FormulaPtr seg(const Word& v, const TermPtr& i, const TermPtr& j) {
    std::vector<FormulaPtr> conj;
    TermPtr t = i;
    std::vector<FormulaPtr> letters;
    for (const auto& a : v) {
      t = t_succ(t);
      letters.push_back(f_letter(a, t));
    }
    conj.push_back(f_eq(t_succ(t), j));
    for (auto& l : letters) conj.push_back(std::move(l));
    return f_and(std::move(conj));
  }

  // The production block: positions x..y look like an application of p. With
  // barred = true each child interval must itself satisfy the block
  // disjunction of its nonterminal; with exact = true every arc strictly
  // inside (x, y) must lie within a child interval.
  FormulaPtr pi_p(const Production& p, const TermPtr& x, const TermPtr& y,
                  bool barred) {
    const int s = p.nt_count();
    auto segs = p.segments();
    std::vector<FormulaPtr> conj{f_letter(p.rhs.front().term, x),
                                 f_letter(p.rhs.back().term, y)};

    if (s == 0) {
      Word v = segs[0];
      v.erase(v.begin());
      v.pop_back();
      conj.push_back(seg(v, x, y));
      if (barred && exact) conj.push_back(exactness(x, y, {}));
      return f_and(std::move(conj));
    }

    std::vector<TermPtr> xs(s + 1), ys(s + 1);
    std::vector<std::string> xn(s + 1), yn(s + 1);
    for (int i = 1; i <= s; ++i) {
      xn[i] = fresh("x");
      yn[i] = fresh("y");
      xs[i] = t_var(xn[i]);
      ys[i] = t_var(yn[i]);
    }

    // Innermost conjunction: the segment back to y, the child blocks, and
    // the exactness constraint, all after every boundary variable is bound.
    std::vector<FormulaPtr> inner;
    {
      Word v = segs[s];
      v.pop_back();
      inner.push_back(seg(v, ys[s], y));
    }
    if (barred && exact) {
      std::vector<std::pair<TermPtr, TermPtr>> spans;
      for (int i = 1; i <= s; ++i) spans.emplace_back(xs[i], ys[i]);
      inner.push_back(exactness(x, y, spans));
    }
    if (barred)
      for (int i = 1; i <= s; ++i)
        inner.push_back(pi_nt(p.nt_at(i), xs[i], ys[i]));
    FormulaPtr next = f_and(std::move(inner));

    for (int i = s; i >= 1; --i) {
      next = f_exists(yn[i], f_and({f_arc(xs[i], ys[i]), std::move(next)}));
      Word v = segs[i - 1];
      TermPtr prev = ys[i - 1];
      if (i == 1) {
        v.erase(v.begin());
        prev = x;
      }
      next = f_exists(xn[i], f_and({seg(v, prev, xs[i]), std::move(next)}));
    }
    conj.push_back(std::move(next));
    return f_and(std::move(conj));
  }

  // Every arc strictly inside (x, y) lies inside one of the given spans.
  FormulaPtr exactness(const TermPtr& x, const TermPtr& y,
                       const std::vector<std::pair<TermPtr, TermPtr>>& spans) {
    std::string zn = fresh("z"), tn = fresh("t");
    TermPtr z = t_var(zn), t = t_var(tn);
    std::vector<FormulaPtr> covers;
    for (const auto& [xi, yi] : spans)
      covers.push_back(f_and({f_leq(xi, z), f_leq(t, yi)}));
    FormulaPtr strictly_inside =
        f_and({f_arc(z, t), f_less(x, z), f_less(t, y)});
    return f_forall(
        zn, f_forall(tn, f_imp(std::move(strictly_inside), f_or(covers))));
  }

  // Disjunction of the plain blocks over the productions of a nonterminal.
  FormulaPtr pi_nt(int nt, const TermPtr& x, const TermPtr& y) {
    std::vector<FormulaPtr> disj;
    for (int pi : g.prods_of(nt)) {
      const Production& p = g.productions[pi];
      if (p.rhs.size() >= 2) disj.push_back(pi_p(p, x, y, false));
    }
    return f_or(std::move(disj));
  }

  FormulaPtr spell(const Word& u) {
    std::vector<FormulaPtr> conj;
    TermPtr t = t_min();
    std::vector<FormulaPtr> letters;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (i) t = t_succ(t);
      letters.push_back(f_letter(u[i], t));
    }
    conj.push_back(f_eq(t_max(), t));
    for (auto& l : letters) conj.push_back(std::move(l));
    return f_and(std::move(conj));
  }

  FormulaPtr build() {
    // Branch A: words generated without any arc. In the exact variant only
    // single-letter words qualify and the matching must be empty; in the
    // permissive variant any all-terminal start production qualifies and
    // arcs are unconstrained.
    std::vector<FormulaPtr> a_disj;
    for (int pi : g.prods_of(0)) {
      const Production& p = g.productions[pi];
      bool all_term = true;
      for (const auto& sy : p.rhs)
        if (sy.is_nt) all_term = false;
      if (!all_term) continue;
      if (exact) {
        if (p.rhs.size() == 1)
          a_disj.push_back(f_and(
              {f_eq(t_min(), t_max()), f_letter(p.rhs[0].term, t_min())}));
      } else {
        Word u;
        for (const auto& sy : p.rhs) u.push_back(sy.term);
        a_disj.push_back(spell(u));
      }
    }
    FormulaPtr a = f_or(std::move(a_disj));
    if (exact) {
      FormulaPtr no_arcs = f_forall(
          "x", f_forall("y", f_not(f_arc(t_var("x"), t_var("y")))));
      a = f_and({std::move(a), std::move(no_arcs)});
    }

    // Branch B: the whole word is spanned by an arc that parses as the
    // start symbol, and every arc reads as some production block.
    std::vector<FormulaPtr> global_disj;
    for (const Production& p : g.productions)
      if (p.rhs.size() >= 2)
        global_disj.push_back(pi_p(p, t_var("x"), t_var("y"), true));
    FormulaPtr global = f_forall(
        "x", f_forall("y", f_imp(f_arc(t_var("x"), t_var("y")),
                                 f_or(std::move(global_disj)))));
    FormulaPtr b = f_and({f_arc(t_min(), t_max()), pi_nt(0, t_min(), t_max()),
                          std::move(global)});
    return f_or({std::move(a), std::move(b)});
  }
};

}  // namespace

FormulaPtr build_psi_g(const Grammar& g, PsiVariant variant) {
  auto v = validate_dgnf(g);
  if (!v.ok)
    throw std::invalid_argument(
        "the membership sentence needs a double Greibach grammar "
        "(validate_dgnf fails)");
  PsiBuilder b{g, variant == PsiVariant::exact};
  return b.build();
}

// ---------------------------------------------------------------------------
// Satisfying matchings and the ambiguity probe
// ---------------------------------------------------------------------------

namespace {

struct PsiMachine {
  const Grammar& g;
  PsiVariant variant;
  FormulaPtr psi;
  Evaluator ev;
  std::vector<std::pair<Symbol, Symbol>> arc_letters;
  std::vector<Word> spell_words;

  PsiMachine(const Grammar& g_, PsiVariant v)
      : g(g_), variant(v), psi(build_psi_g(g_, v)), ev(psi) {
    for (const auto& p : g.productions)
      if (p.rhs.size() >= 2)
        arc_letters.emplace_back(p.rhs.front().term, p.rhs.back().term);
    if (variant == PsiVariant::permissive)
      for (int pi : g.prods_of(0)) {
        const Production& p = g.productions[pi];
        bool all_term = true;
        Word u;
        for (const auto& sy : p.rhs) {
          if (sy.is_nt) all_term = false;
          u.push_back(sy.term);
        }
        if (all_term) spell_words.push_back(std::move(u));
      }
  }

  std::vector<Matching> run(const Word& w, std::size_t bound) const {
    const int n = static_cast<int>(w.size());
    if (static_cast<std::size_t>(n) > bound)
      throw cap_exceeded("matching enumeration bound exceeded (n=" +
                         std::to_string(n) +
                         ", bound=" + std::to_string(bound) + ")");
    for (const auto& s : w)
      if (g.terminal_index(s) < 0)
        throw std::invalid_argument("word symbol `" + s +
                                    "` is not a terminal of the grammar");

    if (variant == PsiVariant::permissive)
      for (const auto& u : spell_words)
        if (u == w)
          // The arc-free branch of the sentence already holds, so every
          // matching satisfies it.
          return enumerate_core(n, {}, nullptr);

    std::vector<Matching> candidates;
    if (n >= 2) {
      // The remaining branch forces an arc over the whole word, and every
      // arc must start and end on letters some production can justify.
      auto compat = [&](int x, int y) {
        for (const auto& [a, bb] : arc_letters)
          if (w[x - 1] == a && w[y - 1] == bb) return true;
        return false;
      };
      if (!compat(1, n)) return {};
      candidates = enumerate_core(n, {{1, n}}, compat);
    } else {
      candidates = enumerate_core(n, {}, nullptr);
    }
    std::vector<Matching> out;
    for (auto& m : candidates)
      if (ev.eval(w, m)) out.push_back(std::move(m));
    return out;
  }
};

}  // namespace

std::vector<Matching> satisfying_matchings(const Grammar& g, const Word& w,
                                           std::size_t bound,
                                           PsiVariant variant) {
  PsiMachine machine(g, variant);
  return machine.run(w, bound);
}

AmbiguityReport unambiguity_probe(const Grammar& g, int max_len,
                                  std::size_t bound,
                                  std::size_t matchings_cap) {
  if (max_len < 0)
    throw std::invalid_argument("the probe needs a nonnegative length bound");
  if (static_cast<std::size_t>(max_len) > bound)
    throw cap_exceeded(
        "probe length exceeds the matching enumeration bound (max_len=" +
        std::to_string(max_len) + ", bound=" + std::to_string(bound) + ")");
  PsiMachine machine(g, PsiVariant::exact);

  AmbiguityReport r;
  r.max_len = max_len;
  for (const Word& w : words_upto(g, 1, max_len)) {
    ++r.words_checked;
    std::uint64_t tc = count_trees(g, w);
    auto ms = machine.run(w, bound);
    if (tc == 0 && ms.empty()) continue;
    WordRecord rec;
    rec.word = w;
    rec.tree_count = tc;
    rec.matching_count = ms.size();
    rec.flagged = tc >= 2 || tc != ms.size();
    if (ms.size() > matchings_cap) ms.resize(matchings_cap);
    rec.matchings = std::move(ms);
    r.any_flagged = r.any_flagged || rec.flagged;
    r.records.push_back(std::move(rec));
  }
  return r;
}

std::string report_to_text(const Grammar& g, const AmbiguityReport& r) {
  std::ostringstream out;
  std::uint64_t flagged = 0;
  for (const auto& rec : r.records) {
    out << format_word(g, rec.word) << "  trees=" << rec.tree_count
        << "  matchings=" << rec.matching_count;
    for (const auto& m : rec.matchings) out << "  " << m.to_string();
    if (rec.matching_count > rec.matchings.size()) out << "  ...";
    if (rec.flagged) {
      out << "  FLAGGED";
      ++flagged;
    }
    out << '\n';
  }
  out << "checked " << r.words_checked << " words of length 1.." << r.max_len
      << "; " << r.records.size() << " with trees or matchings; " << flagged
      << " flagged\n";
  return out.str();
}

std::string report_to_json(const Grammar& g, const AmbiguityReport& r) {
  nlohmann::json j;
  j["max_len"] = r.max_len;
  j["words_checked"] = r.words_checked;
  j["any_flagged"] = r.any_flagged;
  j["records"] = nlohmann::json::array();
  for (const auto& rec : r.records) {
    nlohmann::json jr;
    jr["word"] = format_word(g, rec.word);
    jr["tree_count"] = rec.tree_count;
    jr["matching_count"] = rec.matching_count;
    jr["flagged"] = rec.flagged;
    jr["matchings"] = nlohmann::json::array();
    for (const auto& m : rec.matchings) {
      nlohmann::json ja = nlohmann::json::array();
      for (const auto& [x, y] : m.arcs) ja.push_back({x, y});
      jr["matchings"].push_back(ja);
    }
    j["records"].push_back(std::move(jr));
  }
  return j.dump(2);
}

}  // namespace csu
