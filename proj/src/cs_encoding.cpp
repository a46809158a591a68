#include "csu/cs_encoding.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace csu {

// ---------------------------------------------------------------------------
// Alphabet and homomorphism
// ---------------------------------------------------------------------------

int BracketAlphabet::alias_of(const Bracket& b) const {
  auto it = std::lower_bound(opens.begin(), opens.end(), b);
  if (it == opens.end() || *it != b) return 0;
  return static_cast<int>(it - opens.begin()) + 1;
}

BracketAlphabet build_bracket_alphabet(const Grammar& g) {
  auto v = validate_dgnf(g);
  if (!v.ok)
    throw std::invalid_argument(
        "the bracket alphabet needs a double Greibach grammar "
        "(validate_dgnf fails)");
  BracketAlphabet gamma;
  for (int pi : g.prods_of(0)) {
    const Production& p = g.productions[pi];
    gamma.opens.push_back(Bracket{0, 0, 1, 1, 0, p.sub});
  }
  for (const Production& p : g.productions) {
    const int c = p.nt_count();
    for (int d = 1; d <= c; ++d) {
      const int x = p.nt_at(d);
      for (int qi : g.prods_of(x)) {
        const Production& q = g.productions[qi];
        gamma.opens.push_back(Bracket{p.lhs, p.sub, c, d, x, q.sub});
      }
    }
  }
  std::sort(gamma.opens.begin(), gamma.opens.end());
  gamma.opens.erase(std::unique(gamma.opens.begin(), gamma.opens.end()),
                    gamma.opens.end());
  return gamma;
}

HomTable build_homomorphism(const Grammar& g, const BracketAlphabet& gamma) {
  HomTable hom;
  hom.open_image.resize(gamma.opens.size() + 1);
  hom.close_image.resize(gamma.opens.size() + 1);
  for (std::size_t k = 0; k < gamma.opens.size(); ++k) {
    const Bracket& br = gamma.opens[k];
    const int applied = g.find_prod(br.e, br.f);
    if (applied < 0)
      throw std::logic_error("internal: bracket names a missing production");
    hom.open_image[k + 1] = g.productions[applied].segments()[0];
    if (br.a == 0 && br.b == 0) {
      // The root close reads nothing.
    } else {
      const int parent = g.find_prod(br.a, br.b);
      if (parent < 0)
        throw std::logic_error(
            "internal: bracket names a missing parent production");
      hom.close_image[k + 1] = g.productions[parent].segments()[br.d];
    }
  }
  return hom;
}

Word apply_hom(const HomTable& hom, const BracketAlphabet& gamma,
               const DyckWord& z) {
  Word out;
  for (const BracketTok& t : z) {
    const int k = gamma.alias_of(t.br);
    if (k == 0)
      throw std::invalid_argument("bracket `" + token_to_string(t) +
                                  "` is not in the alphabet");
    const Word& img = t.close ? hom.close_image[k] : hom.open_image[k];
    out.insert(out.end(), img.begin(), img.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Token text
// ---------------------------------------------------------------------------

std::string token_to_string(const BracketTok& t) {
  std::string out = t.close ? "~" : "";
  const int parts[6] = {t.br.a, t.br.b, t.br.c, t.br.d, t.br.e, t.br.f};
  for (int i = 0; i < 6; ++i) {
    if (i) out += '.';
    out += std::to_string(parts[i]);
  }
  return out;
}

std::string token_to_alias(const BracketAlphabet& gamma, const BracketTok& t) {
  const int k = gamma.alias_of(t.br);
  if (k == 0)
    throw std::invalid_argument("bracket `" + token_to_string(t) +
                                "` is not in the alphabet");
  return (t.close ? "~" : "") + std::to_string(k);
}

std::string dyck_to_string(const DyckWord& z) {
  std::string out;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (i) out += ' ';
    out += token_to_string(z[i]);
  }
  return out;
}

std::string dyck_to_alias_string(const BracketAlphabet& gamma,
                                 const DyckWord& z) {
  std::string out;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (i) out += ' ';
    out += token_to_alias(gamma, z[i]);
  }
  return out;
}

DyckWord parse_dyck(const BracketAlphabet& gamma, const std::string& text) {
  std::istringstream in(text);
  DyckWord z;
  for (std::string tok; in >> tok;) {
    BracketTok t;
    std::string body = tok;
    if (!body.empty() && body[0] == '~') {
      t.close = true;
      body = body.substr(1);
    }
    auto fail = [&]() {
      throw std::invalid_argument(
          "cannot read bracket token `" + tok +
          "`; expected an alias like 3 or ~3, or a tuple like 0.2.2.1.1.1");
    };
    if (body.empty()) fail();
    if (body.find('.') == std::string::npos) {
      for (char ch : body)
        if (!std::isdigit(static_cast<unsigned char>(ch))) fail();
      const long k = std::strtol(body.c_str(), nullptr, 10);
      if (k < 1 || k > static_cast<long>(gamma.opens.size()))
        throw std::invalid_argument("bracket alias " + body +
                                    " is out of range 1.." +
                                    std::to_string(gamma.opens.size()));
      t.br = gamma.opens[k - 1];
    } else {
      int parts[6];
      std::size_t pos = 0;
      for (int i = 0; i < 6; ++i) {
        std::size_t dot = body.find('.', pos);
        std::string piece = dot == std::string::npos
                                ? body.substr(pos)
                                : body.substr(pos, dot - pos);
        if (piece.empty()) fail();
        for (char ch : piece)
          if (!std::isdigit(static_cast<unsigned char>(ch))) fail();
        parts[i] = static_cast<int>(std::strtol(piece.c_str(), nullptr, 10));
        if (i < 5) {
          if (dot == std::string::npos) fail();
          pos = dot + 1;
        } else if (dot != std::string::npos) {
          fail();
        }
      }
      t.br = Bracket{parts[0], parts[1], parts[2], parts[3], parts[4],
                     parts[5]};
    }
    z.push_back(t);
  }
  return z;
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

namespace {
// Returns the 0-based index of the first nesting violation, z.size() when
// opens are left unclosed, or -1 when the word nests properly.
int nesting_violation(const DyckWord& z) {
  std::vector<Bracket> stack;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!z[i].close) {
      stack.push_back(z[i].br);
    } else {
      if (stack.empty() || stack.back() != z[i].br)
        return static_cast<int>(i);
      stack.pop_back();
    }
  }
  return stack.empty() ? -1 : static_cast<int>(z.size());
}
}  // namespace

bool is_dyck(const DyckWord& z) { return nesting_violation(z) < 0; }

LocalVerdict check_local_conditions(const Grammar& g,
                                    const BracketAlphabet& gamma,
                                    const DyckWord& z) {
  for (std::size_t i = 0; i < z.size(); ++i)
    if (gamma.alias_of(z[i].br) == 0)
      throw std::invalid_argument(
          "token " + std::to_string(i + 1) + " (`" + token_to_string(z[i]) +
          "`) is not in the bracket alphabet");

  const int m = static_cast<int>(z.size());
  if (m == 0)
    return {false, 1, 1, "the word is empty; it must start with a root open"};
  if (z[0].close || z[0].br.a != 0 || z[0].br.b != 0)
    return {false, 1, 1, "the word must start with a root open bracket"};
  if (!z[m - 1].close || z[m - 1].br != z[0].br)
    return {false, 1, m,
            "the word must end with the close of its root open bracket"};

  for (int x = 0; x < m; ++x) {
    const BracketTok& t = z[x];
    const bool has_next = x + 1 < m;
    const BracketTok* nxt = has_next ? &z[x + 1] : nullptr;
    if (!t.close) {
      const Production& applied = g.productions[g.find_prod(t.br.e, t.br.f)];
      if (applied.nt_count() == 0) {
        if (!has_next)
          return {false, 2, x + 1,
                  "an open applying a childless production must be followed "
                  "by its own close"};
        if (!(nxt->close && nxt->br == t.br))
          return {false, 2, x + 2,
                  "an open applying a childless production must be followed "
                  "by its own close"};
      } else {
        const bool ok = has_next && !nxt->close && nxt->br.a == t.br.e &&
                        nxt->br.b == t.br.f && nxt->br.d == 1;
        if (!ok)
          return {false, 3, has_next ? x + 2 : x + 1,
                  "an open applying a production with children must be "
                  "followed by an open of that production at rank 1"};
      }
    } else {
      if (t.br.d < t.br.c) {
        const bool ok = has_next && !nxt->close && nxt->br.a == t.br.a &&
                        nxt->br.b == t.br.b && nxt->br.d == t.br.d + 1;
        if (!ok)
          return {false, 4, has_next ? x + 2 : x + 1,
                  "a close at rank d < c must be followed by an open of the "
                  "same production at rank d+1"};
      } else if (t.br.a == 0 && t.br.b == 0) {
        if (has_next)
          return {false, 5, x + 2, "nothing may follow the root close"};
      } else {
        if (has_next && !nxt->close)
          return {false, 5, x + 2,
                  "a close at the last rank must be followed by a close"};
      }
    }
  }
  return {true, 0, 0, ""};
}

// ---------------------------------------------------------------------------
// Codec
// ---------------------------------------------------------------------------

namespace {
void encode_rec(const Grammar& g, const DerivationTree& t, int a, int b,
                int c, int d, DyckWord& z) {
  const Production& p = g.productions[t.prod];
  BracketTok open{Bracket{a, b, c, d, p.lhs, p.sub}, false};
  z.push_back(open);
  const int cc = p.nt_count();
  for (int dd = 1; dd <= cc; ++dd)
    encode_rec(g, t.children[dd - 1], p.lhs, p.sub, cc, dd, z);
  z.push_back(BracketTok{open.br, true});
}
}  // namespace

DyckWord encode_tree(const Grammar& g, const DerivationTree& t) {
  validate_tree(g, t, true);
  DyckWord z;
  encode_rec(g, t, 0, 0, 1, 1, z);
  return z;
}

DerivationTree decode_dyck(const Grammar& g, const DyckWord& z) {
  const BracketAlphabet gamma = build_bracket_alphabet(g);
  const int bad = nesting_violation(z);
  if (bad >= 0) {
    const bool at_end = bad == static_cast<int>(z.size());
    throw decode_error(0, at_end ? bad : bad + 1,
                       at_end ? "open brackets are left unclosed"
                              : "close bracket does not match the most "
                                "recent open");
  }
  const LocalVerdict lv = check_local_conditions(g, gamma, z);
  if (!lv.ok) throw decode_error(lv.condition, lv.position, lv.message);

  std::vector<DerivationTree> stack;
  DerivationTree result;
  for (const BracketTok& t : z) {
    if (!t.close) {
      DerivationTree node;
      node.prod = g.find_prod(t.br.e, t.br.f);
      stack.push_back(std::move(node));
    } else {
      DerivationTree node = std::move(stack.back());
      stack.pop_back();
      if (stack.empty())
        result = std::move(node);
      else
        stack.back().children.push_back(std::move(node));
    }
  }
  validate_tree(g, result, true);
  return result;
}

// ---------------------------------------------------------------------------
// Local conditions as a sentence
// ---------------------------------------------------------------------------

Word dyck_word_model(const DyckWord& z) {
  Word w;
  for (const BracketTok& t : z) w.push_back(token_to_string(t));
  return w;
}

FormulaPtr emit_local_formula(const Grammar& g, const BracketAlphabet& gamma) {
  auto sym = [](const Bracket& br, bool close) {
    return token_to_string(BracketTok{br, close});
  };
  std::vector<FormulaPtr> c1;
  for (const Bracket& o : gamma.opens)
    if (o.a == 0 && o.b == 0)
      c1.push_back(f_and({f_letter(sym(o, false), t_min()),
                          f_letter(sym(o, true), t_max())}));
  FormulaPtr cond1 = f_or(std::move(c1));

  std::vector<FormulaPtr> clauses;
  const TermPtr x = t_var("x");
  for (const Bracket& o : gamma.opens) {
    const Production& applied = g.productions[g.find_prod(o.e, o.f)];
    if (applied.nt_count() == 0) {
      clauses.push_back(f_imp(f_letter(sym(o, false), x),
                              f_letter(sym(o, true), t_succ(x))));
    } else {
      std::vector<FormulaPtr> nexts;
      for (const Bracket& o2 : gamma.opens)
        if (o2.a == o.e && o2.b == o.f && o2.d == 1)
          nexts.push_back(f_letter(sym(o2, false), t_succ(x)));
      clauses.push_back(
          f_imp(f_letter(sym(o, false), x), f_or(std::move(nexts))));
    }
  }
  for (const Bracket& o : gamma.opens) {
    if (o.d < o.c) {
      std::vector<FormulaPtr> nexts;
      for (const Bracket& o2 : gamma.opens)
        if (o2.a == o.a && o2.b == o.b && o2.d == o.d + 1)
          nexts.push_back(f_letter(sym(o2, false), t_succ(x)));
      clauses.push_back(
          f_imp(f_letter(sym(o, true), x), f_or(std::move(nexts))));
    } else if (o.a == 0 && o.b == 0) {
      clauses.push_back(f_imp(f_letter(sym(o, true), x), f_eq(x, t_max())));
    } else {
      std::vector<FormulaPtr> nexts{f_eq(x, t_max())};
      for (const Bracket& o2 : gamma.opens)
        nexts.push_back(f_letter(sym(o2, true), t_succ(x)));
      clauses.push_back(
          f_imp(f_letter(sym(o, true), x), f_or(std::move(nexts))));
    }
  }
  return f_and({std::move(cond1), f_forall("x", f_and(std::move(clauses)))});
}

// ---------------------------------------------------------------------------
// Bounded search for all valid encodings of a word
// ---------------------------------------------------------------------------

namespace {

struct DyckSearch {
  const Grammar& g;
  const BracketAlphabet& gamma;
  const HomTable& hom;
  const Word& w;
  DyckWord z;
  std::vector<Bracket> stack;
  std::size_t pos = 0;
  std::vector<DyckWord>& out;

  bool image_fits(const Word& img) const {
    if (pos + img.size() > w.size()) return false;
    for (std::size_t i = 0; i < img.size(); ++i)
      if (w[pos + i] != img[i]) return false;
    return true;
  }

  void push_open(const Bracket& br) {
    const Word& img = hom.open_image[gamma.alias_of(br)];
    if (!image_fits(img)) return;
    z.push_back(BracketTok{br, false});
    stack.push_back(br);
    pos += img.size();
    step();
    pos -= img.size();
    stack.pop_back();
    z.pop_back();
  }

  void push_close(const Bracket& br) {
    const Word& img = hom.close_image[gamma.alias_of(br)];
    if (!image_fits(img)) return;
    z.push_back(BracketTok{br, true});
    stack.pop_back();
    pos += img.size();
    step();
    pos -= img.size();
    stack.push_back(br);
    z.pop_back();
  }

  // Advances by every token the successor conditions and proper nesting
  // allow after the current last token.
  void step() {
    if (z.empty()) {
      for (const Bracket& o : gamma.opens)
        if (o.a == 0 && o.b == 0) push_open(o);
      return;
    }
    const BracketTok last = z.back();
    if (!last.close) {
      const Production& applied =
          g.productions[g.find_prod(last.br.e, last.br.f)];
      if (applied.nt_count() == 0) {
        push_close(last.br);
      } else {
        for (const Bracket& o : gamma.opens)
          if (o.a == last.br.e && o.b == last.br.f && o.d == 1) push_open(o);
      }
    } else {
      if (last.br.d < last.br.c) {
        for (const Bracket& o : gamma.opens)
          if (o.a == last.br.a && o.b == last.br.b && o.d == last.br.d + 1)
            push_open(o);
      } else if (last.br.a == 0 && last.br.b == 0) {
        if (stack.empty() && pos == w.size()) out.push_back(z);
      } else {
        if (!stack.empty()) push_close(stack.back());
      }
    }
  }
};

}  // namespace

std::vector<DyckWord> enumerate_valid_dyck_words(const Grammar& g,
                                                 const Word& w) {
  const BracketAlphabet gamma = build_bracket_alphabet(g);
  const HomTable hom = build_homomorphism(g, gamma);
  for (const auto& s : w)
    if (g.terminal_index(s) < 0)
      throw std::invalid_argument("word symbol `" + s +
                                  "` is not a terminal of the grammar");
  std::vector<DyckWord> out;
  DyckSearch search{g, gamma, hom, w, {}, {}, 0, out};
  search.step();
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// JSON export
// ---------------------------------------------------------------------------

std::string gamma_to_json(const Grammar& g, const BracketAlphabet& gamma,
                          const HomTable& hom) {
  nlohmann::json j;
  j["bracket_count"] = gamma.opens.size();
  j["brackets"] = nlohmann::json::array();
  for (std::size_t k = 0; k < gamma.opens.size(); ++k) {
    const Bracket& br = gamma.opens[k];
    nlohmann::json jb;
    jb["alias"] = k + 1;
    jb["tuple"] = {br.a, br.b, br.c, br.d, br.e, br.f};
    jb["token"] = token_to_string(BracketTok{br, false});
    jb["open_reads"] = format_word(g, hom.open_image[k + 1]);
    jb["close_reads"] = format_word(g, hom.close_image[k + 1]);
    j["brackets"].push_back(std::move(jb));
  }
  return j.dump(2);
}

}  // namespace csu
