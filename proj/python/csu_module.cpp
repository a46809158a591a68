#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "csu/cs_encoding.hpp"
#include "csu/fo_match.hpp"
#include "csu/grammar.hpp"
#include "csu/normalize.hpp"
#include "csu/parse_oracle.hpp"

namespace py = pybind11;

namespace {

csu::Grammar g_of(const std::string& text) { return csu::parse_grammar(text); }

}  // namespace

PYBIND11_MODULE(csu, m) {
  m.doc() =
      "Bracket encodings, matchings, and membership logic for context-free "
      "grammars. Grammars are passed as text in the `start:` / `X -> ...` "
      "file format; words as plain strings.";

  m.def(
      "serialize",
      [](const std::string& g) { return csu::serialize_grammar(g_of(g)); },
      py::arg("grammar"), "Parse a grammar and print its canonical form.");

  m.def(
      "validate_dgnf",
      [](const std::string& g) { return csu::validate_dgnf(g_of(g)).ok; },
      py::arg("grammar"),
      "True when every production begins and ends with a terminal (single "
      "terminals allowed only for the start symbol).");

  m.def(
      "to_dgnf",
      [](const std::string& g) {
        return csu::serialize_grammar(csu::to_double_greibach(g_of(g)));
      },
      py::arg("grammar"),
      "Rewrite into the normal form whose productions begin and end with "
      "terminals.");

  m.def(
      "eliminate_short",
      [](const std::string& g) {
        return csu::serialize_grammar(csu::eliminate_short_productions(g_of(g)));
      },
      py::arg("grammar"),
      "Remove single-terminal productions of referenced nonterminals.");

  m.def(
      "make_injective",
      [](const std::string& g) {
        return csu::serialize_grammar(csu::make_patterns_injective(g_of(g)));
      },
      py::arg("grammar"),
      "Rewrite until equal terminal patterns imply equal left-hand sides.");

  m.def(
      "member",
      [](const std::string& g, const std::string& w) {
        auto gr = g_of(g);
        return csu::earley_recognize(gr, csu::parse_word(gr, w));
      },
      py::arg("grammar"), py::arg("word"), "Membership via chart parsing.");

  m.def(
      "count_trees",
      [](const std::string& g, const std::string& w) {
        auto gr = g_of(g);
        return csu::count_trees(gr, csu::parse_word(gr, w));
      },
      py::arg("grammar"), py::arg("word"),
      "Number of derivation trees of the word.");

  m.def(
      "trees",
      [](const std::string& g, const std::string& w) {
        auto gr = g_of(g);
        auto te = csu::enumerate_trees(gr, csu::parse_word(gr, w));
        std::vector<std::string> out;
        for (const auto& t : te.trees) out.push_back(csu::tree_to_sexpr(gr, t));
        return out;
      },
      py::arg("grammar"), py::arg("word"),
      "Derivation trees of the word as s-expressions.");

  m.def(
      "brackets_json",
      [](const std::string& g) {
        auto gr = g_of(g);
        auto gamma = csu::build_bracket_alphabet(gr);
        auto hom = csu::build_homomorphism(gr, gamma);
        return csu::gamma_to_json(gr, gamma, hom);
      },
      py::arg("grammar"),
      "The bracket alphabet and letter images as JSON.");

  m.def(
      "encode",
      [](const std::string& g, const std::string& w) {
        auto gr = g_of(g);
        auto te = csu::enumerate_trees(gr, csu::parse_word(gr, w));
        std::vector<std::string> out;
        for (const auto& t : te.trees)
          out.push_back(csu::dyck_to_string(csu::encode_tree(gr, t)));
        return out;
      },
      py::arg("grammar"), py::arg("word"),
      "One bracket word per derivation tree of the word.");

  m.def(
      "decode",
      [](const std::string& g, const std::string& dyck) {
        auto gr = g_of(g);
        auto gamma = csu::build_bracket_alphabet(gr);
        auto z = csu::parse_dyck(gamma, dyck);
        return csu::tree_to_sexpr(gr, csu::decode_dyck(gr, z));
      },
      py::arg("grammar"), py::arg("dyck"),
      "Decode a bracket word into a derivation tree s-expression.");

  m.def(
      "check_dyck",
      [](const std::string& g, const std::string& dyck) {
        auto gr = g_of(g);
        auto gamma = csu::build_bracket_alphabet(gr);
        auto z = csu::parse_dyck(gamma, dyck);
        auto lv = csu::check_local_conditions(gr, gamma, z);
        py::dict out;
        out["nested"] = csu::is_dyck(z);
        out["local_ok"] = lv.ok;
        out["condition"] = lv.condition;
        out["position"] = lv.position;
        out["message"] = lv.message;
        return out;
      },
      py::arg("grammar"), py::arg("dyck"),
      "Nesting and successor-condition verdicts for a bracket word.");

  m.def(
      "psi_g",
      [](const std::string& g, bool permissive) {
        return csu::formula_to_sexpr(csu::build_psi_g(
            g_of(g), permissive ? csu::PsiVariant::permissive
                                : csu::PsiVariant::exact));
      },
      py::arg("grammar"), py::arg("permissive") = false,
      "The membership sentence as an s-expression.");

  m.def(
      "local_formula",
      [](const std::string& g) {
        auto gr = g_of(g);
        auto gamma = csu::build_bracket_alphabet(gr);
        return csu::formula_to_sexpr(csu::emit_local_formula(gr, gamma));
      },
      py::arg("grammar"),
      "The successor conditions over bracket letters as an s-expression.");

  m.def(
      "eval_psi",
      [](const std::string& g, const std::string& w,
         const std::vector<std::pair<int, int>>& arcs, bool permissive) {
        auto gr = g_of(g);
        auto word = csu::parse_word(gr, w);
        auto verdict =
            csu::is_matching(arcs, static_cast<int>(word.size()));
        if (!verdict.ok) throw std::invalid_argument(verdict.message);
        csu::Matching m{arcs};
        std::sort(m.arcs.begin(), m.arcs.end());
        auto f = csu::build_psi_g(gr, permissive
                                          ? csu::PsiVariant::permissive
                                          : csu::PsiVariant::exact);
        return csu::eval_formula(f, word, m);
      },
      py::arg("grammar"), py::arg("word"), py::arg("arcs"),
      py::arg("permissive") = false,
      "Evaluate the membership sentence on a word and an arc set.");

  m.def(
      "satisfying_matchings",
      [](const std::string& g, const std::string& w, std::size_t bound) {
        auto gr = g_of(g);
        auto ms = csu::satisfying_matchings(gr, csu::parse_word(gr, w), bound);
        std::vector<std::vector<std::pair<int, int>>> out;
        for (auto& m : ms) out.push_back(m.arcs);
        return out;
      },
      py::arg("grammar"), py::arg("word"),
      py::arg("bound") = csu::default_enum_bound(),
      "All matchings satisfying the membership sentence.");

  m.def(
      "probe_json",
      [](const std::string& g, int max_len, std::size_t bound) {
        auto gr = g_of(g);
        auto rep = csu::unambiguity_probe(gr, max_len, bound);
        return csu::report_to_json(gr, rep);
      },
      py::arg("grammar"), py::arg("max_len") = 8,
      py::arg("bound") = csu::default_enum_bound(),
      "Tree counts versus satisfying-matching counts as JSON.");
}
