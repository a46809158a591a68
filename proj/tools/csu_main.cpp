#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "csu/cs_encoding.hpp"
#include "csu/fo_match.hpp"
#include "csu/grammar.hpp"
#include "csu/normalize.hpp"
#include "csu/parse_oracle.hpp"

namespace {

// Exit codes: 0 affirmative / success, 1 negative verdict, 2 usage error,
// 3 invalid input (unreadable file, malformed grammar or tokens, bounds).

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot read file `" + path + "`");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

csu::Grammar load_grammar(const std::string& path) {
  return csu::parse_grammar(read_file(path));
}

int run(int argc, char** argv) {
  CLI::App app{
      "csu: bracket encodings, matchings, and membership logic for "
      "context-free grammars"};
  app.require_subcommand(1);

  // normalize ---------------------------------------------------------------
  auto* norm = app.add_subcommand(
      "normalize", "Rewrite a grammar into a normal form");
  std::string norm_file;
  bool opt_dgnf = false, opt_inj = false, opt_short = false;
  norm->add_option("grammar", norm_file, "grammar file")->required();
  norm->add_flag("--dgnf", opt_dgnf,
                 "productions begin and end with terminals");
  norm->add_flag("--injective-patterns", opt_inj,
                 "equal patterns imply equal left-hand sides");
  norm->add_flag("--eliminate-short", opt_short,
                 "remove referenced single-terminal productions");

  // brackets ----------------------------------------------------------------
  auto* brackets = app.add_subcommand(
      "brackets", "Print the bracket alphabet and what each bracket reads");
  std::string br_file;
  bool br_json = false;
  brackets->add_option("grammar", br_file, "grammar file")->required();
  brackets->add_flag("--json", br_json, "machine-readable output");

  // encode ------------------------------------------------------------------
  auto* encode = app.add_subcommand(
      "encode", "Encode each derivation tree of a word as a bracket word");
  std::string en_file, en_word;
  bool en_alias = false;
  encode->add_option("grammar", en_file, "grammar file")->required();
  encode->add_option("--word", en_word, "the word to encode")->required();
  encode->add_flag("--alias", en_alias, "print bracket aliases");

  // decode ------------------------------------------------------------------
  auto* decode = app.add_subcommand(
      "decode", "Decode a bracket word back into a derivation tree");
  std::string de_file, de_dyck;
  decode->add_option("grammar", de_file, "grammar file")->required();
  decode->add_option("--dyck", de_dyck, "bracket word (aliases or tuples)")
      ->required();

  // check -------------------------------------------------------------------
  auto* check = app.add_subcommand(
      "check", "Check nesting and the successor conditions of a bracket word");
  std::string ch_file, ch_dyck;
  check->add_option("grammar", ch_file, "grammar file")->required();
  check->add_option("--dyck", ch_dyck, "bracket word (aliases or tuples)")
      ->required();

  // member ------------------------------------------------------------------
  auto* member = app.add_subcommand(
      "member", "Decide membership of a word in the language");
  std::string me_file, me_word, me_via = "earley";
  std::size_t me_bound = csu::default_enum_bound();
  member->add_option("grammar", me_file, "grammar file")->required();
  member->add_option("--word", me_word, "the word to test")->required();
  member->add_option("--via", me_via, "decision procedure")
      ->check(CLI::IsMember({"earley", "matching", "encoding"}));
  member->add_option("--bound", me_bound,
                     "matching enumeration bound (default CSU_ENUM_BOUND "
                     "or 14)");

  // formula -----------------------------------------------------------------
  auto* formula = app.add_subcommand(
      "formula", "Print a first-order sentence as an s-expression");
  std::string fo_file;
  bool fo_psi = false, fo_local = false, fo_perm = false;
  formula->add_option("grammar", fo_file, "grammar file")->required();
  formula->add_flag("--psi-g", fo_psi, "the membership sentence");
  formula->add_flag("--local", fo_local,
                    "the successor conditions over bracket letters");
  formula->add_flag("--permissive", fo_perm,
                    "drop the exactness constraints of the membership "
                    "sentence");

  // probe -------------------------------------------------------------------
  auto* probe = app.add_subcommand(
      "probe", "Compare tree counts with satisfying-matching counts");
  std::string pr_file;
  int pr_max_len = 8;
  std::size_t pr_bound = csu::default_enum_bound();
  bool pr_json = false;
  probe->add_option("grammar", pr_file, "grammar file")->required();
  probe->add_option("--max-len", pr_max_len, "check words up to this length");
  probe->add_option("--bound", pr_bound,
                    "matching enumeration bound (default CSU_ENUM_BOUND "
                    "or 14)");
  probe->add_flag("--json", pr_json, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (norm->parsed()) {
    if (opt_dgnf + opt_inj + opt_short != 1) {
      std::cerr << "normalize needs exactly one of --dgnf, "
                   "--injective-patterns, --eliminate-short\n";
      return 2;
    }
    csu::Grammar g = load_grammar(norm_file);
    csu::Grammar out;
    if (opt_dgnf) {
      std::vector<std::string> warnings;
      out = csu::to_double_greibach(g, &warnings);
      for (const auto& wmsg : warnings) std::cerr << "warning: " << wmsg
                                                  << '\n';
    } else if (opt_inj) {
      out = csu::make_patterns_injective(g);
    } else {
      out = csu::eliminate_short_productions(g);
    }
    std::cout << csu::serialize_grammar(out);
    return 0;
  }

  if (brackets->parsed()) {
    csu::Grammar g = load_grammar(br_file);
    auto gamma = csu::build_bracket_alphabet(g);
    auto hom = csu::build_homomorphism(g, gamma);
    if (br_json) {
      std::cout << csu::gamma_to_json(g, gamma, hom) << '\n';
    } else {
      std::cout << gamma.opens.size() << " open brackets\n";
      for (std::size_t k = 0; k < gamma.opens.size(); ++k) {
        csu::BracketTok t{gamma.opens[k], false};
        std::cout << (k + 1) << '\t' << csu::token_to_string(t) << "\topen="
                  << csu::format_word(g, hom.open_image[k + 1]) << "\tclose="
                  << csu::format_word(g, hom.close_image[k + 1]) << '\n';
      }
    }
    return 0;
  }

  if (encode->parsed()) {
    csu::Grammar g = load_grammar(en_file);
    auto gamma = csu::build_bracket_alphabet(g);
    csu::Word w = csu::parse_word(g, en_word);
    auto te = csu::enumerate_trees(g, w);
    if (te.truncated)
      std::cerr << "warning: tree enumeration truncated\n";
    for (const auto& t : te.trees) {
      csu::DyckWord z = csu::encode_tree(g, t);
      std::cout << (en_alias ? csu::dyck_to_alias_string(gamma, z)
                             : csu::dyck_to_string(z))
                << '\n';
    }
    return te.trees.empty() ? 1 : 0;
  }

  if (decode->parsed()) {
    csu::Grammar g = load_grammar(de_file);
    auto gamma = csu::build_bracket_alphabet(g);
    auto hom = csu::build_homomorphism(g, gamma);
    csu::DyckWord z = csu::parse_dyck(gamma, de_dyck);
    try {
      csu::DerivationTree t = csu::decode_dyck(g, z);
      std::cout << csu::tree_to_sexpr(g, t) << '\n'
                << "word: "
                << csu::format_word(g, csu::apply_hom(hom, gamma, z)) << '\n';
      return 0;
    } catch (const csu::decode_error& e) {
      std::cerr << "decode failed at token " << e.position
                << (e.condition > 0
                        ? " (condition " + std::to_string(e.condition) + ")"
                        : "")
                << ": " << e.what() << '\n';
      return 1;
    }
  }

  if (check->parsed()) {
    csu::Grammar g = load_grammar(ch_file);
    auto gamma = csu::build_bracket_alphabet(g);
    csu::DyckWord z = csu::parse_dyck(gamma, ch_dyck);
    const bool dyck_ok = csu::is_dyck(z);
    std::cout << "nesting: " << (dyck_ok ? "ok" : "improper") << '\n';
    auto lv = csu::check_local_conditions(g, gamma, z);
    if (lv.ok)
      std::cout << "local: ok\n";
    else
      std::cout << "local: condition " << lv.condition << " at token "
                << lv.position << ": " << lv.message << '\n';
    return (dyck_ok && lv.ok) ? 0 : 1;
  }

  if (member->parsed()) {
    csu::Grammar g = load_grammar(me_file);
    csu::Word w = csu::parse_word(g, me_word);
    bool in_language = false;
    if (me_via == "earley") {
      in_language = csu::earley_recognize(g, w);
    } else if (me_via == "matching") {
      in_language = !csu::satisfying_matchings(g, w, me_bound).empty();
    } else {
      in_language = !csu::enumerate_valid_dyck_words(g, w).empty();
    }
    std::cout << (in_language ? "yes" : "no") << '\n';
    return in_language ? 0 : 1;
  }

  if (formula->parsed()) {
    if (fo_psi + fo_local != 1) {
      std::cerr << "formula needs exactly one of --psi-g, --local\n";
      return 2;
    }
    if (fo_perm && !fo_psi) {
      std::cerr << "--permissive only applies to --psi-g\n";
      return 2;
    }
    csu::Grammar g = load_grammar(fo_file);
    if (fo_psi) {
      auto f = csu::build_psi_g(g, fo_perm ? csu::PsiVariant::permissive
                                           : csu::PsiVariant::exact);
      std::cout << csu::formula_to_sexpr(f) << '\n';
    } else {
      auto gamma = csu::build_bracket_alphabet(g);
      std::cout << csu::formula_to_sexpr(csu::emit_local_formula(g, gamma))
                << '\n';
    }
    return 0;
  }

  if (probe->parsed()) {
    csu::Grammar g = load_grammar(pr_file);
    auto report = csu::unambiguity_probe(g, pr_max_len, pr_bound);
    if (pr_json)
      std::cout << csu::report_to_json(g, report) << '\n';
    else
      std::cout << csu::report_to_text(g, report);
    return report.any_flagged ? 1 : 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const csu::parse_error& e) {
    std::cerr << "error: line " << e.line << ": " << e.what() << '\n';
    return 3;
  } catch (const csu::cap_exceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
