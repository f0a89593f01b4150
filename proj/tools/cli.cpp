// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <optional>
#include <random>
#include <sstream>

#include "teamlogic/atoms.hpp"
#include "teamlogic/error.hpp"
#include "teamlogic/json_io.hpp"
#include "teamlogic/semantics.hpp"
#include "teamlogic/solve.hpp"
#include "teamlogic/tiling.hpp"
#include "teamlogic/translate.hpp"

namespace teamlogic::cli {

namespace {

struct Globals {
  bool json = false;
  int jobs = 1;
  std::size_t limit_cells = EvalOptions{}.limit_cells;
  std::uint64_t seed = 0;
  std::string atoms_file;
};

/// Reported as exit code 2.
struct UsageError : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

class Session {
 public:
  Session(const Globals& g, std::ostream& out) : g_(g), out_(out) {}

  const AtomRegistry& atoms() {
    if (!atoms_) {
      atoms_ = AtomRegistry::with_builtins();
      if (!g_.atoms_file.empty()) {
        Json j = read_json_file(g_.atoms_file);
        const Json& list = j.is_object() ? j.at("atoms") : j;
        if (!list.is_array()) throw InvalidArgument("atom file must hold an array of definitions");
        for (const Json& d : list) atoms_->add(atom_def_from_json(d));
      }
      table_ = atoms_->signatures();
    }
    return *atoms_;
  }

  /// Team-layer formula if it parses as one, otherwise Σ¹₁.
  Formula formula(const std::string& text, const Vocabulary* vocab = nullptr) {
    atoms();
    ParseOptions team{Layer::kTeam, vocab, &table_};
    std::exception_ptr first;
    try {
      return parse_formula(text, team);
    } catch (const ParseError&) {
      first = std::current_exception();
    } catch (const InvalidArgument&) {
      first = std::current_exception();
    }
    try {
      return parse_formula(text, ParseOptions{Layer::kSigma11, vocab, &table_});
    } catch (const ParseError&) {
    } catch (const InvalidArgument&) {
    }
    std::rethrow_exception(first);
  }

  SolveOptions solve_options() const {
    SolveOptions o;
    o.jobs = std::max(1, g_.jobs);
    o.eval.limit_cells = g_.limit_cells;
    return o;
  }

  /// One JSON document in --json mode, otherwise `text`.
  void emit(const Json& j, const std::string& text) {
    if (g_.json)
      out_ << j.dump(2) << "\n";
    else
      out_ << text << (text.empty() || text.back() == '\n' ? "" : "\n");
  }

  const Globals& globals() const { return g_; }

 private:
  const Globals& g_;
  std::ostream& out_;
  std::optional<AtomRegistry> atoms_;
  AtomTable table_;
};

std::string structure_text(const Structure& s) { return structure_to_json(s).dump(); }

int cmd_check(Session& ss, const std::string& structure_file, const std::string& team_file,
              const std::string& text, bool trace) {
  const Structure s = structure_from_json(read_json_file(structure_file));
  const Vocabulary vocab = s.vocabulary();
  const Formula f = ss.formula(text, &vocab);
  bool sat = false;
  std::vector<std::string> lines;
  if (team_file.empty() && !free_variables(f).empty())
    throw UsageError("formula has free variables; pass --team");
  const Team team = team_file.empty() ? Team::empty_assignment_team() : team_from_json(read_json_file(team_file), s);
  try {
    check_layer(f, Layer::kTeam);
    EvalOptions o = ss.solve_options().eval;
    o.trace = trace;
    Evaluator ev(s, ss.atoms(), o);
    sat = ev.satisfies(team, f);
    lines = ev.trace();
  } catch (const ResourceLimit&) {
    throw;
  } catch (const InvalidArgument&) {
    if (!team_file.empty() && !free_variables(f).empty())
      throw UsageError("second-order formulas are checked as sentences only");
    sat = sigma11_satisfies(s, {}, f);
  }
  Json j{{"satisfied", sat}};
  std::string text_out = sat ? "true" : "false";
  if (trace) {
    j["trace"] = lines;
    for (const auto& l : lines) text_out += "\n" + l;
  }
  ss.emit(j, text_out);
  return sat ? kOk : kFalse;
}

/// Random (structure, team) pairs of size `size`; first disagreement.
std::optional<TranslationMismatch> sample_translation(const Formula& f, const TranslationOutput& t,
                                                      const AtomRegistry& atoms, int size, int samples,
                                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Vocabulary vocab = relation_symbols(f);
  const std::set<Variable> vars(t.variables.begin(), t.variables.end());
  for (int i = 0; i < samples; ++i) {
    const Structure s = random_structure(vocab, size, rng);
    const Team x = random_team(size, vars, rng);
    Evaluator ev(s, atoms);
    const bool lhs = ev.satisfies(x, f);
    if (lhs != sigma11_satisfies(expand_with_team(s, x, t.variables, t.team_relation), {}, t.sentence))
      return TranslationMismatch{s, x, lhs};
  }
  return std::nullopt;
}

int cmd_translate(Session& ss, const std::string& text, int k, int verify, int samples, bool sentence,
                  const std::string& vars) {
  const Formula f = ss.formula(text);
  VarTuple variables;
  if (!vars.empty()) {
    std::stringstream in(vars);
    for (std::string v; std::getline(in, v, ',');) variables.push_back(v);
  }
  if (sentence) {
    if (verify > 0 || samples > 0) throw UsageError("--verify and --sample apply to formulas, not --sentence output");
    const Formula t = translate_sentence(f, k, {}, ss.atoms(), variables);
    ss.emit({{"sentence", render(t)}}, render(t));
    return kOk;
  }
  const TranslationOutput t = tr_k(f, k, {}, ss.atoms(), variables);
  Json j{{"sentence", render(t.sentence)},
         {"team_relation", t.team_relation},
         {"variables", t.variables},
         {"fresh_symbols", t.fresh_symbols}};
  std::string out = render(t.sentence);
  int code = kOk;
  if (verify > 0 || samples > 0) {
    std::uint64_t checks = 0;
    auto bad = verify_translation(f, t, {}, ss.atoms(), verify, &checks);
    if (!bad && samples > 0)
      bad = sample_translation(f, t, ss.atoms(), verify + 1, samples, ss.globals().seed);
    j["verified_up_to"] = verify;
    j["checks"] = checks;
    j["samples"] = samples;
    if (bad) {
      j["counterexample"] = {{"structure", structure_to_json(bad->structure)},
                             {"team", team_to_json(bad->team, bad->structure)},
                             {"formula_value", bad->team_value}};
      out += "\nverification FAILED: formula is " + std::string(bad->team_value ? "true" : "false") +
             " but translation disagrees on " + structure_text(bad->structure) + " with team " +
             team_to_json(bad->team, bad->structure).dump();
      code = kFalse;
    } else {
      out += "\nverified up to size " + std::to_string(verify) + " (" + std::to_string(checks) + " pairs)";
      if (samples > 0)
        out += ", " + std::to_string(samples) + " random pairs at size " + std::to_string(verify + 1);
    }
  }
  ss.emit(j, out);
  return code;
}

std::string sat_text(const SatResult& r) {
  std::string s = std::string(verdict_name(r.verdict));
  if (r.verdict == Verdict::kSat) s += " size " + std::to_string(r.model->size());
  s += " bound " + std::to_string(r.bound);
  if (!r.reason.empty()) s += "\n" + r.reason;
  if (r.model) s += "\n" + structure_text(*r.model);
  return s;
}

int cmd_sat(Session& ss, const std::string& text, int max_size) {
  const Formula f = ss.formula(text);
  const SatResult r = sat_bounded(f, {}, ss.atoms(), max_size, ss.solve_options());
  ss.emit(sat_result_to_json(r), sat_text(r));
  return r.verdict == Verdict::kSat ? kOk : kFalse;
}

int cmd_decide_ea(Session& ss, const std::string& text) {
  const Formula f = ss.formula(text);
  const SatResult r = decide_ea(f, {}, ss.atoms(), ss.solve_options());
  ss.emit(sat_result_to_json(r), sat_text(r));
  return r.verdict == Verdict::kSat ? kOk : kFalse;
}

int cmd_refute(Session& ss, const std::string& text, int max_size) {
  const Formula f = ss.formula(text);
  const RefuteResult r = refute_validity(f, {}, ss.atoms(), max_size, ss.solve_options());
  std::string out = r.counterexample ? "COUNTEREXAMPLE size " + std::to_string(r.counterexample->size()) + "\n" +
                                           structure_text(*r.counterexample)
                                     : "NO_COUNTEREXAMPLE_UP_TO " + std::to_string(r.bound);
  ss.emit(refute_result_to_json(r), out);
  return r.counterexample ? kFalse : kOk;
}

int cmd_atom_props(Session& ss, const std::string& name, int max_size) {
  const AtomDef* def = ss.atoms().find(name);
  if (!def) throw UsageError("unknown atom " + name);
  const ProbeReport r = probe_properties(*def, max_size);
  std::string out = "atom " + name;
  auto line = [&](const char* label, const PropertyVerdict& v) {
    out += std::string("\n") + label + ": " +
           (v.holds ? "no counterexample up to size " + std::to_string(v.checked_up_to) : "refuted: " + v.witness);
  };
  line("downward closed", r.downward_closed);
  line("substructure closed", r.substructure_closed);
  line("universe independent", r.universe_independent);
  ss.emit(probe_report_to_json(r), out);
  return kOk;
}

TileSet load_tiles(const std::string& file) { return tile_set_from_json(read_json_file(file)); }

int cmd_tiling(Session& ss, const std::string& sub, const std::string& tiles_file, const std::string& structure_file,
               const std::string& component, bool plain) {
  auto need = [](const std::string& v, const char* flag) {
    if (v.empty()) throw UsageError(std::string("missing ") + flag);
  };
  auto formula_out = [&](const Formula& f) {
    ss.emit({{"formula", render(f)}}, render(f));
    return kOk;
  };
  if (sub == "gen-phi-t") {
    need(tiles_file, "--tiles");
    return formula_out(phi_T(load_tiles(tiles_file)));
  }
  if (sub == "gen-phi-non-grid") {
    if (component.empty()) return formula_out(phi_non_grid());
    auto c = phi_components();
    auto it = c.find(component);
    if (it == c.end()) throw UsageError("unknown component " + component);
    return formula_out(it->second);
  }
  if (sub == "gen-reduction") {
    need(tiles_file, "--tiles");
    return formula_out(phi_non_T_tiling(load_tiles(tiles_file)));
  }
  need(structure_file, "--structure");
  const Structure s = structure_from_json(read_json_file(structure_file));
  if (sub == "check-gridlike") {
    const GridCheck g = plain ? is_gridlike(s) : is_striped_gridlike(s);
    const std::string label = plain ? "gridlike" : "striped-gridlike";
    Json j = grid_check_to_json(g, s);
    j["check"] = label;
    std::string out = label + "=" + (g.holds ? "true" : "false");
    if (!g.holds) out += " (" + g.condition + ": " + j["witness"].dump() + ")";
    ss.emit(j, out);
    return g.holds ? kOk : kFalse;
  }
  need(tiles_file, "--tiles");
  const TileSet tiles = load_tiles(tiles_file);
  const TilingResult r = brute_force_tilable(s, tiles);
  Json j{{"tilable", r.tilable}, {"nodes", r.nodes}};
  std::string out = r.tilable ? "TILABLE" : "NOT_TILABLE";
  if (r.tilable) {
    const Structure e = expand_with_tiling(s, tiles, r.assignment);
    j["expansion"] = structure_to_json(e);
    out += "\n" + structure_text(e);
  }
  ss.emit(j, out);
  return r.tilable ? kOk : kFalse;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Team semantics toolkit: model checking, translation, bounded solving, tilings", "teamlogic"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_flag("--json", g.json, "Emit one JSON document on stdout");
  app.add_option("--jobs", g.jobs, "Worker threads for enumeration sweeps")->check(CLI::PositiveNumber);
  app.add_option("--limit-cells", g.limit_cells, "Evaluator ceiling on |X|*|A|")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Seed for random corpus sampling");
  app.add_option("--atoms", g.atoms_file, "JSON file of generalized atom definitions")->check(CLI::ExistingFile);

  std::string formula, structure_file, team_file, tiles_file, component, vars, atom_name;
  bool trace = false, sentence = false, plain = false;
  int k = 2, verify = 0, samples = 0, max_size = 3;

  auto* check = app.add_subcommand("check", "Evaluate a formula on a structure and team");
  check->add_option("--structure", structure_file, "Structure JSON")->required();
  check->add_option("--team", team_file, "Team JSON (default: the team {∅})");
  check->add_flag("--trace", trace, "Print the witnessing splits and choices");
  check->add_option("formula", formula)->required();

  auto* translate = app.add_subcommand("translate", "Translate into existential second-order logic");
  translate->add_option("--k", k, "Number of first-order variables")->check(CLI::PositiveNumber);
  translate->add_option("--verify", verify, "Differential check up to this domain size");
  translate->add_option("--sample", samples, "Random pairs checked at size verify+1 (see --seed)");
  translate->add_option("--vars", vars, "Comma-separated variable order");
  translate->add_flag("--sentence", sentence, "Translate a sentence into a closed sentence");
  translate->add_option("formula", formula)->required();

  auto* sat = app.add_subcommand("sat", "Bounded model search");
  sat->add_option("--max-size", max_size, "Largest domain size")->check(CLI::PositiveNumber);
  sat->add_option("formula", formula)->required();

  auto* ea = app.add_subcommand("decide-ea", "Decide satisfiability of an E*A* sentence");
  ea->add_option("formula", formula)->required();

  auto* refute = app.add_subcommand("refute-validity", "Search for a falsifying structure");
  refute->add_option("--max-size", max_size, "Largest domain size")->check(CLI::PositiveNumber);
  refute->add_option("formula", formula)->required();

  auto* props = app.add_subcommand("atom-props", "Probe closure properties of an atom definition");
  props->add_option("--max-size", max_size, "Largest domain size")->check(CLI::PositiveNumber);
  props->add_option("atom", atom_name, "Registered atom name")->required();

  auto* tiling = app.add_subcommand("tiling", "Tiling generators and checks");
  std::string tiling_sub;
  tiling->add_option("command", tiling_sub, "gen-phi-t, gen-phi-non-grid, gen-reduction, check-gridlike, tilable")
      ->required()
      ->check(CLI::IsMember({"gen-phi-t", "gen-phi-non-grid", "gen-reduction", "check-gridlike", "tilable"}));
  tiling->add_option("--tiles", tiles_file, "Tile set JSON");
  tiling->add_option("--structure", structure_file, "Structure JSON");
  tiling->add_option("--component", component, "Single component of the non-grid sentence");
  tiling->add_flag("--plain", plain, "check-gridlike: only the gridlike conditions");

  auto fail = [&](int code, const std::string& kind, const std::string& msg) {
    err << "error: " << msg << "\n";
    if (g.json) out << Json{{"error", msg}, {"kind", kind}}.dump(2) << "\n";
    return code;
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return fail(kUsage, "usage", e.what());
  }

  Session ss(g, out);
  try {
    if (*check) return cmd_check(ss, structure_file, team_file, formula, trace);
    if (*translate) return cmd_translate(ss, formula, k, verify, samples, sentence, vars);
    if (*sat) return cmd_sat(ss, formula, max_size);
    if (*ea) return cmd_decide_ea(ss, formula);
    if (*refute) return cmd_refute(ss, formula, max_size);
    if (*props) return cmd_atom_props(ss, atom_name, max_size);
    if (*tiling) return cmd_tiling(ss, tiling_sub, tiles_file, structure_file, component, plain);
  } catch (const ResourceLimit& e) {
    return fail(kResource, "resource", e.what());
  } catch (const NotEA& e) {
    return fail(kUsage, "not-ea", e.what());
  } catch (const ParseError& e) {
    return fail(kUsage, "parse", e.what());
  } catch (const InvalidArgument& e) {
    return fail(kUsage, "usage", e.what());
  } catch (const Json::exception& e) {
    return fail(kUsage, "usage", std::string("malformed JSON: ") + e.what());
  }
  return fail(kUsage, "usage", "no command");
}

}  // namespace teamlogic::cli
