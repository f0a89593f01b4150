// SPDX-License-Identifier: Apache-2.0
//
// Desk-scale acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. Pass criterion numbers to run a subset.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "corpus.hpp"
#include "teamlogic/atoms.hpp"
#include "teamlogic/error.hpp"
#include "teamlogic/semantics.hpp"
#include "teamlogic/solve.hpp"
#include "teamlogic/tiling.hpp"
#include "teamlogic/translate.hpp"

using namespace teamlogic;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  /// First discrepancy, if any.
  std::string failure;

  void fail(const std::string& what) {
    if (pass) failure = what;
    pass = false;
  }
};

const std::set<Variable> kXY{"x", "y"};

Formula team(const std::string& s) { return parse_formula(s); }

/// At most `max_rows` distinct random rows; lax quantifiers are exponential in |X|.
Team small_team(int n, const std::set<Variable>& vars, std::mt19937_64& rng, std::size_t max_rows = 4) {
  const Team full = full_team(n, vars);
  std::vector<Tuple> rows = full.rows();
  std::shuffle(rows.begin(), rows.end(), rng);
  rows.resize(std::min<std::size_t>(rng() % (max_rows + 1), rows.size()));
  return Team(full.vars(), rows);
}

Team drop_row(const Team& x, std::size_t i) {
  std::vector<Tuple> rows = x.rows();
  rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(i));
  return Team(x.vars(), rows);
}

/// Calls body(s, team) for every structure of size 1..max_n and every team over vars.
void sweep(const Vocabulary& vocab, int max_n, const std::set<Variable>& vars,
           const std::function<void(const Structure&, const std::vector<Team>&)>& body) {
  for (int n = 1; n <= max_n; ++n) {
    const auto teams = all_teams(n, vars);
    enumerate_structures(vocab, n, [&](const Structure& s) {
      body(s, teams);
      return true;
    });
  }
}

std::string describe(const Formula& f, const Structure& s, const Team& x) {
  return render(f) + " on " + structure_to_json(s).dump() + " team " + team_to_json(x, s).dump();
}

// 1 ------------------------------------------------------------------------

Outcome flatness() {
  Outcome o;
  std::mt19937_64 rng(101);
  testing::GenConfig cfg;
  std::uint64_t comparisons = 0;
  const int formulas = 200;
  for (int i = 0; i < formulas && o.pass; ++i) {
    const Formula f = testing::random_formula(rng, cfg);
    sweep(cfg.vocab, 2, kXY, [&](const Structure& s, const std::vector<Team>& teams) {
      Evaluator ev(s, builtin_registry(), EvalOptions::reference());
      for (const Team& x : teams) {
        bool each = true;
        for (std::size_t r = 0; r < x.size() && each; ++r) each = foc_satisfies(s, x.assignment(r), f);
        ++comparisons;
        if (ev.satisfies(x, f) != each) o.fail(describe(f, s, x));
      }
    });
  }
  o.detail = std::to_string(formulas) + " formulas, " + std::to_string(comparisons) + " team/structure pairs";
  return o;
}

// 2 ------------------------------------------------------------------------

Team project(const Team& x, const std::set<Variable>& vars) { return project_team(x, vars); }

Outcome locality_and_downward_closure() {
  Outcome o;
  std::mt19937_64 rng(202);
  testing::GenConfig all;
  all.builtins = {BuiltinKind::kDep, BuiltinKind::kConst, BuiltinKind::kInc, BuiltinKind::kExc, BuiltinKind::kInd};
  testing::GenConfig closed = all;
  closed.builtins = {BuiltinKind::kDep, BuiltinKind::kConst, BuiltinKind::kExc};
  const EvalOptions ref = EvalOptions::reference();
  std::uint64_t local = 0, down = 0;
  const int formulas = 200;

  for (int i = 0; i < formulas && o.pass; ++i) {
    const Formula f = testing::random_formula(rng, all);
    const std::set<Variable> fv = free_variables(f);
    sweep(all.vocab, 2, kXY, [&](const Structure& s, const std::vector<Team>& teams) {
      Evaluator ev(s, builtin_registry(), ref);
      for (const Team& x : teams) {
        const Team y = project(x, fv);
        if (y == x) continue;
        ++local;
        if (ev.satisfies(x, f) != ev.satisfies(y, f)) o.fail("locality: " + describe(f, s, x));
      }
    });
    // Sampled: three elements, teams with an extra column.
    for (int j = 0; j < 10; ++j) {
      const Structure s = random_structure(all.vocab, 3, rng);
      const Team x = small_team(3, {"x", "y", "z"}, rng);
      Evaluator ev(s);
      ++local;
      if (ev.satisfies(x, f) != ev.satisfies(project(x, fv), f)) o.fail("locality: " + describe(f, s, x));
    }
  }

  for (int i = 0; i < formulas && o.pass; ++i) {
    const Formula f = testing::random_formula(rng, closed);
    sweep(closed.vocab, 2, kXY, [&](const Structure& s, const std::vector<Team>& teams) {
      Evaluator ev(s, builtin_registry(), ref);
      std::map<Team, bool> value;
      for (const Team& x : teams) value.emplace(x, ev.satisfies(x, f));
      // Every team is enumerated, so dropping one row at a time covers all subteams.
      for (const auto& [x, holds] : value) {
        if (!holds) continue;
        for (std::size_t r = 0; r < x.size(); ++r) {
          ++down;
          if (!value.at(drop_row(x, r))) o.fail("downward closure: " + describe(f, s, x));
        }
      }
    });
    for (int j = 0; j < 10; ++j) {
      const Structure s = random_structure(closed.vocab, 3, rng);
      const Team x = small_team(3, kXY, rng);
      Evaluator ev(s);
      if (!ev.satisfies(x, f)) continue;
      std::vector<Tuple> rows;
      for (const Tuple& t : x.rows())
        if (rng() % 2) rows.push_back(t);
      ++down;
      if (!ev.satisfies(Team(x.vars(), rows), f)) o.fail("downward closure: " + describe(f, s, x));
    }
  }
  o.detail = std::to_string(formulas) + "+" + std::to_string(formulas) + " formulas, " + std::to_string(local) +
             " locality and " + std::to_string(down) + " subteam comparisons";
  return o;
}

// 3 ------------------------------------------------------------------------

AtomRegistry registry_with_user_atom() {
  AtomRegistry r = AtomRegistry::with_builtins();
  r.add(make_atom_def("sym", {2}, "A x. A y. (R1(x,y) -> R1(y,x))"));
  return r;
}

struct Coverage {
  std::map<std::string, int> cases;
  std::set<std::string> atoms;

  void add(const Formula& f) {
    if (!f) return;
    switch (f->kind) {
      case NodeKind::kRel:
      case NodeKind::kEq: ++cases["literal"]; break;
      case NodeKind::kAnd: ++cases["and"]; break;
      case NodeKind::kOr: ++cases["or"]; break;
      case NodeKind::kExists: ++cases["exists"]; break;
      case NodeKind::kForall: ++cases["forall"]; break;
      case NodeKind::kBuiltinAtom:
        ++cases["atom"];
        atoms.insert(f->builtin == BuiltinKind::kDep && f->tuples[0].empty() ? "const"
                                                                              : std::string(builtin_name(f->builtin)));
        break;
      case NodeKind::kGenAtom:
        ++cases["atom"];
        atoms.insert("@" + f->symbol);
        break;
      default: break;
    }
    add(f->lhs);
    add(f->rhs);
  }
};

Outcome translation_differential() {
  Outcome o;
  const AtomRegistry atoms = registry_with_user_atom();
  std::mt19937_64 rng(303);
  testing::GenConfig cfg;
  cfg.builtins = {BuiltinKind::kDep, BuiltinKind::kConst, BuiltinKind::kInc, BuiltinKind::kExc, BuiltinKind::kInd};
  cfg.generalized = {AtomSignature{"sym", {2}}};
  cfg.max_depth = 3;

  std::vector<Formula> corpus;
  for (int i = 0; i < 120; ++i) corpus.push_back(testing::random_formula(rng, cfg));
  Coverage cov;
  for (const Formula& f : corpus) cov.add(f);

  std::uint64_t exhaustive = 0;
  for (const Formula& f : corpus) {
    const TranslationOutput t = tr_k(f, 2, cfg.vocab, atoms, {"x", "y"});
    if (auto bad = verify_translation(f, t, cfg.vocab, atoms, 2, &exhaustive))
      o.fail(describe(f, bad->structure, bad->team));
    if (!o.pass) break;
  }

  int triples = 0;
  for (; triples < 120 && o.pass; ++triples) {
    const Formula& f = corpus[rng() % corpus.size()];
    const TranslationOutput t = tr_k(f, 2, cfg.vocab, atoms, {"x", "y"});
    const Structure s = random_structure(cfg.vocab, 3, rng);
    const Team x = random_team(3, kXY, rng);
    Evaluator ev(s, atoms);
    if (ev.satisfies(x, f) != sigma11_satisfies(expand_with_team(s, x, t.variables), {}, t.sentence))
      o.fail(describe(f, s, x));
  }

  std::ostringstream cases;
  for (const auto& [name, count] : cov.cases) {
    cases << name << "=" << count << " ";
    if (count < 5) o.fail("case " + name + " covered only " + std::to_string(count) + " times");
  }
  for (const char* a : {"dep", "const", "inc", "exc", "ind", "@sym"})
    if (!cov.atoms.count(a)) o.fail(std::string("atom ") + a + " not covered");
  if (cov.cases.size() < 6) o.fail("not every case is covered");

  o.detail = std::to_string(corpus.size()) + " formulas (" + cases.str() + "), " + std::to_string(exhaustive) +
             " exhaustive pairs, " + std::to_string(triples) + " random triples at size 3";
  return o;
}

// 4 ------------------------------------------------------------------------

/// Least model size up to max_size, or 0.
int least_model(const Formula& f, const Vocabulary& vocab, int max_size) {
  SatResult r = sat_bounded(f, vocab, builtin_registry(), max_size);
  return r.verdict == Verdict::kSat ? r.model->size() : 0;
}

Outcome sentence_equivalence() {
  Outcome o;
  std::mt19937_64 rng(404);
  testing::GenConfig cfg;
  cfg.vocab = {{"P", 1}, {"Q", 1}};
  cfg.builtins = {BuiltinKind::kDep, BuiltinKind::kConst, BuiltinKind::kInc, BuiltinKind::kExc, BuiltinKind::kInd};
  const int sentences = 200;
  int sat = 0;
  for (int i = 0; i < sentences && o.pass; ++i) {
    const Formula f = testing::random_sentence(rng, cfg);
    const Formula t = translate_sentence(f, 2, cfg.vocab, builtin_registry(), {"x", "y"});
    const int a = least_model(f, cfg.vocab, 3);
    const int b = least_model(t, cfg.vocab, 3);
    sat += a != 0;
    // SAT within n for every n in {1,2,3} iff the least model sizes agree.
    if (a != b)
      o.fail(render(f) + ": least model " + std::to_string(a) + " vs translation " + std::to_string(b));
  }
  o.detail = std::to_string(sentences) + " sentences (" + std::to_string(sat) + " satisfiable), sizes 1..3";
  return o;
}

// 5 ------------------------------------------------------------------------

bool equivalent(const Formula& f, const Formula& g, int max_n, std::string* where) {
  bool ok = true;
  sweep({}, max_n, kXY, [&](const Structure& s, const std::vector<Team>& teams) {
    Evaluator ev(s);
    for (const Team& x : teams) {
      if (ok && ev.satisfies(x, f) != ev.satisfies(x, g)) {
        ok = false;
        *where = render(f) + " vs " + render(g) + " on team " + team_to_json(x, s).dump();
      }
    }
  });
  return ok;
}

Outcome normalization() {
  Outcome o;
  // Written with x ⊥_z y as ind(z; x; y).
  const std::vector<std::pair<std::string, std::string>> listed{
      // dependence atoms with repeated arguments
      {"dep(x,x,y)", "@dep(x,y)"},
      {"dep(y,y,x)", "@dep(y,x)"},
      {"dep(x,y,x)", "x=x"},
      {"dep(x,x)", "x=x"},
      // inclusion and exclusion atoms reduced to two columns
      {"inc(x; y)", "inc(x,x; y,y)"},
      {"inc(x,y,x; x,y,y)", "x=y"},
      {"inc(x,y,y; y,x,x)", "inc(x,y; y,x)"},
      {"inc(x,y; y,x)", "@inc(x,y; y,x)"},
      {"exc(x; y)", "exc(x,x; y,y)"},
      {"exc(x,y,y; y,x,x)", "exc(x,y; y,x)"},
      {"exc(x,y; y,x)", "@exc(x,y; y,x)"},
      // trivially true independence atoms
      {"ind(x; ; y)", "E x. x=x"},
      {"ind(x,y; ; x,y)", "E x. x=x"},
      {"ind(x,y; x; y)", "E x. x=x"},
      {"ind(x,y; x,y; x,y)", "E x. x=x"},
      {"ind(x; x; x)", "E x. x=x"},
      {"ind(x; x; y)", "E x. x=x"},
      {"ind(x; x; x,y)", "E x. x=x"},
      {"ind(y; y; y)", "E x. x=x"},
      {"ind(y; x; y)", "E x. x=x"},
      {"ind(y; y; x,y)", "E x. x=x"},
      // reductions
      {"ind(x; x,y; x,y)", "ind(x; y; y)"},
      {"ind(x; y; x,y)", "ind(x; y; y)"},
      {"ind(y; x,y; x,y)", "ind(y; x; x)"},
      {"ind(y; x; x,y)", "ind(y; x; x)"},
      {"ind(; x; x,y)", "ind(; x; x)"},
      {"ind(; y; x,y)", "ind(; y; y)"},
      // remaining independence atoms as generalized atoms
      {"ind(; x; x)", "@const(x)"},
      {"ind(; y; y)", "@const(y)"},
      {"ind(; x; y)", "@ind(x,y)"},
      {"ind(; x,y; x,y)", "@const(x) & @const(y)"},
      {"ind(y; x; x)", "@dep(y,x)"},
      {"ind(x; y; y)", "@dep(x,y)"},
  };
  std::string where;
  for (const auto& [lhs, rhs] : listed) {
    if (!equivalent(team(lhs), team(rhs), 3, &where)) o.fail(where);
  }
  // Every built-in atom over {x,y} against its normal form.
  const auto atoms = testing::all_builtin_atoms({"x", "y"}, 2);
  for (const Formula& a : atoms) {
    if (!equivalent(a, normalize_builtin(a), 3, &where)) o.fail("normal form: " + where);
  }
  o.detail = std::to_string(listed.size()) + " listed equivalences and " + std::to_string(atoms.size()) +
             " normal forms, all teams over {x,y} up to size 3";
  return o;
}

// 6 ------------------------------------------------------------------------

Outcome small_models() {
  Outcome o;
  std::mt19937_64 rng(606);
  const Vocabulary unary{{"P", 1}, {"Q", 1}};
  int sat = 0, instances = 0;
  for (; instances < 120 && o.pass; ++instances) {
    const int k = static_cast<int>(rng() % 4);
    const int m = 1 + static_cast<int>(rng() % 2);
    const Formula f = testing::random_ea_sentence(rng, k, m, unary, {BuiltinKind::kDep, BuiltinKind::kExc});
    const SatResult wide = sat_bounded(f, unary, builtin_registry(), k + 3);
    const SatResult d = decide_ea(f, unary, builtin_registry());
    const int bound = std::max(1, k);
    if (wide.verdict == Verdict::kSat) {
      ++sat;
      if (least_model(f, unary, bound) == 0) o.fail("no model within " + std::to_string(bound) + ": " + render(f));
    }
    if ((d.verdict == Verdict::kSat) != (wide.verdict == Verdict::kSat) || d.verdict == Verdict::kUnknown)
      o.fail("decide_ea disagrees: " + render(f));
  }
  o.detail = std::to_string(instances) + " sentences (" + std::to_string(sat) + " satisfiable), k in 0..3";
  return o;
}

// 7 ------------------------------------------------------------------------

Outcome probes() {
  Outcome o;
  const auto defs = builtin_definitions();
  for (BuiltinKind kind : {BuiltinKind::kDep, BuiltinKind::kConst, BuiltinKind::kExc}) {
    const ProbeReport r = probe_properties(defs.at(kind), 3);
    if (!r.substructure_closed.holds || r.substructure_closed.checked_up_to != 3)
      o.fail(r.atom + " not confirmed: " + r.substructure_closed.witness);
  }
  const AtomDef& inc = defs.at(BuiltinKind::kInc);
  const ProbeReport r = probe_properties(inc, 3);
  if (r.substructure_closed.holds) {
    o.fail("inc not refuted");
    return o;
  }
  // Re-check the witness by direct evaluation, through the definition and natively.
  const Json& w = r.substructure_closed.witness_json;
  const int n = w.at("size").get<int>();
  const Structure a(n);
  const Team x = team_from_json(w.at("team"), a);
  ElementSet b;
  for (const Json& e : w.at("B")) b.insert(a.element(e.get<std::string>()));
  const Structure sub = restrict_structure(a, b);
  const Team y = reindex_team(restrict_team(x, b), b);
  const Formula atom = gen_atom("inc", r.tuples);
  Evaluator big(a), small(sub);
  const bool def_ok = big.satisfies(x, atom) && !small.satisfies(y, atom);
  const bool native_ok = eval_builtin(x, BuiltinKind::kInc, r.tuples) && !eval_builtin(y, BuiltinKind::kInc, r.tuples);
  if (n != 3 || b.size() != 2) o.fail("witness is not a 3-element team restricted to 2 elements");
  if (!def_ok || !native_ok) o.fail("witness does not re-verify: " + r.substructure_closed.witness);
  o.detail = "dep, const, exc closed up to size 3; inc refuted by " + r.substructure_closed.witness;
  return o;
}

// 8 ------------------------------------------------------------------------

std::vector<TileSet> tile_sets_up_to_two() {
  std::vector<TileType> all;
  for (int c = 0; c < 16; ++c) all.push_back({c & 1, (c >> 1) & 1, (c >> 2) & 1, (c >> 3) & 1});
  std::vector<TileSet> out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    out.emplace_back(std::vector<TileType>{all[i]});
    for (std::size_t j = i + 1; j < all.size(); ++j) out.emplace_back(std::vector<TileType>{all[i], all[j]});
  }
  return out;
}

bool every_expansion_satisfies(const Structure& s, const TileSet& tiles, const Formula& phi) {
  const std::size_t cells = s.size() * tiles.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cells); ++mask) {
    Structure e = s;
    for (std::size_t t = 0; t < tiles.size(); ++t) {
      Relation& p = e.add_relation(TileSet::predicate(t), 1);
      for (Element a = 0; a < s.size(); ++a)
        if (mask >> (t * s.size() + a) & 1) p.insert({a});
    }
    if (!foc_satisfies(e, {}, phi)) return false;
  }
  return true;
}

Outcome tiling() {
  Outcome o;
  std::uint64_t contract = 0;
  for (const TileSet& tiles : tile_sets_up_to_two()) {
    const Formula phi = phi_T(tiles);
    for (int n = 1; n <= 2; ++n) {
      enumerate_structures(grid_vocabulary(), n, [&](const Structure& s) {
        ++contract;
        if (every_expansion_satisfies(s, tiles, phi) == brute_force_tilable(s, tiles).tilable)
          o.fail("tiling contract: " + structure_to_json(s).dump() + " tiles " + tile_set_to_json(tiles).dump());
        return true;
      });
    }
  }

  const Formula non_grid = phi_non_grid();
  std::uint64_t lemma = 0;
  for (int n = 1; n <= 2; ++n) {
    enumerate_structures(striped_grid_vocabulary(), n, [&](const Structure& s) {
      ++lemma;
      if (sentence_holds(s, non_grid) == is_striped_gridlike(s).holds)
        o.fail("non-grid: " + structure_to_json(s).dump());
      return true;
    });
  }
  std::mt19937_64 rng(808);
  for (int i = 0; i < 600; ++i) {
    const Structure s = random_structure(striped_grid_vocabulary(), 3, rng);
    ++lemma;
    if (sentence_holds(s, non_grid) == is_striped_gridlike(s).holds) o.fail("non-grid: " + structure_to_json(s).dump());
  }

  const Structure w = striped_witness();
  if (!is_striped_gridlike(w).holds || sentence_holds(w, non_grid)) o.fail("two-element witness");
  o.detail = std::to_string(contract) + " contract cases, " + std::to_string(lemma) +
             " non-grid cases, two-element witness checked";
  return o;
}

// 9 ------------------------------------------------------------------------

Outcome empty_team() {
  Outcome o;
  std::mt19937_64 rng(909);
  testing::GenConfig cfg;
  cfg.builtins = {BuiltinKind::kDep, BuiltinKind::kConst, BuiltinKind::kInc, BuiltinKind::kExc, BuiltinKind::kInd};
  const Team empty(VarTuple{"x", "y"}, {});
  std::uint64_t checks = 0;
  const int formulas = 300;
  for (int i = 0; i < formulas; ++i) {
    const Formula f = testing::random_formula(rng, cfg);
    for (int n = 1; n <= 3; ++n) {
      const auto structures = n < 3 ? all_structures(cfg.vocab, n)
                                     : std::vector<Structure>{random_structure(cfg.vocab, 3, rng)};
      for (const Structure& s : structures) {
        Evaluator ev(s, builtin_registry(), EvalOptions::reference());
        ++checks;
        if (!ev.satisfies(empty, f)) o.fail(describe(f, s, empty));
      }
    }
  }
  o.detail = std::to_string(formulas) + " formulas, " + std::to_string(checks) + " structures";
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "flatness", 60, flatness},
      {2, "locality and downward closure", 120, locality_and_downward_closure},
      {3, "translation differential", 600, translation_differential},
      {4, "sentence-level equivalence", 600, sentence_equivalence},
      {5, "normalization", 300, normalization},
      {6, "small models", 600, small_models},
      {7, "substructure-closure probes", 120, probes},
      {8, "tiling", 900, tiling},
      {9, "empty team", 60, empty_team},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  bool all = true;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_seconds) o.fail("over the time budget");
    all = all && o.pass;
    std::printf("[%s] %d %s: %s (%.1f s of %.0f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs, c.budget_seconds);
    if (!o.pass) std::printf("       %s\n", o.failure.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
