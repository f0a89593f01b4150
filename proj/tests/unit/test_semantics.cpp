// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include "corpus.hpp"
#include "sat_solver.hpp"
#include "teamlogic/error.hpp"
#include "teamlogic/semantics.hpp"

using namespace teamlogic;

namespace {

constexpr Element a = 0, b = 1, c = 2;

Formula team(const std::string& s) { return parse_formula(s); }
Formula foc(const std::string& s) { return parse_formula(s, {Layer::kFoc}); }
Formula so(const std::string& s) { return parse_formula(s, {Layer::kSigma11}); }

Structure unary(int n, std::map<std::string, ElementSet> rels) {
  Structure s(n);
  for (const auto& [name, elems] : rels) {
    Relation& r = s.add_relation(name, 1);
    for (Element e : elems) r.insert({e});
  }
  return s;
}

/// Every team over `vars` on structures of the vocabulary up to size n.
template <typename F>
void sweep(const Vocabulary& vocab, int max_n, const std::set<Variable>& vars, F&& body) {
  for (int n = 1; n <= max_n; ++n) {
    auto teams = all_teams(n, vars);
    enumerate_structures(vocab, n, [&](const Structure& s) {
      for (const Team& t : teams) body(s, t);
      return true;
    });
  }
}

}  // namespace

TEST_CASE("team semantics on small examples", "[semantics]") {
  Structure s = unary(3, {{"R", {a}}, {"P", {a}}, {"Q", {b}}});
  CHECK(team_satisfies(s, Team({"x"}, {{a}}), team("R(x)")));
  CHECK_FALSE(team_satisfies(s, Team({"x", "y"}, {{a, b}, {a, c}}), team("dep(x,y)")));
  CHECK(team_satisfies(s, Team({"x"}, {{a}, {b}}), team("P(x) | Q(x)")));
  CHECK_FALSE(team_satisfies(s, Team({"x"}, {{a}, {b}, {c}}), team("P(x) | Q(x)")));
  CHECK(sentence_holds(s, team("E x. P(x)")));
  CHECK_FALSE(sentence_holds(s, team("A x. P(x)")));
  CHECK(sentence_holds(s, team("A x. E y. (dep(y) & (x=x))")));
  CHECK_FALSE(sentence_holds(s, team("A x. E y. (dep(y) & x=y)")));
  CHECK(sentence_holds(s, team("A x. E y. (dep(x,y) & x=y)")));
}

TEST_CASE("evaluator input checks", "[semantics]") {
  Structure s = unary(2, {{"P", {a}}});
  CHECK_THROWS_AS(team_satisfies(s, Team({"x"}, {{a}}), team("P(y)")), InvalidArgument);
  CHECK_THROWS_AS(team_satisfies(s, Team({"x"}, {{a}}), team("@nope(x)")), InvalidArgument);
  CHECK_THROWS_AS(team_satisfies(s, Team({"x"}, {{a}}), team("S(x)")), InvalidArgument);
  EvalOptions tight;
  tight.limit_cells = 4;
  CHECK_THROWS_AS(team_satisfies(s, Team::empty_assignment_team(), team("A x. A y. A z. dep(x,z)"),
                                 builtin_registry(), tight),
                  ResourceLimit);
}

TEST_CASE("the empty team satisfies every formula with built-in atoms", "[semantics][property]") {
  std::mt19937_64 rng(3);
  testing::GenConfig cfg;
  cfg.builtins = {BuiltinKind::kDep, BuiltinKind::kInc, BuiltinKind::kExc, BuiltinKind::kInd};
  auto structs = all_structures(cfg.vocab, 2);
  for (int i = 0; i < 200; ++i) {
    Formula f = testing::random_formula(rng, cfg);
    const Structure& s = structs[rng() % structs.size()];
    CHECK(team_satisfies(s, Team({"x", "y"}, {}), f, builtin_registry(), EvalOptions::reference()));
  }
}

TEST_CASE("trace records witnessing splits", "[semantics]") {
  Structure s = unary(2, {{"P", {a}}, {"Q", {b}}});
  EvalOptions opts = EvalOptions::reference();
  opts.trace = true;
  Evaluator ev(s, builtin_registry(), opts);
  CHECK(ev.satisfies(Team({"x"}, {{a}, {b}}), team("P(x) | Q(x)")));
  REQUIRE_FALSE(ev.trace().empty());
  CHECK(ev.trace().front().rfind("split", 0) == 0);
}

TEST_CASE("counting quantifiers", "[semantics]") {
  Structure one(1);
  CHECK_FALSE(foc_satisfies(one, {}, foc("E>=2 x. x=x")));
  Structure s(2);
  s.add_relation("R", 2).insert({a, a});
  CHECK(foc_satisfies(s, {{"y", a}}, foc("!E>=2 x. R(x,y)")));
  CHECK(foc_satisfies(s, {{"y", a}}, foc("E<=1 x. R(x,y)")));
  CHECK_FALSE(foc_satisfies(s, {{"y", a}}, foc("E<=0 x. R(x,y)")));
  CHECK(foc_satisfies(s, {}, foc("E>=0 x. !x=x")));
  CHECK_THROWS_AS(foc_satisfies(s, {}, foc("R(x,x)")), InvalidArgument);
}

TEST_CASE("E>=1 coincides with E on all small structures", "[semantics][property]") {
  Formula c1 = foc("E>=1 x. P(x)");
  Formula e = foc("E x. P(x)");
  for (int n = 1; n <= 3; ++n)
    for (const auto& s : all_structures(Vocabulary{{"P", 1}}, n)) CHECK(foc_satisfies(s, {}, c1) == foc_satisfies(s, {}, e));
}

TEST_CASE("second-order existential sentences", "[semantics]") {
  Structure s(2);
  for (auto backend : {Sigma11Backend::kBrute, Sigma11Backend::kGround}) {
    CHECK(sigma11_satisfies(s, {}, so("SOE R:1. A x. R(x)"), backend));
    CHECK_FALSE(sigma11_satisfies(s, {}, so("SOE R:1. ((E x. R(x)) & A x. !R(x))"), backend));
    auto w = sigma11_witness(s, {}, so("SOE R:1. A x. R(x)"), backend);
    REQUIRE(w);
    CHECK(w->at("R").size() == 2);
  }
}

TEST_CASE("SOE R:2 agrees with the disjunction over all 16 interpretations", "[semantics][property]") {
  const char* bodies[] = {
      "A x. E y. R(x,y) & A x. !R(x,x)",
      "A x. A y. (R(x,y) -> R(y,x)) & E x. E y. (R(x,y) & !x=y)",
      "A x. (E>=2 y. R(x,y) <-> P(x))",
      "E<=1 x. E y. R(x,y) & E x. R(x,x)",
  };
  for (const char* body : bodies) {
    Formula f = so(std::string("SOE R:2. ") + body);
    Formula inner = foc(body);
    for (const auto& base : all_structures(Vocabulary{{"P", 1}}, 2)) {
      bool expected = false;
      for (const auto& rs : all_structures(Vocabulary{{"R", 2}}, 2)) {
        Structure full = base;
        full.set_relation("R", rs.relation("R"));
        expected = expected || foc_satisfies(full, {}, inner);
      }
      INFO(body);
      CHECK(sigma11_satisfies(base, {}, f, Sigma11Backend::kBrute) == expected);
      CHECK(sigma11_satisfies(base, {}, f, Sigma11Backend::kGround) == expected);
    }
  }
}

TEST_CASE("brute-force and grounding backends agree", "[semantics][property]") {
  std::mt19937_64 rng(17);
  const char* sentences[] = {
      "SOE S:1. SOE T:2. A x. ((S(x) -> E y. T(x,y)) & (E>=2 y. T(y,x) -> !S(x)))",
      "SOE S:1. (E>=2 x. S(x) & A x. (S(x) -> P(x)))",
      "SOE S:2. A x. (E>=1 y. S(x,y) & E<=1 y. S(x,y) & A y. (S(x,y) -> (R(x,y) | x=y)))",
      "SOE S:1. A x. A y. (R(x,y) -> (S(x) <-> !S(y)))",
      "SOE S:1. SOE T:1. A x. ((S(x) | T(x)) & !(S(x) & T(x)) & (P(x) -> S(x)))",
  };
  for (const char* text : sentences) {
    Formula f = so(text);
    for (int n = 1; n <= 3; ++n)
      for (int rep = 0; rep < 10; ++rep) {
        Structure s = random_structure(Vocabulary{{"P", 1}, {"R", 2}}, n, rng);
        INFO(text << " n=" << n);
        CHECK(sigma11_satisfies(s, {}, f, Sigma11Backend::kBrute) ==
              sigma11_satisfies(s, {}, f, Sigma11Backend::kGround));
      }
  }
}

TEST_CASE("CDCL solver agrees with truth tables on random CNF", "[semantics][sat]") {
  std::mt19937_64 rng(23);
  for (int inst = 0; inst < 400; ++inst) {
    int vars = 3 + static_cast<int>(rng() % 10);
    int clauses = static_cast<int>(rng() % (5 * vars));
    std::vector<std::vector<sat::Lit>> cnf;
    for (int i = 0; i < clauses; ++i) {
      std::vector<sat::Lit> cl;
      int len = 1 + static_cast<int>(rng() % 3);
      for (int j = 0; j < len; ++j) {
        int v = static_cast<int>(rng() % vars);
        cl.push_back(rng() % 2 ? sat::pos(v) : sat::neg(v));
      }
      cnf.push_back(cl);
    }
    auto holds = [&](std::uint32_t m) {
      for (const auto& cl : cnf) {
        bool any = false;
        for (sat::Lit l : cl) any = any || (((m >> sat::var_of(l)) & 1) != (l & 1u));
        if (!any) return false;
      }
      return true;
    };
    bool expected = false;
    for (std::uint32_t m = 0; m < (1u << vars) && !expected; ++m) expected = holds(m);

    sat::Solver solver;
    for (int v = 0; v < vars; ++v) solver.new_var();
    for (const auto& cl : cnf) solver.add_clause(cl);
    bool got = solver.solve();
    REQUIRE(got == expected);
    if (got) {
      std::uint32_t m = 0;
      for (int v = 0; v < vars; ++v)
        if (solver.value(v)) m |= 1u << v;
      CHECK(holds(m));
    }
  }
}

TEST_CASE("flatness of atom-free formulas", "[semantics][property]") {
  std::mt19937_64 rng(29);
  testing::GenConfig cfg;
  cfg.vocab = Vocabulary{{"P", 1}, {"R", 2}};
  std::vector<std::vector<Structure>> structs;
  for (int n = 1; n <= 3; ++n) structs.push_back(all_structures(cfg.vocab, n));
  for (int i = 0; i < 220; ++i) {
    Formula f = testing::random_formula(rng, cfg);
    int n = 1 + static_cast<int>(rng() % 3);
    const Structure& s = structs[n - 1][rng() % structs[n - 1].size()];
    EvalOptions opts = n <= 2 ? EvalOptions::reference() : EvalOptions{};
    opts.flat_fast_path = false;
    for (int rep = 0; rep < 4; ++rep) {
      Team x = random_team(n, {"x", "y"}, rng, 0.4);
      bool pointwise = true;
      for (std::size_t r = 0; r < x.size(); ++r) pointwise = pointwise && foc_satisfies(s, x.assignment(r), f);
      INFO(render(f));
      CHECK(team_satisfies(s, x, f, builtin_registry(), opts) == pointwise);
    }
  }
}

TEST_CASE("fast and reference evaluation agree", "[semantics][property]") {
  std::mt19937_64 rng(31);
  testing::GenConfig cfg;
  cfg.vocab = Vocabulary{{"P", 1}, {"R", 2}};
  cfg.builtins = {BuiltinKind::kDep, BuiltinKind::kConst, BuiltinKind::kInc, BuiltinKind::kExc,
                  BuiltinKind::kInd};
  cfg.max_depth = 3;
  auto structs = all_structures(cfg.vocab, 2);
  for (int i = 0; i < 250; ++i) {
    Formula f = testing::random_formula(rng, cfg);
    const Structure& s = structs[rng() % structs.size()];
    Evaluator fast(s);
    Evaluator nomemo(s, builtin_registry(), [] {
      EvalOptions o;
      o.memoize = false;
      return o;
    }());
    Evaluator ref(s, builtin_registry(), EvalOptions::reference());
    for (int rep = 0; rep < 3; ++rep) {
      Team x = random_team(2, {"x", "y"}, rng, 0.5);
      bool expected = ref.satisfies(x, f);
      INFO(render(f));
      CHECK(fast.satisfies(x, f) == expected);
      CHECK(nomemo.satisfies(x, f) == expected);
    }
  }
}

TEST_CASE("locality: values outside the free variables do not matter", "[semantics][property]") {
  std::mt19937_64 rng(37);
  testing::GenConfig cfg;
  cfg.vars = {"x", "y"};
  cfg.builtins = {BuiltinKind::kDep, BuiltinKind::kInc, BuiltinKind::kExc, BuiltinKind::kInd};
  auto structs = all_structures(cfg.vocab, 2);
  for (int i = 0; i < 200; ++i) {
    Formula f = testing::random_formula(rng, cfg);
    const Structure& s = structs[rng() % structs.size()];
    Team x = random_team(2, {"x", "y", "z"}, rng, 0.4);
    std::set<Variable> v = free_variables(f);
    v.insert("y");
    INFO(render(f));
    CHECK(team_satisfies(s, x, f) == team_satisfies(s, project_team(x, v), f));
  }
}

TEST_CASE("downward closure for dep, const and exc formulas", "[semantics][property]") {
  std::mt19937_64 rng(41);
  testing::GenConfig cfg;
  cfg.builtins = {BuiltinKind::kDep, BuiltinKind::kConst, BuiltinKind::kExc};
  auto structs = all_structures(cfg.vocab, 2);
  for (int i = 0; i < 150; ++i) {
    Formula f = testing::random_formula(rng, cfg);
    const Structure& s = structs[rng() % structs.size()];
    Evaluator ev(s);
    Team x = random_team(2, {"x", "y"}, rng, 0.6);
    if (!ev.satisfies(x, f)) continue;
    for (std::size_t drop = 0; drop < x.size(); ++drop) {
      std::vector<Tuple> rows = x.rows();
      rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(drop));
      INFO(render(f));
      CHECK(ev.satisfies(Team(x.vars(), rows), f));
    }
  }
}

TEST_CASE("universal formulas are closed under substructures", "[semantics][property]") {
  std::mt19937_64 rng(43);
  Vocabulary unary{{"P", 1}, {"Q", 1}};
  for (int i = 0; i < 60; ++i) {
    Formula f = testing::random_ea_sentence(rng, 0, 2, unary, {BuiltinKind::kDep, BuiltinKind::kExc});
    for (int n = 1; n <= 3; ++n) {
      for (const auto& s : all_structures(unary, n)) {
        if (!sentence_holds(s, f)) continue;
        for (std::uint32_t bm = 1; bm + 1 < (1u << n); ++bm) {
          ElementSet bset;
          for (int e = 0; e < n; ++e)
            if (bm >> e & 1) bset.insert(e);
          INFO(render(f));
          CHECK(sentence_holds(restrict_structure(s, bset), f));
        }
      }
    }
  }
}
