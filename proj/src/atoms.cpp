// SPDX-License-Identifier: Apache-2.0

#include "teamlogic/atoms.hpp"

#include <algorithm>
#include <sstream>

#include "teamlogic/error.hpp"
#include "teamlogic/semantics.hpp"

namespace teamlogic {

std::string placeholder(std::size_t j) { return "R" + std::to_string(j + 1); }

AtomDef make_atom_def(std::string name, std::vector<int> type, const std::string& definition) {
  if (name.empty()) throw InvalidArgument("atom name must be nonempty");
  if (type.empty()) throw InvalidArgument("atom type must be nonempty");
  Vocabulary placeholders;
  for (std::size_t j = 0; j < type.size(); ++j) {
    if (type[j] < 1) throw InvalidArgument("atom type entries must be positive");
    placeholders.add(placeholder(j), type[j]);
  }
  ParseOptions opts{Layer::kSigma11, &placeholders, nullptr};
  AtomDef def;
  def.name = std::move(name);
  def.type = std::move(type);
  def.definition = parse_formula(definition, opts);
  if (!free_variables(def.definition).empty()) {
    throw InvalidArgument("definition of @" + def.name + " must be a sentence");
  }
  def.k = static_cast<int>(all_variables(def.definition).size());
  return def;
}

AtomDef atom_def_from_json(const Json& j) {
  try {
    AtomDef def = make_atom_def(j.at("name").get<std::string>(), j.at("type").get<std::vector<int>>(),
                                j.at("definition").get<std::string>());
    if (j.contains("k") && j.at("k").get<int>() < def.k) {
      throw InvalidArgument("definition of @" + def.name + " uses more than k variables");
    }
    if (j.contains("k")) def.k = j.at("k").get<int>();
    if (j.contains("downward_closed")) def.downward_closed = j.at("downward_closed").get<bool>();
    if (j.contains("substructure_closed")) def.substructure_closed = j.at("substructure_closed").get<bool>();
    if (j.contains("universe_independent")) def.universe_independent = j.at("universe_independent").get<bool>();
    if (j.contains("probe")) {
      def.probe_tuples = j.at("probe").get<std::vector<VarTuple>>();
      if (def.probe_tuples.size() != def.type.size()) throw InvalidArgument("probe tuples do not match the type");
      for (std::size_t i = 0; i < def.type.size(); ++i) {
        if (static_cast<int>(def.probe_tuples[i].size()) != def.type[i]) {
          throw InvalidArgument("probe tuples do not match the type");
        }
      }
    }
    return def;
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed atom definition: ") + e.what());
  }
}

Json atom_def_to_json(const AtomDef& def) {
  Json j{{"name", def.name}, {"type", def.type}, {"k", def.k}, {"definition", render(def.definition)}};
  if (def.downward_closed) j["downward_closed"] = *def.downward_closed;
  if (def.substructure_closed) j["substructure_closed"] = *def.substructure_closed;
  if (def.universe_independent) j["universe_independent"] = *def.universe_independent;
  if (!def.probe_tuples.empty()) j["probe"] = def.probe_tuples;
  return j;
}

AtomRegistry AtomRegistry::with_builtins() {
  AtomRegistry r;
  for (auto& [kind, def] : builtin_definitions()) r.add(def);
  r.add(inc5_definition());
  return r;
}

void AtomRegistry::add(AtomDef def) {
  std::string name = def.name;
  defs_[name] = std::move(def);
}

const AtomDef* AtomRegistry::find(const std::string& name) const {
  auto it = defs_.find(name);
  return it == defs_.end() ? nullptr : &it->second;
}

const AtomDef& AtomRegistry::at(const std::string& name) const {
  const AtomDef* d = find(name);
  if (!d) throw InvalidArgument("unregistered atom @" + name);
  return *d;
}

AtomTable AtomRegistry::signatures() const {
  AtomTable t;
  for (const auto& [name, def] : defs_) t.emplace(name, def.signature());
  return t;
}

const AtomRegistry& builtin_registry() {
  static const AtomRegistry registry = AtomRegistry::with_builtins();
  return registry;
}

namespace {

AtomDef builtin(const std::string& name, std::vector<int> type, const std::string& text,
                std::vector<VarTuple> probe, bool downward, bool substructure) {
  AtomDef d = make_atom_def(name, std::move(type), text);
  d.probe_tuples = std::move(probe);
  d.downward_closed = downward;
  d.substructure_closed = substructure;
  d.universe_independent = true;
  return d;
}

}  // namespace

std::map<BuiltinKind, AtomDef> builtin_definitions() {
  std::map<BuiltinKind, AtomDef> out;
  out.emplace(BuiltinKind::kConst, builtin("const", {1}, "E<=1 x. R1(x)", {{"x"}}, true, true));
  out.emplace(BuiltinKind::kDep, builtin("dep", {2}, "A x. E<=1 y. R1(x,y)", {{"x", "y"}}, true, true));
  out.emplace(BuiltinKind::kInc, builtin("inc", {2, 2}, "A x. A y. (R1(x,y) -> R2(x,y))",
                                         {{"x", "x"}, {"y", "y"}}, false, false));
  out.emplace(BuiltinKind::kExc, builtin("exc", {2, 2}, "A x. A y. (R1(x,y) -> !R2(x,y))",
                                         {{"x", "x"}, {"y", "y"}}, true, true));
  out.emplace(BuiltinKind::kInd, builtin("ind", {2}, "A x. A y. (((E y. R1(x,y)) & E x. R1(x,y)) -> R1(x,y))",
                                         {{"x", "y"}}, false, false));
  return out;
}

AtomDef inc5_definition() {
  return builtin("inc5", {5, 5},
                 "A x1. A x2. A x3. A x4. A x5. (R1(x1,x2,x3,x4,x5) -> R2(x1,x2,x3,x4,x5))",
                 {{"x", "x", "x", "x", "x"}, {"y", "y", "y", "y", "y"}}, false, false);
}

bool eval_builtin_rows(BuiltinKind kind, const std::vector<int>& lengths, const std::vector<Tuple>& rows) {
  auto slice = [](const Tuple& r, int from, int len) {
    return Tuple(r.begin() + from, r.begin() + from + len);
  };
  switch (kind) {
    case BuiltinKind::kDep:
    case BuiltinKind::kConst: {
      int m = lengths.at(0);
      std::map<Tuple, Element> seen;
      for (const auto& r : rows) {
        auto [it, inserted] = seen.emplace(slice(r, 0, m), r[m]);
        if (!inserted && it->second != r[m]) return false;
      }
      return true;
    }
    case BuiltinKind::kInc:
    case BuiltinKind::kExc: {
      int m = lengths.at(0);
      if (lengths.at(1) != m) throw InvalidArgument("inclusion/exclusion tuples differ in length");
      std::set<Tuple> right;
      for (const auto& r : rows) right.insert(slice(r, m, m));
      for (const auto& r : rows) {
        bool found = right.count(slice(r, 0, m)) != 0;
        if (found != (kind == BuiltinKind::kInc)) return false;
      }
      return true;
    }
    case BuiltinKind::kInd: {
      int zl = lengths.at(0);
      int xl = lengths.at(1);
      int yl = lengths.at(2);
      struct Group {
        std::set<Tuple> xs, ys;
        std::set<std::pair<Tuple, Tuple>> pairs;
      };
      std::map<Tuple, Group> groups;
      for (const auto& r : rows) {
        Group& g = groups[slice(r, 0, zl)];
        Tuple x = slice(r, zl, xl);
        Tuple y = slice(r, zl + xl, yl);
        g.xs.insert(x);
        g.ys.insert(y);
        g.pairs.emplace(std::move(x), std::move(y));
      }
      for (const auto& [z, g] : groups) {
        if (g.pairs.size() != g.xs.size() * g.ys.size()) return false;
      }
      return true;
    }
  }
  return false;
}

bool eval_builtin(const Team& team, BuiltinKind kind, const std::vector<VarTuple>& tuples) {
  std::vector<int> lengths;
  std::vector<std::size_t> cols;
  for (const auto& t : tuples) {
    lengths.push_back(static_cast<int>(t.size()));
    for (const auto& v : t) cols.push_back(team.column(v));
  }
  std::vector<Tuple> rows;
  for (const auto& r : team.rows()) {
    Tuple t;
    for (auto c : cols) t.push_back(r[c]);
    rows.push_back(std::move(t));
  }
  return eval_builtin_rows(kind, lengths, rows);
}

bool eval_generalized_relations(int domain_size, const AtomDef& def, const std::vector<Relation>& rels,
                                Sigma11Backend backend) {
  if (rels.size() != def.type.size()) throw InvalidArgument("wrong number of arguments for @" + def.name);
  Structure s(domain_size);
  for (std::size_t j = 0; j < rels.size(); ++j) {
    if (rels[j].arity() != def.type[j]) throw InvalidArgument("argument arity mismatch for @" + def.name);
    s.set_relation(placeholder(j), rels[j]);
  }
  return sigma11_satisfies(s, {}, def.definition, backend);
}

namespace {

std::vector<Relation> relations_of(int domain_size, const Team& team, const AtomDef& def,
                                   const std::vector<VarTuple>& tuples) {
  if (tuples.size() != def.type.size()) throw InvalidArgument("wrong number of tuples for @" + def.name);
  std::vector<Relation> rels;
  for (std::size_t j = 0; j < tuples.size(); ++j) {
    if (static_cast<int>(tuples[j].size()) != def.type[j]) {
      throw InvalidArgument("tuple " + std::to_string(j + 1) + " of @" + def.name + " has the wrong length");
    }
    Relation r(def.type[j], domain_size);
    for (const auto& t : rel_of(team, tuples[j])) r.insert(t);
    rels.push_back(std::move(r));
  }
  return rels;
}

}  // namespace

bool eval_generalized(const Structure& s, const Team& team, const AtomDef& def,
                      const std::vector<VarTuple>& tuples) {
  return eval_generalized_relations(s.size(), def, relations_of(s.size(), team, def, tuples),
                                    Sigma11Backend::kAuto);
}

// ---------------------------------------------------------------------------
// Property probes.

namespace {

std::vector<VarTuple> probe_application(const AtomDef& def) {
  if (!def.probe_tuples.empty()) return def.probe_tuples;
  std::vector<VarTuple> out;
  int next = 1;
  for (int len : def.type) {
    VarTuple t;
    for (int i = 0; i < len; ++i) t.push_back("v" + std::to_string(next++));
    out.push_back(std::move(t));
  }
  return out;
}

std::string describe_team(const Team& team, int domain_size) {
  auto names = default_element_names(domain_size);
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < team.size(); ++i) {
    if (i) os << ", ";
    os << "(";
    for (std::size_t c = 0; c < team.vars().size(); ++c) {
      if (c) os << ",";
      os << team.vars()[c] << "=" << names[team.rows()[i][c]];
    }
    os << ")";
  }
  os << "}";
  return os.str();
}

Json team_json(const Team& team, int domain_size) { return team_to_json(team, Structure(domain_size)); }

class Prober {
 public:
  Prober(const AtomDef& def, std::vector<VarTuple> tuples) : def_(def), tuples_(std::move(tuples)) {}

  bool value(int n, const Team& team) {
    std::vector<Relation> rels = relations_of(n, team, def_, tuples_);
    auto key = std::make_pair(n, rels);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    bool v = eval_generalized_relations(n, def_, rels, Sigma11Backend::kAuto);
    cache_.emplace(std::move(key), v);
    return v;
  }

  // Fresh evaluation bypassing the cache.
  bool verify(int n, const Team& team) const { return eval_generalized(Structure(n), team, def_, tuples_); }

 private:
  const AtomDef& def_;
  std::vector<VarTuple> tuples_;
  std::map<std::pair<int, std::vector<Relation>>, bool> cache_;
};

}  // namespace

ProbeReport probe_properties(const AtomDef& def, int max_size, int max_team_bits) {
  if (max_size < 1) throw InvalidArgument("probe size must be positive");
  ProbeReport report;
  report.atom = def.name;
  report.tuples = probe_application(def);
  std::set<Variable> vars;
  for (const auto& t : report.tuples) vars.insert(t.begin(), t.end());
  Prober prober(def, report.tuples);

  for (int n = 1; n <= max_size; ++n) {
    TeamSpace space(n, vars);
    if (static_cast<int>(space.row_count()) > max_team_bits) {
      throw ResourceLimit("probing @" + def.name + " at size " + std::to_string(n) + " needs 2^" +
                          std::to_string(space.row_count()) + " teams");
    }
    const std::uint64_t count = space.count();
    for (std::uint64_t i = 0; i < count; ++i) {
      Team team = space.at(i);
      bool holds = prober.value(n, team);

      if (holds && report.downward_closed.holds) {
        for (std::size_t bit = 0; bit < space.row_count(); ++bit) {
          if (!((i >> bit) & 1u)) continue;
          Team sub = space.at(i & ~(std::uint64_t{1} << bit));
          if (!prober.value(n, sub) && prober.verify(n, team) && !prober.verify(n, sub)) {
            report.downward_closed.holds = false;
            report.downward_closed.witness = "size " + std::to_string(n) + ": X=" + describe_team(team, n) +
                                             " satisfies, Y=" + describe_team(sub, n) + " does not";
            report.downward_closed.witness_json = {{"size", n},
                                                   {"team", team_json(team, n)},
                                                   {"subteam", team_json(sub, n)}};
            break;
          }
        }
      }

      if (holds && report.substructure_closed.holds) {
        for (std::uint64_t bmask = 1; bmask + 1 < (std::uint64_t{1} << n); ++bmask) {
          ElementSet b;
          for (int e = 0; e < n; ++e) {
            if ((bmask >> e) & 1u) b.insert(e);
          }
          Team restricted = reindex_team(restrict_team(team, b), b);
          int m = static_cast<int>(b.size());
          if (!prober.value(m, restricted) && prober.verify(n, team) && !prober.verify(m, restricted)) {
            report.substructure_closed.holds = false;
            auto names = default_element_names(n);
            std::string bs;
            for (Element e : b) bs += (bs.empty() ? "" : ",") + names[e];
            report.substructure_closed.witness = "size " + std::to_string(n) + ": X=" + describe_team(team, n) +
                                                 " satisfies, restriction to B={" + bs + "} does not";
            Json bj = Json::array();
            for (Element e : b) bj.push_back(names[e]);
            report.substructure_closed.witness_json = {{"size", n}, {"team", team_json(team, n)}, {"B", bj}};
            break;
          }
        }
      }

      if (n < max_size && report.universe_independent.holds) {
        bool bigger = prober.value(n + 1, team);
        if (bigger != holds && prober.verify(n, team) == holds && prober.verify(n + 1, team) == bigger) {
          report.universe_independent.holds = false;
          report.universe_independent.witness = "X=" + describe_team(team, n) + " gives " +
                                                (holds ? "true" : "false") + " over " + std::to_string(n) +
                                                " elements and " + (bigger ? "true" : "false") + " over " +
                                                std::to_string(n + 1);
          report.universe_independent.witness_json = {
              {"size", n}, {"larger_size", n + 1}, {"team", team_json(team, n)}};
        }
      }
    }
    if (report.downward_closed.holds) report.downward_closed.checked_up_to = n;
    if (report.substructure_closed.holds) report.substructure_closed.checked_up_to = n;
    if (report.universe_independent.holds && n < max_size) report.universe_independent.checked_up_to = n + 1;
  }
  if (max_size == 1 && report.universe_independent.holds) report.universe_independent.checked_up_to = 1;
  return report;
}

Json probe_report_to_json(const ProbeReport& r) {
  auto verdict = [](const PropertyVerdict& v) {
    Json j{{"holds", v.holds}, {"checked_up_to", v.checked_up_to}};
    if (!v.holds) {
      j["witness"] = v.witness;
      j["counterexample"] = v.witness_json;
    }
    return j;
  };
  return Json{{"atom", r.atom},
              {"tuples", r.tuples},
              {"downward_closed", verdict(r.downward_closed)},
              {"substructure_closed", verdict(r.substructure_closed)},
              {"universe_independent", verdict(r.universe_independent)}};
}

// ---------------------------------------------------------------------------
// Two-variable normalization of built-in atoms.

namespace {

Formula trivially_true(const Variable& v) { return exists(v, eq(v, v)); }

VarTuple dedup(const VarTuple& t) {
  VarTuple out;
  for (const auto& v : t) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

class Normalizer {
 public:
  explicit Normalizer(std::set<Variable> vars) : vars_(std::move(vars)) {
    if (vars_.size() > 2) throw InvalidArgument("normalization needs a two-variable formula");
    for (const auto& v : vars_) some_var_ = v;
  }

  Formula rewrite(const Formula& f) const {
    switch (f->kind) {
      case NodeKind::kAnd: return conj(rewrite(f->lhs), rewrite(f->rhs));
      case NodeKind::kOr: return disj(rewrite(f->lhs), rewrite(f->rhs));
      case NodeKind::kExists: return exists(f->var, rewrite(f->lhs));
      case NodeKind::kForall: return forall(f->var, rewrite(f->lhs));
      case NodeKind::kBuiltinAtom: return atom(f);
      default: return f;
    }
  }

 private:
  Formula atom(const Formula& f) const {
    switch (f->builtin) {
      case BuiltinKind::kDep:
      case BuiltinKind::kConst: return dep(f->tuples[0], f->tuples[1][0]);
      case BuiltinKind::kInc: return inc(f->tuples[0], f->tuples[1]);
      case BuiltinKind::kExc: return exc(f->tuples[0], f->tuples[1]);
      case BuiltinKind::kInd: return ind(f->tuples[0], f->tuples[1], f->tuples[2]);
    }
    return f;
  }

  static Formula dep(const VarTuple& xs, const Variable& y) {
    VarTuple det = dedup(xs);
    if (std::find(det.begin(), det.end(), y) != det.end()) return eq(y, y);
    if (det.empty()) return gen_atom("const", {{y}});
    return gen_atom("dep", {{det[0], y}});
  }

  // Column pairs (left, right) deduplicated, in order of first occurrence.
  static std::vector<std::pair<Variable, Variable>> columns(const VarTuple& l, const VarTuple& r) {
    std::vector<std::pair<Variable, Variable>> cols;
    for (std::size_t i = 0; i < l.size(); ++i) {
      std::pair<Variable, Variable> c{l[i], r[i]};
      if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
    }
    return cols;
  }

  // Keeps one column per right-hand variable; reports whether some right
  // variable received two distinct left variables.
  static std::vector<std::pair<Variable, Variable>> per_right(
      const std::vector<std::pair<Variable, Variable>>& cols, bool& merged) {
    std::vector<std::pair<Variable, Variable>> out;
    merged = false;
    for (const auto& c : cols) {
      auto it = std::find_if(out.begin(), out.end(), [&](const auto& o) { return o.second == c.second; });
      if (it == out.end()) {
        out.push_back(c);
      } else if (it->first != c.first) {
        merged = true;
      }
    }
    return out;
  }

  static std::pair<VarTuple, VarTuple> padded(const std::vector<std::pair<Variable, Variable>>& cols) {
    VarTuple l, r;
    for (const auto& c : cols) {
      l.push_back(c.first);
      r.push_back(c.second);
    }
    if (l.size() == 1) {
      l.push_back(l[0]);
      r.push_back(r[0]);
    }
    return {l, r};
  }

  Formula inc(const VarTuple& l, const VarTuple& r) const {
    bool merged = false;
    auto cols = per_right(columns(l, r), merged);
    Formula side = merged ? eq(some_pair().first, some_pair().second) : nullptr;
    bool identity = std::all_of(cols.begin(), cols.end(), [](const auto& c) { return c.first == c.second; });
    Formula core;
    if (identity) {
      core = side ? nullptr : eq(l[0], l[0]);
    } else {
      auto [pl, pr] = padded(cols);
      core = gen_atom("inc", {pl, pr});
    }
    if (side && core) return conj(side, core);
    return side ? side : core;
  }

  Formula exc(const VarTuple& l, const VarTuple& r) const {
    bool merged = false;
    auto cols = per_right(columns(l, r), merged);
    if (merged) return neq(some_pair().first, some_pair().second);
    auto [pl, pr] = padded(cols);
    return gen_atom("exc", {pl, pr});
  }

  Formula ind(const VarTuple& given, const VarTuple& lhs, const VarTuple& rhs) const {
    std::set<Variable> z(given.begin(), given.end());
    std::set<Variable> xs(lhs.begin(), lhs.end());
    std::set<Variable> ys(rhs.begin(), rhs.end());
    if (xs.empty() || ys.empty() || z.size() == 2) return trivially_true(some_var_);
    for (const auto& v : z) {
      xs.erase(v);
      ys.erase(v);
    }
    if (xs.empty() || ys.empty()) return trivially_true(some_var_);
    if (!z.empty()) {
      // Only the other variable is left on both sides: u ⊥_w u.
      const Variable& w = *z.begin();
      const Variable& u = *xs.begin();
      return gen_atom("dep", {{w, u}});
    }
    if (xs.size() == 2 && ys.size() == 2) {
      return conj(gen_atom("const", {{*xs.begin()}}), gen_atom("const", {{*xs.rbegin()}}));
    }
    if (xs.size() == 2) return gen_atom("const", {{*ys.begin()}});
    if (ys.size() == 2) return gen_atom("const", {{*xs.begin()}});
    if (*xs.begin() == *ys.begin()) return gen_atom("const", {{*xs.begin()}});
    return gen_atom("ind", {{*xs.begin(), *ys.begin()}});
  }

  std::pair<Variable, Variable> some_pair() const { return {*vars_.begin(), *vars_.rbegin()}; }

  std::set<Variable> vars_;
  Variable some_var_ = "x";
};

}  // namespace

Formula normalize_builtin(const Formula& f) { return Normalizer(all_variables(f)).rewrite(f); }

}  // namespace teamlogic
