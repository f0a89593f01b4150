// SPDX-License-Identifier: Apache-2.0

#include "teamlogic/syntax.hpp"

#include <algorithm>
#include <functional>

#include "teamlogic/error.hpp"

namespace teamlogic {

Vocabulary::Vocabulary(std::initializer_list<std::pair<const std::string, int>> init) {
  for (const auto& [name, arity] : init) add(name, arity);
}

void Vocabulary::add(const std::string& name, int arity) {
  if (name.empty()) throw InvalidArgument("empty relation symbol");
  if (arity < 1) throw InvalidArgument("relation " + name + " must have arity >= 1");
  auto [it, inserted] = arities_.emplace(name, arity);
  if (!inserted && it->second != arity) {
    throw InvalidArgument("relation " + name + " used with arities " +
                          std::to_string(it->second) + " and " + std::to_string(arity));
  }
}

std::optional<int> Vocabulary::arity(const std::string& name) const {
  auto it = arities_.find(name);
  if (it == arities_.end()) return std::nullopt;
  return it->second;
}

void Vocabulary::check_user_names() const {
  for (const auto& [name, arity] : arities_) {
    if (name.front() == '_') {
      throw InvalidArgument("relation symbol " + name + " uses the reserved '_' prefix");
    }
  }
}

std::string_view builtin_name(BuiltinKind kind) {
  switch (kind) {
    case BuiltinKind::kDep: return "dep";
    case BuiltinKind::kConst: return "const";
    case BuiltinKind::kInc: return "inc";
    case BuiltinKind::kExc: return "exc";
    case BuiltinKind::kInd: return "ind";
  }
  return "?";
}

namespace {

Formula make(Node node) { return std::make_shared<const Node>(std::move(node)); }

Formula binary(NodeKind kind, Formula a, Formula b) {
  if (!a || !b) throw InvalidArgument("null subformula");
  Node n{.kind = kind};
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return make(std::move(n));
}

Formula quantifier(NodeKind kind, Variable v, Formula body, int count = 0) {
  if (!body) throw InvalidArgument("null subformula");
  if (v.empty()) throw InvalidArgument("empty variable name");
  Node n{.kind = kind};
  n.var = std::move(v);
  n.count = count;
  n.lhs = std::move(body);
  return make(std::move(n));
}

}  // namespace

Formula rel(std::string symbol, VarTuple args, bool positive) {
  if (args.empty()) throw InvalidArgument("relation literal " + symbol + " needs arguments");
  Node n{.kind = NodeKind::kRel, .positive = positive, .symbol = std::move(symbol)};
  n.args = std::move(args);
  return make(std::move(n));
}

Formula neg_rel(std::string symbol, VarTuple args) { return rel(std::move(symbol), std::move(args), false); }

Formula eq(Variable a, Variable b, bool positive) {
  Node n{.kind = NodeKind::kEq, .positive = positive};
  n.args = {std::move(a), std::move(b)};
  return make(std::move(n));
}

Formula neq(Variable a, Variable b) { return eq(std::move(a), std::move(b), false); }

Formula conj(Formula a, Formula b) { return binary(NodeKind::kAnd, std::move(a), std::move(b)); }
Formula disj(Formula a, Formula b) { return binary(NodeKind::kOr, std::move(a), std::move(b)); }

Formula conj(const std::vector<Formula>& parts) {
  if (parts.empty()) throw InvalidArgument("empty conjunction");
  Formula out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out = conj(out, parts[i]);
  return out;
}

Formula disj(const std::vector<Formula>& parts) {
  if (parts.empty()) throw InvalidArgument("empty disjunction");
  Formula out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out = disj(out, parts[i]);
  return out;
}

Formula negate(Formula body) {
  if (!body) throw InvalidArgument("null subformula");
  Node n{.kind = NodeKind::kNot};
  n.lhs = std::move(body);
  return make(std::move(n));
}

Formula implies(Formula a, Formula b) { return binary(NodeKind::kImplies, std::move(a), std::move(b)); }
Formula iff(Formula a, Formula b) { return binary(NodeKind::kIff, std::move(a), std::move(b)); }
Formula exists(Variable v, Formula body) { return quantifier(NodeKind::kExists, std::move(v), std::move(body)); }
Formula forall(Variable v, Formula body) { return quantifier(NodeKind::kForall, std::move(v), std::move(body)); }

Formula exists(const VarTuple& vs, Formula body) {
  for (auto it = vs.rbegin(); it != vs.rend(); ++it) body = exists(*it, std::move(body));
  return body;
}

Formula forall(const VarTuple& vs, Formula body) {
  for (auto it = vs.rbegin(); it != vs.rend(); ++it) body = forall(*it, std::move(body));
  return body;
}

Formula count_exists(int threshold, Variable v, Formula body) {
  if (threshold < 0) throw InvalidArgument("counting threshold must be nonnegative");
  return quantifier(NodeKind::kCountExists, std::move(v), std::move(body), threshold);
}

Formula count_at_most(int bound, Variable v, Formula body) {
  return negate(count_exists(bound + 1, std::move(v), std::move(body)));
}

namespace {

Formula atom(BuiltinKind kind, std::vector<VarTuple> tuples) {
  Node n{.kind = NodeKind::kBuiltinAtom, .builtin = kind};
  n.tuples = std::move(tuples);
  return make(std::move(n));
}

}  // namespace

Formula dep_atom(VarTuple determinants, Variable dependent) {
  return atom(BuiltinKind::kDep, {std::move(determinants), {std::move(dependent)}});
}

Formula inc_atom(VarTuple lhs, VarTuple rhs) {
  if (lhs.empty() || lhs.size() != rhs.size()) {
    throw InvalidArgument("inclusion atom needs two nonempty tuples of equal length");
  }
  return atom(BuiltinKind::kInc, {std::move(lhs), std::move(rhs)});
}

Formula exc_atom(VarTuple lhs, VarTuple rhs) {
  if (lhs.empty() || lhs.size() != rhs.size()) {
    throw InvalidArgument("exclusion atom needs two nonempty tuples of equal length");
  }
  return atom(BuiltinKind::kExc, {std::move(lhs), std::move(rhs)});
}

Formula ind_atom(VarTuple given, VarTuple lhs, VarTuple rhs) {
  return atom(BuiltinKind::kInd, {std::move(given), std::move(lhs), std::move(rhs)});
}

Formula gen_atom(std::string name, std::vector<VarTuple> tuples) {
  if (tuples.empty()) throw InvalidArgument("generalized atom @" + name + " needs a tuple");
  for (const auto& t : tuples) {
    if (t.empty()) throw InvalidArgument("generalized atom @" + name + " has an empty tuple");
  }
  Node n{.kind = NodeKind::kGenAtom, .symbol = std::move(name)};
  n.tuples = std::move(tuples);
  return make(std::move(n));
}

Formula so_exists(std::string relation, int arity, Formula body) {
  if (arity < 1) throw InvalidArgument("second-order variable needs arity >= 1");
  if (!body) throw InvalidArgument("null subformula");
  Node n{.kind = NodeKind::kSOExists, .symbol = std::move(relation), .count = arity};
  n.lhs = std::move(body);
  return make(std::move(n));
}

bool equal(const Formula& a, const Formula& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->positive != b->positive || a->symbol != b->symbol ||
      a->args != b->args || a->var != b->var || a->count != b->count ||
      a->tuples != b->tuples) {
    return false;
  }
  if (a->kind == NodeKind::kBuiltinAtom && a->builtin != b->builtin) return false;
  return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
}

std::size_t formula_size(const Formula& f) {
  if (!f) return 0;
  return 1 + formula_size(f->lhs) + formula_size(f->rhs);
}

namespace {

bool is_quantifier(NodeKind k) {
  return k == NodeKind::kExists || k == NodeKind::kForall || k == NodeKind::kCountExists;
}

void layer_error(const std::string& what, Layer layer) {
  static const char* names[] = {"team", "foc", "sigma11"};
  throw InvalidArgument(what + " is not allowed in the " + names[static_cast<int>(layer)] +
                        " layer");
}

void check_body(const Formula& f, Layer layer, bool in_prefix) {
  switch (f->kind) {
    case NodeKind::kRel:
    case NodeKind::kEq:
      return;
    case NodeKind::kAnd:
    case NodeKind::kOr:
      check_body(f->lhs, layer, false);
      check_body(f->rhs, layer, false);
      return;
    case NodeKind::kNot:
    case NodeKind::kImplies:
    case NodeKind::kIff:
      if (layer == Layer::kTeam) layer_error("negation, implication or biconditional", layer);
      check_body(f->lhs, layer, false);
      if (f->rhs) check_body(f->rhs, layer, false);
      return;
    case NodeKind::kExists:
    case NodeKind::kForall:
      check_body(f->lhs, layer, false);
      return;
    case NodeKind::kCountExists:
      if (layer == Layer::kTeam) layer_error("counting quantifier", layer);
      check_body(f->lhs, layer, false);
      return;
    case NodeKind::kBuiltinAtom:
    case NodeKind::kGenAtom:
      if (layer != Layer::kTeam) layer_error("dependency atom", layer);
      return;
    case NodeKind::kSOExists:
      if (layer != Layer::kSigma11 || !in_prefix) {
        layer_error("second-order quantifier outside the leading prefix", layer);
      }
      check_body(f->lhs, layer, true);
      return;
  }
}

void collect_free(const Formula& f, std::multiset<Variable>& bound, std::set<Variable>& out) {
  auto add = [&](const Variable& v) {
    if (bound.count(v) == 0) out.insert(v);
  };
  switch (f->kind) {
    case NodeKind::kRel:
    case NodeKind::kEq:
      for (const auto& v : f->args) add(v);
      return;
    case NodeKind::kBuiltinAtom:
    case NodeKind::kGenAtom:
      for (const auto& t : f->tuples)
        for (const auto& v : t) add(v);
      return;
    case NodeKind::kExists:
    case NodeKind::kForall:
    case NodeKind::kCountExists: {
      auto it = bound.insert(f->var);
      collect_free(f->lhs, bound, out);
      bound.erase(it);
      return;
    }
    default:
      if (f->lhs) collect_free(f->lhs, bound, out);
      if (f->rhs) collect_free(f->rhs, bound, out);
      return;
  }
}

void preorder(const Formula& f, const std::function<void(const Node&)>& visit) {
  if (!f) return;
  visit(*f);
  preorder(f->lhs, visit);
  preorder(f->rhs, visit);
}

void collect_relations(const Formula& f, std::multiset<std::string>& so_bound, Vocabulary& out) {
  if (!f) return;
  if (f->kind == NodeKind::kRel) {
    if (so_bound.count(f->symbol) == 0) out.add(f->symbol, static_cast<int>(f->args.size()));
    return;
  }
  if (f->kind == NodeKind::kSOExists) {
    auto it = so_bound.insert(f->symbol);
    collect_relations(f->lhs, so_bound, out);
    so_bound.erase(it);
    return;
  }
  collect_relations(f->lhs, so_bound, out);
  collect_relations(f->rhs, so_bound, out);
}

}  // namespace

void check_layer(const Formula& f, Layer layer) {
  if (!f) throw InvalidArgument("null formula");
  check_body(f, layer, true);
}

std::set<Variable> free_variables(const Formula& f) {
  std::set<Variable> out;
  std::multiset<Variable> bound;
  collect_free(f, bound, out);
  return out;
}

std::set<Variable> all_variables(const Formula& f) {
  std::set<Variable> out;
  preorder(f, [&](const Node& n) {
    for (const auto& v : n.args) out.insert(v);
    for (const auto& t : n.tuples) out.insert(t.begin(), t.end());
    if (is_quantifier(n.kind)) out.insert(n.var);
  });
  return out;
}

VarTuple variables_in_order(const Formula& f) {
  VarTuple out;
  auto add = [&](const Variable& v) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  preorder(f, [&](const Node& n) {
    if (is_quantifier(n.kind)) add(n.var);
    for (const auto& v : n.args) add(v);
    for (const auto& t : n.tuples)
      for (const auto& v : t) add(v);
  });
  return out;
}

Vocabulary relation_symbols(const Formula& f) {
  Vocabulary out;
  std::multiset<std::string> so_bound;
  collect_relations(f, so_bound, out);
  return out;
}

std::set<std::string> atom_names(const Formula& f) {
  std::set<std::string> out;
  preorder(f, [&](const Node& n) {
    if (n.kind == NodeKind::kGenAtom) out.insert(n.symbol);
  });
  return out;
}

bool has_atoms(const Formula& f) {
  bool found = false;
  preorder(f, [&](const Node& n) {
    if (n.kind == NodeKind::kBuiltinAtom || n.kind == NodeKind::kGenAtom) found = true;
  });
  return found;
}

PrefixClass prefix_class(const Formula& f) {
  PrefixClass pc;
  Formula cur = f;
  while (cur->kind == NodeKind::kExists) {
    ++pc.exists;
    cur = cur->lhs;
  }
  while (cur->kind == NodeKind::kForall) {
    ++pc.forall;
    cur = cur->lhs;
  }
  bool quantifier_free = true;
  preorder(cur, [&](const Node& n) {
    if (is_quantifier(n.kind) || n.kind == NodeKind::kSOExists) quantifier_free = false;
  });
  if (!quantifier_free) return PrefixClass{};
  pc.ea = true;
  return pc;
}

bool is_two_variable(const Formula& f) { return all_variables(f).size() <= 2; }

Formula rename_relation(const Formula& f, const std::string& from, const std::string& to) {
  if (!f) return f;
  Node n = *f;
  if ((n.kind == NodeKind::kRel || n.kind == NodeKind::kSOExists) && n.symbol == from) n.symbol = to;
  n.lhs = rename_relation(f->lhs, from, to);
  n.rhs = rename_relation(f->rhs, from, to);
  return std::make_shared<const Node>(std::move(n));
}

Formula rename_variables(const Formula& f, const std::map<Variable, Variable>& mapping) {
  if (!f) return f;
  auto map_var = [&](Variable& v) {
    auto it = mapping.find(v);
    if (it != mapping.end()) v = it->second;
  };
  Node n = *f;
  for (auto& v : n.args) map_var(v);
  for (auto& t : n.tuples)
    for (auto& v : t) map_var(v);
  if (is_quantifier(n.kind)) map_var(n.var);
  n.lhs = rename_variables(f->lhs, mapping);
  n.rhs = rename_variables(f->rhs, mapping);
  return std::make_shared<const Node>(std::move(n));
}

}  // namespace teamlogic
