// SPDX-License-Identifier: Apache-2.0

#include "teamlogic/translate.hpp"

#include <algorithm>

#include "teamlogic/error.hpp"
#include "teamlogic/semantics.hpp"

namespace teamlogic {

FreshSymbolSource::FreshSymbolSource(const Vocabulary& taken) {
  for (const auto& [name, arity] : taken.symbols()) taken_.insert(name);
}

std::string FreshSymbolSource::next(const std::string& base) {
  int& c = counters_[base];
  std::string name;
  do {
    name = "_" + base + std::to_string(c++);
  } while (taken_.count(name) != 0);
  taken_.insert(name);
  emitted_.push_back(name);
  return name;
}

VarTuple default_variables(const Formula& f, int k) {
  if (k < 1) throw InvalidArgument("k must be positive");
  std::set<Variable> used = all_variables(f);
  if (static_cast<int>(used.size()) > k) {
    throw InvalidArgument("formula uses " + std::to_string(used.size()) + " variables, more than k=" +
                          std::to_string(k));
  }
  VarTuple indexed;
  for (int i = 1; i <= k; ++i) indexed.push_back("x" + std::to_string(i));
  if (std::all_of(used.begin(), used.end(),
                  [&](const Variable& v) { return std::find(indexed.begin(), indexed.end(), v) != indexed.end(); })) {
    return indexed;
  }
  VarTuple out(used.begin(), used.end());
  for (const char* extra : {"x", "y", "z", "u", "v", "w"}) {
    if (static_cast<int>(out.size()) == k) break;
    if (used.count(extra) == 0) out.push_back(extra);
  }
  for (int i = 1; static_cast<int>(out.size()) < k; ++i) {
    Variable v = "x" + std::to_string(i);
    if (used.count(v) == 0) out.push_back(v);
  }
  return out;
}

namespace {

VarTuple dedup(const VarTuple& t) {
  VarTuple out;
  for (const auto& v : t)
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  return out;
}

VarTuple fresh_vars(std::size_t n) {
  VarTuple out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back("v" + std::to_string(i));
  return out;
}

std::string list(const VarTuple& vs) {
  std::string s;
  for (std::size_t i = 0; i < vs.size(); ++i) s += (i ? "," : "") + vs[i];
  return s;
}

std::string forall_prefix(const VarTuple& vs) {
  std::string s;
  for (const auto& v : vs) s += "A " + v + ". ";
  return s;
}

std::string exists_prefix(const VarTuple& vs) {
  std::string s;
  for (const auto& v : vs) s += "E " + v + ". ";
  return s;
}

class Lowering {
 public:
  Lowering(int k, AtomRegistry& atoms, Variable truth) : k_(k), atoms_(atoms), truth_(std::move(truth)) {}

  Formula rewrite(const Formula& f) {
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
  Formula atom(const Formula& f) {
    const auto& t = f->tuples;
    switch (f->builtin) {
      case BuiltinKind::kDep:
      case BuiltinKind::kConst: return dep(t[0], t[1][0]);
      case BuiltinKind::kInc: return inc(t[0], t[1]);
      case BuiltinKind::kExc: return exc(t[0], t[1]);
      case BuiltinKind::kInd: return ind(t[0], t[1], t[2]);
    }
    return f;
  }

  Formula truth(const VarTuple& hint) const {
    const Variable& v = hint.empty() ? truth_ : hint.front();
    return eq(v, v);
  }

  Formula dep(const VarTuple& xs, const Variable& y) {
    VarTuple det = dedup(xs);
    if (std::find(det.begin(), det.end(), y) != det.end()) return eq(y, y);
    VarTuple args = det;
    args.push_back(y);
    if (det.empty()) return gen_atom("const", {{y}});
    if (det.size() == 1) return gen_atom("dep", {args});
    std::string name = "_dep" + std::to_string(args.size());
    if (!atoms_.find(name)) {
      VarTuple v = fresh_vars(args.size());
      VarTuple head(v.begin(), v.end() - 1);
      atoms_.add(make_atom_def(name, {static_cast<int>(args.size())},
                               forall_prefix(head) + "E<=1 " + v.back() + ". R1(" + list(v) + ")"));
    }
    return gen_atom(name, {args});
  }

  using Columns = std::vector<std::pair<Variable, Variable>>;

  static Columns columns(const VarTuple& l, const VarTuple& r) {
    Columns cols;
    for (std::size_t i = 0; i < l.size(); ++i) {
      std::pair<Variable, Variable> c{l[i], r[i]};
      if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
    }
    return cols;
  }

  Formula containment(const std::string& base, const Columns& cols) {
    VarTuple l, r;
    for (const auto& [a, b] : cols) {
      l.push_back(a);
      r.push_back(b);
    }
    if (cols.size() <= 2 && k_ >= 2) {
      if (l.size() == 1) {
        l.push_back(l[0]);
        r.push_back(r[0]);
      }
      return gen_atom(base, {l, r});
    }
    if (base == "inc" && cols.size() == 5) return gen_atom("inc5", {l, r});
    std::string name = "_" + base + std::to_string(cols.size());
    if (!atoms_.find(name)) {
      VarTuple v = fresh_vars(cols.size());
      int n = static_cast<int>(cols.size());
      std::string neg = base == "inc" ? "" : "!";
      atoms_.add(make_atom_def(name, {n, n},
                               forall_prefix(v) + "(R1(" + list(v) + ") -> " + neg + "R2(" + list(v) + "))"));
    }
    return gen_atom(name, {l, r});
  }

  Formula inc(const VarTuple& l, const VarTuple& r) {
    // Two columns feeding one right-hand variable force their left-hand
    // variables to agree on every row.
    Columns kept;
    std::vector<Formula> parts;
    for (const auto& c : columns(l, r)) {
      auto it = std::find_if(kept.begin(), kept.end(), [&](const auto& o) { return o.second == c.second; });
      if (it == kept.end()) {
        kept.push_back(c);
      } else {
        parts.push_back(eq(it->first, c.first));
      }
    }
    bool identity = std::all_of(kept.begin(), kept.end(), [](const auto& c) { return c.first == c.second; });
    if (!identity) parts.push_back(containment("inc", kept));
    return parts.empty() ? truth(l) : conj(parts);
  }

  Formula exc(const VarTuple& l, const VarTuple& r) { return containment("exc", columns(l, r)); }

  Formula ind(const VarTuple& given, const VarTuple& lhs, const VarTuple& rhs) {
    VarTuple z = dedup(given);
    auto strip = [&](const VarTuple& t) {
      VarTuple out;
      for (const auto& v : dedup(t))
        if (std::find(z.begin(), z.end(), v) == z.end()) out.push_back(v);
      return out;
    };
    VarTuple xs = strip(lhs), ys = strip(rhs);
    std::vector<Formula> parts;
    // x̄u ⊥_z̄ ȳu  iff  =(z̄,u) ∧ x̄ ⊥_z̄u ȳ
    for (auto it = xs.begin(); it != xs.end();) {
      auto jt = std::find(ys.begin(), ys.end(), *it);
      if (jt == ys.end()) {
        ++it;
        continue;
      }
      parts.push_back(dep(z, *it));
      z.push_back(*it);
      ys.erase(jt);
      it = xs.erase(it);
    }
    if (!xs.empty() && !ys.empty()) {
      if (z.empty() && xs.size() == 1 && ys.size() == 1 && k_ >= 2) {
        parts.push_back(gen_atom("ind", {{xs[0], ys[0]}}));
      } else {
        std::string name = "_ind" + std::to_string(z.size()) + "_" + std::to_string(xs.size()) + "_" +
                           std::to_string(ys.size());
        VarTuple v = fresh_vars(z.size() + xs.size() + ys.size());
        if (!atoms_.find(name)) {
          VarTuple vx(v.begin() + static_cast<std::ptrdiff_t>(z.size()),
                      v.begin() + static_cast<std::ptrdiff_t>(z.size() + xs.size()));
          VarTuple vy(v.begin() + static_cast<std::ptrdiff_t>(z.size() + xs.size()), v.end());
          std::string r = "R1(" + list(v) + ")";
          atoms_.add(make_atom_def(name, {static_cast<int>(v.size())},
                                   forall_prefix(v) + "(((" + exists_prefix(vy) + r + ") & " + exists_prefix(vx) + r +
                                       ") -> " + r + ")"));
        }
        VarTuple args = z;
        args.insert(args.end(), xs.begin(), xs.end());
        args.insert(args.end(), ys.begin(), ys.end());
        parts.push_back(gen_atom(name, {args}));
      }
    }
    if (parts.empty()) {
      VarTuple hint = given;
      hint.insert(hint.end(), lhs.begin(), lhs.end());
      hint.insert(hint.end(), rhs.begin(), rhs.end());
      return truth(hint);
    }
    return conj(parts);
  }

  int k_;
  AtomRegistry& atoms_;
  Variable truth_;
};

struct Piece {
  std::vector<std::pair<std::string, int>> prefix;
  Formula body;
};

/// Replaces R_j(z̄) by T_j(z̄, z_1, ..., z_1) padded to k places.
Formula pad_placeholders(const Formula& f, const std::map<std::string, std::string>& to, int k) {
  if (!f) return f;
  if (f->kind == NodeKind::kRel) {
    auto it = to.find(f->symbol);
    if (it == to.end()) return f;
    VarTuple args = f->args;
    while (static_cast<int>(args.size()) < k) args.push_back(f->args.front());
    return rel(it->second, args, f->positive);
  }
  Formula l = pad_placeholders(f->lhs, to, k);
  Formula r = pad_placeholders(f->rhs, to, k);
  if (l == f->lhs && r == f->rhs) return f;
  auto copy = std::make_shared<Node>(*f);
  copy->lhs = l;
  copy->rhs = r;
  return copy;
}

class Translator {
 public:
  Translator(int k, VarTuple xs, const AtomRegistry& atoms, FreshSymbolSource& fresh)
      : k_(k), xs_(std::move(xs)), atoms_(atoms), fresh_(fresh) {}

  Piece run(const Formula& f) {
    switch (f->kind) {
      case NodeKind::kRel:
      case NodeKind::kEq: return {{}, forall(xs_, implies(team_rel(), f))};
      case NodeKind::kGenAtom: return atom(f);
      case NodeKind::kAnd: {
        Piece l = run(f->lhs), r = run(f->rhs);
        l.prefix.insert(l.prefix.end(), r.prefix.begin(), r.prefix.end());
        return {l.prefix, conj(l.body, r.body)};
      }
      case NodeKind::kOr: {
        std::string s = fresh_.next("S"), t = fresh_.next("T");
        Piece l = run(f->lhs), r = run(f->rhs);
        Piece out{{{s, k_}, {t, k_}}, nullptr};
        out.prefix.insert(out.prefix.end(), l.prefix.begin(), l.prefix.end());
        out.prefix.insert(out.prefix.end(), r.prefix.begin(), r.prefix.end());
        out.body = conj({forall(xs_, iff(team_rel(), disj(rel(s, xs_), rel(t, xs_)))),
                         rename_relation(l.body, kTeamRelation, s), rename_relation(r.body, kTeamRelation, t)});
        return out;
      }
      case NodeKind::kExists: {
        std::string s = fresh_.next("S");
        Piece inner = run(f->lhs);
        const Variable& x = f->var;
        Piece out{{{s, k_}}, nullptr};
        out.prefix.insert(out.prefix.end(), inner.prefix.begin(), inner.prefix.end());
        out.body = conj(forall(xs_, iff(exists(x, team_rel()), exists(x, rel(s, xs_)))),
                        rename_relation(inner.body, kTeamRelation, s));
        return out;
      }
      case NodeKind::kForall: {
        std::string s = fresh_.next("S");
        Piece inner = run(f->lhs);
        const Variable& x = f->var;
        Piece out{{{s, k_}}, nullptr};
        out.prefix.insert(out.prefix.end(), inner.prefix.begin(), inner.prefix.end());
        out.body = conj(forall(xs_, conj(implies(team_rel(), forall(x, rel(s, xs_))),
                                         implies(rel(s, xs_), exists(x, team_rel())))),
                        rename_relation(inner.body, kTeamRelation, s));
        return out;
      }
      default: throw InvalidArgument("unexpected node in a team-layer formula");
    }
  }

 private:
  Formula team_rel() const { return rel(kTeamRelation, xs_); }

  Piece atom(const Formula& f) {
    const AtomDef* def = atoms_.find(f->symbol);
    if (!def) throw InvalidArgument("unregistered atom @" + f->symbol);
    if (def->k > k_) {
      throw InvalidArgument("definition of @" + def->name + " needs " + std::to_string(def->k) +
                            " variables, more than k=" + std::to_string(k_));
    }
    const std::size_t t = def->type.size();
    for (std::size_t j = 0; j < t; ++j) {
      if (def->type[j] > k_) {
        throw InvalidArgument("@" + def->name + " has an argument of arity " + std::to_string(def->type[j]) +
                              ", more than k=" + std::to_string(k_));
      }
    }

    Piece out;
    Formula psi = def->definition;
    std::vector<std::pair<std::string, int>> binders;
    while (psi->kind == NodeKind::kSOExists) {
      binders.emplace_back(psi->symbol, psi->count);
      psi = psi->lhs;
    }
    std::map<Variable, Variable> onto;
    for (const auto& v : all_variables(psi)) onto.emplace(v, xs_.at(onto.size()));
    psi = rename_variables(psi, onto);
    for (const auto& [name, arity] : binders) {
      std::string y = fresh_.next("Y");
      psi = rename_relation(psi, name, y);
      out.prefix.emplace_back(y, arity);
    }

    std::vector<std::string> ts;
    std::map<std::string, std::string> to;
    for (std::size_t j = 0; j < t; ++j) {
      ts.push_back(fresh_.next("T"));
      to.emplace(placeholder(j), ts.back());
      out.prefix.emplace_back(ts.back(), k_);
    }

    std::vector<Formula> parts;
    for (std::size_t j = 0; j < t; ++j) {
      parts.push_back(padding(ts[j], f->tuples[j]));
      if (Formula id = identities(ts[j], f->tuples[j])) parts.push_back(id);
    }
    parts.push_back(pad_placeholders(psi, to, k_));
    for (std::size_t j = 0; j < t; ++j) parts.push_back(chi(ts[j], def->type[j]));
    out.body = conj(parts);
    return out;
  }

  Formula padding(const std::string& tj, const VarTuple& yj) const {
    const int ij = static_cast<int>(yj.size());
    Formula all_t, some_t;
    if (ij == k_) {
      all_t = some_t = rel(tj, yj);
    } else {
      auto m = std::find_if(xs_.begin(), xs_.end(),
                            [&](const Variable& v) { return std::find(yj.begin(), yj.end(), v) == yj.end(); });
      VarTuple args = yj;
      args.resize(static_cast<std::size_t>(k_), *m);
      all_t = forall(*m, rel(tj, args));
      some_t = exists(*m, rel(tj, args));
    }
    VarTuple zs;
    for (const auto& v : xs_)
      if (std::find(yj.begin(), yj.end(), v) == yj.end()) zs.push_back(v);
    Formula some_r = zs.empty() ? team_rel() : exists(zs, team_rel());
    return forall(xs_, conj(implies(team_rel(), all_t), implies(some_t, some_r)));
  }

  Formula identities(const std::string& tj, const VarTuple& yj) const {
    const std::size_t ij = yj.size();
    std::vector<Formula> eqs;
    for (std::size_t l = 0; l < ij; ++l)
      for (std::size_t m = l + 1; m < ij; ++m)
        if (yj[l] == yj[m]) eqs.push_back(eq(xs_[l], xs_[m]));
    for (std::size_t l = ij; l < xs_.size(); ++l)
      for (std::size_t m = l + 1; m < xs_.size(); ++m) eqs.push_back(eq(xs_[l], xs_[m]));
    if (eqs.empty()) return nullptr;
    return forall(xs_, implies(rel(tj, xs_), conj(eqs)));
  }

  Formula chi(const std::string& tj, int ij) const {
    if (ij == k_) return forall(xs_, implies(rel(tj, xs_), rel(tj, xs_)));
    const Variable& p = xs_[static_cast<std::size_t>(ij)];
    VarTuple args(xs_.begin(), xs_.begin() + ij);
    args.resize(static_cast<std::size_t>(k_), p);
    return forall(xs_, implies(exists(p, rel(tj, args)), forall(p, rel(tj, args))));
  }

  int k_;
  VarTuple xs_;
  const AtomRegistry& atoms_;
  FreshSymbolSource& fresh_;
};

Formula wrap(const std::vector<std::pair<std::string, int>>& prefix, Formula body) {
  for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) body = so_exists(it->first, it->second, body);
  return body;
}

}  // namespace

Formula lower_builtin_atoms(const Formula& f, int k, AtomRegistry& atoms, const Variable& truth) {
  return Lowering(k, atoms, truth).rewrite(f);
}

TranslationOutput tr_k(const Formula& f, int k, const Vocabulary& vocab, const AtomRegistry& atoms,
                       VarTuple variables) {
  check_layer(f, Layer::kTeam);
  if (k < 1) throw InvalidArgument("k must be positive");
  vocab.check_user_names();
  if (variables.empty()) variables = default_variables(f, k);
  if (static_cast<int>(variables.size()) != k || dedup(variables).size() != variables.size()) {
    throw InvalidArgument("expected " + std::to_string(k) + " distinct variables");
  }
  for (const auto& v : all_variables(f)) {
    if (std::find(variables.begin(), variables.end(), v) == variables.end()) {
      throw InvalidArgument("variable " + v + " is not among x1..xk");
    }
  }
  Vocabulary used = relation_symbols(f);
  used.check_user_names();

  AtomRegistry local = atoms;
  Formula lowered = lower_builtin_atoms(f, k, local, variables.front());

  FreshSymbolSource fresh(vocab);
  for (const auto& [name, arity] : used.symbols()) fresh.reserve(name);
  fresh.reserve(kTeamRelation);
  Translator tr(k, variables, local, fresh);
  Piece p = tr.run(lowered);

  TranslationOutput out;
  out.team_relation = kTeamRelation;
  out.variables = variables;
  for (const auto& [name, arity] : p.prefix) out.fresh_symbols.push_back(name);
  out.sentence = wrap(p.prefix, p.body);
  return out;
}

Formula translate_sentence(const Formula& f, int k, const Vocabulary& vocab, const AtomRegistry& atoms,
                           VarTuple variables) {
  if (!free_variables(f).empty()) throw InvalidArgument("translate_sentence needs a sentence");
  TranslationOutput t = tr_k(f, k, vocab, atoms, std::move(variables));
  std::vector<std::pair<std::string, int>> prefix;
  Formula body = t.sentence;
  while (body->kind == NodeKind::kSOExists) {
    prefix.emplace_back(body->symbol, body->count);
    body = body->lhs;
  }
  prefix.insert(prefix.begin(), {t.team_relation, k});
  return wrap(prefix, conj(exists(t.variables, rel(t.team_relation, t.variables)), body));
}

Structure expand_with_team(const Structure& s, const Team& team, const VarTuple& variables,
                           const std::string& relation) {
  Structure out = s;
  Relation& r = out.add_relation(relation, static_cast<int>(variables.size()));
  for (const auto& t : rel_of(team, variables)) r.insert(t);
  return out;
}

std::optional<TranslationMismatch> verify_translation(const Formula& f, const TranslationOutput& t,
                                                      const Vocabulary& vocab, const AtomRegistry& atoms,
                                                      int max_size, std::uint64_t* checks) {
  Vocabulary v = vocab;
  const Vocabulary used = relation_symbols(f);
  for (const auto& [name, arity] : used.symbols()) v.add(name, arity);
  const std::set<Variable> vars(t.variables.begin(), t.variables.end());
  std::optional<TranslationMismatch> out;
  for (int n = 1; n <= max_size && !out; ++n) {
    const std::vector<Team> teams = all_teams(n, vars);
    enumerate_structures(v, n, [&](const Structure& s) {
      Evaluator ev(s, atoms);
      for (const Team& x : teams) {
        const bool lhs = ev.satisfies(x, f);
        const bool rhs = sigma11_satisfies(expand_with_team(s, x, t.variables, t.team_relation), {}, t.sentence);
        if (checks) ++*checks;
        if (lhs != rhs) {
          out = TranslationMismatch{s, x, lhs};
          return false;
        }
      }
      return true;
    });
  }
  return out;
}

}  // namespace teamlogic
