// SPDX-License-Identifier: Apache-2.0
//
// Tarskian FOC evaluation and the two Σ¹₁ backends. Formulas are compiled
// to a flat program over variable slots; second-order relations are
// resolved to binder indices at compile time.

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "sat_solver.hpp"
#include "teamlogic/error.hpp"
#include "teamlogic/semantics.hpp"

namespace teamlogic {
namespace {

enum class Op { kRel, kEq, kNot, kAnd, kOr, kImplies, kIff, kExists, kForall, kCount };

struct Instr {
  Op op;
  bool positive = true;
  /// kRel: index into the structure relation table, or -(binder+1).
  int rel = 0;
  std::vector<int> slots;
  int slot = -1;
  int count = 0;
  int a = -1;
  int b = -1;
  /// Slots the value of this instruction depends on.
  std::vector<int> free_slots;
};

class FocProgram {
 public:
  FocProgram(const Formula& f, const Structure& s, const Assignment& a) : structure_(s) {
    Formula body = f;
    while (body->kind == NodeKind::kSOExists) {
      binders_.emplace_back(body->symbol, body->count);
      body = body->lhs;
    }
    check_layer(body, Layer::kFoc);
    for (const auto& v : all_variables(body)) slot_of(v);
    for (const auto& [v, e] : a) {
      if (e < 0 || e >= s.size()) throw InvalidArgument("assignment value outside the domain");
      slot_of(v);
    }
    values_.assign(slot_names_.size(), 0);
    for (const auto& [v, e] : a) values_[slot_of(v)] = e;
    for (const auto& v : free_variables(body)) {
      if (!a.count(v)) throw InvalidArgument("free variable " + v + " is not assigned");
    }
    root_ = compile(body);
  }

  const std::vector<std::pair<std::string, int>>& binders() const { return binders_; }
  int domain_size() const { return structure_.size(); }
  const std::vector<Instr>& program() const { return code_; }
  int root() const { return root_; }
  const std::vector<int>& initial_values() const { return values_; }
  const Relation& structure_relation(int i) const { return *rels_[i]; }

  std::size_t cell_code(const Instr& in, const std::vector<int>& vals) const {
    std::size_t c = 0;
    for (std::size_t i = in.slots.size(); i-- > 0;) {
      c = c * static_cast<std::size_t>(structure_.size()) + static_cast<std::size_t>(vals[in.slots[i]]);
    }
    return c;
  }

  bool eval(const std::vector<Relation>& so) const {
    std::vector<int> vals = values_;
    return eval(root_, vals, so);
  }

  bool eval(int i, std::vector<int>& vals, const std::vector<Relation>& so) const {
    const Instr& in = code_[i];
    switch (in.op) {
      case Op::kRel: {
        const Relation& r = in.rel >= 0 ? *rels_[in.rel] : so[-in.rel - 1];
        return r.contains_code(cell_code(in, vals)) == in.positive;
      }
      case Op::kEq: return (vals[in.slots[0]] == vals[in.slots[1]]) == in.positive;
      case Op::kNot: return !eval(in.a, vals, so);
      case Op::kAnd: return eval(in.a, vals, so) && eval(in.b, vals, so);
      case Op::kOr: return eval(in.a, vals, so) || eval(in.b, vals, so);
      case Op::kImplies: return !eval(in.a, vals, so) || eval(in.b, vals, so);
      case Op::kIff: return eval(in.a, vals, so) == eval(in.b, vals, so);
      case Op::kExists:
      case Op::kForall:
      case Op::kCount: {
        int saved = vals[in.slot];
        int needed = in.op == Op::kCount ? in.count : 1;
        int found = 0;
        bool result = in.op == Op::kForall;
        if (needed <= 0) {
          result = true;
        } else {
          for (int e = 0; e < structure_.size(); ++e) {
            vals[in.slot] = e;
            bool v = eval(in.a, vals, so);
            if (in.op == Op::kForall) {
              if (!v) {
                result = false;
                break;
              }
            } else if (v && ++found >= needed) {
              result = true;
              break;
            }
          }
        }
        vals[in.slot] = saved;
        return result;
      }
    }
    return false;
  }

 private:
  int slot_of(const Variable& v) {
    auto it = slot_index_.find(v);
    if (it != slot_index_.end()) return it->second;
    int s = static_cast<int>(slot_names_.size());
    slot_index_.emplace(v, s);
    slot_names_.push_back(v);
    return s;
  }

  int emit(Instr in) {
    std::sort(in.free_slots.begin(), in.free_slots.end());
    in.free_slots.erase(std::unique(in.free_slots.begin(), in.free_slots.end()), in.free_slots.end());
    code_.push_back(std::move(in));
    return static_cast<int>(code_.size()) - 1;
  }

  int relation_ref(const std::string& name, int arity) {
    for (std::size_t j = binders_.size(); j-- > 0;) {
      if (binders_[j].first == name) {
        if (binders_[j].second != arity) throw InvalidArgument("arity mismatch for relation variable " + name);
        return -static_cast<int>(j) - 1;
      }
    }
    const Relation& r = structure_.relation(name);
    if (r.arity() != arity) throw InvalidArgument("arity mismatch for " + name);
    for (std::size_t i = 0; i < rels_.size(); ++i) {
      if (rels_[i] == &r) return static_cast<int>(i);
    }
    rels_.push_back(&r);
    return static_cast<int>(rels_.size()) - 1;
  }

  int compile(const Formula& f) {
    Instr in{};
    switch (f->kind) {
      case NodeKind::kRel:
        in.op = Op::kRel;
        in.positive = f->positive;
        in.rel = relation_ref(f->symbol, static_cast<int>(f->args.size()));
        for (const auto& v : f->args) in.slots.push_back(slot_of(v));
        in.free_slots = in.slots;
        return emit(std::move(in));
      case NodeKind::kEq:
        in.op = Op::kEq;
        in.positive = f->positive;
        for (const auto& v : f->args) in.slots.push_back(slot_of(v));
        in.free_slots = in.slots;
        return emit(std::move(in));
      case NodeKind::kNot:
        in.op = Op::kNot;
        in.a = compile(f->lhs);
        in.free_slots = code_[in.a].free_slots;
        return emit(std::move(in));
      case NodeKind::kAnd:
      case NodeKind::kOr:
      case NodeKind::kImplies:
      case NodeKind::kIff: {
        in.op = f->kind == NodeKind::kAnd  ? Op::kAnd
                : f->kind == NodeKind::kOr ? Op::kOr
                : f->kind == NodeKind::kImplies ? Op::kImplies
                                                : Op::kIff;
        in.a = compile(f->lhs);
        in.b = compile(f->rhs);
        in.free_slots = code_[in.a].free_slots;
        const auto& rb = code_[in.b].free_slots;
        in.free_slots.insert(in.free_slots.end(), rb.begin(), rb.end());
        return emit(std::move(in));
      }
      case NodeKind::kExists:
      case NodeKind::kForall:
      case NodeKind::kCountExists:
        in.op = f->kind == NodeKind::kExists ? Op::kExists : f->kind == NodeKind::kForall ? Op::kForall : Op::kCount;
        in.count = f->count;
        in.slot = slot_of(f->var);
        in.a = compile(f->lhs);
        for (int s : code_[in.a].free_slots) {
          if (s != in.slot) in.free_slots.push_back(s);
        }
        return emit(std::move(in));
      default:
        throw InvalidArgument("not a first-order formula with counting");
    }
  }

  const Structure& structure_;
  std::vector<std::pair<std::string, int>> binders_;
  std::map<Variable, int> slot_index_;
  std::vector<Variable> slot_names_;
  std::vector<int> values_;
  std::vector<const Relation*> rels_;
  std::vector<Instr> code_;
  int root_ = -1;
};

std::vector<Relation> empty_interpretations(const FocProgram& p) {
  std::vector<Relation> so;
  for (const auto& [name, arity] : p.binders()) so.emplace_back(arity, p.domain_size());
  return so;
}

std::size_t second_order_bits(const FocProgram& p) {
  std::size_t bits = 0;
  for (const auto& r : empty_interpretations(p)) bits += r.cell_count();
  return bits;
}

std::optional<std::vector<Relation>> brute_force(const FocProgram& p) {
  std::vector<Relation> so = empty_interpretations(p);
  std::size_t bits = second_order_bits(p);
  if (bits > 30) throw ResourceLimit("brute-force second-order search over " + std::to_string(bits) + " bits");
  // Odometer over the cells of every binder, innermost binder fastest.
  for (;;) {
    if (p.eval(so)) return so;
    std::size_t j = so.size();
    for (;;) {
      if (j == 0) return std::nullopt;
      Relation& r = so[j - 1];
      std::size_t c = 0;
      while (c < r.cell_count() && r.contains_code(c)) r.set_code(c++, false);
      if (c < r.cell_count()) {
        r.set_code(c, true);
        break;
      }
      --j;
    }
  }
}

// Grounds the program to a circuit of AND gates with constant folding and
// structural hashing, then hands the Tseitin clauses to the SAT solver.
class Grounder {
 public:
  static constexpr sat::Lit kTrue = -1;
  static constexpr sat::Lit kFalse = -2;

  explicit Grounder(const FocProgram& p) : p_(p) {
    for (const auto& [name, arity] : p.binders()) {
      Relation shape(arity, p.domain_size());
      cells_.emplace_back(shape.cell_count(), -1);
    }
  }

  std::optional<std::vector<Relation>> solve() {
    std::vector<int> vals = p_.initial_values();
    sat::Lit root = ground(p_.root(), vals);
    std::vector<Relation> so = empty_interpretations(p_);
    if (root == kFalse) return std::nullopt;
    if (root != kTrue) {
      solver_.add_clause({root});
      if (!solver_.solve()) return std::nullopt;
      for (std::size_t j = 0; j < cells_.size(); ++j) {
        for (std::size_t c = 0; c < cells_[j].size(); ++c) {
          if (cells_[j][c] >= 0 && solver_.value(cells_[j][c])) so[j].set_code(c, true);
        }
      }
    }
    if (!p_.eval(so)) throw std::logic_error("grounding produced a model the evaluator rejects");
    return so;
  }

 private:
  static sat::Lit lnot(sat::Lit l) { return l == kTrue ? kFalse : l == kFalse ? kTrue : sat::negate(l); }

  sat::Lit gate_and(std::vector<sat::Lit> in) {
    std::vector<sat::Lit> lits;
    for (sat::Lit l : in) {
      if (l == kFalse) return kFalse;
      if (l != kTrue) lits.push_back(l);
    }
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (std::size_t i = 0; i + 1 < lits.size(); ++i) {
      if (lits[i + 1] == sat::negate(lits[i])) return kFalse;
    }
    if (lits.empty()) return kTrue;
    if (lits.size() == 1) return lits[0];
    auto it = and_cache_.find(lits);
    if (it != and_cache_.end()) return it->second;
    sat::Lit g = sat::pos(solver_.new_var());
    std::vector<sat::Lit> back{g};
    for (sat::Lit l : lits) {
      solver_.add_clause({sat::negate(g), l});
      back.push_back(sat::negate(l));
    }
    solver_.add_clause(std::move(back));
    and_cache_.emplace(std::move(lits), g);
    return g;
  }

  sat::Lit gate_or(std::vector<sat::Lit> in) {
    for (auto& l : in) l = lnot(l);
    return lnot(gate_and(std::move(in)));
  }

  sat::Lit ground(int i, std::vector<int>& vals) {
    const Instr& in = p_.program()[i];
    std::uint64_t key = 0;
    for (int s : in.free_slots) key = key * static_cast<std::uint64_t>(p_.domain_size()) + vals[s];
    auto mkey = std::make_pair(i, key);
    auto hit = memo_.find(mkey);
    if (hit != memo_.end()) return hit->second;
    sat::Lit out = kFalse;
    switch (in.op) {
      case Op::kRel: {
        std::size_t c = p_.cell_code(in, vals);
        if (in.rel >= 0) {
          out = p_.structure_relation(in.rel).contains_code(c) ? kTrue : kFalse;
        } else {
          int& v = cells_[-in.rel - 1][c];
          if (v < 0) v = solver_.new_var();
          out = sat::pos(v);
        }
        if (!in.positive) out = lnot(out);
        break;
      }
      case Op::kEq:
        out = ((vals[in.slots[0]] == vals[in.slots[1]]) == in.positive) ? kTrue : kFalse;
        break;
      case Op::kNot: out = lnot(ground(in.a, vals)); break;
      case Op::kAnd: out = gate_and({ground(in.a, vals), ground(in.b, vals)}); break;
      case Op::kOr: out = gate_or({ground(in.a, vals), ground(in.b, vals)}); break;
      case Op::kImplies: out = gate_or({lnot(ground(in.a, vals)), ground(in.b, vals)}); break;
      case Op::kIff: {
        sat::Lit a = ground(in.a, vals);
        sat::Lit b = ground(in.b, vals);
        out = gate_and({gate_or({lnot(a), b}), gate_or({a, lnot(b)})});
        break;
      }
      case Op::kExists:
      case Op::kForall:
      case Op::kCount: {
        int saved = vals[in.slot];
        std::vector<sat::Lit> lits;
        for (int e = 0; e < p_.domain_size(); ++e) {
          vals[in.slot] = e;
          lits.push_back(ground(in.a, vals));
        }
        vals[in.slot] = saved;
        if (in.op == Op::kExists) {
          out = gate_or(lits);
        } else if (in.op == Op::kForall) {
          out = gate_and(lits);
        } else {
          out = at_least(lits, in.count);
        }
        break;
      }
    }
    memo_.emplace(mkey, out);
    return out;
  }

  // Sequential counter: row[t] says "at least t of the literals seen so far".
  sat::Lit at_least(const std::vector<sat::Lit>& lits, int threshold) {
    if (threshold <= 0) return kTrue;
    if (threshold > static_cast<int>(lits.size())) return kFalse;
    std::vector<sat::Lit> row(threshold + 1, kFalse);
    row[0] = kTrue;
    for (sat::Lit l : lits) {
      for (int t = threshold; t >= 1; --t) row[t] = gate_or({row[t], gate_and({row[t - 1], l})});
    }
    return row[threshold];
  }

  struct PairHash {
    std::size_t operator()(const std::pair<int, std::uint64_t>& k) const {
      return std::hash<std::uint64_t>()(k.second * 1000003u + static_cast<std::uint64_t>(k.first));
    }
  };

  const FocProgram& p_;
  sat::Solver solver_;
  std::vector<std::vector<int>> cells_;
  std::map<std::vector<sat::Lit>, sat::Lit> and_cache_;
  std::unordered_map<std::pair<int, std::uint64_t>, sat::Lit, PairHash> memo_;
};

std::optional<std::vector<Relation>> decide(const FocProgram& p, Sigma11Backend backend) {
  if (backend == Sigma11Backend::kAuto) {
    backend = second_order_bits(p) <= 12 ? Sigma11Backend::kBrute : Sigma11Backend::kGround;
  }
  if (p.binders().empty()) {
    std::vector<Relation> none;
    return p.eval(none) ? std::optional(none) : std::nullopt;
  }
  if (backend == Sigma11Backend::kBrute) return brute_force(p);
  return Grounder(p).solve();
}

}  // namespace

bool foc_satisfies(const Structure& s, const Assignment& a, const Formula& f) {
  check_layer(f, Layer::kFoc);
  FocProgram p(f, s, a);
  return p.eval({});
}

std::optional<std::map<std::string, Relation>> sigma11_witness(const Structure& s, const Assignment& a,
                                                                const Formula& f, Sigma11Backend backend) {
  check_layer(f, Layer::kSigma11);
  FocProgram p(f, s, a);
  auto so = decide(p, backend);
  if (!so) return std::nullopt;
  std::map<std::string, Relation> out;
  for (std::size_t j = 0; j < so->size(); ++j) out[p.binders()[j].first] = (*so)[j];
  return out;
}

bool sigma11_satisfies(const Structure& s, const Assignment& a, const Formula& f, Sigma11Backend backend) {
  check_layer(f, Layer::kSigma11);
  FocProgram p(f, s, a);
  return decide(p, backend).has_value();
}

}  // namespace teamlogic
