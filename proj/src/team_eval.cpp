// SPDX-License-Identifier: Apache-2.0
//
// Lax team semantics. A row is the mixed-radix code sum(value(v) * n^slot(v))
// over variable slots that persist for the lifetime of the evaluator, so memo
// keys stay valid across calls. A team is a sorted vector of codes plus the
// mask of slots in its domain.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "teamlogic/error.hpp"
#include "teamlogic/semantics.hpp"

namespace teamlogic {

EvalOptions EvalOptions::reference() {
  EvalOptions o;
  o.memoize = false;
  o.flat_fast_path = false;
  o.downward_closed_fast_path = false;
  o.flat_disjunct_shortcut = false;
  o.empty_team_shortcut = false;
  o.literal_function_search = true;
  return o;
}

namespace {

using Code = std::uint64_t;

struct CTeam {
  std::uint64_t mask = 0;
  std::vector<Code> rows;
};

struct MemoKey {
  const Node* node;
  std::uint64_t mask;
  std::vector<Code> rows;

  bool operator==(const MemoKey& o) const { return node == o.node && mask == o.mask && rows == o.rows; }
};

struct MemoHash {
  std::size_t operator()(const MemoKey& k) const {
    std::size_t h = std::hash<const void*>()(k.node) ^ (k.mask * 0x9e3779b97f4a7c15ULL);
    for (Code c : k.rows) h = (h ^ c) * 0x100000001b3ULL;
    return h;
  }
};

struct NodeInfo {
  bool atom_free = true;
  bool downward_closed = true;
  bool builtin_only = true;
};

void normalize(std::vector<Code>& rows) {
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
}

constexpr std::size_t kMaxMemoEntries = 4'000'000;
constexpr std::size_t kMaxTraceLines = 500;
constexpr double kMaxChoiceCandidates = 5e7;

}  // namespace

struct Evaluator::Impl {
  Impl(const Structure& s, const AtomRegistry& a, EvalOptions o) : structure(s), atoms(a), opt(o), n(s.size()) {}

  const Structure& structure;
  const AtomRegistry& atoms;
  EvalOptions opt;
  int n;
  EvalStats stats;
  std::vector<std::string> trace;

  std::map<Variable, int> slot_index;
  std::vector<Variable> slot_names;
  std::vector<Code> pw;
  std::vector<Formula> pinned;
  std::unordered_map<const Node*, NodeInfo> info_cache;
  std::unordered_map<MemoKey, bool, MemoHash> memo;
  std::map<std::pair<std::string, std::vector<Relation>>, bool> atom_cache;

  int slot(const Variable& v) {
    auto it = slot_index.find(v);
    if (it != slot_index.end()) return it->second;
    if (slot_names.size() >= 63) throw ResourceLimit("too many variables for the team encoding");
    Code next = 1;
    if (!pw.empty()) {
      if (pw.back() > std::numeric_limits<Code>::max() / static_cast<Code>(n) / static_cast<Code>(n)) {
        throw ResourceLimit("too many variables for the team encoding");
      }
      next = pw.back() * static_cast<Code>(n);
    }
    int s = static_cast<int>(slot_names.size());
    slot_index.emplace(v, s);
    slot_names.push_back(v);
    pw.push_back(next);
    return s;
  }

  int value(Code c, int s) const { return static_cast<int>((c / pw[s]) % static_cast<Code>(n)); }
  Code with(Code c, int s, int a) const {
    return c - static_cast<Code>(value(c, s)) * pw[s] + static_cast<Code>(a) * pw[s];
  }

  void register_slots(const Formula& f) {
    for (const auto& v : variables_in_order(f)) slot(v);
  }

  NodeInfo info(const Formula& f) {
    auto it = info_cache.find(f.get());
    if (it != info_cache.end()) return it->second;
    NodeInfo ni;
    switch (f->kind) {
      case NodeKind::kBuiltinAtom:
        ni.atom_free = false;
        ni.downward_closed = f->builtin == BuiltinKind::kDep || f->builtin == BuiltinKind::kConst ||
                             f->builtin == BuiltinKind::kExc;
        break;
      case NodeKind::kGenAtom: {
        ni.atom_free = false;
        ni.builtin_only = false;
        const AtomDef* d = atoms.find(f->symbol);
        ni.downward_closed = d != nullptr && d->downward_closed.value_or(false);
        break;
      }
      default:
        for (const Formula* child : {&f->lhs, &f->rhs}) {
          if (!*child) continue;
          NodeInfo ci = info(*child);
          ni.atom_free = ni.atom_free && ci.atom_free;
          ni.downward_closed = ni.downward_closed && ci.downward_closed;
          ni.builtin_only = ni.builtin_only && ci.builtin_only;
        }
    }
    return info_cache.emplace(f.get(), ni).first->second;
  }

  // --- Tarskian evaluation of atom-free team-layer formulas on one row.
  bool fo(const Formula& f, Code row) {
    switch (f->kind) {
      case NodeKind::kRel: {
        const Relation& r = structure.relation(f->symbol);
        std::size_t c = 0;
        for (std::size_t i = f->args.size(); i-- > 0;) {
          c = c * static_cast<std::size_t>(n) + static_cast<std::size_t>(value(row, slot_index.at(f->args[i])));
        }
        return r.contains_code(c) == f->positive;
      }
      case NodeKind::kEq:
        return (value(row, slot_index.at(f->args[0])) == value(row, slot_index.at(f->args[1]))) == f->positive;
      case NodeKind::kAnd: return fo(f->lhs, row) && fo(f->rhs, row);
      case NodeKind::kOr: return fo(f->lhs, row) || fo(f->rhs, row);
      case NodeKind::kExists:
      case NodeKind::kForall: {
        int s = slot_index.at(f->var);
        bool want = f->kind == NodeKind::kExists;
        for (int a = 0; a < n; ++a) {
          if (fo(f->lhs, with(row, s, a)) == want) return want;
        }
        return !want;
      }
      default: throw std::logic_error("row evaluation reached an atom");
    }
  }

  bool literal_holds(const Formula& f, Code row) { return fo(f, row); }

  // --- Team evaluation.
  bool eval(const Formula& f, const CTeam& x) {
    ++stats.calls;
    if (x.rows.size() * static_cast<std::size_t>(n) > opt.limit_cells) {
      throw ResourceLimit("team of " + std::to_string(x.rows.size()) + " rows over " + std::to_string(n) +
                          " elements exceeds the cell limit " + std::to_string(opt.limit_cells));
    }
    NodeInfo ni = info(f);
    if (opt.empty_team_shortcut && x.rows.empty() && ni.builtin_only) return true;
    if (f->kind == NodeKind::kRel || f->kind == NodeKind::kEq || (opt.flat_fast_path && ni.atom_free)) {
      for (Code r : x.rows) {
        if (!literal_holds(f, r)) return false;
      }
      return true;
    }
    if (opt.memoize) {
      MemoKey key{f.get(), x.mask, x.rows};
      auto it = memo.find(key);
      if (it != memo.end()) {
        ++stats.memo_hits;
        return it->second;
      }
      bool v = dispatch(f, x);
      if (memo.size() > kMaxMemoEntries) memo.clear();
      memo.emplace(std::move(key), v);
      return v;
    }
    return dispatch(f, x);
  }

  bool dispatch(const Formula& f, const CTeam& x) {
    switch (f->kind) {
      case NodeKind::kAnd: return eval(f->lhs, x) && eval(f->rhs, x);
      case NodeKind::kOr: return eval_or(f, x);
      case NodeKind::kExists: return eval_exists(f, x);
      case NodeKind::kForall: {
        int s = slot(f->var);
        CTeam y{x.mask | (std::uint64_t{1} << s), {}};
        y.rows.reserve(x.rows.size() * static_cast<std::size_t>(n));
        for (Code r : x.rows) {
          for (int a = 0; a < n; ++a) y.rows.push_back(with(r, s, a));
        }
        normalize(y.rows);
        return eval(f->lhs, y);
      }
      case NodeKind::kBuiltinAtom: return eval_builtin_atom(f, x);
      case NodeKind::kGenAtom: return eval_gen_atom(f, x);
      default: throw InvalidArgument("formula is not in the team layer");
    }
  }

  std::vector<Tuple> joint_rows(const std::vector<VarTuple>& tuples, const CTeam& x) {
    std::vector<int> slots;
    for (const auto& t : tuples) {
      for (const auto& v : t) {
        int s = slot(v);
        if (!((x.mask >> s) & 1u)) throw InvalidArgument("variable " + v + " is not in the team domain");
        slots.push_back(s);
      }
    }
    std::vector<Tuple> rows;
    rows.reserve(x.rows.size());
    for (Code r : x.rows) {
      Tuple t;
      t.reserve(slots.size());
      for (int s : slots) t.push_back(value(r, s));
      rows.push_back(std::move(t));
    }
    return rows;
  }

  bool eval_builtin_atom(const Formula& f, const CTeam& x) {
    ++stats.atom_evaluations;
    std::vector<int> lengths;
    for (const auto& t : f->tuples) lengths.push_back(static_cast<int>(t.size()));
    return eval_builtin_rows(f->builtin, lengths, joint_rows(f->tuples, x));
  }

  bool eval_gen_atom(const Formula& f, const CTeam& x) {
    ++stats.atom_evaluations;
    const AtomDef& def = atoms.at(f->symbol);
    if (f->tuples.size() != def.type.size()) throw InvalidArgument("wrong number of tuples for @" + def.name);
    std::vector<Relation> rels;
    for (std::size_t j = 0; j < f->tuples.size(); ++j) {
      if (static_cast<int>(f->tuples[j].size()) != def.type[j]) {
        throw InvalidArgument("tuple " + std::to_string(j + 1) + " of @" + def.name + " has the wrong length");
      }
      Relation r(def.type[j], n);
      for (const auto& t : joint_rows({f->tuples[j]}, x)) r.insert(t);
      rels.push_back(std::move(r));
    }
    auto key = std::make_pair(def.name, rels);
    if (opt.memoize) {
      auto it = atom_cache.find(key);
      if (it != atom_cache.end()) return it->second;
    }
    bool v = eval_generalized_relations(n, def, rels, opt.sigma11_backend);
    if (opt.memoize) atom_cache.emplace(std::move(key), v);
    return v;
  }

  CTeam subteam(const CTeam& x, std::uint64_t bits) const {
    CTeam y{x.mask, {}};
    for (std::size_t i = 0; i < x.rows.size(); ++i) {
      if ((bits >> i) & 1u) y.rows.push_back(x.rows[i]);
    }
    return y;
  }

  bool eval_or(const Formula& f, const CTeam& x) {
    const std::size_t m = x.rows.size();
    if (m > 62) throw ResourceLimit("disjunction over a team of more than 62 rows");
    const std::uint64_t all = m == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << m) - 1;
    const Formula& psi = f->lhs;
    const Formula& theta = f->rhs;

    if (opt.flat_disjunct_shortcut && (info(psi).atom_free || info(theta).atom_free)) {
      bool left_flat = info(psi).atom_free;
      const Formula& flat = left_flat ? psi : theta;
      const Formula& other = left_flat ? theta : psi;
      std::uint64_t s = 0;
      for (std::size_t i = 0; i < m; ++i) {
        if (literal_holds(flat, x.rows[i])) s |= std::uint64_t{1} << i;
      }
      std::uint64_t rest = all & ~s;
      if (opt.downward_closed_fast_path && info(other).downward_closed) {
        bool v = eval(other, subteam(x, rest));
        if (v) note_split(f, subteam(x, s), subteam(x, rest), left_flat);
        return v;
      }
      for (std::uint64_t w = s;; w = (w - 1) & s) {
        if (eval(other, subteam(x, rest | w))) {
          note_split(f, subteam(x, s), subteam(x, rest | w), left_flat);
          return true;
        }
        if (w == 0) break;
      }
      return false;
    }

    if (opt.downward_closed_fast_path && info(psi).downward_closed && info(theta).downward_closed) {
      return partition_search(f, x, 0, 0, 0);
    }

    // Every ordered cover: Y any subteam satisfying psi, Z = (X \ Y) ∪ W
    // for W ⊆ Y.
    for (std::uint64_t y = all;; y = (y - 1) & all) {
      if (eval(psi, subteam(x, y))) {
        for (std::uint64_t w = y;; w = (w - 1) & y) {
          if (eval(theta, subteam(x, (all & ~y) | w))) {
            note_split(f, subteam(x, y), subteam(x, (all & ~y) | w), true);
            return true;
          }
          if (w == 0) break;
        }
      }
      if (y == 0) break;
    }
    return false;
  }

  // Rows 0..i-1 are placed in Y or Z; both partial teams satisfy their
  // disjunct, which by downward closure is necessary for any completion.
  bool partition_search(const Formula& f, const CTeam& x, std::size_t i, std::uint64_t y, std::uint64_t z) {
    if (i == x.rows.size()) {
      if (y == 0 && !eval(f->lhs, subteam(x, 0))) return false;
      if (z == 0 && !eval(f->rhs, subteam(x, 0))) return false;
      note_split(f, subteam(x, y), subteam(x, z), true);
      return true;
    }
    std::uint64_t bit = std::uint64_t{1} << i;
    if (eval(f->lhs, subteam(x, y | bit)) && partition_search(f, x, i + 1, y | bit, z)) return true;
    return eval(f->rhs, subteam(x, z | bit)) && partition_search(f, x, i + 1, y, z | bit);
  }

  bool eval_exists(const Formula& f, const CTeam& x) {
    const int s = slot(f->var);
    const std::uint64_t mask = x.mask | (std::uint64_t{1} << s);
    // Rows that agree outside the quantified slot produce the same extended
    // rows, so one choice per group covers every choice function.
    std::vector<Code> groups;
    if (opt.literal_function_search) {
      groups = x.rows;
    } else {
      for (Code r : x.rows) groups.push_back(with(r, s, 0));
      normalize(groups);
    }
    if (groups.empty()) return eval(f->lhs, CTeam{mask, {}});

    const bool singletons = opt.downward_closed_fast_path && info(f->lhs).downward_closed;
    const int choices = singletons ? n : (1 << n) - 1;
    if (std::pow(static_cast<double>(choices), static_cast<double>(groups.size())) > kMaxChoiceCandidates &&
        !singletons) {
      throw ResourceLimit("existential quantifier over " + std::to_string(groups.size()) + " rows has too many " +
                          "choice functions");
    }
    auto values_of = [&](int choice) -> std::uint32_t {
      return singletons ? (1u << choice) : static_cast<std::uint32_t>(choice + 1);
    };
    std::vector<int> pick(groups.size(), 0);
    auto build = [&](std::size_t upto) {
      CTeam y{mask, {}};
      for (std::size_t g = 0; g < upto; ++g) {
        std::uint32_t vs = values_of(pick[g]);
        for (int a = 0; a < n; ++a) {
          if ((vs >> a) & 1u) y.rows.push_back(with(groups[g], s, a));
        }
      }
      normalize(y.rows);
      return y;
    };
    // Depth-first over groups; with a downward closed body a failing
    // partial team rules out all its completions.
    std::function<bool(std::size_t)> search = [&](std::size_t g) {
      if (g == groups.size()) {
        CTeam y = build(g);
        if (!eval(f->lhs, y)) return false;
        note_choice(f, y);
        return true;
      }
      for (int c = 0; c < choices; ++c) {
        pick[g] = c;
        if (singletons && !eval(f->lhs, build(g + 1))) continue;
        if (search(g + 1)) return true;
      }
      return false;
    };
    return search(0);
  }

  std::string describe(const CTeam& x) const {
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < x.rows.size(); ++i) {
      if (i) os << ", ";
      os << "(";
      bool first = true;
      for (std::size_t s = 0; s < slot_names.size(); ++s) {
        if (!((x.mask >> s) & 1u)) continue;
        if (!first) os << ",";
        first = false;
        os << slot_names[s] << "=" << structure.element_name(value(x.rows[i], static_cast<int>(s)));
      }
      os << ")";
    }
    os << "}";
    return os.str();
  }

  void note_split(const Formula& f, const CTeam& y, const CTeam& z, bool y_is_left) {
    if (!opt.trace || trace.size() >= kMaxTraceLines) return;
    const CTeam& left = y_is_left ? y : z;
    const CTeam& right = y_is_left ? z : y;
    trace.push_back("split " + render(f) + ": Y=" + describe(left) + " Z=" + describe(right));
  }

  void note_choice(const Formula& f, const CTeam& y) {
    if (!opt.trace || trace.size() >= kMaxTraceLines) return;
    trace.push_back("choose " + f->var + " in " + render(f) + ": " + describe(y));
  }
};

Evaluator::Evaluator(const Structure& structure, const AtomRegistry& atoms, EvalOptions options)
    : impl_(std::make_unique<Impl>(structure, atoms, options)) {}

Evaluator::~Evaluator() = default;

bool Evaluator::satisfies(const Team& team, const Formula& f) {
  check_layer(f, Layer::kTeam);
  for (const auto& v : free_variables(f)) {
    if (!team.has_var(v)) throw InvalidArgument("free variable " + v + " is not in the team domain");
  }
  for (const auto& name : atom_names(f)) impl_->atoms.at(name);
  const Vocabulary used = relation_symbols(f);
  for (const auto& [name, arity] : used.symbols()) {
    if (impl_->structure.relation(name).arity() != arity) throw InvalidArgument("arity mismatch for " + name);
  }
  impl_->pinned.push_back(f);
  impl_->register_slots(f);
  CTeam x;
  std::vector<int> cols;
  for (const auto& v : team.vars()) {
    int s = impl_->slot(v);
    x.mask |= std::uint64_t{1} << s;
    cols.push_back(s);
  }
  for (const auto& row : team.rows()) {
    Code c = 0;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i] < 0 || row[i] >= impl_->n) throw InvalidArgument("team value outside the domain");
      c += static_cast<Code>(row[i]) * impl_->pw[cols[i]];
    }
    x.rows.push_back(c);
  }
  normalize(x.rows);
  return impl_->eval(f, x);
}

bool Evaluator::satisfies_sentence(const Formula& f) { return satisfies(Team::empty_assignment_team(), f); }

const EvalStats& Evaluator::stats() const { return impl_->stats; }
const std::vector<std::string>& Evaluator::trace() const { return impl_->trace; }
void Evaluator::clear_memo() {
  impl_->memo.clear();
  impl_->atom_cache.clear();
}

bool team_satisfies(const Structure& s, const Team& team, const Formula& f, const AtomRegistry& atoms,
                    const EvalOptions& options) {
  Evaluator ev(s, atoms, options);
  return ev.satisfies(team, f);
}

bool sentence_holds(const Structure& s, const Formula& f, const AtomRegistry& atoms, const EvalOptions& options) {
  Evaluator ev(s, atoms, options);
  return ev.satisfies_sentence(f);
}

}  // namespace teamlogic
