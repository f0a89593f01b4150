// SPDX-License-Identifier: Apache-2.0

#include "teamlogic/model.hpp"

#include <algorithm>
#include <numeric>

#include "teamlogic/error.hpp"

namespace teamlogic {
namespace {

std::size_t checked_pow(int base, int exp) {
  std::size_t out = 1;
  for (int i = 0; i < exp; ++i) {
    if (out > (std::size_t{1} << 40) / static_cast<std::size_t>(std::max(base, 1))) {
      throw ResourceLimit("relation table too large");
    }
    out *= static_cast<std::size_t>(base);
  }
  return out;
}

void sort_unique(std::vector<Tuple>& rows) {
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
}

}  // namespace

Relation::Relation(int arity, int domain_size) : arity_(arity), domain_size_(domain_size) {
  if (arity < 1) throw InvalidArgument("relation arity must be positive");
  if (domain_size < 1) throw InvalidArgument("domain must be nonempty");
  bits_.assign(checked_pow(domain_size, arity), 0);
}

std::size_t Relation::code(const Tuple& t) const {
  if (static_cast<int>(t.size()) != arity_) throw InvalidArgument("tuple length does not match arity");
  std::size_t c = 0;
  for (int i = arity_ - 1; i >= 0; --i) {
    if (t[i] < 0 || t[i] >= domain_size_) throw InvalidArgument("tuple element outside domain");
    c = c * domain_size_ + t[i];
  }
  return c;
}

Tuple Relation::decode(std::size_t c) const {
  Tuple t(arity_);
  for (int i = 0; i < arity_; ++i) {
    t[i] = static_cast<Element>(c % domain_size_);
    c /= domain_size_;
  }
  return t;
}

std::size_t Relation::size() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

std::vector<Tuple> Relation::tuples() const {
  std::vector<Tuple> out;
  for (std::size_t c = 0; c < bits_.size(); ++c) {
    if (bits_[c]) out.push_back(decode(c));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> default_element_names(int size) {
  std::vector<std::string> names;
  for (int i = 0; i < size; ++i) {
    names.push_back(i < 26 ? std::string(1, static_cast<char>('a' + i)) : "e" + std::to_string(i));
  }
  return names;
}

Structure::Structure(int size) : Structure(size, default_element_names(size)) {}

Structure::Structure(int size, std::vector<std::string> names) : size_(size), names_(std::move(names)) {
  if (size < 1) throw InvalidArgument("structures must have a nonempty domain");
  if (static_cast<int>(names_.size()) != size) throw InvalidArgument("element name count differs from size");
  std::set<std::string> seen(names_.begin(), names_.end());
  if (seen.size() != names_.size()) throw InvalidArgument("duplicate element name");
}

Element Structure::element(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw InvalidArgument("unknown element '" + name + "'");
  return static_cast<Element>(it - names_.begin());
}

Relation& Structure::add_relation(const std::string& symbol, int arity) {
  auto it = relations_.find(symbol);
  if (it != relations_.end()) {
    if (it->second.arity() != arity) throw InvalidArgument("arity mismatch for relation " + symbol);
    return it->second;
  }
  return relations_.emplace(symbol, Relation(arity, size_)).first->second;
}

void Structure::set_relation(const std::string& symbol, Relation r) {
  if (r.domain_size() != size_) throw InvalidArgument("relation over a different domain");
  relations_[symbol] = std::move(r);
}

const Relation& Structure::relation(const std::string& symbol) const {
  auto it = relations_.find(symbol);
  if (it == relations_.end()) throw InvalidArgument("structure does not interpret " + symbol);
  return it->second;
}

Relation& Structure::relation(const std::string& symbol) {
  auto it = relations_.find(symbol);
  if (it == relations_.end()) throw InvalidArgument("structure does not interpret " + symbol);
  return it->second;
}

Vocabulary Structure::vocabulary() const {
  Vocabulary v;
  for (const auto& [name, r] : relations_) v.add(name, r.arity());
  return v;
}

Team::Team(VarTuple vars, std::vector<Tuple> rows) {
  for (const auto& r : rows) {
    if (r.size() != vars.size()) throw InvalidArgument("team row length differs from variable count");
  }
  std::vector<std::size_t> order(vars.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vars[a] < vars[b]; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (vars[order[i]] == vars[order[i - 1]]) throw InvalidArgument("duplicate team variable " + vars[order[i]]);
  }
  for (auto i : order) vars_.push_back(vars[i]);
  rows_.reserve(rows.size());
  for (const auto& r : rows) {
    Tuple t;
    t.reserve(r.size());
    for (auto i : order) t.push_back(r[i]);
    rows_.push_back(std::move(t));
  }
  sort_unique(rows_);
}

bool Team::has_var(const Variable& v) const { return std::binary_search(vars_.begin(), vars_.end(), v); }

std::size_t Team::column(const Variable& v) const {
  auto it = std::lower_bound(vars_.begin(), vars_.end(), v);
  if (it == vars_.end() || *it != v) throw InvalidArgument("variable " + v + " is not in the team domain");
  return static_cast<std::size_t>(it - vars_.begin());
}

Assignment Team::assignment(std::size_t row) const {
  Assignment s;
  for (std::size_t i = 0; i < vars_.size(); ++i) s[vars_[i]] = rows_.at(row)[i];
  return s;
}

Team team_from_assignments(const std::vector<Assignment>& rows) {
  if (rows.empty()) return Team{};
  VarTuple vars;
  for (const auto& [v, e] : rows.front()) vars.push_back(v);
  std::vector<Tuple> out;
  for (const auto& s : rows) {
    if (s.size() != vars.size()) throw InvalidArgument("assignments have different domains");
    Tuple t;
    for (const auto& v : vars) {
      auto it = s.find(v);
      if (it == s.end()) throw InvalidArgument("assignments have different domains");
      t.push_back(it->second);
    }
    out.push_back(std::move(t));
  }
  return Team(vars, std::move(out));
}

namespace {

// Shape of X[.../x]: the new variable list and the column receiving x.
struct Extension {
  VarTuple vars;
  std::size_t column;
  bool fresh;
};

Extension extension_shape(const Team& team, const Variable& x) {
  Extension e{team.vars(), 0, !team.has_var(x)};
  if (e.fresh) e.vars.push_back(x);
  std::sort(e.vars.begin(), e.vars.end());
  e.column = static_cast<std::size_t>(std::lower_bound(e.vars.begin(), e.vars.end(), x) - e.vars.begin());
  return e;
}

Tuple with_value(const Tuple& row, const Extension& e, Element a) {
  Tuple t = row;
  if (e.fresh) {
    t.insert(t.begin() + static_cast<std::ptrdiff_t>(e.column), a);
  } else {
    t[e.column] = a;
  }
  return t;
}

}  // namespace

Team extend_universal(const Team& team, const Structure& structure, const Variable& x) {
  Extension e = extension_shape(team, x);
  std::vector<Tuple> rows;
  for (const auto& r : team.rows()) {
    for (Element a = 0; a < structure.size(); ++a) rows.push_back(with_value(r, e, a));
  }
  return Team(e.vars, std::move(rows));
}

Team extend_function(const Team& team, const std::vector<ElementSet>& choice, const Variable& x) {
  if (choice.size() != team.size()) throw InvalidArgument("choice function must cover every row");
  Extension e = extension_shape(team, x);
  std::vector<Tuple> rows;
  for (std::size_t i = 0; i < team.size(); ++i) {
    if (choice[i].empty()) throw InvalidArgument("choice function values must be nonempty");
    for (Element a : choice[i]) rows.push_back(with_value(team.rows()[i], e, a));
  }
  return Team(e.vars, std::move(rows));
}

Team extend_function(const Team& team, const std::map<Assignment, ElementSet>& choice,
                     const Variable& x) {
  std::vector<ElementSet> per_row;
  for (std::size_t i = 0; i < team.size(); ++i) {
    auto it = choice.find(team.assignment(i));
    if (it == choice.end()) throw InvalidArgument("choice function is missing a row");
    per_row.push_back(it->second);
  }
  return extend_function(team, per_row, x);
}

Team restrict_team(const Team& team, const ElementSet& b) {
  std::vector<Tuple> rows;
  for (const auto& r : team.rows()) {
    if (std::all_of(r.begin(), r.end(), [&](Element e) { return b.count(e) != 0; })) rows.push_back(r);
  }
  return Team(team.vars(), std::move(rows));
}

Team project_team(const Team& team, const std::set<Variable>& vars) {
  std::vector<std::size_t> cols;
  for (const auto& v : vars) cols.push_back(team.column(v));
  std::vector<Tuple> rows;
  for (const auto& r : team.rows()) {
    Tuple t;
    for (auto c : cols) t.push_back(r[c]);
    rows.push_back(std::move(t));
  }
  return Team(VarTuple(vars.begin(), vars.end()), std::move(rows));
}

std::set<Tuple> rel_of(const Team& team, const VarTuple& vars) {
  std::vector<std::size_t> cols;
  for (const auto& v : vars) cols.push_back(team.column(v));
  std::set<Tuple> out;
  for (const auto& r : team.rows()) {
    Tuple t;
    for (auto c : cols) t.push_back(r[c]);
    out.insert(std::move(t));
  }
  return out;
}

Structure restrict_structure(const Structure& structure, const ElementSet& b) {
  if (b.empty()) throw InvalidArgument("cannot restrict to an empty set");
  std::vector<Element> old_ids(b.begin(), b.end());
  if (old_ids.front() < 0 || old_ids.back() >= structure.size()) {
    throw InvalidArgument("restriction set is not a subset of the domain");
  }
  std::vector<std::string> names;
  for (Element e : old_ids) names.push_back(structure.element_name(e));
  Structure out(static_cast<int>(old_ids.size()), std::move(names));
  std::vector<Element> new_id(structure.size(), -1);
  for (std::size_t i = 0; i < old_ids.size(); ++i) new_id[old_ids[i]] = static_cast<Element>(i);
  for (const auto& [name, r] : structure.relations()) {
    Relation& target = out.add_relation(name, r.arity());
    for (const auto& t : r.tuples()) {
      Tuple mapped;
      for (Element e : t) {
        if (new_id[e] < 0) break;
        mapped.push_back(new_id[e]);
      }
      if (mapped.size() == t.size()) target.insert(mapped);
    }
  }
  return out;
}

Team reindex_team(const Team& team, const ElementSet& b) {
  std::map<Element, Element> new_id;
  Element next = 0;
  for (Element e : b) new_id[e] = next++;
  std::vector<Tuple> rows;
  for (const auto& r : team.rows()) {
    Tuple t;
    for (Element e : r) {
      auto it = new_id.find(e);
      if (it == new_id.end()) throw InvalidArgument("team value outside the restriction set");
      t.push_back(it->second);
    }
    rows.push_back(std::move(t));
  }
  return Team(team.vars(), std::move(rows));
}

StructureSpace::StructureSpace(Vocabulary vocab, int size) : vocab_(std::move(vocab)), size_(size) {
  if (size < 1) throw InvalidArgument("structure size must be positive");
  for (const auto& [name, arity] : vocab_.symbols()) {
    layout_.emplace_back(name, arity);
    total_bits_ += static_cast<int>(checked_pow(size, arity));
  }
}

std::uint64_t StructureSpace::count() const {
  if (total_bits_ > 62) throw ResourceLimit("structure space has more than 2^62 members");
  return std::uint64_t{1} << total_bits_;
}

Structure StructureSpace::at(std::uint64_t index) const {
  Structure s(size_);
  int bit = 0;
  for (const auto& [name, arity] : layout_) {
    Relation& r = s.add_relation(name, arity);
    for (std::size_t c = 0; c < r.cell_count(); ++c, ++bit) {
      if (bit < 64 && ((index >> bit) & 1u)) r.set_code(c, true);
    }
  }
  return s;
}

bool StructureSpace::is_canonical(std::uint64_t index) const {
  std::vector<Element> perm(size_);
  std::iota(perm.begin(), perm.end(), 0);
  while (std::next_permutation(perm.begin(), perm.end())) {
    // Image index of the structure under `perm`; compare bit strings from
    // the most significant cell down.
    std::uint64_t image = 0;
    int bit = 0;
    for (const auto& [name, arity] : layout_) {
      Relation probe(arity, size_);
      for (std::size_t c = 0; c < probe.cell_count(); ++c, ++bit) {
        if ((index >> bit) & 1u) {
          Tuple t = probe.decode(c);
          for (auto& e : t) e = perm[e];
          image |= std::uint64_t{1} << (bit - static_cast<int>(c) + static_cast<int>(probe.code(t)));
        }
      }
    }
    if (image < index) return false;
  }
  return true;
}

void enumerate_structures(const Vocabulary& vocab, int size,
                          const std::function<bool(const Structure&)>& visit, bool dedup_isomorphic) {
  StructureSpace space(vocab, size);
  const std::uint64_t n = space.count();
  for (std::uint64_t i = 0; i < n; ++i) {
    if (dedup_isomorphic && !space.is_canonical(i)) continue;
    if (!visit(space.at(i))) return;
  }
}

std::vector<Structure> all_structures(const Vocabulary& vocab, int size, bool dedup_isomorphic) {
  std::vector<Structure> out;
  enumerate_structures(
      vocab, size,
      [&](const Structure& s) {
        out.push_back(s);
        return true;
      },
      dedup_isomorphic);
  return out;
}

TeamSpace::TeamSpace(int domain_size, std::set<Variable> vars) : vars_(vars.begin(), vars.end()) {
  if (domain_size < 1) throw InvalidArgument("domain must be nonempty");
  std::size_t cells = checked_pow(domain_size, static_cast<int>(vars_.size()));
  for (std::size_t c = 0; c < cells; ++c) {
    Tuple t(vars_.size());
    std::size_t rest = c;
    for (std::size_t i = vars_.size(); i-- > 0;) {
      t[i] = static_cast<Element>(rest % domain_size);
      rest /= domain_size;
    }
    cells_.push_back(std::move(t));
  }
}

std::uint64_t TeamSpace::count() const {
  if (cells_.size() > 62) throw ResourceLimit("team space has more than 2^62 members");
  return std::uint64_t{1} << cells_.size();
}

Team TeamSpace::at(std::uint64_t index) const {
  std::vector<Tuple> rows;
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    if ((index >> c) & 1u) rows.push_back(cells_[c]);
  }
  return Team(vars_, std::move(rows));
}

void enumerate_teams(const Structure& structure, const std::set<Variable>& vars,
                     const std::function<bool(const Team&)>& visit) {
  TeamSpace space(structure.size(), vars);
  const std::uint64_t n = space.count();
  for (std::uint64_t i = 0; i < n; ++i) {
    if (!visit(space.at(i))) return;
  }
}

std::vector<Team> all_teams(int domain_size, const std::set<Variable>& vars) {
  TeamSpace space(domain_size, vars);
  std::vector<Team> out;
  for (std::uint64_t i = 0; i < space.count(); ++i) out.push_back(space.at(i));
  return out;
}

Team full_team(int domain_size, const std::set<Variable>& vars) {
  TeamSpace space(domain_size, vars);
  return space.at(space.count() - 1);
}

Structure random_structure(const Vocabulary& vocab, int size, std::mt19937_64& rng, double density) {
  std::bernoulli_distribution coin(density);
  Structure s(size);
  for (const auto& [name, arity] : vocab.symbols()) {
    Relation& r = s.add_relation(name, arity);
    for (std::size_t c = 0; c < r.cell_count(); ++c) r.set_code(c, coin(rng));
  }
  return s;
}

Team random_team(int domain_size, const std::set<Variable>& vars, std::mt19937_64& rng, double density) {
  std::bernoulli_distribution coin(density);
  TeamSpace space(domain_size, vars);
  Team full = space.at(space.count() - 1);
  std::vector<Tuple> rows;
  for (const auto& r : full.rows()) {
    if (coin(rng)) rows.push_back(r);
  }
  return Team(full.vars(), std::move(rows));
}

}  // namespace teamlogic
