// SPDX-License-Identifier: Apache-2.0

#ifndef TEAMLOGIC_MODEL_HPP
#define TEAMLOGIC_MODEL_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "teamlogic/syntax.hpp"

namespace teamlogic {

/// Dense element id in 0..size-1.
using Element = int;
using Tuple = std::vector<Element>;
using ElementSet = std::set<Element>;

/// A relation over {0..n-1}^arity stored as a bitmap indexed by the
/// little-endian base-n code of the tuple.
class Relation {
 public:
  Relation() = default;
  Relation(int arity, int domain_size);

  int arity() const { return arity_; }
  int domain_size() const { return domain_size_; }
  /// n^arity.
  std::size_t cell_count() const { return bits_.size(); }

  bool contains(const Tuple& t) const { return bits_[code(t)] != 0; }
  bool contains_code(std::size_t c) const { return bits_[c] != 0; }
  void insert(const Tuple& t) { bits_[code(t)] = 1; }
  void set_code(std::size_t c, bool value) { bits_[c] = value ? 1 : 0; }
  std::size_t code(const Tuple& t) const;
  Tuple decode(std::size_t c) const;

  std::size_t size() const;
  bool empty() const { return size() == 0; }
  /// Tuples in lexicographic order.
  std::vector<Tuple> tuples() const;

  bool operator==(const Relation&) const = default;
  bool operator<(const Relation& o) const { return bits_ < o.bits_; }

 private:
  int arity_ = 1;
  int domain_size_ = 1;
  std::vector<std::uint8_t> bits_;
};

/// Finite relational structure over the domain {0..size-1}. External
/// element names are kept for I/O only.
class Structure {
 public:
  Structure() : Structure(1) {}
  explicit Structure(int size);
  Structure(int size, std::vector<std::string> names);

  int size() const { return size_; }
  const std::vector<std::string>& element_names() const { return names_; }
  const std::string& element_name(Element e) const { return names_.at(e); }
  /// Element id by external name; throws InvalidArgument if unknown.
  Element element(const std::string& name) const;

  /// Adds an empty relation (or checks arity if present) and returns it.
  Relation& add_relation(const std::string& symbol, int arity);
  void set_relation(const std::string& symbol, Relation r);
  const Relation& relation(const std::string& symbol) const;
  Relation& relation(const std::string& symbol);
  bool has_relation(const std::string& symbol) const { return relations_.count(symbol) != 0; }
  const std::map<std::string, Relation>& relations() const { return relations_; }
  Vocabulary vocabulary() const;

  bool operator==(const Structure& o) const { return size_ == o.size_ && relations_ == o.relations_; }

 private:
  int size_;
  std::vector<std::string> names_;
  std::map<std::string, Relation> relations_;
};

/// Default element names a, b, c, ..., z, e26, e27, ...
std::vector<std::string> default_element_names(int size);

using Assignment = std::map<Variable, Element>;

/// A team: a set of assignments over a common variable domain. Variables
/// are kept sorted and rows sorted and duplicate-free, so equal teams
/// compare equal. {∅} has no variables and one empty row; ∅ has no rows.
class Team {
 public:
  Team() = default;
  Team(VarTuple vars, std::vector<Tuple> rows);

  static Team empty_assignment_team() { return Team({}, {Tuple{}}); }

  const VarTuple& vars() const { return vars_; }
  const std::vector<Tuple>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  bool has_var(const Variable& v) const;
  /// Column index of `v`; throws InvalidArgument if absent.
  std::size_t column(const Variable& v) const;
  Assignment assignment(std::size_t row) const;

  bool operator==(const Team&) const = default;
  bool operator<(const Team& o) const {
    return vars_ != o.vars_ ? vars_ < o.vars_ : rows_ < o.rows_;
  }

 private:
  VarTuple vars_;
  std::vector<Tuple> rows_;
};

/// Builds a team from explicit assignments; all must share a domain.
Team team_from_assignments(const std::vector<Assignment>& rows);

// Team algebra.
/// X[A/x].
Team extend_universal(const Team& team, const Structure& structure, const Variable& x);
/// X[F/x]; `choice[i]` is F applied to row i and must be nonempty.
Team extend_function(const Team& team, const std::vector<ElementSet>& choice, const Variable& x);
/// X[F/x] with F given per assignment; throws when a row has no entry.
Team extend_function(const Team& team, const std::map<Assignment, ElementSet>& choice,
                     const Variable& x);
/// Rows whose every value lies in `b` (ids unchanged).
Team restrict_team(const Team& team, const ElementSet& b);
/// X(V) with duplicates merged.
Team project_team(const Team& team, const std::set<Variable>& vars);
/// rel(X, vars); repetitions in `vars` allowed.
std::set<Tuple> rel_of(const Team& team, const VarTuple& vars);
/// Induced substructure on nonempty `b`, renumbered densely in increasing
/// order of the original ids.
Structure restrict_structure(const Structure& structure, const ElementSet& b);
/// Renumbers a team whose values lie in `b` to match restrict_structure.
Team reindex_team(const Team& team, const ElementSet& b);

/// Index-addressable enumeration of every structure over a vocabulary on
/// the domain {0..size-1}. Relations are laid out in name order, tuples by
/// code; index bit j sets cell j. Order is therefore lexicographic on the
/// concatenated relation bitmaps, read least significant cell first.
class StructureSpace {
 public:
  StructureSpace(Vocabulary vocab, int size);

  /// Number of structures; throws ResourceLimit if it exceeds 2^62.
  std::uint64_t count() const;
  int total_bits() const { return total_bits_; }
  int size() const { return size_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  Structure at(std::uint64_t index) const;
  /// True iff `index` is the least index among structures isomorphic to it.
  bool is_canonical(std::uint64_t index) const;

 private:
  Vocabulary vocab_;
  int size_;
  int total_bits_ = 0;
  std::vector<std::pair<std::string, int>> layout_;
};

/// Calls `visit` on every structure, optionally only one per isomorphism
/// class. Stops early when `visit` returns false.
void enumerate_structures(const Vocabulary& vocab, int size,
                          const std::function<bool(const Structure&)>& visit,
                          bool dedup_isomorphic = false);
std::vector<Structure> all_structures(const Vocabulary& vocab, int size,
                                      bool dedup_isomorphic = false);

/// Index-addressable enumeration of all 2^(n^|vars|) teams over `vars`.
class TeamSpace {
 public:
  TeamSpace(int domain_size, std::set<Variable> vars);

  std::uint64_t count() const;
  std::size_t row_count() const { return cells_.size(); }
  Team at(std::uint64_t index) const;

 private:
  VarTuple vars_;
  std::vector<Tuple> cells_;
};

void enumerate_teams(const Structure& structure, const std::set<Variable>& vars,
                     const std::function<bool(const Team&)>& visit);
std::vector<Team> all_teams(int domain_size, const std::set<Variable>& vars);

/// Every assignment of `vars` into {0..n-1}, as a team.
Team full_team(int domain_size, const std::set<Variable>& vars);

Structure random_structure(const Vocabulary& vocab, int size, std::mt19937_64& rng,
                           double density = 0.5);
Team random_team(int domain_size, const std::set<Variable>& vars, std::mt19937_64& rng,
                 double density = 0.5);

}  // namespace teamlogic

#endif  // TEAMLOGIC_MODEL_HPP
