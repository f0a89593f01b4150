// SPDX-License-Identifier: Apache-2.0

#ifndef TEAMLOGIC_ATOMS_HPP
#define TEAMLOGIC_ATOMS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "teamlogic/json_io.hpp"
#include "teamlogic/model.hpp"
#include "teamlogic/syntax.hpp"

namespace teamlogic {

enum class Sigma11Backend;

/// A generalized atom of type (i_1, ..., i_n) defined by a Σ¹₁(FOC^k)
/// sentence over the placeholders R1..Rn (Rj of arity i_j).
struct AtomDef {
  std::string name;
  std::vector<int> type;
  /// Number of distinct first-order variables used by `definition`.
  int k = 0;
  Formula definition;
  /// User-asserted closure properties; unset means "no evidence".
  std::optional<bool> downward_closed;
  std::optional<bool> substructure_closed;
  std::optional<bool> universe_independent;
  /// Variable tuples used when probing properties. Defaults to distinct
  /// variables for every position.
  std::vector<VarTuple> probe_tuples;

  AtomSignature signature() const { return {name, type}; }
};

/// Name of the placeholder for argument j (0-based): R1, R2, ...
std::string placeholder(std::size_t j);

/// Validates and completes `def`: checks the type, parses nothing, computes k
/// and checks the definition is a sentence over the placeholders only.
AtomDef make_atom_def(std::string name, std::vector<int> type, const std::string& definition);

/// {"name":..., "type":[...], "k":..., "definition":"...", optional
/// "downward_closed"/"substructure_closed"/"universe_independent" booleans
/// and "probe":[["x","x"],...]}.
AtomDef atom_def_from_json(const Json& j);
Json atom_def_to_json(const AtomDef& def);

class AtomRegistry {
 public:
  AtomRegistry() = default;
  /// The built-in definitions: const, dep, inc, exc, ind, inc5.
  static AtomRegistry with_builtins();

  /// Replaces any existing atom of the same name.
  void add(AtomDef def);
  const AtomDef* find(const std::string& name) const;
  const AtomDef& at(const std::string& name) const;
  AtomTable signatures() const;
  const std::map<std::string, AtomDef>& defs() const { return defs_; }

 private:
  std::map<std::string, AtomDef> defs_;
};

/// Shared instance of AtomRegistry::with_builtins().
const AtomRegistry& builtin_registry();

/// Definitions of A_const (1), A_dep (2), A_inc (2,2), A_exc (2,2), A_ind (2).
std::map<BuiltinKind, AtomDef> builtin_definitions();
/// A_5-inc of type (5,5).
AtomDef inc5_definition();

/// Native semantics of a built-in atom node's tuples on a team.
bool eval_builtin(const Team& team, BuiltinKind kind, const std::vector<VarTuple>& tuples);
/// Same, on the rows of rel(X, t_1 ... t_m) for the concatenated tuples,
/// with `lengths` the tuple lengths. Rows may contain duplicates.
bool eval_builtin_rows(BuiltinKind kind, const std::vector<int>& lengths, const std::vector<Tuple>& rows);

/// (A, R1:=rel(X,t1), ...) satisfies the definition.
bool eval_generalized(const Structure& s, const Team& team, const AtomDef& def,
                      const std::vector<VarTuple>& tuples);
bool eval_generalized_relations(int domain_size, const AtomDef& def, const std::vector<Relation>& rels,
                                Sigma11Backend backend);

/// Result of checking one closure property exhaustively up to a size.
struct PropertyVerdict {
  /// False when refuted; true when no counterexample up to `max_size`.
  bool holds = true;
  int checked_up_to = 0;
  /// Refutations carry a concrete counterexample, re-verified.
  std::string witness;
  Json witness_json;
};

struct ProbeReport {
  std::string atom;
  std::vector<VarTuple> tuples;
  PropertyVerdict downward_closed;
  PropertyVerdict substructure_closed;
  PropertyVerdict universe_independent;
};

/// Exhaustive search over domains 1..max_size and every team over the
/// probe variables. Throws ResourceLimit when a team space exceeds
/// 2^`max_team_bits`.
ProbeReport probe_properties(const AtomDef& def, int max_size, int max_team_bits = 20);
Json probe_report_to_json(const ProbeReport& r);

/// Rewrites every built-in atom of a two-variable team formula into the
/// repertoire @const, @dep, @inc, @exc, @ind and first-order literals.
/// Throws InvalidArgument when `f` uses more than two variables.
Formula normalize_builtin(const Formula& f);

}  // namespace teamlogic

#endif  // TEAMLOGIC_ATOMS_HPP
