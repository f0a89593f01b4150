// SPDX-License-Identifier: Apache-2.0

#ifndef TEAMLOGIC_SYNTAX_HPP
#define TEAMLOGIC_SYNTAX_HPP

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace teamlogic {

using Variable = std::string;
using VarTuple = std::vector<Variable>;

/// Relation symbol name -> arity. Purely relational; arities are >= 1.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::initializer_list<std::pair<const std::string, int>> init);

  /// Adds `name` with `arity`. Re-adding with the same arity is a no-op;
  /// a conflicting arity throws InvalidArgument.
  void add(const std::string& name, int arity);
  std::optional<int> arity(const std::string& name) const;
  bool contains(const std::string& name) const { return arities_.count(name) != 0; }
  bool empty() const { return arities_.empty(); }
  std::size_t size() const { return arities_.size(); }

  const std::map<std::string, int>& symbols() const { return arities_; }

  /// Rejects names starting with '_' (reserved for generated symbols).
  void check_user_names() const;

  bool operator==(const Vocabulary&) const = default;

 private:
  std::map<std::string, int> arities_;
};

/// Name and type (i_1, ..., i_n) of a generalized atom.
struct AtomSignature {
  std::string name;
  std::vector<int> type;

  bool operator==(const AtomSignature&) const = default;
};

using AtomTable = std::map<std::string, AtomSignature>;

enum class Layer { kTeam, kFoc, kSigma11 };

enum class NodeKind {
  kRel,
  kEq,
  kAnd,
  kOr,
  kNot,
  kImplies,
  kIff,
  kExists,
  kForall,
  kCountExists,
  kBuiltinAtom,
  kGenAtom,
  kSOExists,
};

/// Built-in dependency atoms. `kConst` is only used as a key for atom
/// definitions; the parser reads `const(x)` as `dep(x)`.
enum class BuiltinKind { kDep, kConst, kInc, kExc, kInd };

std::string_view builtin_name(BuiltinKind kind);

struct Node;
using Formula = std::shared_ptr<const Node>;

/// Immutable formula node. Field use by kind:
///   kRel          symbol, args, positive
///   kEq           args (two), positive
///   kAnd/kOr/...  lhs, rhs (kNot: lhs only)
///   kExists/kForall/kCountExists  var, lhs (body), count (threshold)
///   kBuiltinAtom  builtin, tuples (dep: {determinants, {y}}; inc/exc: {x, y};
///                 ind: {z, x, y})
///   kGenAtom      symbol (atom name), tuples
///   kSOExists     symbol (relation variable), count (arity), lhs
struct Node {
  NodeKind kind;
  bool positive = true;
  std::string symbol;
  VarTuple args;
  Variable var;
  int count = 0;
  BuiltinKind builtin = BuiltinKind::kDep;
  std::vector<VarTuple> tuples;
  Formula lhs;
  Formula rhs;
};

// Builders.
Formula rel(std::string symbol, VarTuple args, bool positive = true);
Formula neg_rel(std::string symbol, VarTuple args);
Formula eq(Variable a, Variable b, bool positive = true);
Formula neq(Variable a, Variable b);
Formula conj(Formula a, Formula b);
Formula disj(Formula a, Formula b);
/// Left-nested conjunction/disjunction; the list must be nonempty.
Formula conj(const std::vector<Formula>& parts);
Formula disj(const std::vector<Formula>& parts);
Formula negate(Formula body);
Formula implies(Formula a, Formula b);
Formula iff(Formula a, Formula b);
Formula exists(Variable v, Formula body);
Formula forall(Variable v, Formula body);
/// Existential block / universal block over the listed variables, outermost first.
Formula exists(const VarTuple& vs, Formula body);
Formula forall(const VarTuple& vs, Formula body);
Formula count_exists(int threshold, Variable v, Formula body);
/// E<=i x. body, i.e. !E>=i+1 x. body
Formula count_at_most(int bound, Variable v, Formula body);
Formula dep_atom(VarTuple determinants, Variable dependent);
Formula inc_atom(VarTuple lhs, VarTuple rhs);
Formula exc_atom(VarTuple lhs, VarTuple rhs);
Formula ind_atom(VarTuple given, VarTuple lhs, VarTuple rhs);
Formula gen_atom(std::string name, std::vector<VarTuple> tuples);
Formula so_exists(std::string relation, int arity, Formula body);

/// Structural equality of ASTs.
bool equal(const Formula& a, const Formula& b);
/// Number of AST nodes.
std::size_t formula_size(const Formula& f);

std::string render(const Formula& f);

struct ParseOptions {
  Layer layer = Layer::kTeam;
  /// When null, any relation symbol is accepted provided its arity is
  /// consistent across the formula.
  const Vocabulary* vocab = nullptr;
  /// When null, any `@name` is accepted with a consistent type.
  const AtomTable* atoms = nullptr;
};

Formula parse_formula(std::string_view text, const ParseOptions& options = {});

/// Throws InvalidArgument when `f` violates the shape rules of `layer`.
void check_layer(const Formula& f, Layer layer);

std::set<Variable> free_variables(const Formula& f);
/// Every variable name occurring anywhere, bound or free.
std::set<Variable> all_variables(const Formula& f);
/// Variables in order of first occurrence (preorder).
VarTuple variables_in_order(const Formula& f);
/// Relation symbols occurring free (not bound by SOExists) with their arities.
Vocabulary relation_symbols(const Formula& f);
/// Names of generalized atoms applied in `f`.
std::set<std::string> atom_names(const Formula& f);
bool has_atoms(const Formula& f);

struct PrefixClass {
  bool ea = false;
  int exists = 0;
  int forall = 0;

  bool operator==(const PrefixClass&) const = default;
};

PrefixClass prefix_class(const Formula& f);
bool is_two_variable(const Formula& f);

/// Replaces every occurrence (free or bound) of relation symbol `from` by `to`.
Formula rename_relation(const Formula& f, const std::string& from, const std::string& to);
/// Applies an injective renaming to every variable occurrence.
Formula rename_variables(const Formula& f, const std::map<Variable, Variable>& mapping);

}  // namespace teamlogic

#endif  // TEAMLOGIC_SYNTAX_HPP
