// SPDX-License-Identifier: Apache-2.0

#ifndef TEAMLOGIC_TRANSLATE_HPP
#define TEAMLOGIC_TRANSLATE_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include <optional>

#include "teamlogic/atoms.hpp"
#include "teamlogic/model.hpp"
#include "teamlogic/syntax.hpp"

namespace teamlogic {

/// Hands out relation names `_<base><n>` that occur neither in the input
/// vocabulary nor among names already emitted.
class FreshSymbolSource {
 public:
  FreshSymbolSource() = default;
  explicit FreshSymbolSource(const Vocabulary& taken);

  std::string next(const std::string& base);
  void reserve(const std::string& name) { taken_.insert(name); }
  const std::vector<std::string>& emitted() const { return emitted_; }

 private:
  std::set<std::string> taken_;
  std::map<std::string, int> counters_;
  std::vector<std::string> emitted_;
};

struct TranslationOutput {
  /// SOE prefix over an FOC^k body, over τ ∪ {team_relation}.
  Formula sentence;
  std::string team_relation;
  /// x_1..x_k: the column order of the team relation.
  VarTuple variables;
  /// Every second-order variable introduced, in prefix order.
  std::vector<std::string> fresh_symbols;
};

inline constexpr const char* kTeamRelation = "_R";

/// Variable order used when none is given: x1..xk when the formula only
/// uses those names, otherwise its variables in sorted order padded with
/// unused names up to k. Throws InvalidArgument when f has more than k.
VarTuple default_variables(const Formula& f, int k);

/// Rewrites built-in atoms into applications of definable atoms whose
/// types fit in k variables, plus first-order literals. Shapes without a
/// registered definition get a synthesized one, added to `atoms` under a
/// name starting with '_'. Trivially true atoms become `v=v` for one of
/// their variables, or `truth` when they have none.
Formula lower_builtin_atoms(const Formula& f, int k, AtomRegistry& atoms, const Variable& truth = "x");

/// tr_k: for every team X with dom(X) = {x_1..x_k},
/// A ⊨_X f  iff  (A, R := rel(X, x̄)) ⊨ result.sentence.
/// Throws InvalidArgument for variables outside x̄ and for atoms whose
/// type or definition does not fit in k variables.
TranslationOutput tr_k(const Formula& f, int k, const Vocabulary& vocab, const AtomRegistry& atoms,
                       VarTuple variables = {});

/// SOE R:k. SOE S̄. (E x̄. R(x̄) & ψ) for a sentence f, where tr_k(f) is SOE S̄. ψ.
Formula translate_sentence(const Formula& f, int k, const Vocabulary& vocab, const AtomRegistry& atoms,
                           VarTuple variables = {});

/// (A, R := rel(X, x̄)).
Structure expand_with_team(const Structure& s, const Team& team, const VarTuple& variables,
                           const std::string& relation = kTeamRelation);

struct TranslationMismatch {
  Structure structure;
  Team team;
  /// Truth value of f in the team; the translation gave the opposite.
  bool team_value = false;
};

/// Compares A ⊨_X f with (A, rel(X, x̄)) ⊨ t.sentence for every structure
/// over vocab ∪ symbols(f) of size 1..max_size and every team over x̄.
/// Returns the first disagreement. `checks` counts compared pairs.
std::optional<TranslationMismatch> verify_translation(const Formula& f, const TranslationOutput& t,
                                                      const Vocabulary& vocab, const AtomRegistry& atoms,
                                                      int max_size, std::uint64_t* checks = nullptr);

}  // namespace teamlogic

#endif  // TEAMLOGIC_TRANSLATE_HPP
