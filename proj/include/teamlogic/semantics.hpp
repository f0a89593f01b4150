// SPDX-License-Identifier: Apache-2.0

#ifndef TEAMLOGIC_SEMANTICS_HPP
#define TEAMLOGIC_SEMANTICS_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "teamlogic/atoms.hpp"
#include "teamlogic/model.hpp"
#include "teamlogic/syntax.hpp"

namespace teamlogic {

/// How second-order prefixes are decided. kBrute enumerates every
/// interpretation; kGround grounds the body to CNF and runs the SAT solver;
/// kAuto uses brute force for at most 12 second-order bits.
enum class Sigma11Backend { kAuto, kBrute, kGround };

struct EvalOptions {
  bool memoize = true;
  /// Atom-free subformulas are checked row by row (flatness).
  bool flat_fast_path = true;
  /// Disjunctions split into partitions and existentials pick single
  /// values when every atom below is downward closed.
  bool downward_closed_fast_path = true;
  /// For ψ ∨ θ with ψ atom-free, Y is taken maximal.
  bool flat_disjunct_shortcut = true;
  /// Empty teams are accepted immediately when only built-in atoms occur.
  bool empty_team_shortcut = true;
  /// Enumerate choice functions row by row, as in the definition, instead
  /// of once per group of rows that agree outside the quantified variable.
  bool literal_function_search = false;
  /// Ceiling on |X|·|A| for any team reached during evaluation.
  std::size_t limit_cells = 4096;
  Sigma11Backend sigma11_backend = Sigma11Backend::kAuto;
  /// Record the witnessing splits and choices of the top-level call.
  bool trace = false;

  /// Every shortcut off: clause-by-clause evaluation of the definition.
  static EvalOptions reference();
};

struct EvalStats {
  std::uint64_t calls = 0;
  std::uint64_t memo_hits = 0;
  std::uint64_t atom_evaluations = 0;
};

/// Team-semantics evaluator bound to one structure. Holds a memo table of
/// (subformula, team) results; not thread-safe, use one per thread.
class Evaluator {
 public:
  Evaluator(const Structure& structure, const AtomRegistry& atoms = builtin_registry(),
            EvalOptions options = {});
  ~Evaluator();
  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;

  /// A ⊨_X f. Throws InvalidArgument if a free variable of f is outside
  /// dom(X) or an atom is unregistered, ResourceLimit past limit_cells.
  bool satisfies(const Team& team, const Formula& f);
  /// A ⊨ f, i.e. satisfaction by {∅}.
  bool satisfies_sentence(const Formula& f);

  const EvalStats& stats() const;
  /// Witness lines recorded when options.trace is set.
  const std::vector<std::string>& trace() const;
  void clear_memo();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

bool team_satisfies(const Structure& s, const Team& team, const Formula& f,
                    const AtomRegistry& atoms = builtin_registry(), const EvalOptions& options = {});
bool sentence_holds(const Structure& s, const Formula& f, const AtomRegistry& atoms = builtin_registry(),
                    const EvalOptions& options = {});

/// Tarskian semantics of an FOC formula with counting quantifiers.
bool foc_satisfies(const Structure& s, const Assignment& a, const Formula& f);

/// Σ¹₁ satisfaction. Relations bound by the SOExists prefix may shadow
/// symbols of `s`.
bool sigma11_satisfies(const Structure& s, const Assignment& a, const Formula& f,
                       Sigma11Backend backend = Sigma11Backend::kAuto);
/// Interpretations of the prefix relations witnessing satisfaction, if any.
std::optional<std::map<std::string, Relation>> sigma11_witness(const Structure& s, const Assignment& a,
                                                                const Formula& f,
                                                                Sigma11Backend backend = Sigma11Backend::kAuto);

}  // namespace teamlogic

#endif  // TEAMLOGIC_SEMANTICS_HPP
