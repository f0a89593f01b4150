// SPDX-License-Identifier: Apache-2.0

#ifndef TEAMLOGIC_SOLVE_HPP
#define TEAMLOGIC_SOLVE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "teamlogic/atoms.hpp"
#include "teamlogic/json_io.hpp"
#include "teamlogic/model.hpp"
#include "teamlogic/semantics.hpp"
#include "teamlogic/syntax.hpp"

namespace teamlogic {

enum class Verdict { kSat, kUnsatUpTo, kUnsat, kUnknown };

std::string_view verdict_name(Verdict v);

struct SolveStats {
  std::uint64_t structures_examined = 0;
  std::uint64_t evaluator_calls = 0;
};

struct SolveOptions {
  /// Worker threads for the structure sweep; 1 runs the serial loop.
  int jobs = 1;
  EvalOptions eval;
  Sigma11Backend sigma11_backend = Sigma11Backend::kAuto;
  /// Ceiling on the number of candidate structures of one size.
  std::uint64_t max_structures = std::uint64_t{1} << 24;
};

struct AtomEvidence {
  std::string atom;
  /// "asserted", "probe" or "none".
  std::string level;
  std::string detail;
};

struct SatResult {
  Verdict verdict = Verdict::kUnknown;
  /// Present iff verdict is kSat.
  std::optional<Structure> model;
  /// Largest domain size searched.
  int bound = 0;
  std::string reason;
  std::vector<AtomEvidence> evidence;
  SolveStats stats;
};

Json sat_result_to_json(const SatResult& r);

/// Index of the least i < count with pred(i), scanning in order.
std::optional<std::uint64_t> find_first_serial(std::uint64_t count, const std::function<bool(std::uint64_t)>& pred);
/// Same result, with the indices spread over `jobs` OpenMP threads. An
/// exception thrown at index i propagates only if no hit precedes i.
std::optional<std::uint64_t> find_first_parallel(std::uint64_t count,
                                                 const std::function<bool(std::uint64_t)>& pred, int jobs);

/// Whether `f` holds in `s`. Team-layer sentences use team semantics on
/// {∅}; anything with SOE, negation or counting is read as Σ¹₁.
bool model_check(const Structure& s, const Formula& f, const AtomRegistry& atoms, const SolveOptions& options,
                 SolveStats* stats = nullptr);

/// Searches domains 1..max_size over the relation symbols of f for a model.
/// Returns the first one in enumeration order, else kUnsatUpTo.
SatResult sat_bounded(const Formula& f, const Vocabulary& vocab, const AtomRegistry& atoms, int max_size,
                      const SolveOptions& options = {});

/// ∃*∀* sentences with substructure-closed atoms have a model iff they
/// have one with at most max{1,k} elements. Throws NotEA outside the
/// prefix class; returns kUnknown naming an atom without closure evidence.
SatResult decide_ea(const Formula& f, const Vocabulary& vocab, const AtomRegistry& atoms,
                    const SolveOptions& options = {});

struct RefuteResult {
  std::optional<Structure> counterexample;
  int bound = 0;
  SolveStats stats;
};

Json refute_result_to_json(const RefuteResult& r);

/// Looks for a structure of size at most max_size falsifying f. Never
/// claims validity.
RefuteResult refute_validity(const Formula& f, const Vocabulary& vocab, const AtomRegistry& atoms, int max_size,
                             const SolveOptions& options = {});

}  // namespace teamlogic

#endif  // TEAMLOGIC_SOLVE_HPP
