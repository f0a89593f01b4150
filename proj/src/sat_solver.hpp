// SPDX-License-Identifier: Apache-2.0
//
// Small CDCL solver used by the grounding backend: two watched literals,
// first-UIP learning, activity-based branching with phase saving and Luby
// restarts. No clause deletion; the instances it sees are small.

#ifndef TEAMLOGIC_SAT_SOLVER_HPP
#define TEAMLOGIC_SAT_SOLVER_HPP

#include <cstdint>
#include <vector>

namespace teamlogic::sat {

/// Literal: 2*var for the positive, 2*var+1 for the negative polarity.
using Lit = int;

inline Lit pos(int var) { return 2 * var; }
inline Lit neg(int var) { return 2 * var + 1; }
inline Lit negate(Lit l) { return l ^ 1; }
inline int var_of(Lit l) { return l >> 1; }

class Solver {
 public:
  int new_var();
  int var_count() const { return static_cast<int>(assign_.size()); }
  /// Adds a clause; duplicate literals are removed and tautologies ignored.
  void add_clause(std::vector<Lit> clause);
  /// Returns true iff satisfiable; the model is then available via value().
  bool solve();
  bool value(int var) const { return model_.at(var) != 0; }
  std::uint64_t conflicts() const { return conflicts_; }

 private:
  enum : std::int8_t { kFalse = 0, kTrue = 1, kUndef = 2 };

  std::int8_t lit_value(Lit l) const {
    std::int8_t v = assign_[var_of(l)];
    return v == kUndef ? static_cast<std::int8_t>(kUndef) : static_cast<std::int8_t>(v ^ (l & 1));
  }
  void enqueue(Lit l, int reason);
  /// Returns the index of a conflicting clause or -1.
  int propagate();
  void analyze(int conflict, std::vector<Lit>& learnt, int& backtrack_level);
  void backtrack(int level);
  int pick_branch_var();
  void bump(int var);
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }
  int attach(std::vector<Lit> clause);

  std::vector<std::vector<Lit>> clauses_;
  std::vector<std::vector<int>> watches_;
  std::vector<std::int8_t> assign_;
  std::vector<std::int8_t> phase_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<double> activity_;
  std::vector<char> seen_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;
  double bump_amount_ = 1.0;
  bool inconsistent_ = false;
  std::vector<std::int8_t> model_;
  std::uint64_t conflicts_ = 0;
};

}  // namespace teamlogic::sat

#endif  // TEAMLOGIC_SAT_SOLVER_HPP
