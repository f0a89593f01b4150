// SPDX-License-Identifier: Apache-2.0

#include "sat_solver.hpp"

#include <algorithm>

namespace teamlogic::sat {
namespace {

// Luby sequence 1 1 2 1 1 2 4 ...
std::uint64_t luby(std::uint64_t i) {
  std::uint64_t size = 1;
  int seq = 0;
  while (size < i + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != i) {
    size = (size - 1) >> 1;
    --seq;
    i = i % size;
  }
  return std::uint64_t{1} << seq;
}

}  // namespace

int Solver::new_var() {
  int v = var_count();
  assign_.push_back(kUndef);
  phase_.push_back(kFalse);
  level_.push_back(0);
  reason_.push_back(-1);
  activity_.push_back(0.0);
  seen_.push_back(0);
  watches_.emplace_back();
  watches_.emplace_back();
  return v;
}

void Solver::add_clause(std::vector<Lit> clause) {
  if (inconsistent_) return;
  std::sort(clause.begin(), clause.end());
  clause.erase(std::unique(clause.begin(), clause.end()), clause.end());
  std::vector<Lit> kept;
  for (std::size_t i = 0; i < clause.size(); ++i) {
    if (i + 1 < clause.size() && clause[i + 1] == negate(clause[i])) return;
    std::int8_t v = lit_value(clause[i]);
    if (v == kTrue) return;
    if (v == kFalse) continue;
    kept.push_back(clause[i]);
  }
  if (kept.empty()) {
    inconsistent_ = true;
  } else if (kept.size() == 1) {
    enqueue(kept[0], -1);
    if (propagate() != -1) inconsistent_ = true;
  } else {
    attach(std::move(kept));
  }
}

int Solver::attach(std::vector<Lit> clause) {
  int index = static_cast<int>(clauses_.size());
  watches_[clause[0]].push_back(index);
  watches_[clause[1]].push_back(index);
  clauses_.push_back(std::move(clause));
  return index;
}

void Solver::enqueue(Lit l, int reason) {
  int v = var_of(l);
  assign_[v] = static_cast<std::int8_t>((l & 1) ? kFalse : kTrue);
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(l);
}

int Solver::propagate() {
  while (qhead_ < trail_.size()) {
    Lit false_lit = negate(trail_[qhead_++]);
    std::vector<int>& ws = watches_[false_lit];
    std::size_t i = 0;
    std::size_t j = 0;
    int conflict = -1;
    while (i < ws.size()) {
      int ci = ws[i++];
      std::vector<Lit>& c = clauses_[ci];
      if (c[0] == false_lit) std::swap(c[0], c[1]);
      if (lit_value(c[0]) == kTrue) {
        ws[j++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.size(); ++k) {
        if (lit_value(c[k]) != kFalse) {
          std::swap(c[1], c[k]);
          watches_[c[1]].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = ci;
      if (lit_value(c[0]) == kFalse) {
        conflict = ci;
        while (i < ws.size()) ws[j++] = ws[i++];
      } else {
        enqueue(c[0], ci);
      }
    }
    ws.resize(j);
    if (conflict >= 0) {
      qhead_ = trail_.size();
      return conflict;
    }
  }
  return -1;
}

void Solver::bump(int var) {
  activity_[var] += bump_amount_;
  if (activity_[var] > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    bump_amount_ *= 1e-100;
  }
}

void Solver::analyze(int conflict, std::vector<Lit>& learnt, int& backtrack_level) {
  learnt.assign(1, 0);
  int pending = 0;
  Lit p = -1;
  std::size_t index = trail_.size();
  int ci = conflict;
  do {
    const std::vector<Lit>& c = clauses_[ci];
    for (std::size_t k = (p == -1 ? 0 : 1); k < c.size(); ++k) {
      int v = var_of(c[k]);
      if (seen_[v] || level_[v] == 0) continue;
      seen_[v] = 1;
      bump(v);
      if (level_[v] >= decision_level()) {
        ++pending;
      } else {
        learnt.push_back(c[k]);
      }
    }
    do {
      --index;
    } while (!seen_[var_of(trail_[index])]);
    p = trail_[index];
    ci = reason_[var_of(p)];
    seen_[var_of(p)] = 0;
    --pending;
  } while (pending > 0);
  learnt[0] = negate(p);

  backtrack_level = 0;
  std::size_t max_i = 1;
  for (std::size_t i = 1; i < learnt.size(); ++i) {
    int lv = level_[var_of(learnt[i])];
    if (lv > backtrack_level) {
      backtrack_level = lv;
      max_i = i;
    }
  }
  if (learnt.size() > 1) std::swap(learnt[1], learnt[max_i]);
  for (Lit l : learnt) seen_[var_of(l)] = 0;
}

void Solver::backtrack(int level) {
  if (decision_level() <= level) return;
  std::size_t stop = static_cast<std::size_t>(trail_lim_[level]);
  for (std::size_t i = trail_.size(); i-- > stop;) {
    int v = var_of(trail_[i]);
    phase_[v] = assign_[v];
    assign_[v] = kUndef;
    reason_[v] = -1;
  }
  trail_.resize(stop);
  trail_lim_.resize(level);
  qhead_ = trail_.size();
}

int Solver::pick_branch_var() {
  int best = -1;
  for (int v = 0; v < var_count(); ++v) {
    if (assign_[v] == kUndef && (best < 0 || activity_[v] > activity_[best])) best = v;
  }
  return best;
}

bool Solver::solve() {
  if (inconsistent_) return false;
  if (propagate() != -1) return false;
  std::vector<Lit> learnt;
  std::uint64_t restart_index = 0;
  std::uint64_t budget = 100 * luby(restart_index);
  std::uint64_t since_restart = 0;
  for (;;) {
    int conflict = propagate();
    if (conflict >= 0) {
      ++conflicts_;
      ++since_restart;
      if (decision_level() == 0) return false;
      int level = 0;
      analyze(conflict, learnt, level);
      backtrack(level);
      if (learnt.size() == 1) {
        enqueue(learnt[0], -1);
      } else {
        int ci = attach(learnt);
        enqueue(learnt[0], ci);
      }
      bump_amount_ *= 1.05;
      if (since_restart >= budget) {
        backtrack(0);
        since_restart = 0;
        budget = 100 * luby(++restart_index);
      }
    } else {
      int v = pick_branch_var();
      if (v < 0) {
        model_ = assign_;
        backtrack(0);
        return true;
      }
      trail_lim_.push_back(static_cast<int>(trail_.size()));
      enqueue(phase_[v] == kTrue ? pos(v) : neg(v), -1);
    }
  }
}

}  // namespace teamlogic::sat
