// SPDX-License-Identifier: Apache-2.0

#include "teamlogic/solve.hpp"

#include <omp.h>

#include <atomic>
#include <exception>
#include <mutex>

#include "teamlogic/error.hpp"

namespace teamlogic {

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kSat: return "SAT";
    case Verdict::kUnsatUpTo: return "UNSAT_UP_TO";
    case Verdict::kUnsat: return "UNSAT";
    case Verdict::kUnknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

namespace {

Json stats_json(const SolveStats& s) {
  return {{"structures_examined", s.structures_examined}, {"evaluator_calls", s.evaluator_calls}};
}

bool team_layer(const Formula& f) {
  if (!f) return true;
  switch (f->kind) {
    case NodeKind::kNot:
    case NodeKind::kImplies:
    case NodeKind::kIff:
    case NodeKind::kCountExists:
    case NodeKind::kSOExists: return false;
    default: return team_layer(f->lhs) && team_layer(f->rhs);
  }
}

Vocabulary search_vocabulary(const Formula& f, const Vocabulary& vocab) {
  Vocabulary used = relation_symbols(f);
  for (const auto& [name, arity] : used.symbols()) {
    auto declared = vocab.arity(name);
    if (declared && *declared != arity) {
      throw InvalidArgument("relation " + name + " is used with arity " + std::to_string(arity) +
                            " but declared with " + std::to_string(*declared));
    }
  }
  return used;
}

struct Sweep {
  std::optional<Structure> hit;
  int bound = 0;
  SolveStats stats;
};

/// First structure (by size, then index) on which `holds` returns `want`.
Sweep sweep(const Formula& f, const Vocabulary& vocab, const AtomRegistry& atoms, int max_size,
            const SolveOptions& options, bool want) {
  if (max_size < 1) throw InvalidArgument("max size must be at least 1");
  if (!free_variables(f).empty()) throw InvalidArgument("expected a sentence");
  Vocabulary v = search_vocabulary(f, vocab);
  Sweep out;
  for (int n = 1; n <= max_size; ++n) {
    StructureSpace space(v, n);
    const std::uint64_t count = space.count();
    if (count > options.max_structures) {
      throw ResourceLimit(std::to_string(count) + " structures of size " + std::to_string(n) +
                          " exceed the limit of " + std::to_string(options.max_structures));
    }
    std::atomic<std::uint64_t> examined{0}, calls{0};
    auto pred = [&](std::uint64_t i) {
      SolveStats local;
      bool r = model_check(space.at(i), f, atoms, options, &local);
      examined.fetch_add(1, std::memory_order_relaxed);
      calls.fetch_add(local.evaluator_calls, std::memory_order_relaxed);
      return r == want;
    };
    std::optional<std::uint64_t> first = options.jobs > 1 ? find_first_parallel(count, pred, options.jobs)
                                                          : find_first_serial(count, pred);
    out.stats.structures_examined += examined.load();
    out.stats.evaluator_calls += calls.load();
    out.bound = n;
    if (first) {
      out.hit = space.at(*first);
      return out;
    }
  }
  return out;
}

}  // namespace

std::optional<std::uint64_t> find_first_serial(std::uint64_t count, const std::function<bool(std::uint64_t)>& pred) {
  for (std::uint64_t i = 0; i < count; ++i)
    if (pred(i)) return i;
  return std::nullopt;
}

std::optional<std::uint64_t> find_first_parallel(std::uint64_t count,
                                                 const std::function<bool(std::uint64_t)>& pred, int jobs) {
  std::atomic<std::uint64_t> best{count};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::uint64_t error_index = count;
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 16) num_threads(jobs)
  for (std::int64_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::uint64_t>(ii);
    if (i >= best.load(std::memory_order_relaxed)) continue;
    try {
      if (pred(i)) {
        std::uint64_t cur = best.load();
        while (i < cur && !best.compare_exchange_weak(cur, i)) {
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (i < error_index) {
        error_index = i;
        error = std::current_exception();
      }
    }
  }
  const std::uint64_t b = best.load();
  if (error && error_index < b) std::rethrow_exception(error);
  if (b < count) return b;
  return std::nullopt;
}

bool model_check(const Structure& s, const Formula& f, const AtomRegistry& atoms, const SolveOptions& options,
                 SolveStats* stats) {
  if (stats) ++stats->structures_examined;
  if (!team_layer(f)) {
    if (stats) ++stats->evaluator_calls;
    return sigma11_satisfies(s, {}, f, options.sigma11_backend);
  }
  Evaluator ev(s, atoms, options.eval);
  bool r = ev.satisfies_sentence(f);
  if (stats) stats->evaluator_calls += ev.stats().calls;
  return r;
}

SatResult sat_bounded(const Formula& f, const Vocabulary& vocab, const AtomRegistry& atoms, int max_size,
                      const SolveOptions& options) {
  Sweep s = sweep(f, vocab, atoms, max_size, options, true);
  SatResult r;
  r.bound = s.bound;
  r.stats = s.stats;
  if (s.hit) {
    r.verdict = Verdict::kSat;
    r.model = std::move(s.hit);
  } else {
    r.verdict = Verdict::kUnsatUpTo;
  }
  return r;
}

namespace {

void collect_atoms(const Formula& f, std::vector<Formula>& out) {
  if (!f) return;
  if (f->kind == NodeKind::kBuiltinAtom || f->kind == NodeKind::kGenAtom) out.push_back(f);
  collect_atoms(f->lhs, out);
  collect_atoms(f->rhs, out);
}

}  // namespace

SatResult decide_ea(const Formula& f, const Vocabulary& vocab, const AtomRegistry& atoms,
                    const SolveOptions& options) {
  PrefixClass pc = prefix_class(f);
  if (!pc.ea || !team_layer(f) || !free_variables(f).empty()) throw NotEA("not an E*A* sentence: " + render(f));
  const int bound = std::max(1, pc.exists);

  SatResult r;
  r.bound = bound;
  std::vector<Formula> found;
  collect_atoms(f, found);
  std::set<std::string> seen;
  for (const Formula& a : found) {
    std::string text = render(a);
    if (a->kind == NodeKind::kBuiltinAtom) {
      std::string name(builtin_name(a->builtin));
      if (a->builtin == BuiltinKind::kDep && a->tuples[0].empty()) name = "const";
      if (!seen.insert(name).second) continue;
      if (a->builtin == BuiltinKind::kInc || a->builtin == BuiltinKind::kInd) {
        r.verdict = Verdict::kUnknown;
        r.reason = "atom " + text + " is not closed under substructures";
        r.evidence.push_back({name, "none", "built-in, not substructure closed"});
        return r;
      }
      r.evidence.push_back({name, "asserted", "built-in"});
      continue;
    }
    if (!seen.insert(a->symbol).second) continue;
    const AtomDef& def = atoms.at(a->symbol);
    if (def.substructure_closed) {
      if (!*def.substructure_closed) {
        r.verdict = Verdict::kUnknown;
        r.reason = "atom @" + def.name + " is declared not closed under substructures";
        r.evidence.push_back({def.name, "none", "declared not substructure closed"});
        return r;
      }
      r.evidence.push_back({def.name, "asserted", "declared substructure closed"});
      continue;
    }
    // A closure failure needs a structure strictly larger than the bound.
    const int probe_size = std::max(3, bound + 1);
    ProbeReport probe;
    try {
      probe = probe_properties(def, probe_size);
    } catch (const ResourceLimit& e) {
      r.verdict = Verdict::kUnknown;
      r.reason = "atom @" + def.name + " could not be probed: " + e.what();
      r.evidence.push_back({def.name, "none", e.what()});
      return r;
    }
    if (!probe.substructure_closed.holds) {
      r.verdict = Verdict::kUnknown;
      r.reason = "atom @" + def.name + " is not closed under substructures: " + probe.substructure_closed.witness;
      r.evidence.push_back({def.name, "none", probe.substructure_closed.witness});
      return r;
    }
    r.evidence.push_back({def.name, "probe", "no counterexample up to size " + std::to_string(probe_size)});
  }

  SatResult s = sat_bounded(f, vocab, atoms, bound, options);
  r.stats = s.stats;
  r.model = std::move(s.model);
  r.verdict = s.verdict == Verdict::kSat ? Verdict::kSat : Verdict::kUnsat;
  return r;
}

RefuteResult refute_validity(const Formula& f, const Vocabulary& vocab, const AtomRegistry& atoms, int max_size,
                             const SolveOptions& options) {
  Sweep s = sweep(f, vocab, atoms, max_size, options, false);
  RefuteResult r;
  r.bound = s.bound;
  r.stats = s.stats;
  r.counterexample = std::move(s.hit);
  return r;
}

Json sat_result_to_json(const SatResult& r) {
  Json j{{"verdict", std::string(verdict_name(r.verdict))}, {"bound", r.bound}, {"stats", stats_json(r.stats)}};
  if (r.model) j["model"] = structure_to_json(*r.model);
  if (!r.reason.empty()) j["reason"] = r.reason;
  if (!r.evidence.empty()) {
    Json ev = Json::array();
    for (const auto& e : r.evidence) ev.push_back({{"atom", e.atom}, {"level", e.level}, {"detail", e.detail}});
    j["evidence"] = ev;
  }
  return j;
}

Json refute_result_to_json(const RefuteResult& r) {
  Json j{{"verdict", r.counterexample ? "COUNTEREXAMPLE" : "NO_COUNTEREXAMPLE_UP_TO"},
         {"bound", r.bound},
         {"stats", stats_json(r.stats)}};
  if (r.counterexample) j["counterexample"] = structure_to_json(*r.counterexample);
  return j;
}

}  // namespace teamlogic
