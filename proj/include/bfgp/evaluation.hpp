#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "bfgp/core.hpp"
#include "bfgp/error.hpp"
#include "bfgp/program.hpp"
#include "bfgp/vm.hpp"

namespace bfgp {

enum class EvalFn : std::uint8_t { f1, f2, f3, h4, h5, f6 };

inline const char* to_string(EvalFn f) {
  static constexpr std::array<const char*, 6> names{"f1", "f2", "f3", "h4", "h5", "f6"};
  return names[static_cast<std::size_t>(f)];
}

inline EvalFn parse_eval_fn(std::string_view s) {
  for (std::uint8_t i = 0; i < 6; ++i) {
    if (s == to_string(static_cast<EvalFn>(i))) return static_cast<EvalFn>(i);
  }
  throw Error(ErrorCode::unknown_function, "unknown evaluation function '" + std::string(s) + "'");
}

// "h5,f1" -> {h5, f1}
inline std::vector<EvalFn> parse_fn_sequence(std::string_view s) {
  std::vector<EvalFn> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    auto tok = detail::strip_spaces(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    out.push_back(parse_eval_fn(tok));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string format_fn_sequence(const std::vector<EvalFn>& fns) {
  std::string out;
  for (std::size_t i = 0; i < fns.size(); ++i) {
    if (i) out += ",";
    out += to_string(fns[i]);
  }
  return out;
}

enum class NodeStatus : std::uint8_t { solution, open, dead_end };

inline const char* to_string(NodeStatus s) {
  switch (s) {
    case NodeStatus::solution: return "solution";
    case NodeStatus::open: return "open";
    case NodeStatus::dead_end: return "dead_end";
  }
  return "?";
}

enum class Aggregate : std::uint8_t { sum, max, avg };

struct EvaluationRecord {
  std::int64_t f1 = 0;
  std::int64_t f2 = 0;
  std::int64_t f3 = 0;
  std::int64_t h4 = 0;
  std::int64_t h5 = 0;
  std::int64_t f6 = 0;
  std::int64_t pc_max = 0;
  NodeStatus status = NodeStatus::open;
  // First undefined line on which an instance halted (instances in order);
  // the only line successors may program.
  std::size_t frontier_line = 0;

  std::int64_t value(EvalFn f) const noexcept {
    switch (f) {
      case EvalFn::f1: return f1;
      case EvalFn::f2: return f2;
      case EvalFn::f3: return f3;
      case EvalFn::h4: return h4;
      case EvalFn::h5: return h5;
      case EvalFn::f6: return f6;
    }
    return 0;
  }

  bool operator==(const EvaluationRecord&) const = default;
};

struct Structural {
  std::int64_t f1 = 0;  // goto lines
  std::int64_t f2 = 0;  // undefined lines
  std::int64_t f3 = 0;  // action lines minus distinct actions
};

inline Structural eval_structural(const PlanningProgram& prog) {
  Structural s;
  std::vector<ActionId> used;
  for (const auto& w : prog.lines) {
    switch (w.kind) {
      case ProgramLine::Kind::jump: ++s.f1; break;
      case ProgramLine::Kind::undefined: ++s.f2; break;
      case ProgramLine::Kind::action: used.push_back(w.action); break;
      case ProgramLine::Kind::end: break;
    }
  }
  std::sort(used.begin(), used.end());
  auto distinct = std::unique(used.begin(), used.end()) - used.begin();
  s.f3 = static_cast<std::int64_t>(used.size()) - distinct;
  return s;
}

inline std::int64_t saturating_add(std::int64_t a, std::int64_t b) noexcept {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) return std::numeric_limits<std::int64_t>::max();
  return r;
}

// Sum of squared differences over the goal atoms.
inline std::int64_t goal_distance(const Instance& inst, const MachineState& s) {
  std::int64_t d = 0;
  auto sq = [](std::int64_t x) -> std::int64_t {
    __int128 v = static_cast<__int128>(x) * x;
    return v > std::numeric_limits<std::int64_t>::max() ? std::numeric_limits<std::int64_t>::max()
                                                        : static_cast<std::int64_t>(v);
  };
  for (const auto& [idx, g] : inst.goal.registers) d = saturating_add(d, sq(s.registers[idx] - g));
  for (const auto& [idx, g] : inst.goal.pointers) d = saturating_add(d, sq(s.pointers[idx] - g));
  return d;
}

// Per-instance step cap used during synthesis when none is configured. Grows
// with the square of the register count; the known sorting program needs
// about a million steps on a 21-element list. Loops that revisit a state are
// caught long before the cap, so it only bounds non-repeating runaways.
inline std::uint64_t default_step_budget(std::size_t num_registers) {
  const std::uint64_t x = num_registers + 2;
  return 1000 + 10000 * x * x;
}

struct EvalConfig {
  Aggregate h5_aggregate = Aggregate::sum;
  Aggregate f6_aggregate = Aggregate::sum;
  std::uint64_t max_steps = 0;  // 0: default_step_budget per instance

  std::uint64_t step_cap(const Instance& inst) const {
    return max_steps ? max_steps : default_step_budget(inst.num_registers());
  }
};

// Per-instance contribution to an evaluation record.
struct InstanceScore {
  std::int64_t h5 = 0;
  std::int64_t f6 = 0;
  std::int64_t pc = 0;
};

inline InstanceScore score_run(const Instance& inst, const ExecState& run) {
  return {goal_distance(inst, run.state), static_cast<std::int64_t>(run.actions_applied),
          static_cast<std::int64_t>(run.pc_reached)};
}

inline std::int64_t aggregate(Aggregate agg, std::span<const InstanceScore> scores, std::int64_t InstanceScore::*field) {
  std::int64_t acc = 0;
  for (const auto& s : scores) {
    acc = agg == Aggregate::max ? std::max(acc, s.*field) : saturating_add(acc, s.*field);
  }
  if (agg == Aggregate::avg && !scores.empty()) acc /= static_cast<std::int64_t>(scores.size());
  return acc;
}

// Where one instance's run stopped; all the record needs besides the scores.
struct RunEnd {
  ExecStatus status = ExecStatus::halted_undefined;
  std::size_t line = 0;
};

inline EvaluationRecord dead_end_record() {
  EvaluationRecord r;
  r.status = NodeStatus::dead_end;
  return r;
}

inline EvaluationRecord assemble_record(const PlanningProgram& prog, std::span<const RunEnd> ends,
                                        std::span<const InstanceScore> scores, const EvalConfig& cfg) {
  bool all_solved = true;
  bool frontier_set = false;
  std::size_t frontier = 0;
  for (const auto& e : ends) {
    if (is_failure(e.status)) return dead_end_record();
    if (e.status != ExecStatus::solved) {
      all_solved = false;
      if (!frontier_set) {
        frontier = e.line;
        frontier_set = true;
      }
    }
  }
  EvaluationRecord r;
  auto st = eval_structural(prog);
  r.f1 = st.f1;
  r.f2 = st.f2;
  r.f3 = st.f3;
  for (const auto& s : scores) r.pc_max = std::max(r.pc_max, s.pc);
  r.h4 = static_cast<std::int64_t>(prog.size()) - 1 - r.pc_max;
  r.h5 = aggregate(cfg.h5_aggregate, scores, &InstanceScore::h5);
  r.f6 = aggregate(cfg.f6_aggregate, scores, &InstanceScore::f6);
  r.frontier_line = frontier;
  r.status = all_solved ? NodeStatus::solution : NodeStatus::open;
  return r;
}

// Executes `prog` on every instance from scratch; `runs` receives the final
// execution states (one per instance, in order).
inline EvaluationRecord evaluate_runs(const PlanningProgram& prog, const GPProblem& problem, const EvalConfig& cfg,
                                      std::vector<ExecState>& runs, std::vector<InstanceScore>& scores) {
  runs.clear();
  scores.clear();
  runs.reserve(problem.instances.size());
  std::vector<RunEnd> ends;
  ends.reserve(problem.instances.size());
  for (const auto& inst : problem.instances) {
    auto st = start_state(inst);
    run(prog, problem.actions, inst, problem.arithmetic_bound, st, {cfg.step_cap(inst), true, false});
    scores.push_back(score_run(inst, st));
    ends.push_back({st.status, st.line});
    runs.push_back(std::move(st));
  }
  return assemble_record(prog, ends, scores, cfg);
}

inline EvaluationRecord eval_performance(const PlanningProgram& prog, const GPProblem& problem,
                                         const EvalConfig& cfg = {}) {
  if (problem.instances.empty()) throw Error(ErrorCode::invalid_size, "problem has no instances");
  std::vector<ExecState> runs;
  std::vector<InstanceScore> scores;
  return evaluate_runs(prog, problem, cfg, runs, scores);
}

inline EvaluationRecord eval_performance(const PlanningProgram& prog, const GPProblem& problem,
                                         std::uint64_t max_steps) {
  EvalConfig cfg;
  cfg.max_steps = max_steps;
  return eval_performance(prog, problem, cfg);
}

// Lexicographic ranking key; smaller is better.
struct RankKey {
  std::array<std::int64_t, 6> values{};
  std::uint8_t size = 0;

  auto operator<=>(const RankKey& o) const noexcept {
    for (std::size_t i = 0; i < std::min(size, o.size); ++i) {
      if (auto c = values[i] <=> o.values[i]; c != 0) return c;
    }
    return size <=> o.size;
  }
  bool operator==(const RankKey& o) const noexcept { return (*this <=> o) == 0; }
};

inline RankKey rank_key(const EvaluationRecord& r, std::span<const EvalFn> fns) {
  if (fns.empty()) throw Error(ErrorCode::unknown_function, "empty evaluation function sequence");
  if (fns.size() > 6) throw Error(ErrorCode::unknown_function, "at most six evaluation functions");
  RankKey k;
  k.size = static_cast<std::uint8_t>(fns.size());
  for (std::size_t i = 0; i < fns.size(); ++i) k.values[i] = r.value(fns[i]);
  return k;
}

}  // namespace bfgp
