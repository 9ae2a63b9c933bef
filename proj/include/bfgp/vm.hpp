#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "bfgp/core.hpp"
#include "bfgp/program.hpp"

namespace bfgp {

enum class ExecStatus : std::uint8_t { solved, halted_undefined, incorrect, inapplicable, infinite };

inline const char* to_string(ExecStatus s) {
  switch (s) {
    case ExecStatus::solved: return "solved";
    case ExecStatus::halted_undefined: return "halted_undefined";
    case ExecStatus::incorrect: return "incorrect";
    case ExecStatus::inapplicable: return "inapplicable";
    case ExecStatus::infinite: return "infinite";
  }
  return "?";
}

constexpr bool is_failure(ExecStatus s) noexcept {
  return s == ExecStatus::incorrect || s == ExecStatus::inapplicable || s == ExecStatus::infinite;
}

inline constexpr std::uint64_t kUnboundedSteps = std::numeric_limits<std::uint64_t>::max();

struct ExecOptions {
  std::uint64_t max_steps = kUnboundedSteps;
  bool detect_infinite = true;
  bool record_trace = false;
};

// A program state plus execution bookkeeping. Kept apart from the outcome so
// the search can resume a run that halted on an undefined line.
struct ExecState {
  MachineState state;
  std::size_t line = 0;
  std::uint64_t steps = 0;
  std::uint64_t actions_applied = 0;
  std::size_t pc_reached = 0;
  ExecStatus status = ExecStatus::halted_undefined;
  std::uint64_t visited_states = 0;
  std::vector<ActionId> trace;
};

struct ExecutionOutcome {
  ExecStatus status = ExecStatus::halted_undefined;
  std::size_t line = 0;  // line where execution stopped
  std::uint64_t steps_executed = 0;
  std::size_t pc_reached = 0;
  MachineState final_state;
  std::vector<ActionId> action_trace;
  std::uint64_t actions_applied = 0;
  std::uint64_t visited_states = 0;
};

inline std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_program_state(const MachineState& s, std::size_t line) noexcept {
  std::uint64_t h = mix64(line * 4 + (s.flags.zero ? 2u : 0u) + (s.flags.carry ? 1u : 0u));
  for (auto v : s.registers) h = mix64(h ^ static_cast<std::uint64_t>(v));
  h = mix64(h ^ 0xa5a5a5a5ULL);
  for (auto p : s.pointers) h = mix64(h ^ static_cast<std::uint64_t>(p));
  return h;
}

namespace detail {

// Open-addressing set of 64-bit state hashes; reused across runs on a thread.
// Occupied slots are remembered so clearing costs the number of entries, not
// the table size.
class VisitedSet {
 public:
  void clear() {
    if (used_.size() * 4 < slots_.size()) {
      for (auto i : used_) slots_[i] = 0;
    } else {
      std::fill(slots_.begin(), slots_.end(), 0);
    }
    used_.clear();
  }

  // Returns false when the key was already present.
  bool insert(std::uint64_t key) {
    if (key == 0) key = 1;
    if (slots_.empty()) slots_.assign(64, 0);
    if ((used_.size() + 1) * 2 > slots_.size()) grow();
    const std::size_t mask = slots_.size() - 1;
    for (std::size_t i = key & mask;; i = (i + 1) & mask) {
      if (slots_[i] == key) return false;
      if (slots_[i] == 0) {
        slots_[i] = key;
        used_.push_back(i);
        return true;
      }
    }
  }

  std::size_t size() const noexcept { return used_.size(); }

 private:
  void grow() {
    std::vector<std::uint64_t> old(slots_.size() * 2, 0);
    old.swap(slots_);
    used_.clear();
    const std::size_t mask = slots_.size() - 1;
    for (auto k : old) {
      if (k == 0) continue;
      std::size_t i = k & mask;
      while (slots_[i] != 0) i = (i + 1) & mask;
      slots_[i] = k;
      used_.push_back(i);
    }
  }

  std::vector<std::uint64_t> slots_;
  std::vector<std::size_t> used_;
};

inline VisitedSet& thread_visited_set() {
  thread_local VisitedSet set;
  return set;
}

}  // namespace detail

// Runs from the current program state until it halts. Revisits are only
// checked at goto lines: every cycle of program states passes through one,
// because without jumps the line index strictly increases.
inline void run(const PlanningProgram& prog, const ActionSet& actions, const Instance& inst, Value bound,
                ExecState& st, const ExecOptions& opt) {
  auto& seen = detail::thread_visited_set();
  seen.clear();
  const auto& lines = prog.lines;
  auto& s = st.state;
  auto halt = [&](ExecStatus status) {
    st.status = status;
    st.visited_states += seen.size();
  };
  for (;;) {
    const std::size_t i = st.line;
    if (i > st.pc_reached) st.pc_reached = i;
    const ProgramLine& w = lines[i];
    switch (w.kind) {
      case ProgramLine::Kind::undefined:
        return halt(ExecStatus::halted_undefined);
      case ProgramLine::Kind::end:
        return halt(inst.goal.satisfied_by(s) ? ExecStatus::solved : ExecStatus::incorrect);
      case ProgramLine::Kind::action:
        if (st.steps >= opt.max_steps) return halt(ExecStatus::infinite);
        if (!apply_in_place(actions.actions[w.action], s, inst.variables, bound)) {
          return halt(ExecStatus::inapplicable);
        }
        ++st.steps;
        ++st.actions_applied;
        if (opt.record_trace) st.trace.push_back(w.action);
        st.line = i + 1;
        break;
      case ProgramLine::Kind::jump:
        if (st.steps >= opt.max_steps) return halt(ExecStatus::infinite);
        if (opt.detect_infinite && !seen.insert(hash_program_state(s, i))) return halt(ExecStatus::infinite);
        ++st.steps;
        st.line = holds(w.feature, s.flags) ? i + 1 : w.target;
        break;
    }
  }
}

inline ExecState start_state(const Instance& inst) {
  ExecState st;
  st.state = inst.initial;
  return st;
}

inline ExecutionOutcome to_outcome(ExecState st) {
  ExecutionOutcome out;
  out.status = st.status;
  out.line = st.line;
  out.steps_executed = st.steps;
  out.pc_reached = st.pc_reached;
  out.final_state = std::move(st.state);
  out.action_trace = std::move(st.trace);
  out.actions_applied = st.actions_applied;
  out.visited_states = st.visited_states;
  return out;
}

inline ExecutionOutcome execute(const PlanningProgram& prog, const ActionSet& actions, const Instance& inst,
                                Value bound, ExecOptions opt = {}) {
  auto st = start_state(inst);
  run(prog, actions, inst, bound, st, opt);
  return to_outcome(std::move(st));
}

inline ExecutionOutcome execute(const PlanningProgram& prog, const GPProblem& problem, const Instance& inst,
                                std::uint64_t max_steps = kUnboundedSteps, bool record_trace = true) {
  return execute(prog, problem.actions, inst, problem.arithmetic_bound, {max_steps, true, record_trace});
}

// The sequential plan induced by a solving execution.
inline std::vector<ActionId> exec_plan(const PlanningProgram& prog, const GPProblem& problem, const Instance& inst,
                                       std::uint64_t max_steps = kUnboundedSteps) {
  auto out = execute(prog, problem, inst, max_steps, true);
  if (out.status != ExecStatus::solved) {
    throw Error(ErrorCode::not_a_solution, inst.label + " ends " + to_string(out.status) + " at line " +
                                               std::to_string(out.line));
  }
  return std::move(out.action_trace);
}

}  // namespace bfgp
