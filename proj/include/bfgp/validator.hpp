#pragma once

// Runs a program on held-out instances and reports per-instance outcomes.
// With detect_infinite every program state reached at a goto is stored so a
// revisit ends the run; fast mode relies on the step cap alone.

#include <chrono>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bfgp/core.hpp"
#include "bfgp/parallel.hpp"
#include "bfgp/program.hpp"
#include "bfgp/vm.hpp"

namespace bfgp {

enum class ValidationMode : std::uint8_t { detect_infinite, fast };

inline const char* to_string(ValidationMode m) {
  return m == ValidationMode::detect_infinite ? "detect_infinite" : "fast";
}

struct InstanceReport {
  std::string label;
  ExecStatus status = ExecStatus::halted_undefined;
  std::uint64_t steps = 0;
  double duration = 0;  // seconds
  std::uint64_t visited_states = 0;
};

struct ValidationReport {
  ValidationMode mode = ValidationMode::detect_infinite;
  std::vector<InstanceReport> instances;
  std::size_t solved = 0;
  double total_duration = 0;
  // Largest visited set times the footprint of a stored state, plus the
  // largest machine state; an estimate, not a measured RSS.
  std::uint64_t peak_memory_bytes = 0;

  bool all_solved() const noexcept { return solved == instances.size(); }
};

inline constexpr std::uint64_t kValidationSteps = 10'000'000'000ULL;

struct ValidateOptions {
  ValidationMode mode = ValidationMode::detect_infinite;
  std::uint64_t max_steps = kValidationSteps;
  std::size_t workers = 1;
};

inline ValidationReport validate(const PlanningProgram& prog, const ActionSet& actions,
                                 std::span<const Instance> instances, Value bound, const ValidateOptions& opt = {}) {
  if (instances.empty()) throw Error(ErrorCode::invalid_size, "validation needs at least one instance");
  check_program(prog, actions.size());
  ValidationReport report;
  report.mode = opt.mode;
  report.instances.resize(instances.size());
  std::vector<std::uint64_t> footprint(instances.size());
  WorkerPool pool(opt.workers);
  pool.run(instances.size(), [&](std::size_t k) {
    const auto& inst = instances[k];
    const auto t0 = std::chrono::steady_clock::now();
    auto out = execute(prog, actions, inst, bound, {opt.max_steps, opt.mode == ValidationMode::detect_infinite, false});
    auto& r = report.instances[k];
    r.label = inst.label;
    r.status = out.status;
    r.steps = out.steps_executed;
    r.duration = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.visited_states = out.visited_states;
    const std::uint64_t state_bytes =
        inst.initial.registers.size() * sizeof(Value) + inst.initial.pointers.size() * sizeof(std::int32_t);
    // Each stored state is a 64-bit hash in a table kept at most half full,
    // plus its slot index.
    footprint[k] = out.visited_states * (2 * sizeof(std::uint64_t) + sizeof(std::size_t)) + state_bytes;
  });
  for (std::size_t k = 0; k < instances.size(); ++k) {
    const auto& r = report.instances[k];
    if (r.status == ExecStatus::solved) ++report.solved;
    report.total_duration += r.duration;
    report.peak_memory_bytes = std::max(report.peak_memory_bytes, footprint[k]);
  }
  return report;
}

inline ValidationReport validate(const PlanningProgram& prog, const GPProblem& problem,
                                 const ValidateOptions& opt = {}) {
  return validate(prog, problem.actions, problem.instances, problem.arithmetic_bound, opt);
}

inline std::string report_csv(const ValidationReport& r) {
  std::ostringstream out;
  out << "label,status,steps,duration_s,visited_states\n";
  out << std::setprecision(6) << std::fixed;
  for (const auto& i : r.instances) {
    out << i.label << "," << to_string(i.status) << "," << i.steps << "," << i.duration << "," << i.visited_states
        << "\n";
  }
  return out.str();
}

inline nlohmann::json report_json(const ValidationReport& r) {
  std::vector<std::string> failing;
  for (const auto& i : r.instances) {
    if (i.status != ExecStatus::solved) failing.push_back(i.label);
  }
  return {{"mode", to_string(r.mode)},
          {"instances", r.instances.size()},
          {"solved", r.solved},
          {"total_duration_s", r.total_duration},
          {"peak_memory_bytes", r.peak_memory_bytes},
          {"failing", failing}};
}

}  // namespace bfgp
