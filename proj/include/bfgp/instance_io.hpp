#pragma once

// Instance text format:
//   # comment
//   vars 3
//   var x0 0 100 7
//   var x1 0 100 2
//   var len 0 100 2
//   pointer tail 1
//   goal x0 2
//   goal b 0          (a goal on a pointer name constrains that pointer)
//
// `pointer` lines are optional and give initial pointer values by name;
// pointers not listed start at 0.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bfgp/core.hpp"
#include "bfgp/error.hpp"

namespace bfgp {

namespace detail {

[[noreturn]] inline void instance_fail(std::size_t lineno, const std::string& msg) {
  throw Error(ErrorCode::parse_error, "line " + std::to_string(lineno) + ": " + msg);
}

inline Value parse_value(const std::string& tok, std::size_t lineno) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(tok, &used);
  } catch (const std::exception&) {
    instance_fail(lineno, "expected an integer, got '" + tok + "'");
  }
  if (used != tok.size()) instance_fail(lineno, "expected an integer, got '" + tok + "'");
  return static_cast<Value>(v);
}

}  // namespace detail

inline Instance parse_instance(std::string_view text, std::span<const PointerSpec> pointers, std::string label = {}) {
  Instance inst;
  inst.label = std::move(label);
  inst.initial.pointers.assign(pointers.size(), 0);
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  std::optional<std::size_t> declared;
  std::vector<std::pair<std::string, Value>> goals;
  std::vector<std::size_t> goal_lines;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream words(raw);
    std::vector<std::string> tok;
    for (std::string w; words >> w;) tok.push_back(w);
    if (tok.empty()) continue;
    const auto& kw = tok[0];
    if (kw == "vars") {
      if (tok.size() != 2) detail::instance_fail(lineno, "expected 'vars <count>'");
      if (declared) detail::instance_fail(lineno, "duplicate vars header");
      auto c = detail::parse_value(tok[1], lineno);
      if (c < 1) detail::instance_fail(lineno, "variable count must be positive");
      declared = static_cast<std::size_t>(c);
    } else if (kw == "var") {
      if (!declared) detail::instance_fail(lineno, "'var' before the 'vars' header");
      if (tok.size() != 5) detail::instance_fail(lineno, "expected 'var <name> <min> <max> <initial>'");
      VariableSpec v{tok[1], detail::parse_value(tok[2], lineno), detail::parse_value(tok[3], lineno)};
      auto init = detail::parse_value(tok[4], lineno);
      if (v.min > v.max) detail::instance_fail(lineno, "empty domain for " + v.name);
      if (!v.contains(init)) detail::instance_fail(lineno, "initial value of " + v.name + " out of domain");
      for (const auto& o : inst.variables) {
        if (o.name == v.name) detail::instance_fail(lineno, "duplicate variable " + v.name);
      }
      inst.variables.push_back(v);
      inst.initial.registers.push_back(init);
    } else if (kw == "pointer") {
      if (tok.size() != 3) detail::instance_fail(lineno, "expected 'pointer <name> <initial>'");
      std::size_t z = 0;
      while (z < pointers.size() && pointers[z].name != tok[1]) ++z;
      if (z == pointers.size()) detail::instance_fail(lineno, "unknown pointer " + tok[1]);
      inst.initial.pointers[z] = static_cast<std::int32_t>(detail::parse_value(tok[2], lineno));
    } else if (kw == "goal") {
      if (tok.size() != 3) detail::instance_fail(lineno, "expected 'goal <name> <value>'");
      goals.emplace_back(tok[1], detail::parse_value(tok[2], lineno));
      goal_lines.push_back(lineno);
    } else {
      detail::instance_fail(lineno, "unknown keyword '" + kw + "'");
    }
  }
  if (!declared) throw Error(ErrorCode::parse_error, "missing 'vars' header");
  if (inst.variables.size() != *declared) {
    throw Error(ErrorCode::parse_error, "header declares " + std::to_string(*declared) + " variables, found " +
                                            std::to_string(inst.variables.size()));
  }
  for (std::size_t g = 0; g < goals.size(); ++g) {
    const auto& [name, value] = goals[g];
    bool found = false;
    for (std::size_t x = 0; x < inst.variables.size() && !found; ++x) {
      if (inst.variables[x].name == name) {
        inst.goal.registers[x] = value;
        found = true;
      }
    }
    for (std::size_t z = 0; z < pointers.size() && !found; ++z) {
      if (pointers[z].name == name) {
        inst.goal.pointers[z] = value;
        found = true;
      }
    }
    if (!found) detail::instance_fail(goal_lines[g], "goal on unknown name " + name);
  }
  check_instance(inst, pointers.size());
  return inst;
}

inline std::string format_instance(const Instance& inst, std::span<const PointerSpec> pointers) {
  std::ostringstream out;
  if (!inst.label.empty()) out << "# " << inst.label << "\n";
  out << "vars " << inst.variables.size() << "\n";
  for (std::size_t x = 0; x < inst.variables.size(); ++x) {
    const auto& v = inst.variables[x];
    out << "var " << v.name << " " << v.min << " " << v.max << " " << inst.initial.registers[x] << "\n";
  }
  for (std::size_t z = 0; z < pointers.size(); ++z) {
    if (inst.initial.pointers[z] != 0) out << "pointer " << pointers[z].name << " " << inst.initial.pointers[z] << "\n";
  }
  for (const auto& [x, v] : inst.goal.registers) out << "goal " << inst.variables[x].name << " " << v << "\n";
  for (const auto& [z, v] : inst.goal.pointers) out << "goal " << pointers[z].name << " " << v << "\n";
  return out.str();
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::usage, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::usage, "cannot write " + path.string());
  out << content;
}

inline Instance load_instance(const std::filesystem::path& path, std::span<const PointerSpec> pointers) {
  try {
    return parse_instance(read_file(path), pointers, path.stem().string());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

// Problem directories hold one `<label>.inst` file per instance and a
// manifest.json naming the domain, the generator parameters and the labels.
struct ProblemManifest {
  std::string domain;
  std::size_t pointers = 0;
  std::uint64_t seed = 0;
  Value bound = 100;
  std::string kind;  // "training" or "validation"
  nlohmann::json params = nlohmann::json::object();
  std::vector<std::string> labels;
};

inline nlohmann::json to_json(const ProblemManifest& m) {
  return {{"domain", m.domain}, {"pointers", m.pointers}, {"seed", m.seed},     {"bound", m.bound},
          {"kind", m.kind},     {"params", m.params},     {"instances", m.labels}};
}

inline ProblemManifest manifest_from_json(const nlohmann::json& j) {
  ProblemManifest m;
  try {
    m.domain = j.at("domain").get<std::string>();
    m.pointers = j.value("pointers", std::size_t{0});
    m.seed = j.value("seed", std::uint64_t{0});
    m.bound = j.value("bound", Value{100});
    m.kind = j.value("kind", std::string("training"));
    m.params = j.value("params", nlohmann::json::object());
    m.labels = j.at("instances").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("manifest: ") + e.what());
  }
  return m;
}

inline void write_problem_dir(const std::filesystem::path& dir, const GPProblem& problem, ProblemManifest manifest) {
  std::filesystem::create_directories(dir);
  manifest.labels.clear();
  for (const auto& inst : problem.instances) {
    write_file(dir / (inst.label + ".inst"), format_instance(inst, problem.actions.pointers));
    manifest.labels.push_back(inst.label);
  }
  write_file(dir / "manifest.json", to_json(manifest).dump(2) + "\n");
}

// Instances of a problem directory; the action set comes from the caller.
inline std::vector<Instance> load_problem_instances(const std::filesystem::path& dir, const ProblemManifest& m,
                                                    std::span<const PointerSpec> pointers) {
  std::vector<Instance> out;
  for (const auto& label : m.labels) out.push_back(load_instance(dir / (label + ".inst"), pointers));
  if (out.empty()) throw Error(ErrorCode::invalid_size, dir.string() + ": manifest lists no instances");
  return out;
}

inline ProblemManifest load_manifest(const std::filesystem::path& dir) {
  auto text = read_file(dir / "manifest.json");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, (dir / "manifest.json").string() + ": " + e.what());
  }
  return manifest_from_json(j);
}

}  // namespace bfgp
