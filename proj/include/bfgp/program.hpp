#pragma once

#include <array>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bfgp/core.hpp"
#include "bfgp/error.hpp"

namespace bfgp {

// The four joint values of (zero, carry); the only admissible goto conditions.
enum class Feature : std::uint8_t { nz_nc = 0, z_nc = 1, nz_c = 2, z_c = 3 };

inline constexpr std::array<Feature, 4> kAllFeatures{Feature::nz_nc, Feature::z_nc, Feature::nz_c, Feature::z_c};

constexpr bool holds(Feature f, Flags flags) noexcept {
  switch (f) {
    case Feature::nz_nc: return !flags.zero && !flags.carry;
    case Feature::z_nc: return flags.zero && !flags.carry;
    case Feature::nz_c: return !flags.zero && flags.carry;
    case Feature::z_c: return flags.zero && flags.carry;
  }
  return false;
}

inline const char* feature_text(Feature f) {
  switch (f) {
    case Feature::nz_nc: return "!yz&!yc";
    case Feature::z_nc: return "yz&!yc";
    case Feature::nz_c: return "!yz&yc";
    case Feature::z_c: return "yz&yc";
  }
  return "?";
}

struct ProgramLine {
  enum class Kind : std::uint8_t { undefined, action, jump, end };

  Kind kind = Kind::undefined;
  Feature feature = Feature::nz_nc;
  std::uint16_t target = 0;
  ActionId action = 0;

  static constexpr ProgramLine undefined() noexcept { return {}; }
  static constexpr ProgramLine end() noexcept { return {Kind::end, Feature::nz_nc, 0, 0}; }
  static constexpr ProgramLine act(ActionId id) noexcept { return {Kind::action, Feature::nz_nc, 0, id}; }
  // go(target, !f): falls through while f holds, jumps otherwise.
  static constexpr ProgramLine go(std::size_t target, Feature f) noexcept {
    return {Kind::jump, f, static_cast<std::uint16_t>(target), 0};
  }

  bool operator==(const ProgramLine&) const = default;
};

struct PlanningProgram {
  std::vector<ProgramLine> lines;

  // n lines: n-1 undefined lines followed by end.
  static PlanningProgram empty(std::size_t n) {
    if (n < 1) throw Error(ErrorCode::invalid_size, "a program needs at least one line");
    PlanningProgram p;
    p.lines.assign(n, ProgramLine::undefined());
    p.lines.back() = ProgramLine::end();
    return p;
  }

  std::size_t size() const noexcept { return lines.size(); }
  const ProgramLine& operator[](std::size_t i) const { return lines[i]; }
  ProgramLine& operator[](std::size_t i) { return lines[i]; }

  bool operator==(const PlanningProgram&) const = default;
};

// Legal goto targets of line i in an n-line program: 0 <= t < i or i+1 < t < n.
constexpr bool legal_target(std::size_t line, std::size_t target, std::size_t n) noexcept {
  return target < line || (target > line + 1 && target < n);
}

inline void check_program(const PlanningProgram& p, std::size_t num_actions) {
  const auto n = p.size();
  if (n == 0) throw Error(ErrorCode::malformed_program, "empty program");
  if (p.lines.back().kind != ProgramLine::Kind::end) {
    throw Error(ErrorCode::malformed_program, "last line must be end");
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto& w = p.lines[i];
    switch (w.kind) {
      case ProgramLine::Kind::end:
        throw Error(ErrorCode::malformed_program, "end before the last line (line " + std::to_string(i) + ")");
      case ProgramLine::Kind::action:
        if (w.action >= num_actions) {
          throw Error(ErrorCode::malformed_program, "unknown action id on line " + std::to_string(i));
        }
        break;
      case ProgramLine::Kind::jump:
        if (!legal_target(i, w.target, n)) {
          throw Error(ErrorCode::malformed_program, "illegal goto target on line " + std::to_string(i));
        }
        break;
      case ProgramLine::Kind::undefined: break;
    }
  }
}

// ---------------------------------------------------------------------------
// Text format, one instruction per line:
//   0. set(j,tail)
//   5. goto(1,!(!yz&!yc))
//   6. end
// Unprogrammed lines print as "<idx>. undefined".

inline std::string format_line(const ProgramLine& w, const ActionSet& actions) {
  switch (w.kind) {
    case ProgramLine::Kind::undefined: return "undefined";
    case ProgramLine::Kind::end: return "end";
    case ProgramLine::Kind::action: return actions[w.action].name;
    case ProgramLine::Kind::jump:
      return "goto(" + std::to_string(w.target) + ",!(" + feature_text(w.feature) + "))";
  }
  return {};
}

inline std::string format_program(const PlanningProgram& p, const ActionSet& actions) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    out += std::to_string(i) + ". " + format_line(p[i], actions) + "\n";
  }
  return out;
}

namespace detail {

inline std::optional<Feature> parse_feature(std::string_view s) {
  for (auto f : kAllFeatures) {
    if (s == feature_text(f)) return f;
  }
  return std::nullopt;
}

[[noreturn]] inline void parse_fail(std::size_t lineno, const std::string& msg) {
  throw Error(ErrorCode::parse_error, "line " + std::to_string(lineno) + ": " + msg);
}

}  // namespace detail

// Lines starting with '#' and blank lines are ignored. Line numbers in errors
// are 1-based positions in the text.
inline PlanningProgram parse_program(std::string_view text, const ActionSet& actions) {
  PlanningProgram p;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string s = detail::strip_spaces(raw);
    if (s.empty() || s.front() == '#') continue;
    auto dot = s.find('.');
    if (dot == std::string::npos || dot == 0) detail::parse_fail(lineno, "expected '<idx>. <instruction>'");
    std::size_t idx = 0;
    for (std::size_t k = 0; k < dot; ++k) {
      if (s[k] < '0' || s[k] > '9') detail::parse_fail(lineno, "bad line index");
      idx = idx * 10 + static_cast<std::size_t>(s[k] - '0');
    }
    if (idx != p.size()) detail::parse_fail(lineno, "expected line index " + std::to_string(p.size()));
    std::string body = s.substr(dot + 1);
    if (body.empty()) detail::parse_fail(lineno, "missing instruction");
    if (body == "end") {
      p.lines.push_back(ProgramLine::end());
    } else if (body == "undefined") {
      p.lines.push_back(ProgramLine::undefined());
    } else if (body.rfind("goto(", 0) == 0) {
      // goto(<t>,!(<feature>))
      auto comma = body.find(',');
      if (comma == std::string::npos || body.size() < comma + 5 || body.compare(comma + 1, 2, "!(") != 0 ||
          body.compare(body.size() - 2, 2, "))") != 0) {
        detail::parse_fail(lineno, "malformed goto");
      }
      std::string tgt = body.substr(5, comma - 5);
      if (tgt.empty() || tgt.find_first_not_of("0123456789") != std::string::npos) {
        detail::parse_fail(lineno, "malformed goto target");
      }
      auto f = detail::parse_feature(body.substr(comma + 3, body.size() - comma - 5));
      if (!f) detail::parse_fail(lineno, "unknown goto feature");
      p.lines.push_back(ProgramLine::go(std::stoul(tgt), *f));
    } else {
      auto id = actions.find(body);
      if (!id) detail::parse_fail(lineno, "unknown instruction '" + body + "'");
      p.lines.push_back(ProgramLine::act(*id));
    }
  }
  if (p.lines.empty()) throw Error(ErrorCode::parse_error, "no program lines");
  try {
    check_program(p, actions.size());
  } catch (const Error& e) {
    throw Error(ErrorCode::parse_error, "line " + std::to_string(lineno) + ": " + e.what());
  }
  return p;
}

}  // namespace bfgp
