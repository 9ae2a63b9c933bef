#pragma once

// Built-in benchmark domains: register layouts, planning schemas, seeded
// instance generators and the known solution programs.
//
// Layouts (L = list length, m = series index):
//   tsum       v0 accumulator, v1 term; pointers a, b
//   corridor   r0 position, r1 goal cell; pointers i, gi=1
//   reverse    x0..x{L-1}, len; pointers tail=L-1, j, i
//   select     x0..x{L-1}, len; pointers tail=L-1, b, a (goal: b at first minimum)
//   find       x0..x{L-1}, len, target, counter; pointers tail=L, target, accumulator, a
//   fibonacci  v0..vm with v0=0, v1=1; pointers n=m, c, b
//   gripper    ball0..ball{B-1} (0 room A, 1 room B, 2 carried), nballs, robot, held;
//              pointers left-arm, right-arm, last-obj=B, robot
//   sorting    x0..x{L-1}, len; pointers tail=L-1, j, i

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bfgp/core.hpp"
#include "bfgp/error.hpp"
#include "bfgp/program.hpp"
#include "bfgp/rng.hpp"

namespace bfgp {

namespace schemas {

// add(*z1,*z2): z1 += z2
inline bool add(std::span<Value> r, std::span<const VariableSpec> vars, std::span<const std::size_t> a) {
  Value v;
  if (__builtin_add_overflow(r[a[0]], r[a[1]], &v) || !vars[a[0]].contains(v)) return false;
  r[a[0]] = v;
  return true;
}

inline bool swap(std::span<Value> r, std::span<const VariableSpec> vars, std::span<const std::size_t> a) {
  if (!vars[a[0]].contains(r[a[1]]) || !vars[a[1]].contains(r[a[0]])) return false;
  std::swap(r[a[0]], r[a[1]]);
  return true;
}

inline bool left(std::span<Value> r, std::span<const VariableSpec> vars, std::span<const std::size_t> a) {
  if (!vars[a[0]].contains(r[a[0]] - 1)) return false;
  --r[a[0]];
  return true;
}

inline bool right(std::span<Value> r, std::span<const VariableSpec> vars, std::span<const std::size_t> a) {
  if (!vars[a[0]].contains(r[a[0]] + 1)) return false;
  ++r[a[0]];
  return true;
}

// Gripper registers: balls first, then nballs, robot room and held count.
namespace gripper_layout {
inline std::size_t balls(std::span<const Value> r) { return r.size() - 3; }
inline std::size_t robot(std::span<const Value> r) { return r.size() - 2; }
inline std::size_t held(std::span<const Value> r) { return r.size() - 1; }
inline constexpr Value carried = 2;
}  // namespace gripper_layout

inline bool pick(std::span<Value> r, std::span<const VariableSpec>, std::span<const std::size_t> a) {
  using namespace gripper_layout;
  const auto z = a[0];
  if (z >= balls(r) || r[z] != r[robot(r)] || r[held(r)] >= 2) return false;
  r[z] = carried;
  ++r[held(r)];
  return true;
}

inline bool drop(std::span<Value> r, std::span<const VariableSpec>, std::span<const std::size_t> a) {
  using namespace gripper_layout;
  const auto z = a[0];
  if (z >= balls(r) || r[z] != carried) return false;
  r[z] = r[robot(r)];
  --r[held(r)];
  return true;
}

inline bool move_ab(std::span<Value> r, std::span<const VariableSpec>, std::span<const std::size_t>) {
  auto& room = r[gripper_layout::robot(r)];
  if (room != 0) return false;
  room = 1;
  return true;
}

inline bool move_ba(std::span<Value> r, std::span<const VariableSpec>, std::span<const std::size_t>) {
  auto& room = r[gripper_layout::robot(r)];
  if (room != 1) return false;
  room = 0;
  return true;
}

}  // namespace schemas

struct DomainSpec {
  std::string name;
  std::vector<ActionSchema> schemas;
  std::vector<PointerSpec> pointers;  // constants first where the known programs need it
  std::size_t default_n = 0;
  bool content_incdec = false;
  std::vector<std::string> content_pointers;  // when non-empty, content inc/dec only on these
  bool series = false;  // sizes are term indices rather than lengths
  std::size_t train_min = 0;
  std::size_t train_max = 0;
  std::size_t train_count = 0;

  std::size_t default_pointers() const noexcept { return pointers.size(); }
};

inline const std::vector<std::string>& domain_names() {
  static const std::vector<std::string> names{"tsum",      "corridor", "reverse", "select",
                                              "find",      "fibonacci", "gripper", "sorting"};
  return names;
}

inline DomainSpec domain_spec(std::string_view name) {
  const ActionSchema add{"add", 2, false, schemas::add};
  const ActionSchema swap{"swap", 2, true, schemas::swap};
  DomainSpec d;
  d.name = std::string(name);
  d.train_min = 2;
  d.train_max = 21;
  d.train_count = 20;
  if (name == "tsum") {
    d.schemas = {add};
    d.pointers = {{"a", false}, {"b", false}};
    d.default_n = 5;
    d.content_incdec = true;
    d.series = true;
    d.train_min = 1;
    d.train_max = 10;
    d.train_count = 10;
  } else if (name == "corridor") {
    d.schemas = {{"left", 1, false, schemas::left}, {"right", 1, false, schemas::right}};
    d.pointers = {{"i", false}, {"gi", true}};
    d.default_n = 7;
  } else if (name == "reverse" || name == "sorting") {
    d.schemas = {swap};
    d.pointers = {{"tail", true}, {"j", false}, {"i", false}};
    d.default_n = name == "reverse" ? 7 : 9;
  } else if (name == "select") {
    d.pointers = {{"tail", true}, {"b", false}, {"a", false}};
    d.default_n = 7;
  } else if (name == "find") {
    d.pointers = {{"tail", true}, {"target", true}, {"accumulator", true}, {"a", false}};
    d.default_n = 7;
    d.content_incdec = true;
    d.content_pointers = {"accumulator"};
  } else if (name == "fibonacci") {
    d.schemas = {add};
    d.pointers = {{"n", true}, {"c", false}, {"b", false}};
    d.default_n = 8;
    d.series = true;
    d.train_min = 1;
    d.train_max = 10;
    d.train_count = 10;
  } else if (name == "gripper") {
    d.schemas = {{"pick", 1, false, schemas::pick},
                 {"drop", 1, false, schemas::drop},
                 {"moveAB", 0, false, schemas::move_ab},
                 {"moveBA", 0, false, schemas::move_ba}};
    d.pointers = {{"left-arm", false}, {"right-arm", false}, {"last-obj", true}, {"robot", true}};
    d.default_n = 8;
  } else {
    throw Error(ErrorCode::unknown_domain, "unknown domain '" + std::string(name) + "'");
  }
  return d;
}

// Pointer set for a requested |Z|: the domain's pointers, truncated (free
// pointers only) or extended with free pointers z1, z2, ...
inline std::vector<PointerSpec> domain_pointers(const DomainSpec& d, std::size_t count) {
  if (count == 0) return d.pointers;
  std::vector<PointerSpec> out = d.pointers;
  std::size_t extra = 0;
  while (out.size() < count) out.push_back({"z" + std::to_string(++extra), false});
  while (out.size() > count) {
    auto it = std::find_if(out.rbegin(), out.rend(), [](const PointerSpec& p) { return !p.constant; });
    if (it == out.rend()) break;
    out.erase(std::next(it).base());
  }
  if (out.size() != count) {
    throw Error(ErrorCode::invalid_size, d.name + " needs at least " + std::to_string(out.size()) + " pointers");
  }
  return out;
}

inline ActionSet domain_action_set(const DomainSpec& d, std::vector<PointerSpec> pointers) {
  std::unique_ptr<bool[]> content(new bool[pointers.size()]);
  for (std::size_t z = 0; z < pointers.size(); ++z) {
    const auto& listed = d.content_pointers;
    content[z] = d.content_incdec &&
                 (listed.empty() || std::find(listed.begin(), listed.end(), pointers[z].name) != listed.end());
  }
  const auto n = pointers.size();
  return build_action_set(std::move(pointers), d.schemas, std::span<const bool>(content.get(), n));
}

inline ActionSet domain_actions(std::string_view name, std::size_t pointer_count = 0) {
  auto d = domain_spec(name);
  return domain_action_set(d, domain_pointers(d, pointer_count));
}

namespace detail {

inline std::string index_label(std::string_view domain, std::size_t idx, std::size_t size) {
  std::string i = std::to_string(idx);
  if (i.size() < 4) i.insert(0, 4 - i.size(), '0');
  return std::string(domain) + "-" + i + "-" + std::to_string(size);
}

struct Layout {
  std::vector<VariableSpec> vars;
  std::vector<Value> values;
  PartialState goal;
  std::vector<std::pair<std::string, std::int32_t>> anchors;  // constant pointer -> register
};

inline std::vector<VariableSpec> numbered(std::string_view prefix, std::size_t count, Value lo, Value hi) {
  std::vector<VariableSpec> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back({std::string(prefix) + std::to_string(k), lo, hi});
  return out;
}

inline Value triangular(Value k) { return k * (k + 1) / 2; }

inline Value fibonacci_number(std::size_t m) {
  Value a = 0, b = 1;
  for (std::size_t k = 0; k < m; ++k) {
    Value c = a + b;
    a = b;
    b = c;
  }
  return a;
}

inline constexpr Value kFindLevels = 4;

inline Layout list_layout(std::size_t len, Rng& rng, Value bound) {
  Layout l;
  l.vars = numbered("x", len, 0, bound);
  for (std::size_t k = 0; k < len; ++k) l.values.push_back(rng.uniform(0, bound));
  l.vars.push_back({"len", 0, std::max<Value>(bound, static_cast<Value>(len))});
  l.values.push_back(static_cast<Value>(len));
  return l;
}

inline Layout generate_layout(const DomainSpec& d, std::size_t size, Rng& rng, Value bound) {
  const auto& name = d.name;
  Layout l;
  if (name == "tsum") {
    const auto k = static_cast<Value>(size);
    if (triangular(k) > bound) throw Error(ErrorCode::invalid_size, "tsum term exceeds the arithmetic bound");
    l.vars = {{"v0", 0, bound}, {"v1", 0, bound}};
    l.values = {0, k};
    l.goal.registers[0] = triangular(k);
  } else if (name == "fibonacci") {
    // term k is F(k+1), stored at v[k+1]
    const std::size_t m = size + 1;
    if (fibonacci_number(m) > bound) throw Error(ErrorCode::invalid_size, "fibonacci term exceeds the arithmetic bound");
    l.vars = numbered("v", m + 1, 0, bound);
    l.values.assign(m + 1, 0);
    l.values[1] = 1;
    l.goal.registers[m] = fibonacci_number(m);
    l.anchors = {{"n", static_cast<std::int32_t>(m)}};
  } else if (name == "corridor") {
    if (size < 2) throw Error(ErrorCode::invalid_size, "corridor length must be at least 2");
    const auto last = static_cast<Value>(size) - 1;
    l.vars = {{"pos", 0, last}, {"goal", 0, last}};
    const auto start = rng.uniform(0, last - 1);
    const auto goal = rng.uniform(0, last - 1);
    l.values = {start, goal};
    l.goal.registers[0] = goal;
    l.anchors = {{"gi", 1}};
  } else if (name == "reverse" || name == "sorting" || name == "select") {
    if (size < 2) throw Error(ErrorCode::invalid_size, "lists must have at least 2 elements");
    l = list_layout(size, rng, bound);
    std::vector<Value> list(l.values.begin(), l.values.begin() + static_cast<std::ptrdiff_t>(size));
    if (name == "reverse") {
      std::reverse(list.begin(), list.end());
    } else if (name == "sorting") {
      std::sort(list.begin(), list.end());
    }
    if (name == "select") {
      auto first_min = std::min_element(list.begin(), list.end()) - list.begin();
      l.goal.pointers[1] = static_cast<Value>(first_min);
    } else {
      for (std::size_t k = 0; k < size; ++k) l.goal.registers[k] = list[k];
    }
    l.anchors = {{"tail", static_cast<std::int32_t>(size - 1)}};
  } else if (name == "find") {
    if (size < 2) throw Error(ErrorCode::invalid_size, "lists must have at least 2 elements");
    // Elements take one of kFindLevels evenly spaced values in [0, bound], so
    // occurrence counts vary; with distinct elements every count would be 1.
    l = list_layout(size, rng, kFindLevels - 1);
    const Value step = bound / (kFindLevels - 1);
    for (std::size_t k = 0; k < size; ++k) {
      l.vars[k].max = bound;
      l.values[k] *= step;
    }
    l.vars[size].max = std::max<Value>(bound, static_cast<Value>(size));
    const auto target = l.values[static_cast<std::size_t>(rng.uniform(0, static_cast<Value>(size) - 1))];
    const auto count = std::count(l.values.begin(), l.values.begin() + static_cast<std::ptrdiff_t>(size), target);
    l.vars.push_back({"target", 0, bound});
    l.values.push_back(target);
    l.vars.push_back({"counter", 0, std::max<Value>(bound, static_cast<Value>(size))});
    l.values.push_back(0);
    l.goal.registers[size + 2] = count;
    l.anchors = {{"tail", static_cast<std::int32_t>(size)},
                 {"target", static_cast<std::int32_t>(size + 1)},
                 {"accumulator", static_cast<std::int32_t>(size + 2)}};
  } else if (name == "gripper") {
    if (size < 1) throw Error(ErrorCode::invalid_size, "gripper needs at least one ball");
    l.vars = numbered("ball", size, 0, 2);
    l.values.assign(size, 0);
    l.vars.push_back({"nballs", static_cast<Value>(size), static_cast<Value>(size)});
    l.values.push_back(static_cast<Value>(size));
    l.vars.push_back({"robot", 0, 1});
    l.values.push_back(0);
    l.vars.push_back({"held", 0, 2});
    l.values.push_back(0);
    for (std::size_t k = 0; k < size; ++k) l.goal.registers[k] = 1;
    l.anchors = {{"last-obj", static_cast<std::int32_t>(size)}, {"robot", static_cast<std::int32_t>(size + 1)}};
  } else {
    throw Error(ErrorCode::unknown_domain, "unknown domain '" + name + "'");
  }
  return l;
}

}  // namespace detail

// One instance of `domain` at the given size. Constant pointers start at
// their anchor register, free pointers at 0.
inline Instance make_instance(const DomainSpec& d, std::span<const PointerSpec> pointers, std::size_t size,
                              Rng& rng, Value bound, std::string label) {
  auto layout = detail::generate_layout(d, size, rng, bound);
  Instance inst;
  inst.label = std::move(label);
  inst.variables = std::move(layout.vars);
  inst.initial.registers = std::move(layout.values);
  inst.initial.pointers.assign(pointers.size(), 0);
  for (const auto& [pname, reg] : layout.anchors) {
    for (std::size_t z = 0; z < pointers.size(); ++z) {
      if (pointers[z].name == pname) inst.initial.pointers[z] = reg;
    }
  }
  // Pointer goals are stated against the domain's own pointer order.
  for (const auto& [z, v] : layout.goal.pointers) {
    const auto& pname = d.pointers.at(z).name;
    for (std::size_t k = 0; k < pointers.size(); ++k) {
      if (pointers[k].name == pname) inst.goal.pointers[k] = v;
    }
  }
  inst.goal.registers = std::move(layout.goal.registers);
  check_instance(inst, pointers.size());
  return inst;
}

struct GenParams {
  std::size_t count = 0;     // 0: domain default
  std::size_t min_size = 0;  // 0: domain default (list length, corridor length, balls or term index)
  std::size_t max_size = 0;
  std::uint64_t seed = 1;
  Value bound = 100;
  std::size_t pointers = 0;  // 0: domain default
};

// `count` sizes spread evenly over [lo, hi]; consecutive when count = hi-lo+1.
inline std::vector<std::size_t> spread_sizes(std::size_t count, std::size_t lo, std::size_t hi) {
  if (count == 0 || lo > hi) throw Error(ErrorCode::invalid_size, "empty size range");
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(count == 1 ? lo : lo + k * (hi - lo) / (count - 1));
  return out;
}

inline GPProblem make_problem_sized(std::string_view name, std::span<const std::size_t> sizes, std::uint64_t seed,
                                    Value bound, std::size_t pointer_count = 0) {
  auto d = domain_spec(name);
  if (sizes.empty()) throw Error(ErrorCode::invalid_size, "no instances requested");
  auto pointers = domain_pointers(d, pointer_count);
  GPProblem p;
  p.arithmetic_bound = bound;
  p.actions = domain_action_set(d, pointers);
  Rng rng(seed);
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    p.instances.push_back(make_instance(d, pointers, sizes[k], rng, bound, detail::index_label(d.name, k, sizes[k])));
  }
  return p;
}

inline GPProblem make_problem(std::string_view name, const GenParams& params = {}) {
  auto d = domain_spec(name);
  const auto lo = params.min_size ? params.min_size : d.train_min;
  const auto hi = params.max_size ? params.max_size : (params.min_size ? params.min_size : d.train_max);
  const auto count = params.count ? params.count : (hi - lo + 1);
  auto sizes = spread_sizes(count, lo, hi);
  return make_problem_sized(name, sizes, params.seed, params.bound, params.pointers);
}

enum class ValidationScale : std::uint8_t { desk, full };

inline constexpr Value kValidationBound = 1'000'000'000;

// Held-out instances. Desk scale keeps every 100th triangular term (plus the
// last one) and lists of 100..5000 elements; full scale runs the whole sweep.
inline GPProblem make_validation_set(std::string_view name, std::uint64_t seed,
                                     ValidationScale scale = ValidationScale::desk, std::size_t pointer_count = 0) {
  auto d = domain_spec(name);
  std::vector<std::size_t> sizes;
  if (name == "tsum") {
    const std::size_t stride = scale == ValidationScale::full ? 1 : 100;
    for (std::size_t k = 12; k <= 44720; k += stride) sizes.push_back(k);
    if (sizes.back() != 44720) sizes.push_back(44720);
  } else if (name == "fibonacci") {
    sizes = spread_sizes(33, 11, 43);
  } else if (name == "corridor" || name == "gripper") {
    sizes = spread_sizes(1000, 12, 1011);
  } else if (name == "sorting") {
    sizes = spread_sizes(20, 12, 31);
  } else if (scale == ValidationScale::full) {
    sizes = spread_sizes(50, 1000, 50000);
  } else {
    sizes = spread_sizes(50, 100, 5000);
  }
  return make_problem_sized(name, sizes, seed, kValidationBound, pointer_count);
}

// Solutions found by the search in the original experiments, transcribed for
// regression. Fibonacci loops back to line 1: with a jump to line 0 pointer c
// would advance twice per iteration and skip every other term.
inline std::string reference_solution_text(std::string_view name) {
  if (name == "tsum") {
    return "0. inc(b)\n1. add(*a,*b)\n2. dec(*b)\n3. goto(1,!(yz&!yc))\n4. end\n";
  }
  if (name == "corridor") {
    return "0. right(*i)\n1. cmp(*i,*gi)\n2. goto(0,!(!yz&yc))\n3. left(*i)\n4. cmp(*i,*gi)\n"
           "5. goto(1,!(yz&!yc))\n6. end\n";
  }
  if (name == "reverse") {
    return "0. set(j,tail)\n1. swap(*i,*j)\n2. dec(j)\n3. inc(i)\n4. cmp(j,i)\n5. goto(1,!(!yz&!yc))\n6. end\n";
  }
  if (name == "select") {
    return "0. inc(a)\n1. cmp(*b,*a)\n2. goto(4,!(!yz&yc))\n3. set(b,a)\n4. cmp(tail,a)\n5. goto(0,!(yz&!yc))\n"
           "6. end\n";
  }
  if (name == "find") {
    return "0. cmp(*target,*a)\n1. goto(3,!(yz&!yc))\n2. inc(*accumulator)\n3. inc(a)\n4. cmp(tail,a)\n"
           "5. goto(0,!(yz&!yc))\n6. end\n";
  }
  if (name == "fibonacci") {
    return "0. inc(c)\n1. inc(c)\n2. add(*c,*b)\n3. inc(b)\n4. add(*c,*b)\n5. cmp(n,c)\n6. goto(1,!(yz&!yc))\n"
           "7. end\n";
  }
  if (name == "gripper") {
    return "0. pick(*left-arm)\n1. moveAB()\n2. drop(*left-arm)\n3. inc(left-arm)\n4. moveBA()\n"
           "5. cmp(left-arm,last-obj)\n6. goto(0,!(yz&!yc))\n7. end\n";
  }
  if (name == "sorting") {
    return "0. set(i,tail)\n1. swap(*i,*j)\n2. cmp(*j,*i)\n3. goto(6,!(!yz&yc))\n4. inc(i)\n5. goto(0,!(yz&yc))\n"
           "6. dec(i)\n7. goto(1,!(yz&!yc))\n8. end\n";
  }
  throw Error(ErrorCode::unknown_domain, "unknown domain '" + std::string(name) + "'");
}

inline PlanningProgram reference_solution(std::string_view name, const ActionSet& actions) {
  return parse_program(reference_solution_text(name), actions);
}

inline PlanningProgram reference_solution(std::string_view name) {
  return reference_solution(name, domain_actions(name));
}

}  // namespace bfgp
