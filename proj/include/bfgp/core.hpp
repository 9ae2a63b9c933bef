#pragma once

// Planning states extended with a small random-access machine: a register
// file holding the planning variables, pointer registers indexing into it,
// and the zero/carry flags written by every RAM instruction.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bfgp/error.hpp"

namespace bfgp {

using Value = std::int64_t;
using ActionId = std::uint32_t;

struct VariableSpec {
  std::string name;
  Value min = 0;
  Value max = 0;

  bool contains(Value v) const noexcept { return v >= min && v <= max; }
  bool operator==(const VariableSpec&) const = default;
};

struct Flags {
  bool zero = false;
  bool carry = false;

  bool operator==(const Flags&) const = default;
};

constexpr Flags update_flags(Value res) noexcept { return {res == 0, res > 0}; }

struct MachineState {
  std::vector<Value> registers;
  std::vector<std::int32_t> pointers;
  Flags flags;

  bool operator==(const MachineState&) const = default;
};

// Goal condition. Pointer atoms are only used by domains whose answer is a
// position rather than a register value (e.g. the index of a minimum).
struct PartialState {
  std::map<std::size_t, Value> registers;
  std::map<std::size_t, Value> pointers;

  bool empty() const noexcept { return registers.empty() && pointers.empty(); }

  bool satisfied_by(const MachineState& s) const {
    for (const auto& [idx, v] : registers) {
      if (idx >= s.registers.size() || s.registers[idx] != v) return false;
    }
    for (const auto& [idx, v] : pointers) {
      if (idx >= s.pointers.size() || s.pointers[idx] != v) return false;
    }
    return true;
  }

  bool operator==(const PartialState&) const = default;
};

// A constant pointer is an anchor (tail, length, goal cell...) set per
// instance and never moved: it gets no inc/dec/set-target actions and is not
// a parameter of planning schemas.
struct PointerSpec {
  std::string name;
  bool constant = false;

  bool operator==(const PointerSpec&) const = default;
};

// Applies a planning schema to the registers named by `args`. Must return
// false and leave `registers` untouched when the schema is inapplicable.
using SchemaFn = bool (*)(std::span<Value> registers, std::span<const VariableSpec> variables,
                          std::span<const std::size_t> args);

struct ActionSchema {
  std::string name;
  std::size_t arity = 0;
  bool symmetric = false;
  SchemaFn apply = nullptr;
};

enum class ActionKind : std::uint8_t { planning, ram };

enum class RamOp : std::uint8_t { inc, dec, inc_content, dec_content, cmp, cmp_content, set };

struct GroundedAction {
  std::string name;
  ActionKind kind = ActionKind::ram;
  RamOp op = RamOp::inc;
  std::size_t schema = 0;
  SchemaFn apply = nullptr;
  std::array<std::uint8_t, 2> params{};
  std::uint8_t arity = 0;
};

namespace detail {

inline std::string strip_spaces(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c != ' ' && c != '\t' && c != '\r') out.push_back(c);
  }
  return out;
}

inline std::string call_text(std::string_view fn, std::span<const std::string> args) {
  std::string out(fn);
  out.push_back('(');
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out.push_back(',');
    out += args[i];
  }
  out.push_back(')');
  return out;
}

}  // namespace detail

class ActionSet {
 public:
  std::vector<PointerSpec> pointers;
  std::vector<ActionSchema> schemas;
  std::vector<GroundedAction> actions;

  std::size_t size() const noexcept { return actions.size(); }
  const GroundedAction& operator[](ActionId id) const { return actions.at(id); }

  ActionId add(GroundedAction a) {
    auto id = static_cast<ActionId>(actions.size());
    index_.emplace(a.name, id);
    actions.push_back(std::move(a));
    return id;
  }

  std::optional<std::size_t> pointer_index(std::string_view name) const {
    for (std::size_t i = 0; i < pointers.size(); ++i) {
      if (pointers[i].name == name) return i;
    }
    return std::nullopt;
  }

  // Resolves an instruction such as "swap(*i, *j)". Symmetric schemas are
  // grounded with one argument order only, so the reversed order is accepted.
  std::optional<ActionId> find(std::string_view text) const {
    std::string key = detail::strip_spaces(text);
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    auto open = key.find('(');
    auto comma = key.find(',');
    if (open == std::string::npos || comma == std::string::npos || key.back() != ')') {
      return std::nullopt;
    }
    std::string fn = key.substr(0, open);
    bool symmetric = std::any_of(schemas.begin(), schemas.end(),
                                 [&](const ActionSchema& s) { return s.name == fn && s.symmetric; });
    if (!symmetric) return std::nullopt;
    std::string a = key.substr(open + 1, comma - open - 1);
    std::string b = key.substr(comma + 1, key.size() - comma - 2);
    if (auto it = index_.find(fn + "(" + b + "," + a + ")"); it != index_.end()) return it->second;
    return std::nullopt;
  }

  std::optional<std::size_t> schema_index(std::string_view name) const {
    for (std::size_t i = 0; i < schemas.size(); ++i) {
      if (schemas[i].name == name) return i;
    }
    return std::nullopt;
  }

 private:
  std::unordered_map<std::string, ActionId> index_;
};

struct Instance {
  std::string label;
  std::vector<VariableSpec> variables;
  MachineState initial;
  PartialState goal;

  std::size_t num_registers() const noexcept { return variables.size(); }
};

struct GPProblem {
  std::vector<Instance> instances;
  ActionSet actions;
  Value arithmetic_bound = 100;
};

// Throws malformed-instance when any value breaks its domain.
inline void check_instance(const Instance& inst, std::size_t pointer_count) {
  const auto nx = inst.variables.size();
  if (nx == 0) throw Error(ErrorCode::malformed_instance, inst.label + ": no variables");
  if (inst.initial.registers.size() != nx) {
    throw Error(ErrorCode::malformed_instance, inst.label + ": register count mismatch");
  }
  if (inst.initial.pointers.size() != pointer_count) {
    throw Error(ErrorCode::malformed_instance, inst.label + ": pointer count mismatch");
  }
  for (std::size_t i = 0; i < nx; ++i) {
    const auto& v = inst.variables[i];
    if (v.min > v.max) throw Error(ErrorCode::malformed_instance, inst.label + ": empty domain for " + v.name);
    if (!v.contains(inst.initial.registers[i])) {
      throw Error(ErrorCode::malformed_instance, inst.label + ": initial value of " + v.name + " out of domain");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (inst.variables[j].name == v.name) {
        throw Error(ErrorCode::malformed_instance, inst.label + ": duplicate variable " + v.name);
      }
    }
  }
  for (auto p : inst.initial.pointers) {
    if (p < 0 || static_cast<std::size_t>(p) >= nx) {
      throw Error(ErrorCode::malformed_instance, inst.label + ": pointer out of range");
    }
  }
  for (const auto& [idx, v] : inst.goal.registers) {
    if (idx >= nx || !inst.variables[idx].contains(v)) {
      throw Error(ErrorCode::malformed_instance, inst.label + ": goal value out of domain");
    }
  }
  for (const auto& [idx, v] : inst.goal.pointers) {
    if (idx >= pointer_count || v < 0 || static_cast<std::size_t>(v) >= nx) {
      throw Error(ErrorCode::malformed_instance, inst.label + ": pointer goal out of range");
    }
  }
}

// Extends a classical instance with `pointer_count` zeroed pointers and false
// flags.
inline Instance extend_instance(std::vector<VariableSpec> variables, std::vector<Value> initial_values,
                                PartialState goal, std::size_t pointer_count, std::string label = {}) {
  if (pointer_count < 1) throw Error(ErrorCode::invalid_size, "at least one pointer is required");
  Instance inst;
  inst.label = std::move(label);
  inst.variables = std::move(variables);
  inst.initial.registers = std::move(initial_values);
  inst.initial.pointers.assign(pointer_count, 0);
  inst.initial.flags = {};
  inst.goal = std::move(goal);
  check_instance(inst, pointer_count);
  return inst;
}

// In-place successor. Returns false (state untouched) when inapplicable.
inline bool apply_in_place(const GroundedAction& a, MachineState& s, std::span<const VariableSpec> vars,
                           Value bound) {
  const auto nx = static_cast<std::int64_t>(s.registers.size());
  if (a.kind == ActionKind::planning) {
    std::array<std::size_t, 2> args{};
    for (std::size_t k = 0; k < a.arity; ++k) args[k] = static_cast<std::size_t>(s.pointers[a.params[k]]);
    return a.apply(s.registers, vars, std::span<const std::size_t>(args.data(), a.arity));
  }
  auto& p1 = s.pointers[a.params[0]];
  Value res = 0;
  switch (a.op) {
    case RamOp::inc:
      res = p1 + 1;
      if (res >= nx) return false;
      p1 = static_cast<std::int32_t>(res);
      break;
    case RamOp::dec:
      res = p1 - 1;
      if (res < 0) return false;
      p1 = static_cast<std::int32_t>(res);
      break;
    case RamOp::inc_content:
    case RamOp::dec_content: {
      auto& reg = s.registers[static_cast<std::size_t>(p1)];
      res = a.op == RamOp::inc_content ? reg + 1 : reg - 1;
      if (!vars[static_cast<std::size_t>(p1)].contains(res) || res > bound || res < -bound) return false;
      reg = res;
      break;
    }
    case RamOp::cmp:
      res = static_cast<Value>(p1) - s.pointers[a.params[1]];
      break;
    case RamOp::cmp_content:
      res = s.registers[static_cast<std::size_t>(p1)] -
            s.registers[static_cast<std::size_t>(s.pointers[a.params[1]])];
      break;
    case RamOp::set:
      res = s.pointers[a.params[1]];
      p1 = static_cast<std::int32_t>(res);
      break;
  }
  s.flags = update_flags(res);
  return true;
}

inline std::optional<MachineState> apply_ram(const GroundedAction& instr, const MachineState& s,
                                             std::span<const VariableSpec> vars, Value bound) {
  if (instr.kind != ActionKind::ram) throw Error(ErrorCode::usage, instr.name + " is not a RAM instruction");
  MachineState next = s;
  if (!apply_in_place(instr, next, vars, bound)) return std::nullopt;
  return next;
}

// nullopt signals an inapplicable action.
inline std::optional<MachineState> apply_action(const GroundedAction& a, const MachineState& s,
                                                std::span<const VariableSpec> vars, Value bound) {
  MachineState next = s;
  if (!apply_in_place(a, next, vars, bound)) return std::nullopt;
  return next;
}

inline GroundedAction make_ram(RamOp op, std::size_t z1, std::size_t z2, std::span<const PointerSpec> ptrs) {
  GroundedAction a;
  a.kind = ActionKind::ram;
  a.op = op;
  a.params = {static_cast<std::uint8_t>(z1), static_cast<std::uint8_t>(z2)};
  const auto& n1 = ptrs[z1].name;
  switch (op) {
    case RamOp::inc: a.arity = 1; a.name = "inc(" + n1 + ")"; break;
    case RamOp::dec: a.arity = 1; a.name = "dec(" + n1 + ")"; break;
    case RamOp::inc_content: a.arity = 1; a.name = "inc(*" + n1 + ")"; break;
    case RamOp::dec_content: a.arity = 1; a.name = "dec(*" + n1 + ")"; break;
    case RamOp::cmp: a.arity = 2; a.name = "cmp(" + n1 + "," + ptrs[z2].name + ")"; break;
    case RamOp::cmp_content: a.arity = 2; a.name = "cmp(*" + n1 + ",*" + ptrs[z2].name + ")"; break;
    case RamOp::set: a.arity = 2; a.name = "set(" + n1 + "," + ptrs[z2].name + ")"; break;
  }
  return a;
}

// Grounds the RAM instruction set and the planning schemas over a pointer set.
// Without content inc/dec and constant pointers the size is 2|Z|^2 + |A'|.
// Planning actions come first, then pointer inc/dec, content inc/dec (for the
// pointers flagged in `content_incdec`), set, cmp over pointers and cmp over
// contents; cmp(z_a, z_b) only for a < b.
inline ActionSet build_action_set(std::vector<PointerSpec> pointers, std::vector<ActionSchema> schemas,
                                  std::span<const bool> content_incdec) {
  if (pointers.empty() || pointers.size() > 255) throw Error(ErrorCode::invalid_size, "pointer count out of range");
  ActionSet set;
  set.pointers = std::move(pointers);
  set.schemas = std::move(schemas);
  const auto& ptrs = set.pointers;
  const auto nz = ptrs.size();
  std::vector<std::size_t> free_ptrs;
  for (std::size_t z = 0; z < nz; ++z) {
    if (!ptrs[z].constant) free_ptrs.push_back(z);
  }

  for (std::size_t si = 0; si < set.schemas.size(); ++si) {
    const auto& schema = set.schemas[si];
    if (schema.arity > 2) throw Error(ErrorCode::invalid_size, schema.name + ": arity above 2 is unsupported");
    if (schema.arity > free_ptrs.size()) {
      throw Error(ErrorCode::invalid_size, schema.name + ": needs more pointers than available");
    }
    auto emit = [&](std::span<const std::size_t> zs) {
      GroundedAction a;
      a.kind = ActionKind::planning;
      a.schema = si;
      a.apply = schema.apply;
      a.arity = static_cast<std::uint8_t>(zs.size());
      std::vector<std::string> args;
      for (std::size_t k = 0; k < zs.size(); ++k) {
        a.params[k] = static_cast<std::uint8_t>(zs[k]);
        args.push_back("*" + ptrs[zs[k]].name);
      }
      a.name = detail::call_text(schema.name, args);
      set.add(std::move(a));
    };
    if (schema.arity == 0) {
      emit({});
    } else if (schema.arity == 1) {
      for (auto z : free_ptrs) {
        std::array<std::size_t, 1> zs{z};
        emit(zs);
      }
    } else {
      for (std::size_t i = 0; i < free_ptrs.size(); ++i) {
        for (std::size_t j = 0; j < free_ptrs.size(); ++j) {
          if (i == j || (schema.symmetric && j < i)) continue;
          std::array<std::size_t, 2> zs{free_ptrs[i], free_ptrs[j]};
          emit(zs);
        }
      }
    }
  }

  for (auto z : free_ptrs) {
    set.add(make_ram(RamOp::inc, z, z, ptrs));
    set.add(make_ram(RamOp::dec, z, z, ptrs));
  }
  for (std::size_t z = 0; z < nz; ++z) {
    if (z < content_incdec.size() && content_incdec[z]) {
      set.add(make_ram(RamOp::inc_content, z, z, ptrs));
      set.add(make_ram(RamOp::dec_content, z, z, ptrs));
    }
  }
  for (auto z1 : free_ptrs) {
    for (std::size_t z2 = 0; z2 < nz; ++z2) {
      if (z1 != z2) set.add(make_ram(RamOp::set, z1, z2, ptrs));
    }
  }
  // Two anchors compare equal on every step, so that cmp carries no information.
  for (std::size_t z1 = 0; z1 < nz; ++z1) {
    for (std::size_t z2 = z1 + 1; z2 < nz; ++z2) {
      if (!(ptrs[z1].constant && ptrs[z2].constant)) set.add(make_ram(RamOp::cmp, z1, z2, ptrs));
    }
  }
  for (std::size_t z1 = 0; z1 < nz; ++z1) {
    for (std::size_t z2 = z1 + 1; z2 < nz; ++z2) set.add(make_ram(RamOp::cmp_content, z1, z2, ptrs));
  }
  return set;
}

inline ActionSet build_action_set(std::vector<PointerSpec> pointers, std::vector<ActionSchema> schemas,
                                  bool enable_content_incdec) {
  const auto n = pointers.size();
  std::unique_ptr<bool[]> flags(new bool[n]);
  std::fill_n(flags.get(), n, enable_content_incdec);
  return build_action_set(std::move(pointers), std::move(schemas), std::span<const bool>(flags.get(), n));
}

// Convenience overload with free pointers named z1..zk.
inline ActionSet build_action_set(std::size_t pointer_count, std::vector<ActionSchema> schemas,
                                  bool enable_content_incdec) {
  std::size_t max_arity = 0;
  for (const auto& s : schemas) max_arity = std::max(max_arity, s.arity);
  if (pointer_count < max_arity) throw Error(ErrorCode::invalid_size, "fewer pointers than the largest arity");
  std::vector<PointerSpec> ptrs;
  for (std::size_t z = 0; z < pointer_count; ++z) ptrs.push_back({"z" + std::to_string(z + 1), false});
  return build_action_set(std::move(ptrs), std::move(schemas), enable_content_incdec);
}

// ---------------------------------------------------------------------------
// Plans over the original (pointer-free) instance and their translation to
// and from the extended instance.

struct RegisterAction {
  std::string schema;
  std::vector<std::size_t> registers;

  bool operator==(const RegisterAction&) const = default;
};

// Applies an original action to the register file; false when inapplicable.
inline bool apply_register_action(const ActionSet& set, const RegisterAction& a, std::vector<Value>& registers,
                                  std::span<const VariableSpec> vars) {
  auto si = set.schema_index(a.schema);
  if (!si) throw Error(ErrorCode::untranslatable, "unknown schema " + a.schema);
  const auto& schema = set.schemas[*si];
  if (a.registers.size() != schema.arity) throw Error(ErrorCode::untranslatable, "arity mismatch for " + a.schema);
  for (auto r : a.registers) {
    if (r >= registers.size()) return false;
  }
  return schema.apply(registers, vars, a.registers);
}

inline std::vector<ActionId> translate_plan_forward(std::span<const RegisterAction> plan, const ActionSet& set,
                                                    const Instance& inst) {
  std::vector<std::size_t> free_ptrs;
  for (std::size_t z = 0; z < set.pointers.size(); ++z) {
    if (!set.pointers[z].constant) free_ptrs.push_back(z);
  }
  std::vector<std::int32_t> ptr = inst.initial.pointers;
  std::vector<ActionId> out;
  auto lookup = [&](const std::string& name) {
    auto id = set.find(name);
    if (!id) throw Error(ErrorCode::untranslatable, "action " + name + " not in the action set");
    return *id;
  };
  for (const auto& a : plan) {
    auto si = set.schema_index(a.schema);
    if (!si) throw Error(ErrorCode::untranslatable, "unknown schema " + a.schema);
    const auto& schema = set.schemas[*si];
    if (a.registers.size() != schema.arity) throw Error(ErrorCode::untranslatable, "arity mismatch for " + a.schema);
    if (schema.arity > free_ptrs.size()) {
      throw Error(ErrorCode::untranslatable, a.schema + " needs more pointers than available");
    }
    std::vector<std::string> args;
    for (std::size_t k = 0; k < schema.arity; ++k) {
      const auto z = free_ptrs[k];
      const auto target = static_cast<std::int32_t>(a.registers[k]);
      if (target < 0 || static_cast<std::size_t>(target) >= inst.variables.size()) {
        throw Error(ErrorCode::untranslatable, "register index out of range");
      }
      const auto& pname = set.pointers[z].name;
      while (ptr[z] < target) {
        out.push_back(lookup("inc(" + pname + ")"));
        ++ptr[z];
      }
      while (ptr[z] > target) {
        out.push_back(lookup("dec(" + pname + ")"));
        --ptr[z];
      }
      args.push_back("*" + pname);
    }
    out.push_back(lookup(detail::call_text(schema.name, args)));
  }
  return out;
}

inline std::vector<RegisterAction> translate_plan_backward(std::span<const ActionId> extended_plan,
                                                           const ActionSet& set, const Instance& inst,
                                                           Value bound) {
  MachineState s = inst.initial;
  std::vector<RegisterAction> out;
  for (auto id : extended_plan) {
    const auto& a = set[id];
    if (a.kind == ActionKind::planning) {
      RegisterAction ra;
      ra.schema = set.schemas[a.schema].name;
      for (std::size_t k = 0; k < a.arity; ++k) ra.registers.push_back(static_cast<std::size_t>(s.pointers[a.params[k]]));
      out.push_back(std::move(ra));
    }
    if (!apply_in_place(a, s, inst.variables, bound)) {
      throw Error(ErrorCode::untranslatable, "extended plan is not executable at " + a.name);
    }
  }
  return out;
}

}  // namespace bfgp
