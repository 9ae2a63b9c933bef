#pragma once

// Fixtures and randomized checks shared by the unit suites and the
// acceptance runner. Each check returns the number of failing cases and
// writes the first few counterexamples to `log`.

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "bfgp/bfgp.hpp"

namespace bfgp::fixtures {

// Two 6-element lists to sort, i on the first register and j on the last.
inline GPProblem sorting_example() {
  GPProblem p;
  p.actions = build_action_set({{"i", false}, {"j", false}}, {{"swap", 2, true, schemas::swap}}, false);
  p.arithmetic_bound = 100;
  const std::vector<std::vector<Value>> lists{{6, 3, 4, 2, 5, 1}, {3, 2, 1, 6, 5, 4}};
  for (std::size_t k = 0; k < lists.size(); ++k) {
    std::vector<VariableSpec> vars;
    PartialState goal;
    for (std::size_t x = 0; x < 6; ++x) {
      vars.push_back({"x" + std::to_string(x), 1, 6});
      goal.registers[x] = static_cast<Value>(x + 1);
    }
    auto inst = extend_instance(vars, lists[k], goal, 2, "P" + std::to_string(k + 1));
    inst.initial.pointers = {0, 5};
    p.instances.push_back(inst);
  }
  return p;
}

inline const char* kSortingExampleProgram = "0. swap(*i,*j)\n1. inc(i)\n2. dec(j)\n3. undefined\n4. undefined\n5. end\n";

// ------------------------------------------------------------------ flags

// cmp over pointers and over contents against a direct sign computation.
inline int check_cmp_flags(int cases, std::uint64_t seed, std::ostream& log) {
  std::mt19937_64 gen(seed);
  auto actions = build_action_set(2, {}, false);
  const auto cmp_ptr = *actions.find("cmp(z1,z2)");
  const auto cmp_val = *actions.find("cmp(*z1,*z2)");
  int failures = 0;
  for (int c = 0; c < cases; ++c) {
    const std::size_t nx = 1 + gen() % 8;
    std::uniform_int_distribution<Value> val(-50, 50);
    std::vector<VariableSpec> vars(nx, VariableSpec{"x", -50, 50});
    for (std::size_t x = 0; x < nx; ++x) vars[x].name = "x" + std::to_string(x);
    MachineState s;
    for (std::size_t x = 0; x < nx; ++x) s.registers.push_back(val(gen));
    s.pointers = {static_cast<std::int32_t>(gen() % nx), static_cast<std::int32_t>(gen() % nx)};
    s.flags = {(gen() & 1) != 0, (gen() & 1) != 0};
    const bool by_content = gen() & 1;
    const Value a = by_content ? s.registers[s.pointers[0]] : s.pointers[0];
    const Value b = by_content ? s.registers[s.pointers[1]] : s.pointers[1];
    auto next = apply_ram(actions[by_content ? cmp_val : cmp_ptr], s, vars, 100);
    const bool ok = next && next->flags.zero == (a == b) && next->flags.carry == (a > b) &&
                    next->registers == s.registers && next->pointers == s.pointers;
    if (!ok && failures++ < 3) log << "  cmp(" << a << "," << b << ") gave wrong flags\n";
  }
  return failures;
}

// ------------------------------------------------------------------ codec

inline PlanningProgram random_program(std::mt19937_64& gen, std::size_t n, std::size_t num_actions) {
  auto p = PlanningProgram::empty(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    switch (gen() % 3) {
      case 0: break;
      case 1: p[i] = ProgramLine::act(static_cast<ActionId>(gen() % num_actions)); break;
      default: {
        std::vector<std::size_t> targets;
        for (std::size_t t = 0; t < n; ++t) {
          if (legal_target(i, t, n)) targets.push_back(t);
        }
        if (targets.empty()) break;
        p[i] = ProgramLine::go(targets[gen() % targets.size()], kAllFeatures[gen() % 4]);
      }
    }
  }
  return p;
}

inline int check_codec_roundtrip(int cases, std::uint64_t seed, std::ostream& log) {
  std::mt19937_64 gen(seed);
  int failures = 0;
  for (int c = 0; c < cases; ++c) {
    const std::size_t n = 2 + gen() % 9;
    const std::size_t num_actions = 1 + gen() % 40;
    auto prog = random_program(gen, n, num_actions);
    auto bits = encode(prog, num_actions);
    bool ok = bits.size() == (n - 1) * (num_actions + n + 2) && decode(bits, num_actions, n) == prog;
    // one set bit per programmed line, none for undefined lines
    std::size_t expect_bits = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (prog[i].kind == ProgramLine::Kind::action) expect_bits += 1;
      if (prog[i].kind == ProgramLine::Kind::jump) expect_bits += 2;
    }
    ok = ok && bits.count() == expect_bits;
    if (!ok && failures++ < 3) log << "  codec round trip failed for n=" << n << " |A|=" << num_actions << "\n";
  }
  return failures;
}

// ------------------------------------------------------------------ plans

struct SmallDomain {
  std::vector<ActionSchema> schemas;
  Value lo, hi;
};

// Forward translation of a random executable plan, replayed on the extended
// instance, must be executable and reach the same registers; translating it
// back must return the original plan.
inline int check_plan_translation(int cases, std::uint64_t seed, std::ostream& log) {
  std::mt19937_64 gen(seed);
  const std::vector<SmallDomain> domains{
      {{{"swap", 2, true, schemas::swap}}, 0, 9},
      {{{"add", 2, false, schemas::add}}, 0, 40},
      {{{"left", 1, false, schemas::left}, {"right", 1, false, schemas::right}}, 0, 5},
      {{{"add", 2, false, schemas::add}, {"right", 1, false, schemas::right}}, 0, 30},
  };
  int failures = 0;
  for (int c = 0; c < cases; ++c) {
    const auto& dom = domains[gen() % domains.size()];
    const std::size_t nx = 2 + gen() % 5;  // 2..6 registers
    std::size_t arity = 0;
    for (const auto& s : dom.schemas) arity = std::max(arity, s.arity);
    const std::size_t nz = std::max<std::size_t>(arity, 1) + gen() % 2;
    auto actions = build_action_set(nz, dom.schemas, false);
    std::vector<VariableSpec> vars;
    std::vector<Value> init;
    std::uniform_int_distribution<Value> val(dom.lo, dom.hi / 3);
    for (std::size_t x = 0; x < nx; ++x) {
      vars.push_back({"x" + std::to_string(x), dom.lo, dom.hi});
      init.push_back(val(gen));
    }
    auto inst = extend_instance(vars, init, {}, nz);

    // random executable plan of up to 10 actions, by rejection
    std::vector<RegisterAction> plan;
    std::vector<Value> regs = init;
    const std::size_t len = gen() % 11;
    for (int tries = 0; plan.size() < len && tries < 200; ++tries) {
      const auto& s = dom.schemas[gen() % dom.schemas.size()];
      RegisterAction a{s.name, {}};
      for (std::size_t k = 0; k < s.arity; ++k) a.registers.push_back(gen() % nx);
      if (s.arity == 2 && a.registers[0] == a.registers[1]) continue;
      auto trial = regs;
      if (apply_register_action(actions, a, trial, vars)) {
        regs = trial;
        plan.push_back(a);
      }
    }

    auto ext = translate_plan_forward(plan, actions, inst);
    MachineState s = inst.initial;
    bool ok = true;
    for (auto id : ext) {
      if (!apply_in_place(actions[id], s, vars, 1000)) {
        ok = false;
        break;
      }
    }
    ok = ok && s.registers == regs;
    std::size_t planning = 0;
    for (auto id : ext) planning += actions[id].kind == ActionKind::planning;
    ok = ok && planning == plan.size();
    if (ok) {
      auto back = translate_plan_backward(ext, actions, inst, 1000);
      // symmetric schemas may come back with their arguments swapped
      ok = back.size() == plan.size();
      for (std::size_t k = 0; ok && k < plan.size(); ++k) {
        auto a = back[k].registers, b = plan[k].registers;
        auto si = actions.schema_index(plan[k].schema);
        if (actions.schemas[*si].symmetric) {
          std::sort(a.begin(), a.end());
          std::sort(b.begin(), b.end());
        }
        ok = back[k].schema == plan[k].schema && a == b;
      }
    }
    if (!ok && failures++ < 3) log << "  plan translation failed on case " << c << "\n";
  }
  return failures;
}

// ------------------------------------------------------------------ loops

// Programs that cycle forever must end infinite with detection on, well
// before the step cap, and programs that terminate must not be flagged.
inline int check_loop_detection(std::ostream& log) {
  int failures = 0;
  auto expect = [&](const std::string& what, ExecStatus got, ExecStatus want) {
    if (got != want) {
      ++failures;
      log << "  " << what << ": got " << to_string(got) << ", expected " << to_string(want) << "\n";
    }
  };
  auto actions = build_action_set(2, {{"add", 2, false, schemas::add}}, true);
  std::vector<VariableSpec> vars{{"x0", 0, 100}, {"x1", 0, 100}, {"x2", 0, 100}};
  auto inst = extend_instance(vars, {1, 2, 3}, {{{0, 99}}, {}}, 2);
  const ExecOptions detect{1'000'000, true, false};

  // cmp leaves flags (zero, no carry); goto jumps unless !yz&!yc holds
  auto spin = parse_program("0. cmp(z1,z2)\n1. goto(0,!(!yz&!yc))\n2. end\n", actions);
  auto out = execute(spin, actions, inst, 100, detect);
  expect("constant-state loop", out.status, ExecStatus::infinite);
  if (out.steps_executed > 10) {
    ++failures;
    log << "  constant-state loop needed " << out.steps_executed << " steps to detect\n";
  }

  // pointer walks right and back forever
  auto shuttle =
      parse_program("0. inc(z1)\n1. dec(z1)\n2. cmp(z1,z2)\n3. goto(0,!(!yz&!yc))\n4. end\n", actions);
  expect("shuttle loop", execute(shuttle, actions, inst, 100, detect).status, ExecStatus::infinite);

  // without detection only the step cap stops it
  out = execute(spin, actions, inst, 100, {5000, false, false});
  expect("capped loop", out.status, ExecStatus::infinite);
  if (out.steps_executed != 5000) {
    ++failures;
    log << "  capped loop stopped after " << out.steps_executed << " steps\n";
  }

  // a long terminating count-down is not a loop
  std::vector<VariableSpec> big{{"x0", 0, 100000}, {"x1", 0, 100000}};
  auto count = extend_instance(big, {0, 5000}, {{{0, 5000}, {1, 0}}, {}}, 2);
  count.initial.pointers = {0, 1};
  auto down = parse_program("0. inc(*z1)\n1. dec(*z2)\n2. goto(0,!(yz&!yc))\n3. end\n", actions);
  expect("count-down", execute(down, actions, count, 100000, detect).status, ExecStatus::solved);
  return failures;
}

// ------------------------------------------------------------------ formulas

// Grounded action counts against 2|Z|^2 + |A'| with |A'| counted directly
// from the schema arities, for free pointers and no content inc/dec.
inline int check_action_count_formula(std::ostream& log) {
  const std::vector<std::vector<ActionSchema>> sets{
      {{"add", 2, false, schemas::add}},
      {{"swap", 2, true, schemas::swap}},
      {{"left", 1, false, schemas::left}, {"right", 1, false, schemas::right}},
      {{"pick", 1, false, schemas::pick},
       {"drop", 1, false, schemas::drop},
       {"moveAB", 0, false, schemas::move_ab},
       {"moveBA", 0, false, schemas::move_ba}},
      {},
  };
  int failures = 0;
  for (const auto& set : sets) {
    for (std::size_t z = 1; z <= 6; ++z) {
      std::size_t planning = 0;
      bool groundable = true;
      for (const auto& s : set) {
        if (s.arity > z) groundable = false;
        if (s.arity == 0) planning += 1;
        if (s.arity == 1) planning += z;
        if (s.arity == 2) planning += s.symmetric ? z * (z - 1) / 2 : z * (z - 1);
      }
      if (!groundable) continue;
      const auto got = build_action_set(z, set, false).size();
      const auto want = 2 * z * z + planning;
      if (got != want) {
        ++failures;
        log << "  |Z|=" << z << ": " << got << " actions, expected " << want << "\n";
      }
    }
  }
  return failures;
}

inline int check_encoding_length_formula(std::ostream& log) {
  int failures = 0;
  for (std::size_t n = 2; n <= 10; ++n) {
    for (std::size_t a : {1u, 7u, 14u, 27u}) {
      auto bits = encode(PlanningProgram::empty(n), a);
      const auto want = (n - 1) * (a + (n - 2) + 4);
      if (bits.size() != want || encoding_length(n, a) != want) {
        ++failures;
        log << "  n=" << n << " |A|=" << a << ": " << bits.size() << " bits, expected " << want << "\n";
      }
    }
  }
  return failures;
}

}  // namespace bfgp::fixtures
