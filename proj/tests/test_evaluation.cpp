#include <gtest/gtest.h>

#include "support.hpp"

using namespace bfgp;

TEST(Evaluation, SortingExampleValues) {
  auto p = fixtures::sorting_example();
  auto prog = parse_program(fixtures::kSortingExampleProgram, p.actions);
  auto r = eval_performance(prog, p);
  EXPECT_EQ(r.f1, 0);
  EXPECT_EQ(r.f2, 2);
  EXPECT_EQ(r.f3, 0);
  EXPECT_EQ(r.h4, 2);
  EXPECT_EQ(r.h5, 32);
  EXPECT_EQ(r.f6, 6);
  EXPECT_EQ(r.pc_max, 3);
  EXPECT_EQ(r.frontier_line, 3u);
  EXPECT_EQ(r.status, NodeStatus::open);
}

TEST(Evaluation, StructuralFunctions) {
  auto actions = domain_actions("reverse");
  auto prog = parse_program("0. inc(i)\n1. inc(i)\n2. dec(j)\n3. goto(0,!(yz&yc))\n4. undefined\n5. end\n", actions);
  auto s = eval_structural(prog);
  EXPECT_EQ(s.f1, 1);
  EXPECT_EQ(s.f2, 1);
  EXPECT_EQ(s.f3, 1);
}

TEST(Evaluation, GoalDistanceIsSquaredError) {
  std::vector<VariableSpec> vars{{"a", -100, 100}, {"b", -100, 100}};
  auto inst = extend_instance(vars, {0, 0}, {{{0, 3}, {1, -4}}, {}}, 1);
  MachineState s{{1, 1}, {0}, {}};
  EXPECT_EQ(goal_distance(inst, s), 4 + 25);
}

TEST(Evaluation, GoalDistanceSaturates) {
  const Value big = std::numeric_limits<Value>::max() / 2;
  std::vector<VariableSpec> vars{{"a", -big, big}, {"b", -big, big}};
  auto inst = extend_instance(vars, {0, 0}, {{{0, big}, {1, -big}}, {}}, 1);
  MachineState s{{-big, big}, {0}, {}};
  EXPECT_EQ(goal_distance(inst, s), std::numeric_limits<std::int64_t>::max());
}

TEST(Evaluation, SolvedProgramHasZeroHeuristic) {
  auto p = make_problem("tsum");
  auto r = eval_performance(reference_solution("tsum", p.actions), p);
  EXPECT_EQ(r.status, NodeStatus::solution);
  EXPECT_EQ(r.h5, 0);
  // one inc, then k adds and k decs per term k = 1..10
  EXPECT_EQ(r.f6, 10 + 2 * 55);
}

TEST(Evaluation, AnyFailingInstanceMakesADeadEnd) {
  auto p = make_problem("reverse");
  // end right away: incorrect on every list
  EXPECT_EQ(eval_performance(parse_program("0. end\n", p.actions), p).status, NodeStatus::dead_end);
  // dec(i) from 0: inapplicable
  EXPECT_EQ(eval_performance(parse_program("0. dec(i)\n1. undefined\n2. end\n", p.actions), p).status,
            NodeStatus::dead_end);
  // endless cmp/goto loop
  EXPECT_EQ(eval_performance(parse_program("0. cmp(j,i)\n1. goto(0,!(!yz&!yc))\n2. end\n", p.actions), p).status,
            NodeStatus::dead_end);
}

TEST(Evaluation, FrontierIsTheFirstInstancesHaltingLine) {
  GPProblem p;
  p.actions = build_action_set({{"z1", false}, {"k", true}}, {}, false);
  std::vector<VariableSpec> vars{{"x0", 0, 9}, {"x1", 0, 9}};
  auto below = extend_instance(vars, {0, 0}, {{{0, 1}}, {}}, 2, "below");
  below.initial.pointers = {0, 1};
  auto equal = below;
  equal.label = "equal";
  equal.initial.pointers = {1, 1};
  p.instances = {below, equal};
  // z1 < k jumps to line 3, z1 = k falls through to line 2
  auto prog = parse_program("0. cmp(z1,k)\n1. goto(3,!(yz&!yc))\n2. undefined\n3. undefined\n4. end\n", p.actions);
  auto r = eval_performance(prog, p);
  EXPECT_EQ(r.status, NodeStatus::open);
  EXPECT_EQ(r.frontier_line, 3u);
  EXPECT_EQ(r.pc_max, 3);
  EXPECT_EQ(r.h4, 1);
  std::swap(p.instances[0], p.instances[1]);
  EXPECT_EQ(eval_performance(prog, p).frontier_line, 2u);
}

TEST(Evaluation, AggregationModes) {
  auto p = fixtures::sorting_example();
  auto prog = parse_program(fixtures::kSortingExampleProgram, p.actions);
  EvalConfig cfg;
  cfg.h5_aggregate = Aggregate::max;
  cfg.f6_aggregate = Aggregate::avg;
  auto r = eval_performance(prog, p, cfg);
  EXPECT_EQ(r.h5, 26);
  EXPECT_EQ(r.f6, 3);
}

TEST(Evaluation, StepCapTurnsLongRunsIntoDeadEnds) {
  auto p = make_problem("tsum");
  auto prog = reference_solution("tsum", p.actions);
  EXPECT_EQ(eval_performance(prog, p, 15).status, NodeStatus::dead_end);
  EXPECT_EQ(eval_performance(prog, p, 0).status, NodeStatus::solution);
}

TEST(EvalFunctions, ParseAndRank) {
  auto fns = parse_fn_sequence("h5,f1");
  ASSERT_EQ(fns.size(), 2u);
  EXPECT_EQ(fns[0], EvalFn::h5);
  EXPECT_EQ(format_fn_sequence(fns), "h5,f1");
  EXPECT_THROW(parse_fn_sequence("h5,f7"), Error);
  EXPECT_THROW(parse_fn_sequence(""), Error);
  try {
    parse_eval_fn("g2");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unknown_function);
  }

  EvaluationRecord a, b;
  a.h5 = 3;
  a.f1 = 9;
  b.h5 = 4;
  b.f1 = 0;
  EXPECT_LT(rank_key(a, fns), rank_key(b, fns));
  b.h5 = 3;
  EXPECT_LT(rank_key(b, fns), rank_key(a, fns));
  const std::vector<EvalFn> f1_first{EvalFn::f1, EvalFn::h5};
  EXPECT_LT(rank_key(b, f1_first), rank_key(a, f1_first));
}
