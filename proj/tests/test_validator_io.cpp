#include <unistd.h>

#include <algorithm>
#include <filesystem>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace bfgp;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("bfgp-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

std::string error_text(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "<no error>";
}

}  // namespace

TEST(InstanceText, RoundTripsGeneratedInstances) {
  for (const auto& name : domain_names()) {
    auto p = make_problem(name);
    for (const auto& inst : p.instances) {
      auto text = format_instance(inst, p.actions.pointers);
      auto back = parse_instance(text, p.actions.pointers, inst.label);
      EXPECT_EQ(back.variables, inst.variables) << inst.label;
      EXPECT_EQ(back.initial, inst.initial) << inst.label;
      EXPECT_EQ(back.goal, inst.goal) << inst.label;
    }
  }
}

TEST(InstanceText, ParsesPointersGoalsAndComments) {
  std::vector<PointerSpec> ptrs{{"tail", true}, {"b", false}, {"a", false}};
  auto inst = parse_instance(
      "# select, three elements\nvars 4\nvar x0 0 9 4\nvar x1 0 9 1  # min\nvar x2 0 9 7\nvar len 0 9 3\n"
      "pointer tail 2\ngoal b 1\n",
      ptrs);
  EXPECT_EQ(inst.initial.registers, (std::vector<Value>{4, 1, 7, 3}));
  EXPECT_EQ(inst.initial.pointers, (std::vector<std::int32_t>{2, 0, 0}));
  EXPECT_EQ(inst.goal.pointers.at(1), 1);
  EXPECT_TRUE(inst.goal.registers.empty());
}

TEST(InstanceText, ErrorsNameTheLine) {
  std::vector<PointerSpec> ptrs{{"i", false}};
  auto parse = [&](const char* text) { return error_text([&] { parse_instance(text, ptrs); }); };
  EXPECT_NE(parse("vars 2\nvar a 0 9 1\nvar b 0 9 x\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse("vars 1\nvar a 0 9 10\n").find("line 2"), std::string::npos);
  EXPECT_NE(parse("vars 1\nvar a 0 9 1\ngoal c 1\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse("vars 1\nvar a 0 9 1\npointer k 0\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse("var a 0 9 1\n").find("line 1"), std::string::npos);
  EXPECT_NE(parse("vars 1\nvar a 0 9 1\nfrobnicate\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse("vars 2\nvar a 0 9 1\n").find("declares 2"), std::string::npos);
  EXPECT_NE(parse("").find("vars"), std::string::npos);
}

TEST(ProblemDirectory, WritesAndReloads) {
  auto dir = scratch_dir("problem");
  GenParams g;
  g.count = 3;
  g.min_size = 4;
  g.max_size = 8;
  auto p = make_problem("select", g);
  ProblemManifest m;
  m.domain = "select";
  m.pointers = 3;
  m.seed = 1;
  m.kind = "training";
  write_problem_dir(dir, p, m);
  auto back = load_manifest(dir);
  EXPECT_EQ(back.domain, "select");
  ASSERT_EQ(back.labels.size(), 3u);
  EXPECT_TRUE(fs::exists(dir / (back.labels[0] + ".inst")));
  auto insts = load_problem_instances(dir, back, p.actions.pointers);
  ASSERT_EQ(insts.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(insts[k].initial, p.instances[k].initial);
    EXPECT_EQ(insts[k].goal, p.instances[k].goal);
    EXPECT_EQ(insts[k].label, p.instances[k].label);
  }
  fs::remove(dir / (back.labels[1] + ".inst"));
  EXPECT_THROW(load_problem_instances(dir, back, p.actions.pointers), Error);
  fs::remove_all(dir);
}

TEST(Validator, ReferenceProgramsGeneralize) {
  for (const char* name : {"reverse", "select", "find", "corridor", "fibonacci"}) {
    auto v = make_validation_set(name, 3);
    auto prog = reference_solution(name, v.actions);
    auto report = validate(prog, v);
    EXPECT_TRUE(report.all_solved()) << name << " " << report.solved << "/" << report.instances.size();
  }
}

TEST(Validator, ModesAgreeOnSolvingPrograms) {
  auto v = make_validation_set("corridor", 1);
  auto prog = reference_solution("corridor", v.actions);
  ValidateOptions fast;
  fast.mode = ValidationMode::fast;
  auto a = validate(prog, v);
  auto b = validate(prog, v, fast);
  ASSERT_EQ(a.instances.size(), b.instances.size());
  for (std::size_t k = 0; k < a.instances.size(); ++k) {
    EXPECT_EQ(a.instances[k].status, b.instances[k].status);
    EXPECT_EQ(a.instances[k].steps, b.instances[k].steps);
  }
  EXPECT_GT(a.peak_memory_bytes, b.peak_memory_bytes);
  for (const auto& r : b.instances) EXPECT_EQ(r.visited_states, 0u);
}

TEST(Validator, LoopingProgramFailsInBothModes) {
  auto v = make_validation_set("reverse", 1);
  auto loop = parse_program("0. cmp(j,i)\n1. goto(0,!(!yz&!yc))\n2. end\n", v.actions);
  auto detect = validate(loop, v);
  EXPECT_EQ(detect.solved, 0u);
  for (const auto& r : detect.instances) {
    EXPECT_EQ(r.status, ExecStatus::infinite);
    EXPECT_LT(r.steps, 10u);
  }
  ValidateOptions fast;
  fast.mode = ValidationMode::fast;
  fast.max_steps = 10'000;
  auto capped = validate(loop, v, fast);
  for (const auto& r : capped.instances) {
    EXPECT_EQ(r.status, ExecStatus::infinite);
    EXPECT_EQ(r.steps, 10'000u);
  }
}

TEST(Validator, ReportsListFailingInstances) {
  auto v = make_validation_set("reverse", 1);
  // one swap per list is not enough
  auto wrong = parse_program("0. set(j,tail)\n1. swap(*i,*j)\n2. end\n", v.actions);
  auto r = validate(wrong, v);
  EXPECT_FALSE(r.all_solved());
  auto csv = report_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "label,status,steps,duration_s,visited_states");
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), v.instances.size() + 1);
  auto j = report_json(r);
  EXPECT_EQ(j["failing"].size(), v.instances.size());
  EXPECT_EQ(j["mode"], "detect_infinite");
  EXPECT_EQ(j["instances"], v.instances.size());
}

TEST(Validator, WorkersDoNotChangeResults) {
  auto v = make_validation_set("reverse", 2);
  auto prog = reference_solution("reverse", v.actions);
  ValidateOptions par;
  par.workers = 3;
  auto a = validate(prog, v);
  auto b = validate(prog, v, par);
  for (std::size_t k = 0; k < a.instances.size(); ++k) {
    EXPECT_EQ(a.instances[k].label, b.instances[k].label);
    EXPECT_EQ(a.instances[k].steps, b.instances[k].steps);
  }
}

TEST(Validator, RejectsEmptySetsAndBadPrograms) {
  auto v = make_validation_set("reverse", 1);
  std::vector<Instance> none;
  EXPECT_THROW(validate(reference_solution("reverse", v.actions), v.actions, none, 100), Error);
  auto bad = PlanningProgram::empty(3);
  bad[0] = ProgramLine::act(999);
  EXPECT_THROW(validate(bad, v), Error);
}
