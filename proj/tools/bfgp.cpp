// Command-line driver: instance generation, synthesis, validation, encoding
// and manifest replay. Exit codes: 0 success, 1 unsolved/failed, 2 usage or
// parse error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bfgp/bfgp.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

// FNV-1a, used only to fingerprint output files in run manifests.
std::string fingerprint(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// "6", "2..21" or "2-21"
std::pair<std::size_t, std::size_t> parse_sizes(const std::string& s) {
  auto split = s.find("..");
  std::size_t skip = 2;
  if (split == std::string::npos) {
    split = s.find('-');
    skip = 1;
  }
  try {
    if (split == std::string::npos) {
      auto v = std::stoul(s);
      return {v, v};
    }
    return {std::stoul(s.substr(0, split)), std::stoul(s.substr(split + skip))};
  } catch (const std::exception&) {
    throw bfgp::Error(bfgp::ErrorCode::usage, "bad --sizes value '" + s + "'");
  }
}

struct SourceArgs {
  std::string domain;
  std::string problem_dir;
  std::size_t pointers = 0;
  std::uint64_t seed = 1;
  std::size_t count = 0;
  std::string sizes;
  bfgp::Value bound = 100;

  void add_to(CLI::App* cmd, bool generation) {
    cmd->add_option("--domain", domain, "Built-in domain (" + domain_list() + ")");
    cmd->add_option("--pointers", pointers, "Total pointer count |Z| (default: domain's)");
    cmd->add_option("--seed", seed, "Generator seed")->capture_default_str();
    if (generation) {
      cmd->add_option("--problem", problem_dir, "Problem directory written by 'gen'");
      cmd->add_option("--count", count, "Number of instances (default: domain's training set)");
      cmd->add_option("--sizes", sizes, "Instance size or range, e.g. 6 or 2..21");
      cmd->add_option("--bound", bound, "Arithmetic bound on register values")->capture_default_str();
    }
  }

  static std::string domain_list() {
    std::string out;
    for (const auto& d : bfgp::domain_names()) out += (out.empty() ? "" : ", ") + d;
    return out;
  }

  bfgp::GenParams params() const {
    bfgp::GenParams p;
    p.count = count;
    p.seed = seed;
    p.bound = bound;
    p.pointers = pointers;
    if (!sizes.empty()) std::tie(p.min_size, p.max_size) = parse_sizes(sizes);
    return p;
  }

  // Problem from a directory or from the generator; also reports the domain.
  bfgp::GPProblem load(std::string& domain_out) const {
    if (!problem_dir.empty()) {
      auto m = bfgp::load_manifest(problem_dir);
      if (!domain.empty() && domain != m.domain) {
        throw bfgp::Error(bfgp::ErrorCode::usage, "--domain " + domain + " conflicts with problem domain " + m.domain);
      }
      domain_out = m.domain;
      bfgp::GPProblem p;
      p.actions = bfgp::domain_actions(m.domain, pointers ? pointers : m.pointers);
      p.arithmetic_bound = m.bound;
      p.instances = bfgp::load_problem_instances(problem_dir, m, p.actions.pointers);
      return p;
    }
    if (domain.empty()) throw bfgp::Error(bfgp::ErrorCode::usage, "either --domain or --problem is required");
    domain_out = domain;
    return bfgp::make_problem(domain, params());
  }
};

std::string stats_header() { return "domain,n,pointers,fns,outcome,time_s,expanded,evaluated,peak_open,dead_ends,f6\n"; }

void append_stats(const fs::path& path, const std::string& row) {
  bool fresh = !fs::exists(path);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::app);
  if (!out) throw bfgp::Error(bfgp::ErrorCode::usage, "cannot write " + path.string());
  if (fresh) out << stats_header();
  out << row;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  SourceArgs source;
  std::size_t lines = 0;
  std::string eval = "h5,f1";
  bool anytime = false;
  double timeout = 0;
  std::uint64_t node_budget = 0;
  std::uint64_t memory_mb = 0;
  std::uint64_t max_steps = 0;
  std::size_t workers = 1;
  bool check_duplicates = false;
  std::string out;
  std::string stats;
  std::string manifest;
};

json synth_manifest(const SynthArgs& a, const std::string& domain, std::size_t n, std::size_t pointers) {
  return {{"command", "synth"},
          {"domain", domain},
          {"problem", a.source.problem_dir},
          {"n", n},
          {"pointers", pointers},
          {"fns", a.eval},
          {"seed", a.source.seed},
          {"count", a.source.count},
          {"sizes", a.source.sizes},
          {"bound", a.source.bound},
          {"anytime", a.anytime},
          {"budgets", {{"timeout_s", a.timeout}, {"node_budget", a.node_budget}, {"memory_mb", a.memory_mb}, {"max_steps", a.max_steps}}},
          {"workers", a.workers},
          {"outputs", {{"program", a.out}, {"stats", a.stats}}}};
}

struct SynthRun {
  bfgp::SearchResult result;
  std::string program_text;
  json manifest;
};

SynthRun run_synth(const SynthArgs& a) {
  std::string domain;
  auto problem = a.source.load(domain);
  const auto spec = bfgp::domain_spec(domain);
  bfgp::SearchConfig cfg;
  cfg.n = a.lines ? a.lines : spec.default_n;
  cfg.pointer_count = problem.actions.pointers.size();
  cfg.fns = bfgp::parse_fn_sequence(a.eval);
  cfg.anytime = a.anytime;
  cfg.eval.max_steps = a.max_steps;
  cfg.time_budget = a.timeout;
  cfg.node_budget = a.node_budget;
  cfg.memory_budget = a.memory_mb << 20;
  cfg.workers = a.workers;
  cfg.check_duplicates = a.check_duplicates;

  SynthRun run;
  run.result = bfgp::bfgp(problem, cfg);
  run.manifest = synth_manifest(a, domain, cfg.n, cfg.pointer_count);
  const auto& r = run.result;
  const auto& s = r.stats;
  std::cout << "outcome " << bfgp::to_string(r.outcome) << "\n"
            << "expanded " << s.expanded << "  evaluated " << s.evaluated << "  dead-ends " << s.dead_ends
            << "  peak-open " << s.peak_open_size << " (" << (s.peak_open_bytes >> 20) << " MB)  time " << s.elapsed << "s\n";
  if (r.program) {
    run.program_text = bfgp::format_program(*r.program, problem.actions);
    std::cout << run.program_text;
    if (!a.out.empty()) bfgp::write_file(a.out, run.program_text);
    run.manifest["artifacts"] = {{"program", fingerprint(run.program_text)}};
  }
  run.manifest["result"] = {{"outcome", bfgp::to_string(r.outcome)},
                            {"expanded", s.expanded},
                            {"evaluated", s.evaluated},
                            {"f6", r.record ? r.record->f6 : -1}};
  if (!a.stats.empty()) {
    std::ostringstream row;
    row << domain << "," << cfg.n << "," << cfg.pointer_count << ",\"" << a.eval << "\"," << bfgp::to_string(r.outcome)
        << "," << s.elapsed << "," << s.expanded << "," << s.evaluated << "," << s.peak_open_size << ","
        << s.dead_ends << "," << (r.record ? r.record->f6 : -1) << "\n";
    append_stats(a.stats, row.str());
  }
  if (!a.manifest.empty()) bfgp::write_file(a.manifest, run.manifest.dump(2) + "\n");
  return run;
}

int cmd_synth(const SynthArgs& a) {
  auto run = run_synth(a);
  return run.result.outcome == bfgp::SearchOutcome::solved ? kOk : kFailed;
}

// Re-runs a synth manifest and checks the program fingerprint and node counts.
int cmd_replay(const std::string& manifest_path, const std::string& out) {
  json m;
  try {
    m = json::parse(bfgp::read_file(manifest_path));
  } catch (const json::exception& e) {
    throw bfgp::Error(bfgp::ErrorCode::parse_error, manifest_path + ": " + e.what());
  }
  SynthArgs a;
  try {
    if (m.at("command") != "synth") throw bfgp::Error(bfgp::ErrorCode::usage, "only synth manifests can be replayed");
    a.source.problem_dir = m.value("problem", "");
    a.source.domain = a.source.problem_dir.empty() ? m.at("domain").get<std::string>() : "";
    a.source.pointers = m.at("pointers");
    a.source.seed = m.at("seed");
    a.source.count = m.value("count", std::size_t{0});
    a.source.sizes = m.value("sizes", "");
    a.source.bound = m.value("bound", bfgp::Value{100});
    a.lines = m.at("n");
    a.eval = m.at("fns");
    a.anytime = m.value("anytime", false);
    a.timeout = m.at("budgets").value("timeout_s", 0.0);
    a.node_budget = m.at("budgets").value("node_budget", std::uint64_t{0});
    a.memory_mb = m.at("budgets").value("memory_mb", std::uint64_t{0});
    a.max_steps = m.at("budgets").value("max_steps", std::uint64_t{0});
    a.workers = m.value("workers", std::size_t{1});
  } catch (const json::exception& e) {
    throw bfgp::Error(bfgp::ErrorCode::parse_error, manifest_path + ": " + e.what());
  }
  a.out = out;
  auto run = run_synth(a);
  const auto& expected = m.value("result", json::object());
  bool same = run.manifest["result"] == expected;
  if (m.contains("artifacts")) same = same && run.manifest.value("artifacts", json::object()) == m["artifacts"];
  std::cout << (same ? "replay matches the manifest\n" : "replay differs from the manifest\n");
  return same ? kOk : kFailed;
}

// ---------------------------------------------------------------- validate

struct ValidateArgs {
  SourceArgs source;
  std::string program;
  bool detect_infinite = false;
  bool full = false;
  std::uint64_t max_steps = bfgp::kValidationSteps;
  std::size_t workers = 1;
  std::string out;
};

int cmd_validate(const ValidateArgs& a) {
  bfgp::GPProblem problem;
  std::string domain;
  if (!a.source.problem_dir.empty()) {
    problem = a.source.load(domain);
  } else {
    if (a.source.domain.empty()) throw bfgp::Error(bfgp::ErrorCode::usage, "either --domain or --problem is required");
    domain = a.source.domain;
    problem = bfgp::make_validation_set(domain, a.source.seed,
                                        a.full ? bfgp::ValidationScale::full : bfgp::ValidationScale::desk,
                                        a.source.pointers);
  }
  auto text = bfgp::read_file(a.program);
  bfgp::PlanningProgram prog;
  try {
    prog = bfgp::parse_program(text, problem.actions);
  } catch (const bfgp::Error& e) {
    throw bfgp::Error(e.code(), a.program + ": " + e.what());
  }
  bfgp::ValidateOptions opt;
  opt.mode = a.detect_infinite ? bfgp::ValidationMode::detect_infinite : bfgp::ValidationMode::fast;
  opt.max_steps = a.max_steps;
  opt.workers = a.workers;
  auto report = bfgp::validate(prog, problem, opt);
  std::cout << domain << ": " << report.solved << "/" << report.instances.size() << " solved in "
            << report.total_duration << "s (" << bfgp::to_string(report.mode) << ")\n";
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    bfgp::write_file(fs::path(a.out) / "report.csv", bfgp::report_csv(report));
    bfgp::write_file(fs::path(a.out) / "report.json", bfgp::report_json(report).dump(2) + "\n");
  }
  if (!report.all_solved()) {
    std::cerr << "failing instances:";
    for (const auto& i : report.instances) {
      if (i.status != bfgp::ExecStatus::solved) std::cerr << " " << i.label << "(" << bfgp::to_string(i.status) << ")";
    }
    std::cerr << "\n";
    return kFailed;
  }
  return kOk;
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  SourceArgs source;
  bool validation = false;
  bool full = false;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  if (a.source.domain.empty()) throw bfgp::Error(bfgp::ErrorCode::usage, "--domain is required");
  bfgp::GPProblem problem;
  bfgp::ProblemManifest m;
  m.domain = a.source.domain;
  m.seed = a.source.seed;
  if (a.validation) {
    problem = bfgp::make_validation_set(a.source.domain, a.source.seed,
                                        a.full ? bfgp::ValidationScale::full : bfgp::ValidationScale::desk,
                                        a.source.pointers);
    m.kind = "validation";
    m.params = {{"scale", a.full ? "full" : "desk"}};
  } else {
    auto params = a.source.params();
    problem = bfgp::make_problem(a.source.domain, params);
    m.kind = "training";
    m.params = {{"count", params.count}, {"min_size", params.min_size}, {"max_size", params.max_size}};
  }
  m.bound = problem.arithmetic_bound;
  m.pointers = problem.actions.pointers.size();
  bfgp::write_problem_dir(a.out, problem, m);
  std::cout << problem.instances.size() << " instances written to " << a.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------- encode

struct EncodeArgs {
  std::string domain;
  std::size_t pointers = 0;
  std::string program;
  std::string decode;
  std::size_t lines = 0;
};

int cmd_encode(const EncodeArgs& a) {
  auto actions = bfgp::domain_actions(a.domain, a.pointers);
  if (!a.decode.empty()) {
    if (a.lines == 0) throw bfgp::Error(bfgp::ErrorCode::usage, "--decode needs --lines");
    auto prog = bfgp::decode(bfgp::BitVector::from_string(a.decode), actions.size(), a.lines);
    std::cout << bfgp::format_program(prog, actions);
    return kOk;
  }
  if (a.program.empty()) throw bfgp::Error(bfgp::ErrorCode::usage, "--program or --decode is required");
  auto prog = bfgp::parse_program(bfgp::read_file(a.program), actions);
  auto bits = bfgp::encode(prog, actions.size());
  std::cout << bits.to_string() << "\n";
  std::cerr << "n=" << prog.size() << " |A|=" << actions.size() << " bits=" << bits.size() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized planning by best-first search over planning programs"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate instance files and a manifest");
  gen.source.add_to(gen_cmd, true);
  gen_cmd->add_flag("--validation", gen.validation, "Generate the held-out validation set");
  gen_cmd->add_flag("--full", gen.full, "Full-scale validation set");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Synthesize a planning program");
  synth.source.add_to(synth_cmd, true);
  synth_cmd->add_option("--lines", synth.lines, "Program lines n (default: domain's)");
  synth_cmd->add_option("--eval", synth.eval, "Evaluation functions, e.g. h5,f1")->capture_default_str();
  synth_cmd->add_flag("--anytime", synth.anytime, "Keep searching and return the solution with least f6");
  synth_cmd->add_option("--timeout", synth.timeout, "Time budget in seconds (0: none)");
  synth_cmd->add_option("--node-budget", synth.node_budget, "Expansion budget (0: none)");
  synth_cmd->add_option("--memory-mb", synth.memory_mb, "Open-list memory budget in MB (0: none)");
  synth_cmd->add_option("--max-steps", synth.max_steps, "Per-instance step cap (0: size-based default)");
  synth_cmd->add_option("--workers", synth.workers, "Evaluation threads")->capture_default_str();
  synth_cmd->add_flag("--check-duplicates", synth.check_duplicates, "Count duplicate programs generated");
  synth_cmd->add_option("--out", synth.out, "Write the solution program here");
  synth_cmd->add_option("--stats", synth.stats, "Append a stats row to this CSV");
  synth_cmd->add_option("--manifest", synth.manifest, "Write a run manifest (JSON) here");

  ValidateArgs val;
  auto* val_cmd = app.add_subcommand("validate", "Validate a program on held-out instances");
  val.source.add_to(val_cmd, false);
  val_cmd->add_option("--problem", val.source.problem_dir, "Problem directory written by 'gen'");
  val_cmd->add_option("--program", val.program, "Program file")->required();
  val_cmd->add_flag("--detect-infinite", val.detect_infinite, "Store visited states to detect loops");
  val_cmd->add_flag("--full", val.full, "Full-scale validation set");
  val_cmd->add_option("--max-steps", val.max_steps, "Per-instance step cap")->capture_default_str();
  val_cmd->add_option("--workers", val.workers, "Validation threads")->capture_default_str();
  val_cmd->add_option("--out", val.out, "Directory for report.csv and report.json");

  EncodeArgs enc;
  auto* enc_cmd = app.add_subcommand("encode", "Print a program's bit-vector, or decode one");
  enc_cmd->add_option("--domain", enc.domain, "Domain whose action set is used")->required();
  enc_cmd->add_option("--pointers", enc.pointers, "Total pointer count |Z|");
  enc_cmd->add_option("--program", enc.program, "Program file to encode");
  enc_cmd->add_option("--decode", enc.decode, "Bit string to decode");
  enc_cmd->add_option("--lines", enc.lines, "Program lines n (for --decode)");

  std::string replay_manifest, replay_out;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a synth manifest and compare the results");
  replay_cmd->add_option("--manifest", replay_manifest, "Manifest written by synth --manifest")->required();
  replay_cmd->add_option("--out", replay_out, "Write the replayed program here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen);
    if (*synth_cmd) return cmd_synth(synth);
    if (*val_cmd) return cmd_validate(val);
    if (*enc_cmd) return cmd_encode(enc);
    if (*replay_cmd) return cmd_replay(replay_manifest, replay_out);
  } catch (const bfgp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
