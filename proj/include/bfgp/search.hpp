#pragma once

// Best-first frontier search over partial planning programs. Only the open
// list is stored; successor generation never produces the same program twice
// because each node programs exactly one line, chosen as a function of the
// node itself (see successors()).

#include <algorithm>
#include <chrono>
#include <cstring>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bfgp/core.hpp"
#include "bfgp/evaluation.hpp"
#include "bfgp/parallel.hpp"
#include "bfgp/program.hpp"
#include "bfgp/vm.hpp"

namespace bfgp {

struct SearchNode {
  PlanningProgram program;
  EvaluationRecord record;
  RankKey key;
  std::uint64_t seq = 0;
};

struct SearchConfig {
  std::size_t n = 0;
  std::size_t pointer_count = 0;  // informational; the problem's action set fixes the pointers
  std::vector<EvalFn> fns{EvalFn::h5, EvalFn::f1};
  bool anytime = false;
  EvalConfig eval;
  double time_budget = 0;        // seconds, 0 = none
  std::uint64_t node_budget = 0;  // expansions, 0 = none
  std::uint64_t memory_budget = 0;  // open-list bytes, 0 = none
  std::size_t workers = 1;
  bool check_duplicates = false;
  std::function<void(const SearchNode&)> on_pop;
};

struct SearchStats {
  std::uint64_t expanded = 0;
  std::uint64_t evaluated = 0;
  std::uint64_t dead_ends = 0;
  std::uint64_t duplicates = 0;
  double elapsed = 0;
  std::size_t peak_open_size = 0;
  std::uint64_t peak_open_bytes = 0;
};

struct LoggedSolution {
  PlanningProgram program;
  EvaluationRecord record;
  std::uint64_t expanded = 0;
  double elapsed = 0;
};

enum class SearchOutcome : std::uint8_t { solved, budget_exhausted, unsolvable };

inline const char* to_string(SearchOutcome o) {
  switch (o) {
    case SearchOutcome::solved: return "solved";
    case SearchOutcome::budget_exhausted: return "budget-exhausted";
    case SearchOutcome::unsolvable: return "unsolvable-space";
  }
  return "?";
}

struct SearchResult {
  SearchOutcome outcome = SearchOutcome::unsolvable;
  std::optional<PlanningProgram> program;
  std::optional<EvaluationRecord> record;
  SearchStats stats;
  std::vector<LoggedSolution> solutions;
};


namespace detail {

// Open list of compact nodes. Heap entries carry the first rank value, the
// insertion number and a slot; the slot holds the remaining rank values and
// the program, one 32-bit word per line. Records are not kept: a popped node
// is re-evaluated, which expansion needs anyway. Storage grows in blocks, so
// a large open list never needs a second copy of itself while growing.
class OpenList {
 public:
  OpenList(std::size_t lines, std::size_t key_size)
      : lines_(lines), extra_(key_size - 1), stride_(2 * extra_ + lines) {}

  void push(const PlanningProgram& p, const RankKey& key, std::uint64_t seq) {
    std::uint32_t slot;
    if (!free_.empty()) {
      slot = free_.back();
      free_.pop_back();
    } else {
      if (slots_ % kBlockSlots == 0) blocks_.push_back(std::make_unique<std::uint32_t[]>(kBlockSlots * stride_));
      slot = slots_++;
    }
    std::uint32_t* w = words(slot);
    std::memcpy(w, &key.values[1], extra_ * sizeof(std::int64_t));
    for (std::size_t i = 0; i < lines_; ++i) w[2 * extra_ + i] = pack(p[i]);
    heap_.push_back({key.values[0], seq, slot});
    std::push_heap(heap_.begin(), heap_.end(), Worse{this});
  }

  // Removes the best node and returns its program and insertion number.
  std::pair<PlanningProgram, std::uint64_t> pop() {
    std::pop_heap(heap_.begin(), heap_.end(), Worse{this});
    const Entry e = heap_.back();
    heap_.pop_back();
    PlanningProgram p;
    p.lines.resize(lines_);
    const std::uint32_t* w = words(e.slot);
    for (std::size_t i = 0; i < lines_; ++i) p[i] = unpack(w[2 * extra_ + i]);
    free_.push_back(e.slot);
    return {std::move(p), e.seq};
  }

  bool empty() const noexcept { return heap_.empty(); }
  std::size_t size() const noexcept { return heap_.size(); }
  std::uint64_t bytes() const noexcept {
    return heap_.size() * sizeof(Entry) + blocks_.size() * kBlockSlots * stride_ * sizeof(std::uint32_t) +
           free_.capacity() * sizeof(std::uint32_t);
  }

 private:
  static constexpr std::size_t kBlockSlots = 1 << 14;

  struct Entry {
    std::int64_t first;
    std::uint64_t seq;
    std::uint32_t slot;
  };

  // Heap order: true when a ranks after b.
  struct Worse {
    const OpenList* open;
    bool operator()(const Entry& a, const Entry& b) const noexcept {
      if (a.first != b.first) return a.first > b.first;
      for (std::size_t i = 0; i < open->extra_; ++i) {
        const auto x = open->extra_value(a.slot, i), y = open->extra_value(b.slot, i);
        if (x != y) return x > y;
      }
      return a.seq > b.seq;
    }
  };

  std::uint32_t* words(std::uint32_t slot) const noexcept {
    return blocks_[slot / kBlockSlots].get() + (slot % kBlockSlots) * stride_;
  }

  std::int64_t extra_value(std::uint32_t slot, std::size_t i) const noexcept {
    std::int64_t v;
    std::memcpy(&v, words(slot) + 2 * i, sizeof v);
    return v;
  }

  // kind in bits 0-1, feature in bits 2-3, action or target above.
  static std::uint32_t pack(const ProgramLine& w) noexcept {
    const std::uint32_t payload = w.kind == ProgramLine::Kind::action ? w.action
                                  : w.kind == ProgramLine::Kind::jump ? w.target
                                                                      : 0;
    return static_cast<std::uint32_t>(w.kind) | static_cast<std::uint32_t>(w.feature) << 2 | payload << 4;
  }

  static ProgramLine unpack(std::uint32_t v) noexcept {
    const auto kind = static_cast<ProgramLine::Kind>(v & 3);
    switch (kind) {
      case ProgramLine::Kind::action: return ProgramLine::act(v >> 4);
      case ProgramLine::Kind::jump: return ProgramLine::go(v >> 4, static_cast<Feature>((v >> 2) & 3));
      case ProgramLine::Kind::end: return ProgramLine::end();
      default: return ProgramLine::undefined();
    }
  }

  std::size_t lines_, extra_, stride_;
  std::deque<Entry> heap_;
  std::vector<std::unique_ptr<std::uint32_t[]>> blocks_;
  std::uint32_t slots_ = 0;
  std::vector<std::uint32_t> free_;
};

inline std::string program_key(const PlanningProgram& p) {
  std::string k(p.size() * sizeof(ProgramLine), '\0');
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& w = p[i];
    char* dst = k.data() + i * sizeof(ProgramLine);
    dst[0] = static_cast<char>(w.kind);
    dst[1] = static_cast<char>(w.kind == ProgramLine::Kind::jump ? w.feature : Feature::nz_nc);
    std::uint16_t t = w.kind == ProgramLine::Kind::jump ? w.target : 0;
    std::uint32_t a = w.kind == ProgramLine::Kind::action ? w.action : 0;
    std::memcpy(dst + 2, &t, 2);
    std::memcpy(dst + 4, &a, 4);
  }
  return k;
}

}  // namespace detail

// Candidate instructions for one line: every grounded action, then every
// goto with a legal target and each of the four features.
inline std::vector<ProgramLine> line_candidates(std::size_t line, std::size_t n, std::size_t num_actions) {
  std::vector<ProgramLine> out;
  out.reserve(num_actions + 4 * (n > 2 ? n - 2 : 0));
  for (std::size_t a = 0; a < num_actions; ++a) out.push_back(ProgramLine::act(static_cast<ActionId>(a)));
  for (std::size_t t = 0; t < n; ++t) {
    if (!legal_target(line, t, n)) continue;
    for (auto f : kAllFeatures) out.push_back(ProgramLine::go(t, f));
  }
  return out;
}

// Expansion context for one node: the node's per-instance runs, from which
// each child only resumes the instances that halted on the programmed line.
class Expander {
 public:
  Expander(const GPProblem& problem, const EvalConfig& cfg) : problem_(problem), cfg_(cfg) {}

  EvaluationRecord load(const PlanningProgram& prog) {
    auto r = evaluate_runs(prog, problem_, cfg_, runs_, scores_);
    ends_.clear();
    for (const auto& st : runs_) ends_.push_back({st.status, st.line});
    return r;
  }

  // Evaluates `child`, which must equal the loaded program except on `line`.
  // Only runs that halted on `line` are resumed; the first failure ends the
  // evaluation since a dead end needs no scores.
  EvaluationRecord evaluate_child(const PlanningProgram& child, std::size_t line) const {
    thread_local std::vector<RunEnd> ends;
    thread_local std::vector<InstanceScore> scores;
    thread_local ExecState st;
    ends.assign(ends_.begin(), ends_.end());
    scores.assign(scores_.begin(), scores_.end());
    for (std::size_t t = 0; t < runs_.size(); ++t) {
      if (ends_[t].status != ExecStatus::halted_undefined || ends_[t].line != line) continue;
      const auto& inst = problem_.instances[t];
      st = runs_[t];
      run(child, problem_.actions, inst, problem_.arithmetic_bound, st, {cfg_.step_cap(inst), true, false});
      if (is_failure(st.status)) return dead_end_record();
      scores[t] = score_run(inst, st);
      ends[t] = {st.status, st.line};
    }
    return assemble_record(child, ends, scores, cfg_);
  }

 private:
  const GPProblem& problem_;
  const EvalConfig& cfg_;
  std::vector<ExecState> runs_;
  std::vector<InstanceScore> scores_;
  std::vector<RunEnd> ends_;
};

namespace detail {

// Children of `prog`, whose runs `ex` has loaded with record `parent`.
inline std::vector<SearchNode> expand(const PlanningProgram& prog, const EvaluationRecord& parent,
                                      const Expander& ex, const GPProblem& problem, const SearchConfig& config,
                                      SearchStats* stats, WorkerPool* pool) {
  std::vector<SearchNode> out;
  if (parent.status != NodeStatus::open) return out;
  const auto line = parent.frontier_line;
  auto cands = line_candidates(line, prog.size(), problem.actions.size());
  std::vector<SearchNode> children(cands.size());
  auto eval_one = [&](std::size_t c) {
    auto& child = children[c];
    child.program = prog;
    child.program[line] = cands[c];
    child.record = ex.evaluate_child(child.program, line);
    child.key = rank_key(child.record, config.fns);
  };
  if (pool) {
    pool->run(cands.size(), eval_one);
  } else {
    for (std::size_t c = 0; c < cands.size(); ++c) eval_one(c);
  }
  for (auto& child : children) {
    if (stats) ++stats->evaluated;
    if (child.record.status == NodeStatus::dead_end) {
      if (stats) ++stats->dead_ends;
      continue;
    }
    out.push_back(std::move(child));
  }
  return out;
}

}  // namespace detail

// Children of an open node: its frontier line programmed with every candidate.
// Dead-end children are evaluated (and counted) but not returned.
inline std::vector<SearchNode> successors(const SearchNode& node, const GPProblem& problem,
                                          const SearchConfig& config, SearchStats* stats = nullptr,
                                          WorkerPool* pool = nullptr) {
  if (node.record.status != NodeStatus::open) return {};
  Expander ex(problem, config.eval);
  auto parent = ex.load(node.program);
  return detail::expand(node.program, parent, ex, problem, config, stats, pool);
}

namespace detail {

inline SearchResult best_first(PlanningProgram root, const GPProblem& problem, const SearchConfig& config) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };

  SearchResult result;
  auto& stats = result.stats;
  std::unordered_set<std::string> generated;
  auto note_generated = [&](const PlanningProgram& p) {
    if (config.check_duplicates && !generated.insert(program_key(p)).second) ++stats.duplicates;
  };

  SearchNode start;
  start.program = std::move(root);
  start.record = eval_performance(start.program, problem, config.eval);
  start.key = rank_key(start.record, config.fns);
  ++stats.evaluated;
  note_generated(start.program);

  auto finish = [&](SearchOutcome o) {
    stats.elapsed = elapsed();
    result.outcome = o;
    return result;
  };

  if (start.record.status == NodeStatus::dead_end) {
    ++stats.dead_ends;
    return finish(SearchOutcome::unsolvable);
  }
  if (start.record.status == NodeStatus::solution) {
    result.solutions.push_back({start.program, start.record, 0, elapsed()});
    result.program = start.program;
    result.record = start.record;
    return finish(SearchOutcome::solved);
  }

  if (problem.actions.size() >= (1u << 28) || start.program.size() >= (1u << 28)) {
    throw Error(ErrorCode::invalid_size, "too many actions or lines to search");
  }
  OpenList open(start.program.size(), config.fns.size());
  std::uint64_t seq = 0;
  open.push(start.program, start.key, seq++);
  stats.peak_open_size = 1;
  stats.peak_open_bytes = open.bytes();

  std::optional<WorkerPool> pool;
  if (config.workers > 1) pool.emplace(config.workers);
  Expander ex(problem, config.eval);

  bool budget_hit = false;
  while (!open.empty()) {
    if ((config.node_budget && stats.expanded >= config.node_budget) ||
        (config.time_budget > 0 && elapsed() >= config.time_budget) ||
        (config.memory_budget && open.bytes() > config.memory_budget)) {
      budget_hit = true;
      break;
    }
    SearchNode node;
    std::tie(node.program, node.seq) = open.pop();
    node.record = ex.load(node.program);
    node.key = rank_key(node.record, config.fns);
    ++stats.expanded;
    if (config.on_pop) config.on_pop(node);

    if (node.record.status == NodeStatus::solution) {
      result.solutions.push_back({node.program, node.record, stats.expanded, elapsed()});
      if (!config.anytime) break;
      continue;
    }

    auto children = expand(node.program, node.record, ex, problem, config, &stats, pool ? &*pool : nullptr);
    if (config.check_duplicates) {
      // Dead-end children are generated too; rebuild them for the check.
      const auto line = node.record.frontier_line;
      for (const auto& cand : line_candidates(line, node.program.size(), problem.actions.size())) {
        auto p = node.program;
        p[line] = cand;
        note_generated(p);
      }
    }
    for (const auto& child : children) open.push(child.program, child.key, seq++);
    stats.peak_open_size = std::max(stats.peak_open_size, open.size());
    stats.peak_open_bytes = std::max(stats.peak_open_bytes, open.bytes());
  }

  if (!result.solutions.empty()) {
    const LoggedSolution* best = &result.solutions.front();
    for (const auto& s : result.solutions) {
      if (s.record.f6 < best->record.f6) best = &s;
    }
    result.program = best->program;
    result.record = best->record;
    return finish(SearchOutcome::solved);
  }
  return finish(budget_hit ? SearchOutcome::budget_exhausted : SearchOutcome::unsolvable);
}

}  // namespace detail

// Best-first generalized planning from the empty n-line program. When every
// instance already satisfies its goal, the one-line program "0. end" is
// returned without search.
inline SearchResult bfgp(const GPProblem& problem, const SearchConfig& config) {
  if (problem.instances.empty()) throw Error(ErrorCode::invalid_size, "problem has no instances");
  if (config.n < 2) throw Error(ErrorCode::invalid_size, "search needs n >= 2");
  bool trivial = std::all_of(problem.instances.begin(), problem.instances.end(),
                             [](const Instance& i) { return i.goal.satisfied_by(i.initial); });
  if (trivial) {
    SearchResult r;
    r.outcome = SearchOutcome::solved;
    r.program = PlanningProgram::empty(1);
    r.record = eval_performance(*r.program, problem, config.eval);
    r.stats.evaluated = 1;
    r.solutions.push_back({*r.program, *r.record, 0, 0});
    return r;
  }
  return detail::best_first(PlanningProgram::empty(config.n), problem, config);
}

// Same contract as bfgp, rooted at a partially specified program.
inline SearchResult resume_from(const PlanningProgram& sketch, const GPProblem& problem,
                                const SearchConfig& config) {
  if (problem.instances.empty()) throw Error(ErrorCode::invalid_size, "problem has no instances");
  try {
    check_program(sketch, problem.actions.size());
  } catch (const Error& e) {
    throw Error(ErrorCode::malformed_program, std::string("sketch: ") + e.what());
  }
  return detail::best_first(sketch, problem, config);
}

}  // namespace bfgp
