#include "ocrx/harness.hpp"

#include <deque>
#include <fstream>
#include <sstream>

#include "programs.hpp"

namespace ocrx {

const FunctionRegistry& program_registry() {
  static const FunctionRegistry reg = [] {
    FunctionRegistry r;
    examples::register_matrix(r);
    examples::register_files(r);
    examples::register_partitions(r);
    examples::register_micro(r);
    return r;
  }();
  return reg;
}

const std::vector<ProgramInfo>& programs() {
  static const std::vector<ProgramInfo> list = {
      {"matrix", "matrix.main", false, "3x3 task matrix built through a labeled map"},
      {"file-double", "file.main", true, "doubles every u32 of the fixture file"},
      {"partition-sum", "partition.main", false, "explicit partitioning, sum of 1024 values"},
      {"copy-partition-sum", "copypart.main", false, "partitioning through dbCopy"},
      {"launch-task", "launch.main", false, "one task created by LID, one dependence"},
      {"two-lid", "twolid.main", false, "messages naming two unresolved LIDs"},
      {"map-stress", "stress.main", false, "8 tasks read every slot of a 16-slot map"},
      {"file-read", "fileread.main", true, "sums the fixture through read-only chunks"},
      {"file-overlap", "fileoverlap.main", true, "requests overlapping chunks"},
      {"file-missing", "filemissing.main", true, "opens a file that does not exist"},
      {"partition-deadlock", "pdeadlock.main", false, "block and its partition on one task"},
      {"cow-conflict", "cow.main", false, "write to one of two aliases of the same range"},
      {"shutdown-only", "shutdown.main", false, "main calls shutdown"},
      {"stall", "stall.main", false, "a task that never becomes runnable, no shutdown"},
      {"creator-violation", "badcreator.main", false, "creator that creates nothing"},
  };
  return list;
}

const ProgramInfo* find_program(const std::string& name) {
  for (const auto& p : programs()) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

RunSummary run_program(const RunConfig& cfg, ChoiceSource* choices) {
  const ProgramInfo* prog = find_program(cfg.program);
  if (!prog) fail(ErrorKind::ProtocolError, "unknown program '" + cfg.program + "'");

  std::optional<Runtime> rt;
  if (choices) {
    rt.emplace(cfg.runtime, program_registry(), *choices);
  } else {
    rt.emplace(cfg.runtime, program_registry());
  }
  rt->launch(prog->main_fn);
  RunResult r = rt->run();

  RunSummary s;
  s.program = cfg.program;
  s.outcome = r.outcome;
  s.error = r.error;
  s.message = r.message;
  s.stats = rt->stats();
  for (const auto& [k, v] : rt->recorder().counters()) s.results[k] = std::to_string(v);
  for (const auto& [k, v] : rt->recorder().values()) s.results[k] = v;
  s.trace = rt->trace().text();

  if (!cfg.trace_path.empty()) {
    std::ofstream out(cfg.trace_path, std::ios::binary | std::ios::trunc);
    out << s.trace;
    if (!out) fail(ErrorKind::IoError, "cannot write trace to " + cfg.trace_path);
  }
  return s;
}

std::string format_summary(const RunSummary& s) {
  std::ostringstream os;
  os << "program=" << s.program << "\n";
  os << "outcome=" << to_string(s.outcome) << "\n";
  if (s.error) os << "error=" << to_string(*s.error) << "\n";
  if (!s.message.empty()) os << "message=" << s.message << "\n";
  os << "tasks_executed=" << s.stats.tasks_executed << "\n";
  os << "deliveries=" << s.stats.deliveries << "\n";
  os << "bytes_bulk_copied=" << s.stats.bytes_bulk_copied << "\n";
  os << "cow_copies=" << s.stats.cow_copies << "\n";
  os << "creator_invocations=" << s.stats.creator_invocations << "\n";
  for (const auto& [k, v] : s.results) os << "result." << k << "=" << v << "\n";
  return os.str();
}

void gen_fixture(const std::string& path, std::uint64_t count) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, "cannot open " + path);
  for (std::uint64_t i = 1; i <= count; ++i) {
    const auto v = static_cast<std::uint32_t>(i);
    const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                       static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
  }
  out.flush();
  if (!out) fail(ErrorKind::IoError, "cannot write " + path);
}

std::size_t explore_schedules(const RunConfig& cfg, std::size_t max_runs,
                              const std::function<void(const RunSummary&)>& visit) {
  std::deque<std::vector<std::size_t>> frontier{{}};
  std::size_t runs = 0;
  while (!frontier.empty() && runs < max_runs) {
    std::vector<std::size_t> prefix = std::move(frontier.front());
    frontier.pop_front();
    ScriptedChoice choices(prefix);
    RunSummary s = run_program(cfg, &choices);
    ++runs;
    visit(s);
    const auto& taken = choices.taken();
    const auto& branching = choices.branching();
    for (std::size_t i = prefix.size(); i < taken.size(); ++i) {
      for (std::size_t alt = 1; alt < branching[i]; ++alt) {
        std::vector<std::size_t> next(taken.begin(), taken.begin() + static_cast<std::ptrdiff_t>(i));
        next.push_back(alt);
        frontier.push_back(std::move(next));
      }
    }
  }
  return runs;
}

}  // namespace ocrx
