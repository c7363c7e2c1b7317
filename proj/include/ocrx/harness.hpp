#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ocrx/runtime.hpp"

namespace ocrx {

struct ProgramInfo {
  std::string name;
  std::string main_fn;
  bool needs_fixture = false;
  std::string description;
};

// Every task and creator function of the compiled-in programs.
const FunctionRegistry& program_registry();
const std::vector<ProgramInfo>& programs();
const ProgramInfo* find_program(const std::string& name);

struct RunConfig {
  std::string program;
  RuntimeConfig runtime;
  std::string trace_path;  // empty: no trace file
};

struct RunSummary {
  std::string program;
  Outcome outcome = Outcome::Success;
  std::optional<ErrorKind> error;
  std::string message;
  RunStats stats;
  std::map<std::string, std::string> results;
  std::string trace;
};

// Throws RuntimeError(ProtocolError) for an unknown program. When
// `choices` is given it replaces the seed.
RunSummary run_program(const RunConfig& cfg, ChoiceSource* choices = nullptr);

// key=value lines, one per field.
std::string format_summary(const RunSummary& s);

// Writes `count` u32LE values 1..count. Throws RuntimeError(IoError).
void gen_fixture(const std::string& path, std::uint64_t count);

// Runs every schedule of the program reachable by varying scheduling
// choices, breadth first, up to `max_runs` runs. Returns the number of runs.
std::size_t explore_schedules(const RunConfig& cfg, std::size_t max_runs,
                              const std::function<void(const RunSummary&)>& visit);

}  // namespace ocrx
