#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ocrx/harness.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitDeadlock = 3;
constexpr int kExitRuntime = 4;
constexpr int kExitIo = 5;

int exit_code(const ocrx::RunSummary& s) {
  switch (s.outcome) {
    case ocrx::Outcome::Success: return 0;
    case ocrx::Outcome::DeadlockDetected: return kExitDeadlock;
    case ocrx::Outcome::Error: break;
  }
  return s.error == ocrx::ErrorKind::IoError ? kExitIo : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ocrx: runs the example programs on the simulated runtime"};
  app.require_subcommand(1);

  ocrx::RunConfig cfg;
  std::string program;
  auto* run = app.add_subcommand("run", "run a registered program");
  run->add_option("program", program, "program name")->required();
  run->add_option("--nodes", cfg.runtime.nodes, "simulated nodes")->check(CLI::PositiveNumber);
  run->add_option("--seed", cfg.runtime.seed, "scheduling seed");
  std::string mode = "deferred", placement = "round-robin", partition_impl = "zero-copy";
  run->add_option("--mode", mode, "eager|deferred")->check(CLI::IsMember({"eager", "deferred"}));
  run->add_option("--placement", placement, "local|round-robin")
      ->check(CLI::IsMember({"local", "round-robin"}));
  run->add_option("--partition-impl", partition_impl, "eager|zero-copy")
      ->check(CLI::IsMember({"eager", "zero-copy"}));
  run->add_option("--trace", cfg.trace_path, "write the trace to this file");
  run->add_option("--fixture", cfg.runtime.fixture, "host file for the file programs");

  std::string gen_path;
  std::uint64_t gen_count = 0;
  auto* gen = app.add_subcommand("gen-file", "write COUNT u32LE values 1..COUNT");
  gen->add_option("path", gen_path)->required();
  gen->add_option("count", gen_count)->required();

  auto* list = app.add_subcommand("list", "list the registered programs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  if (*list) {
    for (const auto& p : ocrx::programs()) std::cout << p.name << "  " << p.description << "\n";
    return 0;
  }

  if (*gen) {
    try {
      ocrx::gen_fixture(gen_path, gen_count);
    } catch (const ocrx::RuntimeError& e) {
      std::cerr << e.what() << "\n";
      return kExitIo;
    }
    return 0;
  }

  const ocrx::ProgramInfo* info = ocrx::find_program(program);
  if (!info) {
    std::cerr << "unknown program '" << program << "'; try 'ocrx list'\n";
    return kExitUsage;
  }
  if (info->needs_fixture && cfg.runtime.fixture.empty()) {
    std::cerr << program << " needs --fixture PATH\n";
    return kExitUsage;
  }
  cfg.program = program;
  cfg.runtime.mode = mode == "eager" ? ocrx::LidMode::Eager : ocrx::LidMode::Deferred;
  cfg.runtime.placement =
      placement == "local" ? ocrx::Placement::Local : ocrx::Placement::RoundRobin;
  cfg.runtime.partition_impl =
      partition_impl == "eager" ? ocrx::PartitionImpl::Eager : ocrx::PartitionImpl::ZeroCopy;
  try {
    ocrx::RunSummary s = ocrx::run_program(cfg);
    std::cout << ocrx::format_summary(s);
    return exit_code(s);
  } catch (const ocrx::RuntimeError& e) {
    std::cerr << e.what() << "\n";
    return e.kind() == ocrx::ErrorKind::IoError ? kExitIo : kExitRuntime;
  }
}
