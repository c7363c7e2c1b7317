#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ocrx/harness.hpp"
#include "ocrx/runtime.hpp"

namespace testing {

using namespace ocrx;

// Runs `f` and returns the kind of the RuntimeError it threw, if any.
template <class F>
std::optional<ErrorKind> error_of(F&& f) {
  try {
    f();
  } catch (const RuntimeError& e) {
    return e.kind();
  }
  return std::nullopt;
}

inline RuntimeConfig config(std::size_t nodes = 1, std::uint64_t seed = 1,
                            LidMode mode = LidMode::Deferred,
                            Placement placement = Placement::RoundRobin) {
  RuntimeConfig c;
  c.nodes = nodes;
  c.seed = seed;
  c.mode = mode;
  c.placement = placement;
  return c;
}

// Launch `main` from `reg` and run to the end.
struct Ran {
  RunResult result;
  RunStats stats;
  std::map<std::string, std::int64_t> counters;
  std::map<std::string, std::string> values;
  std::string trace;
};

inline Ran run(const FunctionRegistry& reg, const RuntimeConfig& cfg, const std::string& main) {
  Runtime rt(cfg, reg);
  rt.launch(main);
  Ran r;
  r.result = rt.run();
  r.stats = rt.stats();
  r.counters = rt.recorder().counters();
  r.values = rt.recorder().values();
  r.trace = rt.trace().text();
  return r;
}

inline Identifier done(Context& ctx) {
  ctx.shutdown();
  return Identifier::null();
}

// -- host file oracle -------------------------------------------------------

inline std::vector<std::uint32_t> read_u32le(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i + 4 <= raw.size(); i += 4) {
    out.push_back(std::uint32_t(raw[i]) | std::uint32_t(raw[i + 1]) << 8 |
                  std::uint32_t(raw[i + 2]) << 16 | std::uint32_t(raw[i + 3]) << 24);
  }
  return out;
}

inline std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {(std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()};
}

inline std::string temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "ocrx-tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

// -- interval oracle --------------------------------------------------------
// Byte-map checker: marks every byte each range covers, deliberately naive.

struct IntervalChecker {
  explicit IntervalChecker(std::uint64_t size) : owner(size, 0) {}

  // false if a range leaves the block or hits a byte someone already owns
  bool claim(std::uint64_t offset, std::uint64_t size, int who) {
    if (size == 0) return false;
    if (offset > owner.size() || size > owner.size() - offset) return false;
    for (std::uint64_t i = offset; i < offset + size; ++i) {
      if (owner[i] != 0) return false;
    }
    for (std::uint64_t i = offset; i < offset + size; ++i) owner[i] = who;
    return true;
  }

  std::vector<int> owner;
};

// -- generators -------------------------------------------------------------

struct Gen {
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : rng() % n; }
  bool coin() { return rng() & 1; }
  std::mt19937_64 rng;
};

}  // namespace testing
