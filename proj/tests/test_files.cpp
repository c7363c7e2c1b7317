#include <filesystem>

#include "doctest.h"
#include "support.hpp"

using namespace ocrx;
using testing::config;
using testing::error_of;

namespace fs = std::filesystem;

namespace {

using Params = std::span<const std::uint64_t>;
using Deps = std::span<DepRecord>;

std::string fixture(const std::string& name, std::uint64_t count) {
  const std::string path = testing::temp_path(name);
  gen_fixture(path, count);
  return path;
}

testing::Ran run_on(const std::string& main, const std::string& path, std::size_t nodes = 2,
                    std::uint64_t seed = 1) {
  RuntimeConfig cfg = config(nodes, seed);
  cfg.fixture = path;
  return testing::run(program_registry(), cfg, main);
}

// -- small file programs ----------------------------------------------------

Identifier stop(Context& ctx, Params, Deps) {
  ctx.shutdown();
  return Identifier::null();
}

Identifier report(Context& ctx, Params, Deps depv) {
  if (depv[0].open_failed) {
    ctx.recorder().set("failed", "1");
  } else {
    ctx.recorder().set("size", std::to_string(fileGetSize(depv[0].view->bytes())));
    ctx.recorder().set("kind", std::string(to_string(fileGetGuid(depv[0].view->bytes()).global().kind)));
  }
  ctx.dbDestroy(depv[0].guid);
  ctx.shutdown();
  return Identifier::null();
}

Identifier open_with(Context& ctx, const char* mode) {
  FileOpened f = ctx.fileOpen(ctx.config().fixture, mode, true);
  Identifier t = ctx.edtTemplateCreate("report", 0, 1);
  ctx.edtCreate(EdtSpec{.templ = t, .deps = std::vector<Identifier>{f.descriptor}});
  ctx.fileRelease(f.file);
  return Identifier::null();
}

Identifier open_rb(Context& ctx, Params, Deps) { return open_with(ctx, "rb"); }
Identifier open_wbp(Context& ctx, Params, Deps) { return open_with(ctx, "wb+"); }

Identifier bad_mode(Context& ctx, Params, Deps) {
  ctx.fileOpen(ctx.config().fixture, "a+", false);
  return testing::done(ctx);
}

// chunk requests straight from main; the file is opened without descriptor
Identifier overlap_small(Context& ctx, Params, Deps) {
  FileOpened f = ctx.fileOpen(ctx.config().fixture, "rb+", false);
  ctx.fileGetChunk(f.file, 0, 100);
  ctx.fileGetChunk(f.file, 50, 100);
  return testing::done(ctx);
}

Identifier destroy_chunk(Context& ctx, Params, Deps depv) {
  ctx.dbDestroy(depv[0].guid);
  return testing::done(ctx);
}

Identifier enlarge(Context& ctx, Params paramv, Deps) {
  FileOpened f = ctx.fileOpen(ctx.config().fixture, "rb+", false);
  Identifier c = ctx.fileGetChunk(f.file, paramv.empty() ? 4096 : paramv[0], 64);
  ctx.fileRelease(f.file);
  // nobody acquires the chunk; it is destroyed by a task holding it in NULL mode
  Identifier t = ctx.edtTemplateCreate("destroy_chunk", 0, 1);
  auto d = ctx.edtCreate(EdtSpec{.templ = t});
  ctx.addDependence(c, d.task, 0, AccessMode::Null);
  return Identifier::null();
}

Identifier past_end_ro(Context& ctx, Params, Deps depv) {
  const Identifier file = fileGetGuid(depv[0].view->bytes());
  ctx.fileGetChunk(file, fileGetSize(depv[0].view->bytes()), 64);
  return testing::done(ctx);
}

Identifier past_end_ro_main(Context& ctx, Params, Deps) {
  FileOpened f = ctx.fileOpen(ctx.config().fixture, "rb", true);
  Identifier t = ctx.edtTemplateCreate("past_end_ro", 0, 1);
  ctx.edtCreate(EdtSpec{.templ = t, .deps = std::vector<Identifier>{f.descriptor}});
  return Identifier::null();
}

Identifier release_twice(Context& ctx, Params, Deps) {
  FileOpened f = ctx.fileOpen(ctx.config().fixture, "rb", false);
  ctx.fileRelease(f.file);
  ctx.fileRelease(f.file);
  return testing::done(ctx);
}

Identifier chunk_after_release(Context& ctx, Params, Deps) {
  FileOpened f = ctx.fileOpen(ctx.config().fixture, "rb", false);
  ctx.fileRelease(f.file);
  ctx.fileGetChunk(f.file, 0, 16);
  return testing::done(ctx);
}

Identifier release_only(Context& ctx, Params, Deps) {
  FileOpened f = ctx.fileOpen(ctx.config().fixture, "rb", false);
  ctx.recorder().set("file", format(f.file));
  ctx.fileRelease(f.file);
  return testing::done(ctx);
}

const FunctionRegistry& registry() {
  static const FunctionRegistry reg = [] {
    FunctionRegistry r;
    r.add_task("stop", stop);
    r.add_task("report", report);
    r.add_task("open_rb", open_rb);
    r.add_task("open_wbp", open_wbp);
    r.add_task("bad_mode", bad_mode);
    r.add_task("overlap_small", overlap_small);
    r.add_task("destroy_chunk", destroy_chunk);
    r.add_task("enlarge", enlarge);
    r.add_task("past_end_ro", past_end_ro);
    r.add_task("past_end_ro_main", past_end_ro_main);
    r.add_task("release_twice", release_twice);
    r.add_task("chunk_after_release", chunk_after_release);
    r.add_task("release_only", release_only);
    return r;
  }();
  return reg;
}

testing::Ran run_mine(const std::string& main, const std::string& path, std::size_t nodes = 2) {
  RuntimeConfig cfg = config(nodes);
  cfg.fixture = path;
  return testing::run(registry(), cfg, main);
}

}  // namespace

TEST_CASE("open modes") {
  CHECK_FALSE(parse_open_mode("rb").writable);
  CHECK(parse_open_mode("rb+").writable);
  CHECK(parse_open_mode("r+b").writable);
  CHECK(parse_open_mode("wb+").create);
  CHECK(parse_open_mode("wb+").truncate);
  CHECK_FALSE(parse_open_mode("rb+").create);
  for (const char* bad : {"a", "ab+", "x", "", "rw"}) {
    CHECK(error_of([&] { parse_open_mode(bad); }) == ErrorKind::BadMode);
  }
}

TEST_CASE("descriptor layout") {
  std::array<std::byte, kDescriptorSize> d{};
  const GlobalId f{1, 2, ObjectKind::File};
  encode_descriptor(d, f, 4096);
  CHECK(fileGetGuid(d) == Identifier{f});
  CHECK(fileGetSize(d) == 4096);
  CHECK(d[16] == std::byte{0x00});
  CHECK(d[17] == std::byte{0x10});
  encode_descriptor(d, f, 0);
  CHECK(fileGetSize(d) == 0);
  std::array<std::byte, 20> short_one{};
  CHECK(error_of([&] { fileGetSize(short_one); }) == ErrorKind::BadDescriptor);
  std::array<std::byte, kDescriptorSize> not_file{};
  encode_descriptor(not_file, f, 1);
  serialize_id(GlobalId{0, 1, ObjectKind::Task}, std::span(not_file).first(kSerializedIdSize));
  CHECK(error_of([&] { fileGetGuid(not_file); }) == ErrorKind::BadDescriptor);
}

TEST_CASE("gen-file format") {
  const std::string p = fixture("four.bin", 4);
  const std::string bytes = testing::read_all(p);
  const unsigned char expect[16] = {1, 0, 0, 0, 2, 0, 0, 0, 3, 0, 0, 0, 4, 0, 0, 0};
  CHECK(bytes == std::string(reinterpret_cast<const char*>(expect), 16));
  CHECK(testing::read_all(fixture("empty.bin", 0)).empty());
  CHECK(error_of([] { gen_fixture("/nonexistent-dir/x/y.bin", 1); }) == ErrorKind::IoError);
}

TEST_CASE("descriptor reports the size at open") {
  const std::string p = fixture("size.bin", 1024);
  auto r = run_mine("open_rb", p);
  CHECK(r.result.outcome == Outcome::Success);
  CHECK(r.values["size"] == std::to_string(fs::file_size(p)));
  CHECK(r.values["kind"] == "File");
}

TEST_CASE("missing file: the consumer sees the failure") {
  auto r = run_mine("open_rb", testing::temp_path("does-not-exist.bin"));
  CHECK(r.result.outcome == Outcome::Success);
  CHECK(r.values["failed"] == "1");
}

TEST_CASE("wb+ creates an absent file") {
  const std::string p = testing::temp_path("created.bin");
  fs::remove(p);
  auto r = run_mine("open_wbp", p);
  CHECK(r.result.outcome == Outcome::Success);
  CHECK(r.values["size"] == "0");
  CHECK(fs::exists(p));
  CHECK(fs::file_size(p) == 0);
}

TEST_CASE("bad open mode") {
  CHECK(run_mine("bad_mode", fixture("m.bin", 4)).result.error == ErrorKind::BadMode);
}

TEST_CASE("overlapping chunks are refused") {
  CHECK(run_mine("overlap_small", fixture("o.bin", 64)).result.error == ErrorKind::ChunkOverlap);
}

TEST_CASE("a chunk past the end enlarges a writable file even unwritten") {
  const std::string p = fixture("grow.bin", 1024);
  const auto before = testing::read_all(p);
  auto r = run_mine("enlarge", p);
  CHECK(r.result.outcome == Outcome::Success);
  const auto after = testing::read_all(p);
  REQUIRE(after.size() == 4096 + 64);
  CHECK(after.substr(0, 4096) == before);
  CHECK(after.substr(4096) == std::string(64, '\0'));
}

TEST_CASE("past the end of a read-only file is BadRange") {
  CHECK(run_mine("past_end_ro_main", fixture("ro.bin", 16)).result.error == ErrorKind::BadRange);
}

TEST_CASE("release rules") {
  const std::string p = fixture("rel.bin", 16);
  CHECK(run_mine("release_twice", p).result.error == ErrorKind::InvalidId);
  CHECK(run_mine("chunk_after_release", p).result.error == ErrorKind::FileReleased);

  RuntimeConfig cfg = config(1);
  cfg.fixture = p;
  Runtime rt(cfg, registry());
  rt.launch("release_only");
  CHECK(rt.run().outcome == Outcome::Success);
  CHECK(rt.trace().text().find("file-closed") != std::string::npos);
}

TEST_CASE("file-double doubles every value, any seed") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (std::size_t nodes : {1, 2, 4}) {
      const std::string p = fixture("double.bin", 1024);
      auto r = run_on("file.main", p, nodes, seed);
      REQUIRE(r.result.outcome == Outcome::Success);
      auto values = testing::read_u32le(p);
      REQUIRE(values.size() == 1024);
      std::size_t wrong = 0;
      for (std::uint32_t i = 0; i < 1024; ++i) wrong += values[i] != 2 * (i + 1);
      CHECK(wrong == 0);
    }
  }
}

TEST_CASE("read-only chunks leave the file untouched") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const std::string p = fixture("ro-sum.bin", 1024);
    const auto before = testing::read_all(p);
    auto r = run_on("fileread.main", p, 2, seed);
    CHECK(r.result.outcome == Outcome::Success);
    CHECK(r.counters["sum"] == 1024 * 1025 / 2);
    CHECK(testing::read_all(p) == before);
    CHECK(r.trace.find("write-back") == std::string::npos);
  }
}

TEST_CASE("the descriptor is delivered only after the open") {
  const std::string p = fixture("gate.bin", 1024);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto r = run_on("file.main", p, 4, seed);
    const auto open = r.trace.find("file-open ");
    const auto check = r.trace.find(" run-task ", r.trace.find("template=file.check\n") - 40);
    REQUIRE(open != std::string::npos);
    REQUIRE(check != std::string::npos);
    CHECK(open < check);
  }
}

TEST_CASE("overlap variant fails the same way for every seed") {
  const std::string p = fixture("ov.bin", 1024);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    CHECK(run_on("fileoverlap.main", p, 2, seed).result.error == ErrorKind::ChunkOverlap);
  }
}
