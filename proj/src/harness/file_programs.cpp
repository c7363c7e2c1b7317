#include <cstdint>
#include <numeric>

#include "programs.hpp"

namespace ocrx::examples {

namespace {

Identifier lid_edt(Context& ctx, const Identifier& templ, std::vector<std::uint64_t> params,
                   bool output, Identifier* event) {
  EdtCreated c = ctx.edtCreate(
      EdtSpec{.templ = templ, .params = std::move(params), .props = props::kEdtLid,
              .output_event = output});
  if (event) *event = c.output_event;
  return c.task;
}

// -- file-double ------------------------------------------------------------

Identifier double_work(Context& ctx, std::span<const std::uint64_t> paramv,
                       std::span<DepRecord> depv) {
  auto data = depv[0].view->mutable_as<std::uint32_t>();
  for (std::size_t i = 0; i < paramv[0]; ++i) data[i] *= 2;
  ctx.dbDestroy(depv[0].guid);
  return Identifier::null();
}

Identifier double_finish(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord>) {
  ctx.shutdown();
  return Identifier::null();
}

// Splits the file in two chunks and hands each to a worker in `mode`.
void split_in_two(Context& ctx, std::span<DepRecord> depv, const char* worker,
                  const char* finish, AccessMode mode) {
  auto info = depv[0].view->bytes();
  const std::uint64_t size = fileGetSize(info);
  const Identifier file = fileGetGuid(info);
  ctx.recorder().set("file_size", std::to_string(size));
  Identifier chunk1 = ctx.fileGetChunk(file, 0, size / 2);
  Identifier chunk2 = ctx.fileGetChunk(file, size / 2, size / 2);
  ctx.fileRelease(file);
  ctx.dbDestroy(depv[0].guid);
  Identifier worker_template = ctx.edtTemplateCreate(worker, 1, 1);
  Identifier finish_template = ctx.edtTemplateCreate(finish, 0, 2);
  const std::uint64_t count = (size / sizeof(std::uint32_t)) / 2;
  Identifier event1, event2;
  Identifier worker1 = lid_edt(ctx, worker_template, {count}, true, &event1);
  Identifier worker2 = lid_edt(ctx, worker_template, {count}, true, &event2);
  Identifier finish_task = lid_edt(ctx, finish_template, {}, false, nullptr);
  ctx.addDependence(event1, finish_task, 0, AccessMode::Default);
  ctx.addDependence(event2, finish_task, 1, AccessMode::Default);
  ctx.addDependence(chunk1, worker1, 0, mode);
  ctx.addDependence(chunk2, worker2, 0, mode);
  ctx.edtTemplateDestroy(worker_template);
  ctx.edtTemplateDestroy(finish_template);
}

Identifier double_check(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord> depv) {
  if (depv[0].open_failed) {
    ctx.recorder().set("open_failed", "1");
    ctx.shutdown();
    return Identifier::null();
  }
  split_in_two(ctx, depv, "file.work", "file.finish", AccessMode::EW);
  return Identifier::null();
}

Identifier open_and_check(Context& ctx, const char* mode, const char* check,
                          const std::string& path) {
  FileOpened f = ctx.fileOpen(path, mode, true);
  Identifier checker_template = ctx.edtTemplateCreate(check, 0, 1);
  ctx.edtCreate(EdtSpec{.templ = checker_template, .deps = std::vector<Identifier>{f.descriptor},
                        .props = props::kEdtLid});
  ctx.edtTemplateDestroy(checker_template);
  return Identifier::null();
}

Identifier double_main(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord>) {
  return open_and_check(ctx, "rb+", "file.check", ctx.config().fixture);
}

// -- file-read ---------------------------------------------------------------

Identifier read_work(Context& ctx, std::span<const std::uint64_t> paramv,
                     std::span<DepRecord> depv) {
  auto data = depv[0].view->as<std::uint32_t>();
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < paramv[0]; ++i) sum += data[i];
  ctx.recorder().count("sum", static_cast<std::int64_t>(sum));
  ctx.dbDestroy(depv[0].guid);
  return Identifier::null();
}

Identifier read_check(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord> depv) {
  if (depv[0].open_failed) {
    ctx.recorder().set("open_failed", "1");
    ctx.shutdown();
    return Identifier::null();
  }
  split_in_two(ctx, depv, "fileread.work", "file.finish", AccessMode::RO);
  return Identifier::null();
}

Identifier read_main(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord>) {
  return open_and_check(ctx, "rb", "fileread.check", ctx.config().fixture);
}

// -- file-overlap ------------------------------------------------------------

Identifier overlap_check(Context& ctx, std::span<const std::uint64_t>,
                         std::span<DepRecord> depv) {
  auto info = depv[0].view->bytes();
  const std::uint64_t size = fileGetSize(info);
  const Identifier file = fileGetGuid(info);
  ctx.fileGetChunk(file, 0, size / 2);
  ctx.fileGetChunk(file, size / 4, size / 2);
  ctx.shutdown();
  return Identifier::null();
}

Identifier overlap_main(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord>) {
  return open_and_check(ctx, "rb+", "fileoverlap.check", ctx.config().fixture);
}

// -- file-missing ------------------------------------------------------------

Identifier missing_main(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord>) {
  return open_and_check(ctx, "rb", "fileread.check", ctx.config().fixture + ".missing");
}

}  // namespace

void register_files(FunctionRegistry& r) {
  r.add_task("file.main", double_main);
  r.add_task("file.check", double_check);
  r.add_task("file.work", double_work);
  r.add_task("file.finish", double_finish);
  r.add_task("fileread.main", read_main);
  r.add_task("fileread.check", read_check);
  r.add_task("fileread.work", read_work);
  r.add_task("fileoverlap.main", overlap_main);
  r.add_task("fileoverlap.check", overlap_check);
  r.add_task("filemissing.main", missing_main);
}

}  // namespace ocrx::examples
