#include <array>
#include <cstdint>

#include "programs.hpp"

namespace ocrx::examples {

namespace {

constexpr std::uint64_t kValues = 1024;
constexpr std::uint64_t kBlockSize = kValues * sizeof(std::uint32_t);
constexpr std::uint64_t kHalf = 512 * sizeof(std::uint32_t);

std::uint64_t sum_u32(const DbView& v, std::uint64_t n) {
  auto data = v.as<std::uint32_t>();
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < n; ++i) sum += data[i];
  return sum;
}

// FNV-1a over the block, so runs can compare final contents
std::string digest(const DbView& v) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (auto b : v.bytes()) {
    h ^= static_cast<std::uint8_t>(b);
    h *= 0x100000001b3ull;
  }
  return std::to_string(h);
}

DbCreated filled_block(Context& ctx) {
  auto block = ctx.dbCreate(kBlockSize);
  for (auto& v : block.view->mutable_as<std::uint32_t>()) v = 1;
  return block;
}

// -- partition-sum -----------------------------------------------------------

Identifier part_finish(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord> depv) {
  ctx.recorder().set("sum", std::to_string(sum_u32(*depv[0].view, kValues)));
  ctx.recorder().set("digest", digest(*depv[0].view));
  ctx.dbDestroy(depv[0].guid);
  ctx.shutdown();
  return Identifier::null();
}

Identifier part_work(Context& ctx, std::span<const std::uint64_t> paramv,
                     std::span<DepRecord> depv) {
  auto data = depv[0].view->mutable_as<std::uint32_t>();
  for (std::size_t i = 0; i < 512; ++i) data[i] *= static_cast<std::uint32_t>(paramv[0]);
  ctx.dbDestroy(depv[0].guid);
  return Identifier::null();
}

Identifier part_main(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord>) {
  auto block = filled_block(ctx);
  std::array<PartitionDescriptor, 2> parts{{{0, kHalf, {}}, {kHalf, kHalf, {}}}};
  ctx.dbRelease(block.block);
  ctx.dbPartition(block.block, parts);
  Identifier worker_template = ctx.edtTemplateCreate("partition.work", 1, 1);
  Identifier finish_template = ctx.edtTemplateCreate("partition.finish", 0, 3);
  auto finish = ctx.edtCreate(EdtSpec{.templ = finish_template, .props = props::kEdtLid});
  auto worker1 = ctx.edtCreate(EdtSpec{.templ = worker_template, .params = {2},
                                       .props = props::kEdtLid, .output_event = true});
  auto worker2 = ctx.edtCreate(EdtSpec{.templ = worker_template, .params = {6},
                                       .props = props::kEdtLid, .output_event = true});
  ctx.edtTemplateDestroy(worker_template);
  ctx.edtTemplateDestroy(finish_template);
  ctx.addDependence(block.block, finish.task, 0, AccessMode::RO);
  ctx.addDependence(worker1.output_event, finish.task, 1, AccessMode::Default);
  ctx.addDependence(worker2.output_event, finish.task, 2, AccessMode::Default);
  ctx.addDependence(parts[0].guid, worker1.task, 0, AccessMode::EW);
  ctx.addDependence(parts[1].guid, worker2.task, 0, AccessMode::EW);
  return Identifier::null();
}

// -- copy-partition-sum ------------------------------------------------------

Identifier copy_finish(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord> depv) {
  ctx.dbDestroy(depv[3].guid);  // the "params" block
  ctx.recorder().set("sum", std::to_string(sum_u32(*depv[0].view, kValues)));
  ctx.recorder().set("digest", digest(*depv[0].view));
  ctx.dbDestroy(depv[0].guid);
  ctx.shutdown();
  return Identifier::null();
}

Identifier copy_work(Context& ctx, std::span<const std::uint64_t> paramv,
                     std::span<DepRecord> depv) {
  auto data = depv[0].view->mutable_as<std::uint32_t>();
  auto guids = depv[1].view->bytes();
  for (std::size_t i = 0; i < 512; ++i) data[i] *= static_cast<std::uint32_t>(paramv[0]);
  ctx.dbRelease(depv[0].guid);
  Identifier event = ctx.dbCopy(get_id(guids, 1), paramv[2] * sizeof(std::uint32_t),
                                depv[0].guid, 0, kHalf, props::kCopyPartitionBack);
  ctx.addDependence(event, get_id(guids, 0), static_cast<std::uint32_t>(paramv[1]),
                    AccessMode::Null);
  return Identifier::null();
}

Identifier copy_main(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord>) {
  auto block = filled_block(ctx);
  ctx.dbRelease(block.block);
  auto params = ctx.dbCreate(2 * kSerializedIdSize);
  auto chunk1 = ctx.dbCreate(kHalf, props::kDbNoAcquire);
  auto chunk2 = ctx.dbCreate(kHalf, props::kDbNoAcquire);
  Identifier chunk1_copied =
      ctx.dbCopy(chunk1.block, 0, block.block, 0, kHalf, props::kCopyPartition);
  Identifier chunk2_copied =
      ctx.dbCopy(chunk2.block, 0, block.block, kHalf, kHalf, props::kCopyPartition);
  Identifier worker_template = ctx.edtTemplateCreate("copypart.work", 3, 2);
  Identifier finish_template = ctx.edtTemplateCreate("copypart.finish", 0, 4);
  // stored in a data block, so it has to be a GUID
  auto finish = ctx.edtCreate(EdtSpec{.templ = finish_template});
  auto worker1 = ctx.edtCreate(EdtSpec{.templ = worker_template, .params = {2, 1, 0},
                                       .props = props::kEdtLid});
  auto worker2 = ctx.edtCreate(EdtSpec{.templ = worker_template, .params = {6, 2, 512},
                                       .props = props::kEdtLid});
  auto p = params.view->mutable_bytes();
  put_id(p, 0, finish.task);
  put_id(p, 1, block.block);
  ctx.dbRelease(params.block);
  ctx.edtTemplateDestroy(worker_template);
  ctx.edtTemplateDestroy(finish_template);
  ctx.addDependence(block.block, finish.task, 0, AccessMode::RO);
  ctx.addDependence(params.block, finish.task, 3, AccessMode::RO);
  ctx.addDependence(chunk1_copied, worker1.task, 0, AccessMode::EW);
  ctx.addDependence(chunk2_copied, worker2.task, 0, AccessMode::EW);
  ctx.addDependence(params.block, worker1.task, 1, AccessMode::Const);
  ctx.addDependence(params.block, worker2.task, 1, AccessMode::Const);
  return Identifier::null();
}

// -- partition-deadlock ------------------------------------------------------

Identifier never_runs(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord>) {
  ctx.recorder().count("ran");
  return Identifier::null();
}

Identifier deadlock_main(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord>) {
  auto block = filled_block(ctx);
  ctx.dbRelease(block.block);
  std::array<PartitionDescriptor, 2> parts{{{0, kHalf, {}}, {kHalf, kHalf, {}}}};
  ctx.dbPartition(block.block, parts);
  Identifier templ = ctx.edtTemplateCreate("pdeadlock.task", 0, 2);
  auto task = ctx.edtCreate(EdtSpec{.templ = templ, .props = props::kEdtLid});
  ctx.addDependence(block.block, task.task, 0, AccessMode::RO);
  ctx.addDependence(parts[0].guid, task.task, 1, AccessMode::EW);
  ctx.shutdown();
  return Identifier::null();
}

// -- cow-conflict ------------------------------------------------------------
// Two partitioning copies of the same range. Writing one of them while the
// other is alive must not be visible through the other.

Identifier cow_writer(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord> depv) {
  auto a = depv[0].view->mutable_as<std::uint32_t>();
  for (auto& v : a) v *= 2;
  auto again = depv[0].view->mutable_as<std::uint32_t>();
  for (auto& v : again) v += 0;
  ctx.recorder().set("sum_a", std::to_string(sum_u32(*depv[0].view, 512)));
  return Identifier::null();
}

Identifier cow_reader(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord> depv) {
  ctx.recorder().set("sum_b", std::to_string(sum_u32(*depv[0].view, 512)));
  ctx.shutdown();
  return Identifier::null();
}

Identifier cow_main(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord>) {
  auto block = filled_block(ctx);
  ctx.dbRelease(block.block);
  auto a = ctx.dbCreate(kHalf, props::kDbNoAcquire);
  auto b = ctx.dbCreate(kHalf, props::kDbNoAcquire);
  Identifier a_ready = ctx.dbCopy(a.block, 0, block.block, 0, kHalf, props::kCopyPartition);
  Identifier b_ready = ctx.dbCopy(b.block, 0, block.block, 0, kHalf, props::kCopyPartition);
  Identifier writer_template = ctx.edtTemplateCreate("cow.writer", 0, 1);
  Identifier reader_template = ctx.edtTemplateCreate("cow.reader", 0, 2);
  auto writer = ctx.edtCreate(EdtSpec{.templ = writer_template, .props = props::kEdtLid,
                                      .output_event = true});
  auto reader = ctx.edtCreate(EdtSpec{.templ = reader_template, .props = props::kEdtLid});
  ctx.addDependence(a_ready, writer.task, 0, AccessMode::EW);
  ctx.addDependence(b_ready, reader.task, 0, AccessMode::RO);
  ctx.addDependence(writer.output_event, reader.task, 1, AccessMode::Null);
  ctx.edtTemplateDestroy(writer_template);
  ctx.edtTemplateDestroy(reader_template);
  return Identifier::null();
}

}  // namespace

void register_partitions(FunctionRegistry& r) {
  r.add_task("partition.main", part_main);
  r.add_task("partition.work", part_work);
  r.add_task("partition.finish", part_finish);
  r.add_task("copypart.main", copy_main);
  r.add_task("copypart.work", copy_work);
  r.add_task("copypart.finish", copy_finish);
  r.add_task("pdeadlock.main", deadlock_main);
  r.add_task("pdeadlock.task", never_runs);
  r.add_task("cow.main", cow_main);
  r.add_task("cow.writer", cow_writer);
  r.add_task("cow.reader", cow_reader);
}

}  // namespace ocrx::examples
