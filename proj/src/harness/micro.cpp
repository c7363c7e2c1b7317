#include <cstdint>
#include <string>

#include "programs.hpp"

namespace ocrx::examples {

namespace {

Identifier stress_finish(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord> depv) {
  ctx.dbDestroy(depv.back().guid);
  ctx.shutdown();
  return Identifier::null();
}

// -- launch-task -------------------------------------------------------------

Identifier launch_child(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord> depv) {
  auto v = depv[0].view->mutable_as<std::uint64_t>();
  v[0] += 1;
  ctx.recorder().set("value", std::to_string(v[0]));
  ctx.dbDestroy(depv[0].guid);
  ctx.shutdown();
  return Identifier::null();
}

Identifier launch_main(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord>) {
  Identifier templ = ctx.edtTemplateCreate("launch.child", 0, 1);
  auto data = ctx.dbCreate(sizeof(std::uint64_t));
  data.view->mutable_as<std::uint64_t>()[0] = 41;
  ctx.dbRelease(data.block);
  auto task = ctx.edtCreate(EdtSpec{.templ = templ, .props = props::kEdtLid});
  ctx.addDependence(data.block, task.task, 0, AccessMode::EW);
  ctx.edtTemplateDestroy(templ);
  return Identifier::null();
}

// -- two-lid -----------------------------------------------------------------

Identifier twolid_sink(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord>) {
  ctx.recorder().count("sink_ran");
  ctx.shutdown();
  return Identifier::null();
}

Identifier twolid_main(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord>) {
  Identifier e1 = ctx.eventCreate(props::kEdtLid);
  Identifier e2 = ctx.eventCreate(props::kEdtLid);
  Identifier templ = ctx.edtTemplateCreate("twolid.sink", 0, 2);
  auto sink = ctx.edtCreate(EdtSpec{.templ = templ, .props = props::kEdtLid});
  ctx.addDependence(e1, sink.task, 0, AccessMode::Null);
  ctx.addDependence(e2, sink.task, 1, AccessMode::Null);
  ctx.eventSatisfy(e1, Identifier::null());
  ctx.eventSatisfy(e2, Identifier::null());
  ctx.edtTemplateDestroy(templ);
  return Identifier::null();
}

// -- map-stress --------------------------------------------------------------

constexpr std::uint64_t kSlots = 16;
constexpr std::uint64_t kWorkers = 8;

void stress_creator(Context& ctx, Identifier& object_lid, std::uint64_t,
                    std::span<const std::uint64_t>, std::span<const Identifier>) {
  ctx.recorder().count("creator_calls");
  ctx.eventCreateMapped(object_lid);
}

Identifier stress_work(Context& ctx, std::span<const std::uint64_t> paramv,
                       std::span<DepRecord> depv) {
  const Identifier map = get_id(depv[0].view->bytes(), 0);
  const std::uint64_t k = paramv[0];
  auto& rec = ctx.recorder();
  std::vector<Identifier> got;
  for (std::uint64_t i = 0; i < kSlots; ++i) {
    const std::uint64_t index = (i + 2 * k) % kSlots;
    const std::uint64_t before = ctx.deliveries();
    got.push_back(ctx.mapGet(map, index));
    if (ctx.config().mode == LidMode::Deferred && ctx.deliveries() != before)
      rec.count("nonblocking_violations");
    rec.count("gets");
  }
  for (std::uint64_t i = 0; i < kSlots; ++i) {
    const std::uint64_t index = (i + 2 * k) % kSlots;
    const std::string g = format(Identifier{ctx.getGuid(got[i])});
    const std::string key = "slot." + std::to_string(index);
    auto it = rec.values().find(key);
    if (it == rec.values().end()) {
      rec.set(key, g);
    } else if (it->second != g) {
      rec.count("agreement_failures");
    }
  }
  return Identifier::null();
}

Identifier stress_main(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord>) {
  ctx.recorder().count("agreement_failures", 0);
  ctx.recorder().count("nonblocking_violations", 0);
  Identifier map = ctx.mapCreate(kSlots, "stress.creator", {}, {});
  auto holder = ctx.dbCreate(kSerializedIdSize);
  put_id(holder.view->mutable_bytes(), 0, map);
  ctx.dbRelease(holder.block);
  Identifier worker_template = ctx.edtTemplateCreate("stress.work", 1, 1);
  Identifier finish_template = ctx.edtTemplateCreate("stress.finish", 0, kWorkers + 1);
  auto finish = ctx.edtCreate(EdtSpec{.templ = finish_template, .props = props::kEdtLid});
  for (std::uint64_t k = 0; k < kWorkers; ++k) {
    auto w = ctx.edtCreate(EdtSpec{.templ = worker_template, .params = {k},
                                   .deps = std::vector<Identifier>{holder.block},
                                   .props = props::kEdtLid, .output_event = true});
    ctx.addDependence(w.output_event, finish.task, static_cast<std::uint32_t>(k),
                      AccessMode::Null);
  }
  ctx.addDependence(holder.block, finish.task, kWorkers, AccessMode::RO);
  ctx.edtTemplateDestroy(worker_template);
  ctx.edtTemplateDestroy(finish_template);
  return Identifier::null();
}

// -- small ones --------------------------------------------------------------

Identifier shutdown_main(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord>) {
  ctx.shutdown();
  return Identifier::null();
}

Identifier stall_task(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord>) {
  ctx.recorder().count("ran");
  return Identifier::null();
}

Identifier stall_main(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord>) {
  Identifier templ = ctx.edtTemplateCreate("stall.task", 0, 1);
  ctx.edtCreate(EdtSpec{.templ = templ, .props = props::kEdtLid});
  ctx.edtTemplateDestroy(templ);
  return Identifier::null();
}

void lazy_creator(Context&, Identifier&, std::uint64_t, std::span<const std::uint64_t>,
                  std::span<const Identifier>) {}

Identifier badcreator_main(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord>) {
  Identifier map = ctx.mapCreate(4, "badcreator.creator", {}, {});
  ctx.mapGet(map, 0);
  ctx.shutdown();
  return Identifier::null();
}

}  // namespace

void register_micro(FunctionRegistry& r) {
  r.add_task("launch.main", launch_main);
  r.add_task("launch.child", launch_child);
  r.add_task("twolid.main", twolid_main);
  r.add_task("twolid.sink", twolid_sink);
  r.add_task("stress.main", stress_main);
  r.add_task("stress.work", stress_work);
  r.add_task("stress.finish", stress_finish);
  r.add_creator("stress.creator", stress_creator);
  r.add_task("shutdown.main", shutdown_main);
  r.add_task("stall.main", stall_main);
  r.add_task("stall.task", stall_task);
  r.add_task("badcreator.main", badcreator_main);
  r.add_creator("badcreator.creator", lazy_creator);
}

}  // namespace ocrx::examples
