#include "doctest.h"
#include "support.hpp"

using namespace ocrx;
using testing::config;
using testing::run;

namespace {

using Params = std::span<const std::uint64_t>;
using Deps = std::span<DepRecord>;

Identifier noop(Context&, Params, Deps) { return Identifier::null(); }

Identifier stop(Context& ctx, Params, Deps) {
  ctx.recorder().count("stop_ran");
  ctx.shutdown();
  return Identifier::null();
}

Identifier use_after_destroy(Context& ctx, Params, Deps) {
  Identifier t = ctx.edtTemplateCreate("noop", 0, 0);
  ctx.edtTemplateDestroy(t);
  ctx.edtCreate(EdtSpec{.templ = t});
  return testing::done(ctx);
}

Identifier double_template_destroy(Context& ctx, Params, Deps) {
  Identifier t = ctx.edtTemplateCreate("noop", 0, 0);
  ctx.edtTemplateDestroy(t);
  ctx.edtTemplateDestroy(t);
  return testing::done(ctx);
}

Identifier bad_arity(Context& ctx, Params, Deps) {
  Identifier t = ctx.edtTemplateCreate("noop", 2, 0);
  ctx.edtCreate(EdtSpec{.templ = t, .params = {1}});
  return testing::done(ctx);
}

Identifier null_dep(Context& ctx, Params, Deps) {
  Identifier t = ctx.edtTemplateCreate("stop", 0, 1);
  ctx.edtCreate(EdtSpec{.templ = t, .deps = std::vector<Identifier>{Identifier::null()},
                        .props = props::kEdtLid});
  ctx.edtTemplateDestroy(t);
  return Identifier::null();
}

Identifier later_slots(Context& ctx, Params, Deps) {
  Identifier t = ctx.edtTemplateCreate("stop", 0, 3);
  auto c = ctx.edtCreate(EdtSpec{
      .templ = t,
      .deps = std::vector<Identifier>{Identifier::null(), Identifier::uninitialized(),
                                      Identifier::uninitialized()},
      .props = props::kEdtLid});
  ctx.edtTemplateDestroy(t);
  ctx.addDependence(Identifier::null(), c.task, 1, AccessMode::Default);
  if (ctx.config().seed == 99) return Identifier::null();  // slot 2 left open
  ctx.addDependence(Identifier::null(), c.task, 2, AccessMode::Default);
  return Identifier::null();
}

Identifier bad_slot(Context& ctx, Params, Deps) {
  Identifier t = ctx.edtTemplateCreate("stop", 0, 1);
  auto c = ctx.edtCreate(EdtSpec{.templ = t, .props = props::kEdtLid});
  ctx.addDependence(Identifier::null(), c.task, 1, AccessMode::Default);
  return Identifier::null();
}

Identifier slot_twice(Context& ctx, Params, Deps) {
  Identifier t = ctx.edtTemplateCreate("stop", 0, 2);
  auto c = ctx.edtCreate(EdtSpec{.templ = t, .props = props::kEdtLid});
  Identifier ev = ctx.eventCreate();
  ctx.addDependence(ev, c.task, 0, AccessMode::Null);
  ctx.addDependence(Identifier::null(), c.task, 0, AccessMode::Null);
  return Identifier::null();
}

Identifier satisfy_twice(Context& ctx, Params, Deps) {
  Identifier ev = ctx.eventCreate();
  ctx.eventSatisfy(ev, Identifier::null());
  ctx.eventSatisfy(ev, Identifier::null());
  return testing::done(ctx);
}

// event payload forwarding: three sinks read the block the event carries
Identifier sink(Context& ctx, Params, Deps depv) {
  ctx.recorder().count("sinks");
  ctx.recorder().observe("payload", format(depv[0].guid));
  ctx.recorder().count("value", depv[0].view->as<std::uint32_t>()[0]);
  return Identifier::null();
}

Identifier forward(Context& ctx, Params, Deps) {
  auto db = ctx.dbCreate(4);
  db.view->mutable_as<std::uint32_t>()[0] = 7;
  ctx.dbRelease(db.block);
  ctx.recorder().set("block", format(db.block));
  Identifier ev = ctx.eventCreate();
  Identifier sink_t = ctx.edtTemplateCreate("sink", 0, 1);
  Identifier stop_t = ctx.edtTemplateCreate("stop", 0, 3);
  auto last = ctx.edtCreate(EdtSpec{.templ = stop_t});
  for (std::uint32_t i = 0; i < 3; ++i) {
    auto s = ctx.edtCreate(EdtSpec{.templ = sink_t, .output_event = true});
    ctx.addDependence(ev, s.task, 0, AccessMode::RO);
    ctx.addDependence(s.output_event, last.task, i, AccessMode::Null);
  }
  ctx.eventSatisfy(ev, db.block);
  return Identifier::null();
}

// a returned identifier becomes the output event's payload
Identifier producer(Context& ctx, Params, Deps) {
  auto db = ctx.dbCreate(4);
  db.view->mutable_as<std::uint32_t>()[0] = 11;
  ctx.dbRelease(db.block);
  return db.block;
}

Identifier consumer(Context& ctx, Params, Deps depv) {
  ctx.recorder().count("value", depv[0].view->as<std::uint32_t>()[0]);
  ctx.dbDestroy(depv[0].guid);
  return testing::done(ctx);
}

Identifier returns_payload(Context& ctx, Params, Deps) {
  Identifier pt = ctx.edtTemplateCreate("producer", 0, 0);
  Identifier ct = ctx.edtTemplateCreate("consumer", 0, 1);
  auto c = ctx.edtCreate(EdtSpec{.templ = ct, .props = props::kEdtLid});
  auto p = ctx.edtCreate(EdtSpec{.templ = pt, .props = props::kEdtLid, .output_event = true});
  ctx.addDependence(p.output_event, c.task, 0, AccessMode::RO);
  return Identifier::null();
}

Identifier fresh_zeroed(Context& ctx, Params, Deps) {
  auto db = ctx.dbCreate(4096);
  std::int64_t nonzero = 0;
  for (auto b : db.view->bytes()) nonzero += b != std::byte{0};
  ctx.recorder().count("nonzero", nonzero);
  ctx.recorder().count("size", static_cast<std::int64_t>(db.view->size()));
  auto lazy = ctx.dbCreate(2048, props::kDbNoAcquire);
  ctx.recorder().count("lazy_view", lazy.view.has_value());
  return testing::done(ctx);
}

Identifier zero_size(Context& ctx, Params, Deps) {
  ctx.dbCreate(0);
  return testing::done(ctx);
}

Identifier release_unheld(Context& ctx, Params, Deps) {
  auto db = ctx.dbCreate(8, props::kDbNoAcquire);
  ctx.dbRelease(db.block);
  return testing::done(ctx);
}

Identifier destroy_twice(Context& ctx, Params, Deps) {
  auto db = ctx.dbCreate(8);
  ctx.dbDestroy(db.block);
  ctx.dbDestroy(db.block);
  return testing::done(ctx);
}

Identifier ro_reader(Context& ctx, Params, Deps depv) {
  ctx.recorder().observe("order", "ro");
  ctx.recorder().count("seen", depv[0].view->as<std::uint32_t>()[0]);
  return Identifier::null();
}

Identifier ew_writer(Context& ctx, Params, Deps depv) {
  ctx.recorder().observe("order", "ew");
  depv[0].view->mutable_as<std::uint32_t>()[0] += 1;
  return Identifier::null();
}

Identifier ro_then_ew(Context& ctx, Params, Deps) {
  auto db = ctx.dbCreate(4);
  db.view->mutable_as<std::uint32_t>()[0] = 5;
  ctx.dbRelease(db.block);
  Identifier rt = ctx.edtTemplateCreate("ro_reader", 0, 1);
  Identifier wt = ctx.edtTemplateCreate("ew_writer", 0, 2);
  Identifier st = ctx.edtTemplateCreate("stop", 0, 1);
  auto r = ctx.edtCreate(EdtSpec{.templ = rt, .output_event = true});
  auto w = ctx.edtCreate(EdtSpec{.templ = wt, .output_event = true});
  auto s = ctx.edtCreate(EdtSpec{.templ = st});
  ctx.addDependence(db.block, r.task, 0, AccessMode::RO);
  ctx.addDependence(db.block, w.task, 0, AccessMode::EW);
  ctx.addDependence(r.output_event, w.task, 1, AccessMode::Null);
  ctx.addDependence(w.output_event, s.task, 0, AccessMode::Null);
  return Identifier::null();
}

Identifier view_after_release(Context& ctx, Params, Deps) {
  auto db = ctx.dbCreate(4);
  db.view->mutable_as<std::uint32_t>()[0] = 123;
  ctx.dbRelease(db.block);
  Identifier rt = ctx.edtTemplateCreate("consumer", 0, 1);
  auto c = ctx.edtCreate(EdtSpec{.templ = rt});
  ctx.addDependence(db.block, c.task, 0, AccessMode::RO);
  return Identifier::null();
}

Identifier write_ro(Context& ctx, Params, Deps depv) {
  depv[0].view->mutable_bytes();
  return testing::done(ctx);
}

Identifier ro_write_main(Context& ctx, Params, Deps) {
  auto db = ctx.dbCreate(4);
  ctx.dbRelease(db.block);
  Identifier t = ctx.edtTemplateCreate("write_ro", 0, 1);
  auto c = ctx.edtCreate(EdtSpec{.templ = t});
  ctx.addDependence(db.block, c.task, 0, AccessMode::RO);
  return Identifier::null();
}

const FunctionRegistry& registry() {
  static const FunctionRegistry reg = [] {
    FunctionRegistry r;
    r.add_task("noop", noop);
    r.add_task("stop", stop);
    r.add_task("use_after_destroy", use_after_destroy);
    r.add_task("double_template_destroy", double_template_destroy);
    r.add_task("bad_arity", bad_arity);
    r.add_task("null_dep", null_dep);
    r.add_task("later_slots", later_slots);
    r.add_task("bad_slot", bad_slot);
    r.add_task("slot_twice", slot_twice);
    r.add_task("satisfy_twice", satisfy_twice);
    r.add_task("sink", sink);
    r.add_task("forward", forward);
    r.add_task("producer", producer);
    r.add_task("consumer", consumer);
    r.add_task("returns_payload", returns_payload);
    r.add_task("fresh_zeroed", fresh_zeroed);
    r.add_task("zero_size", zero_size);
    r.add_task("release_unheld", release_unheld);
    r.add_task("destroy_twice", destroy_twice);
    r.add_task("ro_reader", ro_reader);
    r.add_task("ew_writer", ew_writer);
    r.add_task("ro_then_ew", ro_then_ew);
    r.add_task("view_after_release", view_after_release);
    r.add_task("write_ro", write_ro);
    r.add_task("ro_write_main", ro_write_main);
    return r;
  }();
  return reg;
}

std::optional<ErrorKind> error_running(const std::string& main, std::size_t nodes = 2) {
  return run(registry(), config(nodes), main).result.error;
}

}  // namespace

TEST_CASE("templates") {
  CHECK(error_running("use_after_destroy") == ErrorKind::InvalidId);
  CHECK(error_running("double_template_destroy") == ErrorKind::InvalidId);
  CHECK(error_running("bad_arity") == ErrorKind::BadArity);
}

TEST_CASE("Null in deps satisfies the slot at creation") {
  for (std::size_t nodes : {1, 2}) {
    auto r = run(registry(), config(nodes), "null_dep");
    CHECK(r.result.outcome == Outcome::Success);
    CHECK(r.counters["stop_ran"] == 1);
  }
}

TEST_CASE("uninitialized slots wait for addDependence") {
  auto r = run(registry(), config(2), "later_slots");
  CHECK(r.result.outcome == Outcome::Success);
  CHECK(r.counters["stop_ran"] == 1);
  auto stuck = run(registry(), config(2, 99), "later_slots");
  CHECK(stuck.result.outcome == Outcome::DeadlockDetected);
  CHECK(stuck.counters["stop_ran"] == 0);
}

TEST_CASE("addDependence slot errors") {
  CHECK(error_running("bad_slot") == ErrorKind::BadSlot);
  CHECK(error_running("slot_twice") == ErrorKind::SlotOccupied);
}

TEST_CASE("events") {
  CHECK(error_running("satisfy_twice") == ErrorKind::AlreadySatisfied);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto r = run(registry(), config(3, seed), "forward");
    CHECK(r.result.outcome == Outcome::Success);
    CHECK(r.counters["sinks"] == 3);
    CHECK(r.counters["value"] == 21);
    Runtime rt(config(3, seed), registry());
    rt.launch("forward");
    rt.run();
    for (const auto& p : rt.recorder().observations().at("payload")) {
      CHECK(p == rt.recorder().values().at("block"));
    }
  }
}

TEST_CASE("a returned identifier travels through the output event") {
  auto r = run(registry(), config(2), "returns_payload");
  CHECK(r.result.outcome == Outcome::Success);
  CHECK(r.counters["value"] == 11);
}

TEST_CASE("data block creation") {
  auto r = run(registry(), config(1), "fresh_zeroed");
  CHECK(r.counters["nonzero"] == 0);
  CHECK(r.counters["size"] == 4096);
  CHECK(r.counters["lazy_view"] == 0);
  CHECK(error_running("zero_size") == ErrorKind::BadSize);
  CHECK(error_running("release_unheld") == ErrorKind::NotAcquired);
  CHECK(error_running("destroy_twice") == ErrorKind::InvalidId);
}

TEST_CASE("writes before release are visible to the next task") {
  auto r = run(registry(), config(2), "view_after_release");
  CHECK(r.counters["value"] == 123);
}

TEST_CASE("RO grant, then EW") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Runtime rt(config(2, seed), registry());
    rt.launch("ro_then_ew");
    CHECK(rt.run().outcome == Outcome::Success);
    CHECK(rt.recorder().observations().at("order") == std::vector<std::string>{"ro", "ew"});
    CHECK(rt.recorder().counter("seen") == 5);
  }
}

TEST_CASE("read-only views refuse mutation") {
  CHECK(error_running("ro_write_main") == ErrorKind::NotWritable);
}

TEST_CASE("shutdown and quiescence") {
  auto r = run(program_registry(), config(1), "shutdown.main");
  CHECK(r.result.outcome == Outcome::Success);
  CHECK(r.stats.tasks_executed == 1);
  auto s = run(program_registry(), config(2), "stall.main");
  CHECK(s.result.outcome == Outcome::DeadlockDetected);
  CHECK(s.counters["ran"] == 0);
}

// -- mode exclusion and run-once, random programs --------------------------

namespace {

Runtime* g_rt = nullptr;
GlobalId g_block;

Identifier contender(Context& ctx, Params paramv, Deps depv) {
  const BlockObject* b = g_rt->find_block(g_block);
  bool ew = false;
  for (const auto& g : b->grants) ew = ew || g.mode == AccessMode::EW;
  if (ew && b->grants.size() != 1) ctx.recorder().count("exclusion_violations");
  ctx.recorder().count("ran." + std::to_string(paramv[0]));
  if (depv[0].view && (depv[0].view->mode() == AccessMode::EW ||
                       depv[0].view->mode() == AccessMode::RW)) {
    depv[0].view->mutable_as<std::uint32_t>()[0] += 1;
  }
  return Identifier::null();
}

Identifier contention_main(Context& ctx, Params paramv, Deps) {
  auto db = ctx.dbCreate(4);
  g_block = db.block.global();
  ctx.dbRelease(db.block);
  Identifier ct = ctx.edtTemplateCreate("contender", 1, 1);
  const std::uint64_t n = paramv.empty() ? 8 : paramv[0];
  Identifier st = ctx.edtTemplateCreate("stop", 0, static_cast<std::uint32_t>(n));
  auto s = ctx.edtCreate(EdtSpec{.templ = st, .props = props::kEdtLid});
  testing::Gen gen(ctx.config().seed * 31 + 7);
  static constexpr AccessMode modes[] = {AccessMode::RO, AccessMode::Const, AccessMode::RW,
                                         AccessMode::EW};
  for (std::uint64_t i = 0; i < n; ++i) {
    auto c = ctx.edtCreate(EdtSpec{.templ = ct, .params = {i}, .props = props::kEdtLid,
                                   .output_event = true});
    ctx.addDependence(db.block, c.task, 0, modes[gen.below(4)]);
    ctx.addDependence(c.output_event, s.task, static_cast<std::uint32_t>(i), AccessMode::Null);
  }
  return Identifier::null();
}

}  // namespace

TEST_CASE("property: EW excludes other grants, every task runs once") {
  FunctionRegistry reg = registry();
  reg.add_task("contender", contender);
  reg.add_task("contention.main", contention_main);
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    for (std::size_t nodes : {1, 2, 4}) {
      Runtime rt(config(nodes, seed), reg);
      g_rt = &rt;
      rt.launch("contention.main");
      RunResult res = rt.run();
      REQUIRE(res.outcome == Outcome::Success);
      CHECK(rt.recorder().counter("exclusion_violations") == 0);
      for (int i = 0; i < 8; ++i) CHECK(rt.recorder().counter("ran." + std::to_string(i)) == 1);
      g_rt = nullptr;
    }
  }
}
