#include <string>
#include <vector>

#include "programs.hpp"

namespace ocrx::examples {

namespace {

// data block: map id, template id, width u64, height u64
constexpr std::size_t kWidthAt = 32;
constexpr std::size_t kHeightAt = 40;
constexpr std::size_t kDataSize = 48;

std::string cell(std::uint64_t x, std::uint64_t y) {
  return "ran." + std::to_string(x) + "." + std::to_string(y);
}

void creator(Context& ctx, Identifier& object_lid, std::uint64_t index,
             std::span<const std::uint64_t> paramv, std::span<const Identifier> guidv) {
  const std::uint64_t width = paramv[0];
  const std::uint64_t x = index % width;
  const std::uint64_t y = index / width;
  std::vector<Identifier> deps{guidv[0], Identifier::uninitialized(),
                               Identifier::uninitialized()};
  if (x == 0) deps[1] = Identifier::null();
  if (y == 0) deps[2] = Identifier::null();
  ctx.edtCreateMapped(object_lid, EdtSpec{.templ = guidv[1], .params = {x, y}, .deps = deps});
  // object_lid holds the task's GUID now
}

Identifier work(Context& ctx, std::span<const std::uint64_t> paramv, std::span<DepRecord> depv) {
  const std::uint64_t x = paramv[0];
  const std::uint64_t y = paramv[1];
  auto data = depv[0].view->bytes();
  const std::uint64_t width = load_u64le(data.subspan(kWidthAt, 8));
  const std::uint64_t height = load_u64le(data.subspan(kHeightAt, 8));
  const Identifier map = get_id(data, 0);

  auto& rec = ctx.recorder();
  rec.count("work_runs");
  if (x > 0 && rec.counter(cell(x - 1, y)) == 0) rec.count("order_violations");
  if (y > 0 && rec.counter(cell(x, y - 1)) == 0) rec.count("order_violations");
  rec.count(cell(x, y));
  rec.observe("order", std::to_string(x) + "," + std::to_string(y));

  if (x == width - 1 && y == height - 1) {
    // the last item, we are done
    ctx.edtTemplateDestroy(get_id(data, 1));
    ctx.mapDestroy(map);
    ctx.dbDestroy(depv[0].guid);
    ctx.shutdown();
    return Identifier::null();
  }
  if (x < width - 1) {
    Identifier task = ctx.mapGet(map, (x + 1) + y * width);
    ctx.addDependence(Identifier::null(), task, 1, AccessMode::Default);
  }
  if (y < height - 1) {
    Identifier task = ctx.mapGet(map, x + (y + 1) * width);
    ctx.addDependence(Identifier::null(), task, 2, AccessMode::Default);
  }
  return Identifier::null();
}

Identifier main_task(Context& ctx, std::span<const std::uint64_t>, std::span<DepRecord>) {
  const std::uint64_t width = 3;
  const std::uint64_t height = 3;
  ctx.recorder().count("order_violations", 0);
  auto db = ctx.dbCreate(kDataSize);
  auto data = db.view->mutable_bytes();
  store_u64le(data.subspan(kWidthAt, 8), width);
  store_u64le(data.subspan(kHeightAt, 8), height);
  Identifier templ = ctx.edtTemplateCreate("matrix.work", 2, 3);
  put_id(data, 1, templ);
  Identifier map = ctx.mapCreate(width * height, "matrix.creator", {width, height},
                                 {db.block, templ});
  put_id(data, 0, map);
  ctx.mapGet(map, 0);
  return Identifier::null();
}

}  // namespace

void register_matrix(FunctionRegistry& r) {
  r.add_task("matrix.main", main_task);
  r.add_task("matrix.work", work);
  r.add_creator("matrix.creator", creator);
}

}  // namespace ocrx::examples
