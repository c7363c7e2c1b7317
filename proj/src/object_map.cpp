#include "ocrx/runtime.hpp"

namespace ocrx {

GlobalId Runtime::create_map_at(NodeIndex home, const CreateMapSpec& spec) {
  if (spec.size == 0) fail(ErrorKind::BadSize, "map of size 0");
  CreatorFn fn = registry_.creator(spec.creator);
  const GlobalId id = issuer_.next(home, ObjectKind::Map);
  MapObject m;
  m.id = id;
  m.size = spec.size;
  m.creator_name = spec.creator;
  m.creator = fn;
  m.params = spec.params;
  m.guids = spec.guids;
  m.slots.resize(spec.size);
  maps_.emplace(id, std::move(m));
  return id;
}

void Runtime::on_map_get(const MapGet& m) {
  const GlobalId map_id = m.map.global();
  MapObject& mp = map_at(map_id);
  if (m.index >= mp.size) {
    fail(ErrorKind::BadIndex, "index " + std::to_string(m.index) + " of map size " +
                                  std::to_string(mp.size));
  }
  auto& slot = mp.slots[m.index];
  using State = MapObject::Slot::State;
  if (slot.state == State::Created) {
    post(map_id.node, MapResolution{m.reply_to, m.lid, slot.guid});
    return;
  }
  slot.waiters.emplace_back(m.lid, m.reply_to);
  if (slot.state == State::Creating) return;

  slot.state = State::Creating;
  Frame frame{next_context(), map_id.node, std::nullopt, true, std::nullopt};
  const LocalId object_lid = lids_.allocate(frame.id);
  frame.binding = object_lid;
  ++creator_invocations_;
  trace_.emit_step("creator " + format(map_id) + " index=" + std::to_string(m.index) +
                   " object=" + format(object_lid));

  Identifier io = object_lid;
  Context ctx(*this, frame);
  const std::vector<std::uint64_t> params = mp.params;
  const std::vector<Identifier> guids = mp.guids;
  mp.creator(ctx, io, m.index, params, guids);

  auto bound = lids_.lookup(object_lid);
  if (!bound) {
    fail(ErrorKind::CreatorContractViolation,
         "creator " + mp.creator_name + " returned without creating index " +
             std::to_string(m.index));
  }
  auto& done = maps_.at(map_id).slots[m.index];
  done.state = State::Created;
  done.guid = *bound;
  auto waiters = std::move(done.waiters);
  done.waiters.clear();
  for (const auto& [lid, node] : waiters) post(map_id.node, MapResolution{node, lid, *bound});
}

void Runtime::bind_mapped(const Frame& frame, Identifier& object_lid, const GlobalId& guid) {
  resolve(ResolutionRecord{object_lid.local(), guid, frame.node});
  object_lid = guid;
}

}  // namespace ocrx
