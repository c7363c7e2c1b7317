#include <algorithm>

#include "ocrx/runtime.hpp"

namespace ocrx {

namespace {

bool has_kind(const Identifier& id, ObjectKind k) {
  return id.is_global() && id.global().kind == k;
}

}  // namespace

void Context::check_owned(const Identifier& id) const {
  if (id.is_local() && id.local().owner != frame_.id) {
    fail(ErrorKind::LidOwnershipViolation,
         format(id) + " used by context " + std::to_string(frame_.id.value));
  }
}

Identifier Context::resolved_or_self(const Identifier& id) const {
  if (id.is_local()) {
    if (auto g = rt_.lids_.lookup(id.local())) return *g;
  }
  return id;
}

bool Context::wants_lid(EdtProps props) const {
  return rt_.cfg_.mode == LidMode::Deferred && props.has(props::kEdtLid);
}

IdClass Context::getIdType(const Identifier& id) const { return classify(id, frame_.id); }

GlobalId Context::getGuid(const Identifier& id) {
  if (id.is_global()) return id.global();
  if (!id.is_local()) fail(ErrorKind::InvalidId, "getGuid of " + format(id));
  check_owned(id);
  if (!rt_.lids_.known(id.local())) fail(ErrorKind::InvalidId, "unknown " + format(id));
  return rt_.await_global(frame_, id.local());
}

Identifier Context::edtTemplateCreate(std::string_view fn, std::uint32_t paramc,
                                      std::uint32_t depc) {
  TaskFn entry = rt_.registry_.task(fn);
  const GlobalId id = rt_.issuer_.next(frame_.node, ObjectKind::TaskTemplate);
  rt_.templates_.emplace(id, TemplateObject{id, TemplateInfo{std::string(fn), entry, paramc, depc},
                                            false});
  return id;
}

void Context::edtTemplateDestroy(const Identifier& templ) {
  check_owned(templ);
  const Identifier t = resolved_or_self(templ);
  auto it = t.is_global() ? rt_.templates_.find(t.global()) : rt_.templates_.end();
  if (it == rt_.templates_.end() || it->second.destroyed) {
    fail(ErrorKind::InvalidId, "template " + format(templ) + " does not exist");
  }
  it->second.destroyed = true;
}

EdtCreated Context::edtCreate(const EdtSpec& spec) {
  check_owned(spec.templ);
  EdtSpec s = spec;
  s.templ = resolved_or_self(spec.templ);
  const TemplateInfo info = rt_.template_for(s);
  std::vector<Identifier> deps =
      spec.deps.value_or(std::vector<Identifier>(info.depc, Identifier::uninitialized()));
  for (const auto& d : deps) check_owned(d);

  const NodeIndex home = rt_.place(frame_);
  if (home == frame_.node) {
    auto nt = rt_.create_task_at(home, info, spec.params, deps, spec.output_event);
    return {nt.task, nt.event ? Identifier(*nt.event) : Identifier::null()};
  }

  CreateTaskSpec cs;
  cs.home = home;
  cs.reply_to = frame_.node;
  cs.info = info;
  cs.params = spec.params;
  cs.deps = deps;
  cs.output_event = spec.output_event;
  cs.task_lid = rt_.lids_.allocate(frame_.id);
  if (spec.output_event) cs.event_lid = rt_.lids_.allocate(frame_.id);
  const LocalId task_lid = cs.task_lid;
  const auto event_lid = cs.event_lid;
  rt_.post(frame_.node, CreateObject{std::move(cs)});

  if (wants_lid(spec.props)) {
    return {task_lid, event_lid ? Identifier(*event_lid) : Identifier::null()};
  }
  EdtCreated out{rt_.await_global(frame_, task_lid), Identifier::null()};
  if (event_lid) out.output_event = rt_.await_global(frame_, *event_lid);
  return out;
}

namespace {

void check_binding(const Frame& frame, const Identifier& object_lid, const LidTable& lids) {
  if (!frame.binding || !object_lid.is_local() || object_lid.local() != *frame.binding) {
    fail(ErrorKind::CreatorContractViolation,
         "mapped creation outside its creator or with identifier " + format(object_lid));
  }
  if (lids.lookup(*frame.binding)) {
    fail(ErrorKind::CreatorContractViolation, "creator bound " + format(object_lid) + " twice");
  }
}

}  // namespace

void Context::edtCreateMapped(Identifier& object_lid, const EdtSpec& spec) {
  check_binding(frame_, object_lid, rt_.lids_);
  check_owned(spec.templ);
  EdtSpec s = spec;
  s.templ = resolved_or_self(spec.templ);
  const TemplateInfo info = rt_.template_for(s);
  for (const auto& d : spec.deps.value_or(std::vector<Identifier>{})) check_owned(d);
  auto nt = rt_.create_task_at(frame_.node, info, spec.params, spec.deps, spec.output_event);
  rt_.bind_mapped(frame_, object_lid, nt.task);
}

void Context::addDependence(const Identifier& source, const Identifier& dest, std::uint32_t slot,
                            AccessMode mode) {
  check_owned(source);
  check_owned(dest);
  if (dest.is_null() || dest.is_uninitialized() || source.is_uninitialized()) {
    fail(ErrorKind::InvalidId, "addDependence " + format(source) + " -> " + format(dest));
  }
  const Identifier d = resolved_or_self(dest);
  if (has_kind(d, ObjectKind::Task)) {
    if (const TaskObject* t = rt_.find_task(d.global()); t && slot >= t->slots.size()) {
      fail(ErrorKind::BadSlot, "slot " + std::to_string(slot) + " of " + format(d));
    }
  }
  rt_.post(frame_.node, AddDependence{source, dest, slot, mode, false});
}

Identifier Context::eventCreate(EdtProps props) {
  const NodeIndex home = rt_.place(frame_);
  if (home == frame_.node) return rt_.create_event_at(home);
  const LocalId lid = rt_.lids_.allocate(frame_.id);
  rt_.post(frame_.node, CreateObject{CreateEventSpec{home, frame_.node, lid}});
  if (wants_lid(props)) return lid;
  return rt_.await_global(frame_, lid);
}

void Context::eventCreateMapped(Identifier& object_lid) {
  check_binding(frame_, object_lid, rt_.lids_);
  rt_.bind_mapped(frame_, object_lid, rt_.create_event_at(frame_.node));
}

void Context::eventSatisfy(const Identifier& event, const Identifier& payload) {
  check_owned(event);
  check_owned(payload);
  rt_.post(frame_.node, Satisfy{event, 0, payload});
}

DbCreated Context::dbCreate(std::uint64_t size, DbProps props) {
  const bool acquire = !props.has(props::kDbNoAcquire);
  const GlobalId id = rt_.create_block_at(frame_.node, size, acquire);
  if (!acquire) return {id, std::nullopt};
  const GlobalId holder = rt_.holder_of(frame_);
  BlockObject& b = rt_.blocks_.at(id);
  b.grants.push_back(Grant{holder, AccessMode::RW});
  b.written = true;
  rt_.held_of(holder).push_back(HeldGrant{id, AccessMode::RW, true});
  return {id, DbView(rt_, id, holder, AccessMode::RW)};
}

void Context::dbCreateMapped(Identifier& object_lid, std::uint64_t size) {
  check_binding(frame_, object_lid, rt_.lids_);
  rt_.bind_mapped(frame_, object_lid, rt_.create_block_at(frame_.node, size, true));
}

void Context::dbRelease(const Identifier& block) {
  check_owned(block);
  const Identifier b = resolved_or_self(block);
  const GlobalId holder = rt_.holder_of(frame_);
  if (!b.is_global() || !rt_.holds(holder, b.global())) {
    fail(ErrorKind::NotAcquired, format(block) + " is not held by " + format(holder));
  }
  for (auto& h : rt_.held_of(holder)) {
    if (h.block == b.global()) h.active = false;
  }
  rt_.post(frame_.node, ReleaseNotice{b, holder});
}

void Context::dbDestroy(const Identifier& block) {
  check_owned(block);
  const Identifier b = resolved_or_self(block);
  if (b.is_global() && b.global().kind != ObjectKind::DataBlock) {
    fail(ErrorKind::InvalidId, format(b) + " is not a data block");
  }
  if (!b.is_global() && !b.is_local()) fail(ErrorKind::InvalidId, "dbDestroy of " + format(b));
  std::optional<GlobalId> holder;
  if (b.is_global() && rt_.holds(rt_.holder_of(frame_), b.global())) {
    holder = rt_.holder_of(frame_);
    for (auto& h : rt_.held_of(*holder)) {
      if (h.block == b.global()) h.active = false;
    }
  }
  rt_.post(frame_.node, DestroyObject{b, holder});
}

void Context::shutdown() {
  rt_.shutdown_ = true;
  rt_.trace_.emit_step("shutdown");
}

Identifier Context::mapCreate(std::uint64_t size, std::string_view creator,
                              std::vector<std::uint64_t> params, std::vector<Identifier> guids) {
  if (size == 0) fail(ErrorKind::BadSize, "map of size 0");
  rt_.registry_.creator(creator);
  bool unresolved = false;
  for (auto& g : guids) {
    check_owned(g);
    g = resolved_or_self(g);
    unresolved = unresolved || g.is_local();
  }
  CreateMapSpec spec;
  spec.home = rt_.place(frame_);
  spec.reply_to = frame_.node;
  spec.size = size;
  spec.creator = std::string(creator);
  spec.params = std::move(params);
  spec.guids = std::move(guids);
  if (spec.home == frame_.node && !unresolved) return rt_.create_map_at(spec.home, spec);
  spec.lid = rt_.lids_.allocate(frame_.id);
  const LocalId lid = spec.lid;
  rt_.post(frame_.node, CreateObject{std::move(spec)});
  return rt_.await_global(frame_, lid);
}

Identifier Context::mapGet(const Identifier& map, std::uint64_t index) {
  check_owned(map);
  const Identifier m = resolved_or_self(map);
  if (m.is_global()) {
    if (m.global().kind != ObjectKind::Map) fail(ErrorKind::InvalidId, format(m) + " is not a map");
    const MapObject* mp = rt_.find_map(m.global());
    if (!mp || mp->destroyed) fail(ErrorKind::InvalidId, format(m) + " is not a live map");
    if (index >= mp->size) {
      fail(ErrorKind::BadIndex,
           "index " + std::to_string(index) + " of map size " + std::to_string(mp->size));
    }
    const auto& slot = mp->slots[index];
    if (m.global().node == frame_.node && slot.state == MapObject::Slot::State::Created) {
      return slot.guid;
    }
  } else if (!m.is_local()) {
    fail(ErrorKind::InvalidId, "mapGet on " + format(m));
  }
  const LocalId lid = rt_.lids_.allocate(frame_.id);
  rt_.post(frame_.node, MapGet{frame_.node, m, index, lid});
  if (rt_.cfg_.mode == LidMode::Deferred) return lid;
  return rt_.await_global(frame_, lid);
}

void Context::mapDestroy(const Identifier& map) {
  check_owned(map);
  const Identifier m = resolved_or_self(map);
  if (m.is_global() && m.global().kind != ObjectKind::Map) {
    fail(ErrorKind::InvalidId, format(m) + " is not a map");
  }
  rt_.post(frame_.node, DestroyObject{m, std::nullopt});
}

FileOpened Context::fileOpen(std::string_view path, std::string_view mode, bool want_descriptor,
                             std::uint32_t properties) {
  (void)properties;
  const OpenMode om = parse_open_mode(mode);
  const GlobalId id = rt_.issuer_.next(frame_.node, ObjectKind::File);
  FileObject f;
  f.id = id;
  f.path = std::string(path);
  f.mode = om;
  FileOpened out{id, Identifier::null()};
  if (want_descriptor) {
    const GlobalId d = rt_.create_block_at(frame_.node, kDescriptorSize, true);
    BlockObject& b = rt_.blocks_.at(d);
    b.ready = false;
    b.file = id;
    b.is_descriptor = true;
    f.descriptor = d;
    out.descriptor = d;
  }
  rt_.files_.emplace(id, std::move(f));
  rt_.post(frame_.node, FileOp{FileOp::Op::Open, id});
  return out;
}

Identifier Context::fileGetChunk(const Identifier& file, std::uint64_t offset,
                                 std::uint64_t size) {
  check_owned(file);
  const Identifier f = resolved_or_self(file);
  if (!has_kind(f, ObjectKind::File)) fail(ErrorKind::InvalidId, format(f) + " is not a file");
  if (size == 0) fail(ErrorKind::BadSize, "chunk of size 0");
  const FileObject* fo = rt_.find_file(f.global());
  if (!fo) fail(ErrorKind::InvalidId, format(f) + " is not a file");
  if (fo->released) fail(ErrorKind::FileReleased, format(f) + " was released");
  if (f.global().node == frame_.node) return rt_.create_chunk_at(f.global(), offset, size);

  const LocalId lid = rt_.lids_.allocate(frame_.id);
  rt_.post(frame_.node, CreateObject{CreateChunkSpec{frame_.node, f, offset, size, lid}});
  if (rt_.cfg_.mode == LidMode::Deferred) return lid;
  return rt_.await_global(frame_, lid);
}

void Context::fileRelease(const Identifier& file) {
  check_owned(file);
  const Identifier f = resolved_or_self(file);
  if (!has_kind(f, ObjectKind::File)) fail(ErrorKind::InvalidId, format(f) + " is not a file");
  FileObject& fo = rt_.file_at(f.global());
  if (fo.released) fail(ErrorKind::InvalidId, format(f) + " released twice");
  fo.released = true;
  rt_.post(frame_.node, FileOp{FileOp::Op::Release, f});
}

void Context::dbPartition(const Identifier& block, std::span<PartitionDescriptor> parts,
                          PartitionProps props) {
  check_owned(block);
  const Identifier b = resolved_or_self(block);
  std::vector<PartitionRange> ranges;
  ranges.reserve(parts.size());
  for (const auto& p : parts) ranges.push_back(PartitionRange{p.offset, p.size});

  if (b.is_global()) {
    if (b.global().kind != ObjectKind::DataBlock) {
      fail(ErrorKind::InvalidId, format(b) + " is not a data block");
    }
    BlockObject& blk = rt_.block_at(b.global());
    blk.partitions.validate(blk.size, ranges, props);
    if (b.global().node == frame_.node) {
      auto ids = rt_.create_partitions_at(b.global(), ranges, props);
      for (std::size_t i = 0; i < parts.size(); ++i) parts[i].guid = ids[i];
      return;
    }
  } else if (!b.is_local()) {
    fail(ErrorKind::InvalidId, "dbPartition of " + format(b));
  }

  CreatePartitionsSpec spec;
  spec.reply_to = frame_.node;
  spec.block = b;
  spec.ranges = ranges;
  spec.props = props;
  for (std::size_t i = 0; i < parts.size(); ++i) spec.lids.push_back(rt_.lids_.allocate(frame_.id));
  const auto lids = spec.lids;
  rt_.post(frame_.node, CreateObject{std::move(spec)});
  for (std::size_t i = 0; i < parts.size(); ++i) {
    parts[i].guid = rt_.cfg_.mode == LidMode::Deferred ? Identifier(lids[i])
                                                       : Identifier(rt_.await_global(frame_, lids[i]));
  }
}

Identifier Context::dbCopy(const Identifier& dest, std::uint64_t dest_offset,
                           const Identifier& source, std::uint64_t source_offset,
                           std::uint64_t size, CopyType type) {
  if ((type.bits & ~props::kCopyKnownBits) != 0 ||
      (type.has(props::kCopyPartition) && type.has(props::kCopyPartitionBack))) {
    fail(ErrorKind::BadCopyType, "copy type " + std::to_string(type.bits));
  }
  check_owned(dest);
  check_owned(source);
  for (const auto& id : {resolved_or_self(dest), resolved_or_self(source)}) {
    if (!id.is_local() && !has_kind(id, ObjectKind::DataBlock)) {
      fail(ErrorKind::InvalidId, format(id) + " is not a data block");
    }
  }
  const GlobalId completion = rt_.create_event_at(frame_.node);
  if (size == 0) {
    rt_.post(frame_.node, Satisfy{completion, 0, dest});
  } else {
    rt_.post(frame_.node,
             CopyData{dest, dest_offset, source, source_offset, size, type, completion});
  }
  return completion;
}

Recorder& Context::recorder() { return rt_.recorder_; }

const RuntimeConfig& Context::config() const { return rt_.cfg_; }

std::uint64_t Context::deliveries() const { return rt_.substrate_.deliveries(); }

}  // namespace ocrx
