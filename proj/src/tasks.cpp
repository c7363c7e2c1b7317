#include <algorithm>

#include "ocrx/runtime.hpp"

namespace ocrx {

namespace {

bool is_block(const Identifier& id) {
  return id.is_global() && id.global().kind == ObjectKind::DataBlock;
}

}  // namespace

TemplateInfo Runtime::template_for(const EdtSpec& spec) const {
  if (!spec.templ.is_global() || spec.templ.global().kind != ObjectKind::TaskTemplate) {
    fail(ErrorKind::InvalidId, format(spec.templ) + " is not a task template");
  }
  auto it = templates_.find(spec.templ.global());
  if (it == templates_.end() || it->second.destroyed) {
    fail(ErrorKind::InvalidId, "template " + format(spec.templ) + " does not exist");
  }
  const TemplateInfo& info = it->second.info;
  if (spec.paramc && *spec.paramc != info.paramc) {
    fail(ErrorKind::BadArity, "paramc does not match template " + info.name);
  }
  if (spec.params.size() != info.paramc) {
    fail(ErrorKind::BadArity, std::to_string(spec.params.size()) + " params given, template " +
                                  info.name + " takes " + std::to_string(info.paramc));
  }
  if (spec.depc && *spec.depc != info.depc) {
    fail(ErrorKind::BadArity, "depc does not match template " + info.name);
  }
  if (spec.deps && spec.deps->size() != info.depc) {
    fail(ErrorKind::BadArity, std::to_string(spec.deps->size()) + " deps given, template " +
                                  info.name + " has " + std::to_string(info.depc));
  }
  return info;
}

Runtime::NewTask Runtime::create_task_at(NodeIndex home, const TemplateInfo& info,
                                         std::vector<std::uint64_t> params,
                                         const std::optional<std::vector<Identifier>>& deps,
                                         bool output_event) {
  if (params.size() != info.paramc) fail(ErrorKind::BadArity, "parameter count mismatch");
  if (deps && deps->size() != info.depc) fail(ErrorKind::BadArity, "dependence count mismatch");

  const GlobalId id = issuer_.next(home, ObjectKind::Task);
  NewTask nt{id, std::nullopt};
  if (output_event) nt.event = create_event_at(home);

  TaskObject t;
  t.id = id;
  t.info = info;
  t.params = std::move(params);
  t.slots.resize(info.depc);
  t.output_event = nt.event;
  TaskObject& ref = tasks_.emplace(id, std::move(t)).first->second;

  if (deps) {
    for (std::uint32_t i = 0; i < deps->size(); ++i) {
      const Identifier& d = (*deps)[i];
      if (d.is_uninitialized()) continue;
      if (d.is_null()) {
        satisfy_slot(ref, i, d);
      } else {
        post(home, AddDependence{d, id, i, AccessMode::Default, false});
      }
    }
  }
  if (ref.satisfied == ref.slots.size() && ref.state == TaskObject::State::Waiting) {
    begin_acquire(ref);
  }
  return nt;
}

GlobalId Runtime::create_event_at(NodeIndex home) {
  const GlobalId id = issuer_.next(home, ObjectKind::Event);
  EventObject ev;
  ev.id = id;
  events_.emplace(id, std::move(ev));
  return id;
}

AccessMode Runtime::effective_mode(const SlotState& s) const {
  if (!is_block(s.payload)) return AccessMode::Null;
  if (s.mode == AccessMode::Default) return AccessMode::RO;
  return s.mode;
}

void Runtime::on_add_dependence(const AddDependence& m) {
  if (m.register_sink) {
    EventObject& ev = event_at(m.source.global());
    if (ev.satisfied) {
      post(ev.id.node, Satisfy{m.dest, m.slot, ev.payload});
    } else {
      ev.sinks.push_back(EventObject::Sink{m.dest, m.slot});
    }
    return;
  }

  const GlobalId dest = m.dest.global();
  const bool source_event = m.source.is_global() && m.source.global().kind == ObjectKind::Event;
  if (!m.source.is_null() && !source_event && !is_block(m.source)) {
    fail(ErrorKind::InvalidId, format(m.source) + " cannot be a dependence source");
  }

  if (dest.kind == ObjectKind::Task) {
    TaskObject& t = task_at(dest);
    if (m.slot >= t.slots.size()) {
      fail(ErrorKind::BadSlot, "slot " + std::to_string(m.slot) + " of " + format(dest));
    }
    SlotState& s = t.slots[m.slot];
    if (s.phase != SlotState::Phase::Unconnected) {
      fail(ErrorKind::SlotOccupied, "slot " + std::to_string(m.slot) + " of " + format(dest));
    }
    s.mode = m.mode;
    if (source_event) {
      s.phase = SlotState::Phase::Connected;
      post(dest.node, AddDependence{m.source, m.dest, m.slot, m.mode, true});
    } else {
      satisfy_slot(t, m.slot, m.source);
    }
    return;
  }
  if (dest.kind == ObjectKind::Event) {
    EventObject& ev = event_at(dest);
    if (source_event) {
      post(dest.node, AddDependence{m.source, m.dest, 0, m.mode, true});
    } else {
      satisfy_event(ev, m.source);
    }
    return;
  }
  fail(ErrorKind::InvalidId, format(dest) + " cannot be a dependence destination");
}

void Runtime::on_satisfy(const Satisfy& m) {
  const GlobalId dest = m.dest.global();
  if (dest.kind == ObjectKind::Event) {
    satisfy_event(event_at(dest), m.payload);
    return;
  }
  TaskObject& t = task_at(dest);
  if (m.slot >= t.slots.size()) {
    fail(ErrorKind::BadSlot, "slot " + std::to_string(m.slot) + " of " + format(dest));
  }
  if (t.slots[m.slot].phase == SlotState::Phase::Satisfied) {
    fail(ErrorKind::AlreadySatisfied, "slot " + std::to_string(m.slot) + " of " + format(dest));
  }
  satisfy_slot(t, m.slot, m.payload);
}

void Runtime::satisfy_event(EventObject& ev, const Identifier& payload) {
  if (ev.satisfied) fail(ErrorKind::AlreadySatisfied, format(ev.id) + " already satisfied");
  ev.satisfied = true;
  ev.payload = payload;
  auto sinks = std::move(ev.sinks);
  ev.sinks.clear();
  for (const auto& s : sinks) post(ev.id.node, Satisfy{s.dest, s.slot, payload});
}

void Runtime::satisfy_slot(TaskObject& t, std::uint32_t slot, const Identifier& payload) {
  check_partition_deadlock(t, slot, payload);
  SlotState& s = t.slots[slot];
  s.phase = SlotState::Phase::Satisfied;
  s.payload = payload;
  ++t.satisfied;
  if (t.satisfied == t.slots.size() && t.state == TaskObject::State::Waiting) begin_acquire(t);
}

bool Runtime::is_explicit_ancestor(const GlobalId& ancestor, const BlockObject& b) const {
  std::optional<GlobalId> p = b.parent;
  while (p) {
    if (*p == ancestor) return true;
    p = blocks_.at(*p).parent;
  }
  return false;
}

void Runtime::check_partition_deadlock(const TaskObject& t, std::uint32_t slot,
                                       const Identifier& payload) const {
  SlotState probe = t.slots[slot];
  probe.payload = payload;
  if (effective_mode(probe) == AccessMode::Null) return;
  const BlockObject& b = blocks_.at(payload.global());
  for (std::uint32_t i = 0; i < t.slots.size(); ++i) {
    const SlotState& other = t.slots[i];
    if (i == slot || other.phase != SlotState::Phase::Satisfied) continue;
    if (effective_mode(other) == AccessMode::Null) continue;
    const BlockObject& o = blocks_.at(other.payload.global());
    if (is_explicit_ancestor(o.id, b) || is_explicit_ancestor(b.id, o)) {
      fail(ErrorKind::PartitionDeadlock, format(t.id) + " would hold " + format(b.id) +
                                             " together with " + format(o.id));
    }
  }
}

void Runtime::begin_acquire(TaskObject& t) {
  t.state = TaskObject::State::Acquiring;
  t.acquisitions.clear();
  for (std::uint32_t i = 0; i < t.slots.size(); ++i) {
    const AccessMode mode = effective_mode(t.slots[i]);
    if (mode == AccessMode::Null) continue;
    t.acquisitions.push_back({t.slots[i].payload.global(), i, mode});
  }
  std::sort(t.acquisitions.begin(), t.acquisitions.end(), [](const auto& a, const auto& b) {
    return a.block != b.block ? a.block < b.block : a.slot < b.slot;
  });
  t.next_acquisition = 0;
  request_next_acquisition(t);
}

void Runtime::request_next_acquisition(TaskObject& t) {
  if (t.next_acquisition < t.acquisitions.size()) {
    const auto& a = t.acquisitions[t.next_acquisition];
    post(t.id.node, AcquireRequest{a.block, t.id, a.slot, a.mode});
    return;
  }
  t.state = TaskObject::State::Ready;
  ready_.push_back(t.id);
}

bool Runtime::grantable(const BlockObject& b, const AcquireRequest& r) const {
  if (!b.ready || b.partitions.has_live_children()) return false;
  for (const auto& g : b.grants) {
    if (g.holder == r.task) continue;
    if (r.mode == AccessMode::EW || g.mode == AccessMode::EW) return false;
  }
  return true;
}

void Runtime::mark_written(BlockObject& b) {
  BlockObject* p = &b;
  for (;;) {
    p->written = true;
    if (!p->parent) break;
    p = &blocks_.at(*p->parent);
  }
}

void Runtime::grant(BlockObject& b, const AcquireRequest& r) {
  b.grants.push_back(Grant{r.task, r.mode});
  if (is_writing(r.mode)) mark_written(b);
  trace_.emit_step("grant " + format(b.id) + " to " + format(r.task) +
                   " mode=" + std::string(to_string(r.mode)));
  post(b.id.node, AcquireGrant{b.id, r.task, r.slot, b.open_failed});
}

void Runtime::on_acquire_request(const AcquireRequest& r) {
  BlockObject& b = block_at(r.block);
  if (!b.copy_aliases.empty()) {
    fail(ErrorKind::PartitionProtocolViolation,
         format(b.id) + " acquired while partitioning copies are outstanding");
  }
  if (b.waiting.empty() && grantable(b, r)) {
    grant(b, r);
    return;
  }
  if (b.partitions.has_live_children()) {
    trace_.emit_step("defer-acquire " + format(b.id) + " by " + format(r.task) +
                     " live-partitions");
  }
  b.waiting.push_back(r);
}

void Runtime::process_waiting(BlockObject& b) {
  while (!b.waiting.empty() && grantable(b, b.waiting.front())) {
    AcquireRequest r = b.waiting.front();
    b.waiting.pop_front();
    grant(b, r);
  }
}

void Runtime::on_acquire_grant(const AcquireGrant& g) {
  TaskObject& t = task_at(g.task);
  if (t.state != TaskObject::State::Acquiring || t.next_acquisition >= t.acquisitions.size()) {
    fail(ErrorKind::ProtocolError, "unexpected grant for " + format(g.task));
  }
  const auto& a = t.acquisitions[t.next_acquisition];
  t.held.push_back(HeldGrant{g.block, a.mode, true});
  if (g.open_failed) t.slots[g.slot].open_failed = true;
  ++t.next_acquisition;
  request_next_acquisition(t);
}

void Runtime::run_task(const GlobalId& id) {
  TaskObject& t = task_at(id);
  if (t.state != TaskObject::State::Ready) fail(ErrorKind::ProtocolError, "task not ready");
  trace_.advance();
  trace_.emit_step("run-task " + format(id) + " template=" + t.info.name);
  ++tasks_executed_;

  std::vector<DepRecord> deps(t.slots.size());
  for (std::size_t i = 0; i < t.slots.size(); ++i) {
    const SlotState& s = t.slots[i];
    deps[i].guid = s.payload;
    deps[i].open_failed = s.open_failed;
    const AccessMode mode = effective_mode(s);
    if (mode != AccessMode::Null && !s.open_failed) {
      deps[i].view.emplace(*this, s.payload.global(), id, mode);
    }
  }
  Context ctx(*this, Frame{next_context(), id.node, id, false, std::nullopt});
  const std::vector<std::uint64_t> params = t.params;
  Identifier result = t.info.entry(ctx, params, deps);
  finish_task(task_at(id), result);
}

void Runtime::finish_task(TaskObject& t, const Identifier& result) {
  t.state = TaskObject::State::Done;
  for (auto& h : t.held) {
    if (!h.active) continue;
    h.active = false;
    post(t.id.node, ReleaseNotice{h.block, t.id});
  }
  if (t.output_event) post(t.id.node, Satisfy{*t.output_event, 0, result});
}

void Runtime::on_release(const ReleaseNotice& m) {
  BlockObject& b = block_at(m.block.global());
  std::erase_if(b.grants, [&](const Grant& g) { return g.holder == m.holder; });
  process_waiting(b);
  maybe_finalize(b);
}

void Runtime::on_destroy(const DestroyObject& m) {
  const GlobalId target = m.target.global();
  switch (target.kind) {
    case ObjectKind::DataBlock: {
      auto it = blocks_.find(target);
      if (it == blocks_.end() || it->second.destroyed || it->second.destroy_requested) {
        fail(ErrorKind::InvalidId, format(target) + " destroyed twice");
      }
      BlockObject& b = it->second;
      if (m.holder) {
        std::erase_if(b.grants, [&](const Grant& g) { return g.holder == *m.holder; });
      }
      request_destroy(b);
      return;
    }
    case ObjectKind::Map: {
      MapObject& mp = map_at(target);
      mp.destroyed = true;
      trace_.emit_step("destroyed " + format(target));
      return;
    }
    case ObjectKind::Event: {
      event_at(target).destroyed = true;
      return;
    }
    default:
      fail(ErrorKind::InvalidId, format(target) + " cannot be destroyed by message");
  }
}

void Runtime::request_destroy(BlockObject& b) {
  if (b.destroy_requested) return;
  b.destroy_requested = true;
  process_waiting(b);
  maybe_finalize(b);
}

void Runtime::maybe_finalize(BlockObject& b) {
  if (!b.destroy_requested || b.destroyed) return;
  if (!b.grants.empty() || b.partitions.has_live_children()) return;

  if (b.file && !b.is_descriptor && b.written) write_back(b);
  b.destroyed = true;
  trace_.emit_step("destroyed " + format(b.id));

  if (b.copy_source) {
    auto it = blocks_.find(*b.copy_source);
    if (it != blocks_.end()) it->second.copy_aliases.erase(b.id);
  }
  if (b.file && !b.is_descriptor) {
    FileObject& f = file_at(*b.file);
    for (auto& c : f.chunks) {
      if (c.block == b.id) c.live = false;
    }
    maybe_close(f);
  }
  b.storage.reset();
  if (b.parent) {
    BlockObject& p = blocks_.at(*b.parent);
    p.partitions.mark_destroyed(b.id);
    process_waiting(p);
    maybe_finalize(p);
  }
}

}  // namespace ocrx
