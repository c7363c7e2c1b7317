#include "ocrx/runtime.hpp"

#include <sstream>

namespace ocrx {

std::string_view to_string(LidMode m) { return m == LidMode::Eager ? "eager" : "deferred"; }

std::string_view to_string(Placement p) {
  return p == Placement::Local ? "local" : "round-robin";
}

std::string_view to_string(PartitionImpl p) {
  return p == PartitionImpl::Eager ? "eager" : "zero-copy";
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Success: return "Success";
    case Outcome::DeadlockDetected: return "DeadlockDetected";
    case Outcome::Error: return "Error";
  }
  return "?";
}

TaskFn FunctionRegistry::task(std::string_view name) const {
  auto it = tasks_.find(name);
  if (it == tasks_.end()) fail(ErrorKind::InvalidId, "no task function '" + std::string(name) + "'");
  return it->second;
}

CreatorFn FunctionRegistry::creator(std::string_view name) const {
  auto it = creators_.find(name);
  if (it == creators_.end()) {
    fail(ErrorKind::InvalidId, "no creator function '" + std::string(name) + "'");
  }
  return it->second;
}

std::int64_t Recorder::counter(const std::string& key) const {
  auto it = counters_.find(key);
  return it == counters_.end() ? 0 : it->second;
}

Runtime::Runtime(RuntimeConfig cfg, const FunctionRegistry& registry)
    : cfg_(std::move(cfg)),
      registry_(registry),
      owned_choices_(std::make_unique<SeededChoice>(cfg_.seed)),
      choices_(*owned_choices_),
      substrate_(cfg_.nodes, choices_, trace_),
      issuer_(cfg_.nodes),
      placement_counter_(cfg_.nodes, 0) {
  substrate_.set_handler([this](const Message& m) { dispatch(m); });
}

Runtime::Runtime(RuntimeConfig cfg, const FunctionRegistry& registry, ChoiceSource& choices)
    : cfg_(std::move(cfg)),
      registry_(registry),
      choices_(choices),
      substrate_(cfg_.nodes, choices_, trace_),
      issuer_(cfg_.nodes),
      placement_counter_(cfg_.nodes, 0) {
  substrate_.set_handler([this](const Message& m) { dispatch(m); });
}

Runtime::~Runtime() { close_files(); }

GlobalId Runtime::launch(std::string_view main_fn) {
  TemplateInfo info{std::string(main_fn), registry_.task(main_fn), 0, 0};
  return create_task_at(0, info, {}, std::nullopt, false).task;
}

std::uint64_t Runtime::run_to_quiescence() {
  const std::uint64_t start = substrate_.deliveries();
  for (;;) {
    const std::size_t channels = substrate_.active_channels();
    const std::size_t tasks = shutdown_ ? 0 : ready_.size();
    if (channels + tasks == 0) break;
    const std::size_t c = choices_.choose(channels + tasks);
    if (c < channels) {
      substrate_.deliver_from(c);
    } else {
      GlobalId id = ready_[c - channels];
      ready_.erase(ready_.begin() + static_cast<std::ptrdiff_t>(c - channels));
      run_task(id);
    }
  }
  close_files();
  if (!shutdown_) fail(ErrorKind::DeadlockDetected, describe_stall());
  return substrate_.deliveries() - start;
}

RunResult Runtime::run() {
  RunResult r;
  try {
    run_to_quiescence();
  } catch (const RuntimeError& e) {
    r.outcome = e.kind() == ErrorKind::DeadlockDetected ? Outcome::DeadlockDetected : Outcome::Error;
    r.error = e.kind();
    r.message = e.what();
    trace_.emit_step("error " + r.message);
    close_files();
  }
  return r;
}

bool Runtime::deliver_next() { return substrate_.deliver_next().has_value(); }

Context Runtime::external_context(NodeIndex node) {
  if (node >= cfg_.nodes) fail(ErrorKind::ProtocolError, "no such node");
  return Context(*this, Frame{ContextId{0}, node, std::nullopt, false, std::nullopt});
}

RunStats Runtime::stats() const {
  return RunStats{tasks_executed_, substrate_.deliveries(), bytes_copied_, cow_copies_,
                  creator_invocations_};
}

std::string Runtime::describe_stall() const {
  std::size_t waiting = 0;
  for (const auto& [id, t] : tasks_) {
    if (t.state == TaskObject::State::Waiting || t.state == TaskObject::State::Acquiring) ++waiting;
  }
  std::ostringstream os;
  os << "quiescent without shutdown: " << waiting << " waiting tasks, " << ready_.size()
     << " ready tasks, " << lids_.deferred_count() << " deferred messages";
  for (const auto& lid : lids_.blocking_lids()) os << " " << format(lid);
  return os.str();
}

void Runtime::post(NodeIndex origin, Payload payload) {
  Message msg{origin, 0, std::move(payload)};
  lids_.patch(msg.payload);
  auto pending = lids_.unresolved_in(msg.payload);
  if (!pending.empty()) {
    std::string line = "defer " + std::string(to_string(msg.kind())) + " " +
                       summarize(msg.payload) + " awaiting";
    for (const auto& l : pending) line += " " + format(l);
    trace_.emit_step(line);
    lids_.defer(std::move(msg));
    return;
  }
  msg.target = route(msg.payload);
  substrate_.send(std::move(msg));
}

void Runtime::release(Message msg) {
  msg.target = route(msg.payload);
  substrate_.send(std::move(msg));
}

void Runtime::resolve(const ResolutionRecord& rec) {
  trace_.emit_step("resolve " + format(rec.lid) + " -> " + format(rec.guid));
  for (auto& msg : lids_.resolve(rec)) release(std::move(msg));
}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

struct DepthGuard {
  int& d;
  explicit DepthGuard(int& depth) : d(depth) { ++d; }
  ~DepthGuard() { --d; }
};

}  // namespace

void Runtime::dispatch(const Message& msg) {
  DepthGuard guard(handler_depth_);
  std::visit(Overloaded{
                 [&](const CreateObject& m) { on_create(msg, m); },
                 [&](const AddDependence& m) { on_add_dependence(m); },
                 [&](const Satisfy& m) { on_satisfy(m); },
                 [&](const MapResolution& m) {
                   resolve(ResolutionRecord{m.lid, m.guid, msg.origin});
                 },
                 [&](const MapGet& m) { on_map_get(m); },
                 [&](const AcquireRequest& m) { on_acquire_request(m); },
                 [&](const AcquireGrant& m) { on_acquire_grant(m); },
                 [&](const ReleaseNotice& m) { on_release(m); },
                 [&](const DestroyObject& m) { on_destroy(m); },
                 [&](const CopyData& m) { on_copy(m); },
                 [&](const FileOp& m) { on_file_op(m); },
             },
             msg.payload);
}

void Runtime::on_create(const Message& msg, const CreateObject& m) {
  (void)msg;
  std::visit(
      Overloaded{
          [&](const CreateTaskSpec& s) {
            NewTask nt = create_task_at(s.home, s.info, s.params, s.deps, s.output_event);
            post(s.home, MapResolution{s.reply_to, s.task_lid, nt.task});
            if (s.event_lid) post(s.home, MapResolution{s.reply_to, *s.event_lid, *nt.event});
          },
          [&](const CreateEventSpec& s) {
            GlobalId g = create_event_at(s.home);
            post(s.home, MapResolution{s.reply_to, s.lid, g});
          },
          [&](const CreateMapSpec& s) {
            GlobalId g = create_map_at(s.home, s);
            post(s.home, MapResolution{s.reply_to, s.lid, g});
          },
          [&](const CreatePartitionsSpec& s) {
            const GlobalId block = s.block.global();
            auto ids = create_partitions_at(block, s.ranges, s.props);
            for (std::size_t i = 0; i < ids.size(); ++i) {
              post(block.node, MapResolution{s.reply_to, s.lids[i], ids[i]});
            }
          },
          [&](const CreateChunkSpec& s) {
            const GlobalId file = s.file.global();
            GlobalId g = create_chunk_at(file, s.offset, s.size);
            post(file.node, MapResolution{s.reply_to, s.lid, g});
          },
      },
      m.spec);
}

void Runtime::pump_until(const Frame& frame, const std::function<bool()>& done) {
  if (frame.handler || handler_depth_ > 0) {
    if (done()) return;
    fail(ErrorKind::ProtocolError, "blocking call inside a message handler");
  }
  while (!done()) {
    if (substrate_.idle()) {
      fail(ErrorKind::DeadlockDetected, "blocking call cannot complete: no messages in flight");
    }
    substrate_.deliver_next();
  }
}

GlobalId Runtime::await_global(const Frame& frame, const LocalId& lid) {
  pump_until(frame, [&] { return lids_.lookup(lid).has_value(); });
  return *lids_.lookup(lid);
}

NodeIndex Runtime::place(const Frame& frame) {
  if (frame.handler || cfg_.placement == Placement::Local) return frame.node;
  const NodeIndex n = frame.node;
  return static_cast<NodeIndex>((n + ++placement_counter_[n]) % cfg_.nodes);
}

TaskObject& Runtime::task_at(const GlobalId& id) {
  auto it = tasks_.find(id);
  if (it == tasks_.end() || id.kind != ObjectKind::Task) {
    fail(ErrorKind::InvalidId, format(id) + " is not a task");
  }
  return it->second;
}

BlockObject& Runtime::block_at(const GlobalId& id) {
  auto it = blocks_.find(id);
  if (it == blocks_.end()) fail(ErrorKind::InvalidId, format(id) + " is not a data block");
  if (it->second.destroyed) fail(ErrorKind::DestroyedTarget, format(id) + " was destroyed");
  return it->second;
}

EventObject& Runtime::event_at(const GlobalId& id) {
  auto it = events_.find(id);
  if (it == events_.end()) fail(ErrorKind::InvalidId, format(id) + " is not an event");
  if (it->second.destroyed) fail(ErrorKind::DestroyedTarget, format(id) + " was destroyed");
  return it->second;
}

MapObject& Runtime::map_at(const GlobalId& id) {
  auto it = maps_.find(id);
  if (it == maps_.end() || it->second.destroyed) {
    fail(ErrorKind::InvalidId, format(id) + " is not a live map");
  }
  return it->second;
}

FileObject& Runtime::file_at(const GlobalId& id) {
  auto it = files_.find(id);
  if (it == files_.end()) fail(ErrorKind::InvalidId, format(id) + " is not a file");
  return it->second;
}

const TaskObject* Runtime::find_task(const GlobalId& id) const {
  auto it = tasks_.find(id);
  return it == tasks_.end() ? nullptr : &it->second;
}

const BlockObject* Runtime::find_block(const GlobalId& id) const {
  auto it = blocks_.find(id);
  return it == blocks_.end() ? nullptr : &it->second;
}

const MapObject* Runtime::find_map(const GlobalId& id) const {
  auto it = maps_.find(id);
  return it == maps_.end() ? nullptr : &it->second;
}

const FileObject* Runtime::find_file(const GlobalId& id) const {
  auto it = files_.find(id);
  return it == files_.end() ? nullptr : &it->second;
}

const EventObject* Runtime::find_event(const GlobalId& id) const {
  auto it = events_.find(id);
  return it == events_.end() ? nullptr : &it->second;
}

}  // namespace ocrx
