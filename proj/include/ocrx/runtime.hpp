#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ocrx/errors.hpp"
#include "ocrx/file_io.hpp"
#include "ocrx/ids.hpp"
#include "ocrx/lid_table.hpp"
#include "ocrx/message.hpp"
#include "ocrx/partition.hpp"
#include "ocrx/substrate.hpp"
#include "ocrx/types.hpp"

namespace ocrx {

enum class LidMode { Eager, Deferred };
enum class Placement { Local, RoundRobin };
enum class PartitionImpl { Eager, ZeroCopy };

std::string_view to_string(LidMode m);
std::string_view to_string(Placement p);
std::string_view to_string(PartitionImpl p);

struct RuntimeConfig {
  std::size_t nodes = 1;
  std::uint64_t seed = 1;
  LidMode mode = LidMode::Deferred;
  Placement placement = Placement::RoundRobin;
  PartitionImpl partition_impl = PartitionImpl::ZeroCopy;
  // Program input, e.g. the host file the file programs operate on.
  std::string fixture;
};

class FunctionRegistry {
 public:
  void add_task(std::string name, TaskFn fn) { tasks_[std::move(name)] = fn; }
  void add_creator(std::string name, CreatorFn fn) { creators_[std::move(name)] = fn; }

  TaskFn task(std::string_view name) const;
  CreatorFn creator(std::string_view name) const;

 private:
  std::map<std::string, TaskFn, std::less<>> tasks_;
  std::map<std::string, CreatorFn, std::less<>> creators_;
};

// Instrumentation channel from programs to the harness.
class Recorder {
 public:
  void count(const std::string& key, std::int64_t delta = 1) { counters_[key] += delta; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  void observe(const std::string& key, std::string value) {
    observations_[key].push_back(std::move(value));
  }

  std::int64_t counter(const std::string& key) const;
  const std::map<std::string, std::int64_t>& counters() const { return counters_; }
  const std::map<std::string, std::string>& values() const { return values_; }
  const std::map<std::string, std::vector<std::string>>& observations() const {
    return observations_;
  }

 private:
  std::map<std::string, std::int64_t> counters_;
  std::map<std::string, std::string> values_;
  std::map<std::string, std::vector<std::string>> observations_;
};

class Runtime;

// Accessor into a data block's bytes for the duration of a grant.
// Mutable access is refused for read-only grants and may trigger a
// copy-on-write detach.
class DbView {
 public:
  DbView(Runtime& rt, GlobalId block, GlobalId holder, AccessMode mode)
      : rt_(&rt), block_(block), holder_(holder), mode_(mode) {}

  GlobalId block() const { return block_; }
  AccessMode mode() const { return mode_; }
  std::size_t size() const;

  std::span<const std::byte> bytes() const;
  std::span<std::byte> mutable_bytes() const;

  template <class T>
  std::span<const T> as() const {
    auto b = bytes();
    return {reinterpret_cast<const T*>(b.data()), b.size() / sizeof(T)};
  }
  template <class T>
  std::span<T> mutable_as() const {
    auto b = mutable_bytes();
    return {reinterpret_cast<T*>(b.data()), b.size() / sizeof(T)};
  }

 private:
  Runtime* rt_;
  GlobalId block_;
  GlobalId holder_;
  AccessMode mode_;
};

// One satisfied pre-slot as seen by the running task.
struct DepRecord {
  Identifier guid;
  std::optional<DbView> view;
  // The slot carried a file descriptor or chunk whose open failed.
  bool open_failed = false;
};

struct EdtSpec {
  Identifier templ;
  std::optional<std::uint32_t> paramc;  // nullopt: take the template's count
  std::vector<std::uint64_t> params;
  std::optional<std::uint32_t> depc;
  std::optional<std::vector<Identifier>> deps;  // nullopt: all slots unconnected
  EdtProps props;
  bool output_event = false;
};

struct EdtCreated {
  Identifier task;
  Identifier output_event;  // Null unless requested
};

struct DbCreated {
  Identifier block;
  std::optional<DbView> view;
};

struct FileOpened {
  Identifier file;
  Identifier descriptor;  // Null unless requested
};

// Runtime objects. All are owned by the Runtime and mutated only by the
// handlers of their home node (the node component of their identifier).

struct SlotState {
  enum class Phase { Unconnected, Connected, Satisfied };
  Phase phase = Phase::Unconnected;
  AccessMode mode = AccessMode::Default;
  Identifier payload;
  bool open_failed = false;
};

struct HeldGrant {
  GlobalId block;
  AccessMode mode = AccessMode::RO;
  bool active = true;
};

struct TaskObject {
  enum class State { Waiting, Acquiring, Ready, Done };
  struct Acquisition {
    GlobalId block;
    std::uint32_t slot = 0;
    AccessMode mode = AccessMode::RO;
  };

  GlobalId id;
  TemplateInfo info;
  std::vector<std::uint64_t> params;
  std::vector<SlotState> slots;
  std::size_t satisfied = 0;
  std::optional<GlobalId> output_event;
  State state = State::Waiting;
  std::vector<Acquisition> acquisitions;
  std::size_t next_acquisition = 0;
  std::vector<HeldGrant> held;
};

struct EventObject {
  struct Sink {
    Identifier dest;
    std::uint32_t slot = 0;
  };
  GlobalId id;
  bool satisfied = false;
  Identifier payload;
  std::vector<Sink> sinks;
  bool destroyed = false;
};

struct TemplateObject {
  GlobalId id;
  TemplateInfo info;
  bool destroyed = false;
};

struct Grant {
  GlobalId holder;
  AccessMode mode = AccessMode::RO;
};

struct BlockObject {
  GlobalId id;
  std::uint64_t size = 0;
  // Possibly shared with partitions or copy aliases; null until allocated.
  std::shared_ptr<std::vector<std::byte>> storage;
  std::uint64_t offset = 0;

  std::vector<Grant> grants;
  std::deque<AcquireRequest> waiting;
  bool destroy_requested = false;
  bool destroyed = false;

  // Contents are available. False for file descriptors and chunks until
  // the file open completes.
  bool ready = true;
  bool open_failed = false;
  // Some grant was EW or RW.
  bool written = false;

  std::optional<GlobalId> file;  // descriptor or chunk of this file
  bool is_descriptor = false;
  std::uint64_t file_offset = 0;

  std::optional<GlobalId> parent;  // explicit partition of
  PartitionTree partitions;

  std::optional<GlobalId> copy_source;  // filled by a partitioning copy from
  std::set<GlobalId> copy_aliases;      // outstanding partitioning copies of this block
};

struct MapObject {
  struct Slot {
    enum class State { Empty, Creating, Created };
    State state = State::Empty;
    GlobalId guid;
    std::vector<std::pair<LocalId, NodeIndex>> waiters;
  };
  GlobalId id;
  std::uint64_t size = 0;
  std::string creator_name;
  CreatorFn creator = nullptr;
  std::vector<std::uint64_t> params;
  std::vector<Identifier> guids;
  std::vector<Slot> slots;
  bool destroyed = false;
};

struct FileObject {
  struct Chunk {
    std::uint64_t offset = 0;
    std::uint64_t size = 0;
    GlobalId block;
    bool live = true;
  };
  GlobalId id;
  std::string path;
  OpenMode mode;
  bool opened = false;
  bool open_failed = false;
  std::uint64_t size_at_open = 0;
  std::uint64_t current_size = 0;
  std::optional<GlobalId> descriptor;
  std::vector<Chunk> chunks;
  // fileRelease was called; no further chunks.
  bool released = false;
  bool closed = false;
  std::unique_ptr<std::fstream> stream;
};

struct RunStats {
  std::uint64_t tasks_executed = 0;
  std::uint64_t deliveries = 0;
  std::uint64_t bytes_bulk_copied = 0;
  std::uint64_t cow_copies = 0;
  std::uint64_t creator_invocations = 0;
};

// Execution scope of API calls: a running task, a creator invocation, or
// an external driver (tests, the harness).
struct Frame {
  ContextId id;
  NodeIndex node = 0;
  std::optional<GlobalId> task;
  bool handler = false;  // inside a message handler; may not block
  std::optional<LocalId> binding;  // creator invocations: the object LID
};

// The API surface handed to task bodies and creator functions.
class Context {
 public:
  Context(Runtime& rt, Frame frame) : rt_(rt), frame_(std::move(frame)) {}

  ContextId id() const { return frame_.id; }
  NodeIndex node() const { return frame_.node; }
  std::optional<GlobalId> task() const { return frame_.task; }

  IdClass getIdType(const Identifier& id) const;
  // Blocks (drives message delivery) until the identifier is resolved.
  GlobalId getGuid(const Identifier& id);

  Identifier edtTemplateCreate(std::string_view fn, std::uint32_t paramc, std::uint32_t depc);
  void edtTemplateDestroy(const Identifier& templ);
  EdtCreated edtCreate(const EdtSpec& spec);
  // Creator-only: creates the task bound to `object_lid` and stores its
  // global identifier back into it.
  void edtCreateMapped(Identifier& object_lid, const EdtSpec& spec);
  void addDependence(const Identifier& source, const Identifier& dest, std::uint32_t slot,
                     AccessMode mode);

  Identifier eventCreate(EdtProps props = props::kEdtNone);
  void eventCreateMapped(Identifier& object_lid);
  void eventSatisfy(const Identifier& event, const Identifier& payload);

  DbCreated dbCreate(std::uint64_t size, DbProps props = props::kDbNone);
  void dbCreateMapped(Identifier& object_lid, std::uint64_t size);
  void dbRelease(const Identifier& block);
  void dbDestroy(const Identifier& block);
  void shutdown();

  Identifier mapCreate(std::uint64_t size, std::string_view creator,
                       std::vector<std::uint64_t> params, std::vector<Identifier> guids);
  Identifier mapGet(const Identifier& map, std::uint64_t index);
  void mapDestroy(const Identifier& map);

  FileOpened fileOpen(std::string_view path, std::string_view mode, bool want_descriptor,
                      std::uint32_t properties = 0);
  Identifier fileGetChunk(const Identifier& file, std::uint64_t offset, std::uint64_t size);
  void fileRelease(const Identifier& file);

  void dbPartition(const Identifier& block, std::span<PartitionDescriptor> parts,
                   PartitionProps props = props::kPartitionNone);
  Identifier dbCopy(const Identifier& dest, std::uint64_t dest_offset, const Identifier& source,
                    std::uint64_t source_offset, std::uint64_t size, CopyType type);

  Recorder& recorder();
  const RuntimeConfig& config() const;
  std::uint64_t deliveries() const;

 private:
  void check_owned(const Identifier& id) const;
  Identifier resolved_or_self(const Identifier& id) const;
  bool wants_lid(EdtProps props) const;

  Runtime& rt_;
  Frame frame_;
};

enum class Outcome { Success, DeadlockDetected, Error };

std::string_view to_string(Outcome o);

struct RunResult {
  Outcome outcome = Outcome::Success;
  std::optional<ErrorKind> error;
  std::string message;
};

class Runtime {
 public:
  Runtime(RuntimeConfig cfg, const FunctionRegistry& registry);
  // Uses `choices` for every scheduling decision instead of the seed.
  Runtime(RuntimeConfig cfg, const FunctionRegistry& registry, ChoiceSource& choices);
  ~Runtime();

  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  // Creates the main task (no params, no pre-slots) on node 0.
  GlobalId launch(std::string_view main_fn);

  // Alternates message deliveries and task executions until quiescence.
  // Returns the number of deliveries. Throws RuntimeError (DeadlockDetected
  // when the run stalls before shutdown).
  std::uint64_t run_to_quiescence();

  // run_to_quiescence with errors folded into the result.
  RunResult run();

  // Delivers one message; false when idle.
  bool deliver_next();

  // API scope for code that is not a task (tests, drivers).
  Context external_context(NodeIndex node);

  const RuntimeConfig& config() const { return cfg_; }
  const TraceLog& trace() const { return trace_; }
  Recorder& recorder() { return recorder_; }
  const Recorder& recorder() const { return recorder_; }
  RunStats stats() const;
  bool shutdown_requested() const { return shutdown_; }
  const LidTable& lids() const { return lids_; }
  Substrate& substrate() { return substrate_; }

  const TaskObject* find_task(const GlobalId& id) const;
  const BlockObject* find_block(const GlobalId& id) const;
  const MapObject* find_map(const GlobalId& id) const;
  const FileObject* find_file(const GlobalId& id) const;
  const EventObject* find_event(const GlobalId& id) const;
  // Current bytes of a block (allocating it if necessary).
  std::vector<std::byte> block_contents(const GlobalId& id);

 private:
  friend class Context;
  friend class DbView;

  struct NewTask {
    GlobalId task;
    std::optional<GlobalId> event;
  };

  // messaging
  void post(NodeIndex origin, Payload payload);
  void release(Message msg);
  void dispatch(const Message& msg);
  void pump_until(const Frame& frame, const std::function<bool()>& done);
  GlobalId await_global(const Frame& frame, const LocalId& lid);
  void resolve(const ResolutionRecord& rec);
  NodeIndex place(const Frame& frame);
  ContextId next_context() { return ContextId{++context_counter_}; }

  // handlers
  void on_create(const Message& msg, const CreateObject& m);
  void on_add_dependence(const AddDependence& m);
  void on_satisfy(const Satisfy& m);
  void on_map_get(const MapGet& m);
  void on_acquire_request(const AcquireRequest& m);
  void on_acquire_grant(const AcquireGrant& m);
  void on_release(const ReleaseNotice& m);
  void on_destroy(const DestroyObject& m);
  void on_copy(const CopyData& m);
  void on_file_op(const FileOp& m);

  // task-runtime
  NewTask create_task_at(NodeIndex home, const TemplateInfo& info,
                         std::vector<std::uint64_t> params,
                         const std::optional<std::vector<Identifier>>& deps, bool output_event);
  GlobalId create_event_at(NodeIndex home);
  GlobalId create_block_at(NodeIndex home, std::uint64_t size, bool allocate);
  TemplateInfo template_for(const EdtSpec& spec) const;
  void satisfy_slot(TaskObject& t, std::uint32_t slot, const Identifier& payload);
  void satisfy_event(EventObject& ev, const Identifier& payload);
  void check_partition_deadlock(const TaskObject& t, std::uint32_t slot,
                                const Identifier& payload) const;
  void begin_acquire(TaskObject& t);
  void request_next_acquisition(TaskObject& t);
  void run_task(const GlobalId& id);
  void finish_task(TaskObject& t, const Identifier& result);
  AccessMode effective_mode(const SlotState& s) const;
  bool grantable(const BlockObject& b, const AcquireRequest& r) const;
  void grant(BlockObject& b, const AcquireRequest& r);
  void process_waiting(BlockObject& b);
  void request_destroy(BlockObject& b);
  void maybe_finalize(BlockObject& b);
  void mark_written(BlockObject& b);
  std::string describe_stall() const;
  TaskObject& task_at(const GlobalId& id);
  BlockObject& block_at(const GlobalId& id);
  EventObject& event_at(const GlobalId& id);
  MapObject& map_at(const GlobalId& id);
  FileObject& file_at(const GlobalId& id);

  // views and copy-on-write
  std::span<std::byte> view_span(const GlobalId& block, const GlobalId& holder, bool writable);
  void ensure_allocated(BlockObject& b);
  std::span<std::byte> bytes_of(BlockObject& b);
  void prepare_write(BlockObject& b, std::uint64_t offset, std::uint64_t size);
  bool sanctioned_alias(const BlockObject& writer, const BlockObject& other) const;
  bool holds(const GlobalId& holder, const GlobalId& block) const;
  GlobalId holder_of(const Frame& frame) const;
  std::vector<HeldGrant>& held_of(const GlobalId& holder);
  bool is_explicit_ancestor(const GlobalId& ancestor, const BlockObject& b) const;
  void detach(BlockObject& b);

  // labeled-map
  GlobalId create_map_at(NodeIndex home, const CreateMapSpec& spec);
  void bind_mapped(const Frame& frame, Identifier& object_lid, const GlobalId& guid);

  // file-io
  GlobalId create_chunk_at(const GlobalId& file, std::uint64_t offset, std::uint64_t size);
  void complete_open(FileObject& f);
  void fill_chunk(FileObject& f, BlockObject& chunk);
  void write_back(BlockObject& chunk);
  void maybe_close(FileObject& f);
  void close_files();

  // db-partition
  std::vector<GlobalId> create_partitions_at(const GlobalId& block,
                                             std::span<const PartitionRange> ranges,
                                             PartitionProps props);
  void copy_bytes(BlockObject& dest, std::uint64_t dest_offset, BlockObject& source,
                  std::uint64_t source_offset, std::uint64_t size);

  RuntimeConfig cfg_;
  const FunctionRegistry& registry_;
  std::unique_ptr<ChoiceSource> owned_choices_;
  ChoiceSource& choices_;
  TraceLog trace_;
  Substrate substrate_;
  GuidIssuer issuer_;
  LidTable lids_;
  Recorder recorder_;

  std::map<GlobalId, TaskObject> tasks_;
  std::map<GlobalId, EventObject> events_;
  std::map<GlobalId, TemplateObject> templates_;
  std::map<GlobalId, BlockObject> blocks_;
  std::map<GlobalId, MapObject> maps_;
  std::map<GlobalId, FileObject> files_;

  std::map<GlobalId, std::vector<HeldGrant>> external_held_;

  std::vector<GlobalId> ready_;
  std::vector<std::uint64_t> placement_counter_;
  std::uint64_t context_counter_ = 0;
  bool shutdown_ = false;
  int handler_depth_ = 0;

  std::uint64_t tasks_executed_ = 0;
  std::uint64_t bytes_copied_ = 0;
  std::uint64_t cow_copies_ = 0;
  std::uint64_t creator_invocations_ = 0;
};

}  // namespace ocrx
