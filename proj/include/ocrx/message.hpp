#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "ocrx/ids.hpp"
#include "ocrx/types.hpp"

namespace ocrx {

enum class MessageKind {
  CreateObject,
  AddDependence,
  Satisfy,
  MapResolution,
  MapGet,
  AcquireRequest,
  AcquireGrant,
  ReleaseNotice,
  DestroyObject,
  CopyData,
  FileOp,
};

std::string_view to_string(MessageKind kind);

struct PartitionRange {
  std::uint64_t offset = 0;
  std::uint64_t size = 0;
};

// Creation requests. The LocalIds here name the object being created; they
// are bindings, not references, and never hold a message back.

struct CreateTaskSpec {
  NodeIndex home = 0;
  NodeIndex reply_to = 0;
  TemplateInfo info;
  std::vector<std::uint64_t> params;
  std::vector<Identifier> deps;
  bool output_event = false;
  LocalId task_lid;
  std::optional<LocalId> event_lid;
};

struct CreateEventSpec {
  NodeIndex home = 0;
  NodeIndex reply_to = 0;
  LocalId lid;
};

struct CreateMapSpec {
  NodeIndex home = 0;
  NodeIndex reply_to = 0;
  std::uint64_t size = 0;
  std::string creator;
  std::vector<std::uint64_t> params;
  std::vector<Identifier> guids;
  LocalId lid;
};

struct CreatePartitionsSpec {
  NodeIndex reply_to = 0;
  Identifier block;
  std::vector<PartitionRange> ranges;
  PartitionProps props;
  std::vector<LocalId> lids;
};

struct CreateChunkSpec {
  NodeIndex reply_to = 0;
  Identifier file;
  std::uint64_t offset = 0;
  std::uint64_t size = 0;
  LocalId lid;
};

struct CreateObject {
  std::variant<CreateTaskSpec, CreateEventSpec, CreateMapSpec, CreatePartitionsSpec,
               CreateChunkSpec>
      spec;
};

struct AddDependence {
  Identifier source;
  Identifier dest;
  std::uint32_t slot = 0;
  AccessMode mode = AccessMode::Default;
  // false: connect the destination slot (routed to the destination's home);
  // true: register the sink at a source event (routed to the event's home).
  bool register_sink = false;
};

struct Satisfy {
  Identifier dest;
  std::uint32_t slot = 0;
  Identifier payload;
};

struct MapResolution {
  NodeIndex reply_to = 0;
  LocalId lid;
  GlobalId guid;
};

struct MapGet {
  NodeIndex reply_to = 0;
  Identifier map;
  std::uint64_t index = 0;
  LocalId lid;
};

struct AcquireRequest {
  GlobalId block;
  GlobalId task;
  std::uint32_t slot = 0;
  AccessMode mode = AccessMode::RO;
};

struct AcquireGrant {
  GlobalId block;
  GlobalId task;
  std::uint32_t slot = 0;
  bool open_failed = false;
};

struct ReleaseNotice {
  Identifier block;
  GlobalId holder;
};

struct DestroyObject {
  Identifier target;
  // Grants of this holder on the target are dropped first.
  std::optional<GlobalId> holder;
};

struct CopyData {
  Identifier dest;
  std::uint64_t dest_offset = 0;
  Identifier source;
  std::uint64_t source_offset = 0;
  std::uint64_t size = 0;
  CopyType type;
  GlobalId completion;
};

struct FileOp {
  enum class Op { Open, Release };
  Op op = Op::Open;
  Identifier file;
};

using Payload = std::variant<CreateObject, AddDependence, Satisfy, MapResolution, MapGet,
                             AcquireRequest, AcquireGrant, ReleaseNotice, DestroyObject,
                             CopyData, FileOp>;

MessageKind kind_of(const Payload& p);

// Calls `f(Identifier&)` for every identifier the payload refers to.
// Binding LocalIds of creation requests are not visited.
template <class P, class F>
  requires std::is_same_v<std::remove_const_t<P>, Payload>
void for_each_reference(P& p, F&& f) {
  std::visit(
      [&](auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CreateObject>) {
          std::visit(
              [&](auto& s) {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, CreateTaskSpec>) {
                  for (auto& d : s.deps) f(d);
                } else if constexpr (std::is_same_v<S, CreateMapSpec>) {
                  for (auto& g : s.guids) f(g);
                } else if constexpr (std::is_same_v<S, CreatePartitionsSpec>) {
                  f(s.block);
                } else if constexpr (std::is_same_v<S, CreateChunkSpec>) {
                  f(s.file);
                }
              },
              m.spec);
        } else if constexpr (std::is_same_v<T, AddDependence>) {
          f(m.source);
          f(m.dest);
        } else if constexpr (std::is_same_v<T, Satisfy>) {
          f(m.dest);
          f(m.payload);
        } else if constexpr (std::is_same_v<T, MapGet>) {
          f(m.map);
        } else if constexpr (std::is_same_v<T, ReleaseNotice>) {
          f(m.block);
        } else if constexpr (std::is_same_v<T, DestroyObject>) {
          f(m.target);
        } else if constexpr (std::is_same_v<T, CopyData>) {
          f(m.dest);
          f(m.source);
        } else if constexpr (std::is_same_v<T, FileOp>) {
          f(m.file);
        }
      },
      p);
}

bool has_local_reference(const Payload& p);

// Destination node of a fully patched payload.
NodeIndex route(const Payload& p);

std::string summarize(const Payload& p);

struct Message {
  NodeIndex origin = 0;
  NodeIndex target = 0;
  Payload payload;

  MessageKind kind() const { return kind_of(payload); }
};

}  // namespace ocrx
