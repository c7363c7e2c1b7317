#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ocrx {

using NodeIndex = std::uint32_t;

enum class ObjectKind : std::uint8_t {
  Task = 1,
  TaskTemplate,
  Event,
  DataBlock,
  Map,
  File,
};

std::string_view to_string(ObjectKind kind);

// Identity of an execution context (a running task or a creator invocation).
// Local identifiers are scoped to one of these.
struct ContextId {
  std::uint64_t value = 0;
  auto operator<=>(const ContextId&) const = default;
};

// Runtime-wide identifier: the home node, the node-local sequence number and
// the object kind. The node component is also the object's home.
struct GlobalId {
  NodeIndex node = 0;
  std::uint64_t sequence = 0;
  ObjectKind kind = ObjectKind::Task;

  auto operator<=>(const GlobalId&) const = default;
};

// Identifier valid only for API calls made by the context that created it.
struct LocalId {
  ContextId owner;
  std::uint64_t sequence = 0;

  auto operator<=>(const LocalId&) const = default;
};

enum class IdClass { Guid, Lid, Unknown };

std::string_view to_string(IdClass c);

class Identifier {
 public:
  struct NullTag {
    auto operator<=>(const NullTag&) const = default;
  };
  struct UninitializedTag {
    auto operator<=>(const UninitializedTag&) const = default;
  };

  Identifier() = default;  // Null
  Identifier(GlobalId g) : value_(g) {}
  Identifier(LocalId l) : value_(l) {}

  static Identifier null() { return Identifier(); }
  static Identifier uninitialized() {
    Identifier id;
    id.value_ = UninitializedTag{};
    return id;
  }

  bool is_null() const { return std::holds_alternative<NullTag>(value_); }
  bool is_uninitialized() const {
    return std::holds_alternative<UninitializedTag>(value_);
  }
  bool is_global() const { return std::holds_alternative<GlobalId>(value_); }
  bool is_local() const { return std::holds_alternative<LocalId>(value_); }

  const GlobalId& global() const { return std::get<GlobalId>(value_); }
  const LocalId& local() const { return std::get<LocalId>(value_); }

  std::optional<GlobalId> as_global() const {
    if (is_global()) return global();
    return std::nullopt;
  }

  bool operator==(const Identifier&) const = default;
  auto operator<=>(const Identifier&) const = default;

 private:
  std::variant<NullTag, UninitializedTag, GlobalId, LocalId> value_;
};

// Classifies `id` from the point of view of context `caller`.
IdClass classify(const Identifier& id, ContextId caller);

std::string format(const GlobalId& g);
std::string format(const LocalId& l);
std::string format(const Identifier& id);

// Serialized identifiers occupy 16 bytes: sequence u64LE, node u32LE,
// kind u32LE. All-zero is Null. Local identifiers cannot be serialized.
inline constexpr std::size_t kSerializedIdSize = 16;

void serialize_id(const Identifier& id, std::span<std::byte> out);
Identifier deserialize_id(std::span<const std::byte> in);

void store_u64le(std::span<std::byte> out, std::uint64_t v);
std::uint64_t load_u64le(std::span<const std::byte> in);

// Per-node sequence counters. Sequence 0 is reserved for Null.
class GuidIssuer {
 public:
  explicit GuidIssuer(std::size_t nodes) : last_(nodes, 0) {}

  GlobalId next(NodeIndex node, ObjectKind kind);
  std::size_t nodes() const { return last_.size(); }
  std::uint64_t issued(NodeIndex node) const { return last_.at(node); }

 private:
  std::vector<std::uint64_t> last_;
};

}  // namespace ocrx
