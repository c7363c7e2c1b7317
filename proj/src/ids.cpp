#include "ocrx/ids.hpp"

#include "ocrx/errors.hpp"

namespace ocrx {

std::string_view to_string(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::Task: return "Task";
    case ObjectKind::TaskTemplate: return "Template";
    case ObjectKind::Event: return "Event";
    case ObjectKind::DataBlock: return "DataBlock";
    case ObjectKind::Map: return "Map";
    case ObjectKind::File: return "File";
  }
  return "?";
}

std::string_view to_string(IdClass c) {
  switch (c) {
    case IdClass::Guid: return "Guid";
    case IdClass::Lid: return "Lid";
    case IdClass::Unknown: return "Unknown";
  }
  return "?";
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidId: return "InvalidId";
    case ErrorKind::BadArity: return "BadArity";
    case ErrorKind::BadSlot: return "BadSlot";
    case ErrorKind::SlotOccupied: return "SlotOccupied";
    case ErrorKind::AlreadySatisfied: return "AlreadySatisfied";
    case ErrorKind::BadSize: return "BadSize";
    case ErrorKind::BadMode: return "BadMode";
    case ErrorKind::NotAcquired: return "NotAcquired";
    case ErrorKind::NotWritable: return "NotWritable";
    case ErrorKind::LidOwnershipViolation: return "LidOwnershipViolation";
    case ErrorKind::DeadlockDetected: return "DeadlockDetected";
    case ErrorKind::BadIndex: return "BadIndex";
    case ErrorKind::CreatorContractViolation: return "CreatorContractViolation";
    case ErrorKind::OpenFailed: return "OpenFailed";
    case ErrorKind::BadDescriptor: return "BadDescriptor";
    case ErrorKind::ChunkOverlap: return "ChunkOverlap";
    case ErrorKind::BadRange: return "BadRange";
    case ErrorKind::FileReleased: return "FileReleased";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::PartitionOverlap: return "PartitionOverlap";
    case ErrorKind::StaticPartitioned: return "StaticPartitioned";
    case ErrorKind::PartitionDeadlock: return "PartitionDeadlock";
    case ErrorKind::PartitionProtocolViolation:
      return "PartitionProtocolViolation";
    case ErrorKind::BadCopyType: return "BadCopyType";
    case ErrorKind::DestroyedTarget: return "DestroyedTarget";
    case ErrorKind::ProtocolError: return "ProtocolError";
  }
  return "?";
}

IdClass classify(const Identifier& id, ContextId caller) {
  if (id.is_global()) return IdClass::Guid;
  if (id.is_local() && id.local().owner == caller) return IdClass::Lid;
  return IdClass::Unknown;
}

std::string format(const GlobalId& g) {
  return "G" + std::to_string(g.node) + "." + std::to_string(g.sequence) + ":" +
         std::string(to_string(g.kind));
}

std::string format(const LocalId& l) {
  return "L" + std::to_string(l.owner.value) + "." + std::to_string(l.sequence);
}

std::string format(const Identifier& id) {
  if (id.is_global()) return format(id.global());
  if (id.is_local()) return format(id.local());
  if (id.is_uninitialized()) return "UNINIT";
  return "NULL";
}

void store_u64le(std::span<std::byte> out, std::uint64_t v) {
  for (std::size_t i = 0; i < 8; ++i) {
    out[i] = static_cast<std::byte>((v >> (8 * i)) & 0xffu);
  }
}

std::uint64_t load_u64le(std::span<const std::byte> in) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  }
  return v;
}

namespace {

constexpr std::uint32_t kUninitializedKind = 0xffffffffu;

void store_u32le(std::span<std::byte> out, std::uint32_t v) {
  for (std::size_t i = 0; i < 4; ++i) {
    out[i] = static_cast<std::byte>((v >> (8 * i)) & 0xffu);
  }
}

std::uint32_t load_u32le(std::span<const std::byte> in) {
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(in[i]) << (8 * i);
  }
  return v;
}

}  // namespace

void serialize_id(const Identifier& id, std::span<std::byte> out) {
  if (out.size() < kSerializedIdSize) {
    fail(ErrorKind::BadRange, "identifier needs 16 bytes");
  }
  if (id.is_local()) {
    fail(ErrorKind::LidOwnershipViolation,
         "local identifier " + format(id) + " cannot be stored in a data block");
  }
  std::uint64_t seq = 0;
  std::uint32_t node = 0;
  std::uint32_t kind = 0;
  if (id.is_global()) {
    seq = id.global().sequence;
    node = id.global().node;
    kind = static_cast<std::uint32_t>(id.global().kind);
  } else if (id.is_uninitialized()) {
    kind = kUninitializedKind;
  }
  store_u64le(out.subspan(0, 8), seq);
  store_u32le(out.subspan(8, 4), node);
  store_u32le(out.subspan(12, 4), kind);
}

Identifier deserialize_id(std::span<const std::byte> in) {
  if (in.size() < kSerializedIdSize) {
    fail(ErrorKind::BadRange, "identifier needs 16 bytes");
  }
  const std::uint64_t seq = load_u64le(in.subspan(0, 8));
  const std::uint32_t node = load_u32le(in.subspan(8, 4));
  const std::uint32_t kind = load_u32le(in.subspan(12, 4));
  if (seq == 0) {
    if (kind == kUninitializedKind) return Identifier::uninitialized();
    return Identifier::null();
  }
  if (kind < static_cast<std::uint32_t>(ObjectKind::Task) ||
      kind > static_cast<std::uint32_t>(ObjectKind::File)) {
    fail(ErrorKind::InvalidId, "serialized identifier has unknown kind");
  }
  return GlobalId{node, seq, static_cast<ObjectKind>(kind)};
}

GlobalId GuidIssuer::next(NodeIndex node, ObjectKind kind) {
  auto& last = last_.at(node);
  ++last;
  return GlobalId{node, last, kind};
}

}  // namespace ocrx
