#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "ocrx/ids.hpp"

namespace ocrx {

class Context;
struct DepRecord;

enum class AccessMode : std::uint8_t { Default, Null, RO, Const, RW, EW };

std::string_view to_string(AccessMode mode);

inline bool is_writing(AccessMode m) {
  return m == AccessMode::RW || m == AccessMode::EW;
}

// Task entry point. The returned identifier satisfies the task's output
// event.
using TaskFn = Identifier (*)(Context& ctx, std::span<const std::uint64_t> params,
                              std::span<DepRecord> deps);

// Map creator. Must create exactly one object bound to `object_lid` through
// one of the Context::*_mapped calls.
using CreatorFn = void (*)(Context& ctx, Identifier& object_lid, std::uint64_t index,
                           std::span<const std::uint64_t> params,
                           std::span<const Identifier> guids);

template <class Tag>
struct Flags {
  std::uint32_t bits = 0;

  constexpr bool has(Flags other) const { return (bits & other.bits) == other.bits && other.bits; }
  constexpr Flags operator|(Flags other) const { return Flags{bits | other.bits}; }
  constexpr bool operator==(const Flags&) const = default;
};

struct EdtTag {};
struct DbTag {};
struct PartitionTag {};
struct CopyTag {};

using EdtProps = Flags<EdtTag>;
using DbProps = Flags<DbTag>;
using PartitionProps = Flags<PartitionTag>;
using CopyType = Flags<CopyTag>;

namespace props {
inline constexpr EdtProps kEdtNone{0};
// Request a local identifier instead of blocking for the global one.
inline constexpr EdtProps kEdtLid{1u << 0};

inline constexpr DbProps kDbNone{0};
// No view is returned and storage is allocated lazily.
inline constexpr DbProps kDbNoAcquire{1u << 0};

inline constexpr PartitionProps kPartitionNone{0};
inline constexpr PartitionProps kPartitionStatic{1u << 0};

inline constexpr CopyType kCopyPlain{0};
inline constexpr CopyType kCopyPartition{1u << 0};
inline constexpr CopyType kCopyPartitionBack{1u << 1};
inline constexpr std::uint32_t kCopyKnownBits = (1u << 0) | (1u << 1);
}  // namespace props

std::string copy_type_name(CopyType t);

// Template contents are copied into every task created from it, so a
// template may be destroyed while its tasks are still pending.
struct TemplateInfo {
  std::string name;
  TaskFn entry = nullptr;
  std::uint32_t paramc = 0;
  std::uint32_t depc = 0;
};

}  // namespace ocrx
