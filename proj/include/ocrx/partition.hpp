#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ocrx/ids.hpp"
#include "ocrx/message.hpp"
#include "ocrx/types.hpp"

namespace ocrx {

// In/out record of dbPartition: offset and size go in, guid comes out.
struct PartitionDescriptor {
  std::uint64_t offset = 0;
  std::uint64_t size = 0;
  Identifier guid;
};

// Half-open byte ranges [a, a+n) and [b, b+m) intersect.
inline bool ranges_overlap(std::uint64_t a, std::uint64_t n, std::uint64_t b,
                           std::uint64_t m) {
  return n != 0 && m != 0 && a < b + m && b < a + n;
}

// Range [offset, offset+size) fits in `limit` bytes without overflow.
inline bool range_fits(std::uint64_t offset, std::uint64_t size, std::uint64_t limit) {
  return offset <= limit && size <= limit - offset;
}

// Partition bookkeeping of one data block.
//
// Ranges of destroyed partitions stay reserved: new partitions may overlap
// neither live nor previously created ones. The only way to reuse bytes is a
// static partitioning whose partitions have all been destroyed, after which
// the next call starts from a clean slate.
class PartitionTree {
 public:
  struct Child {
    std::uint64_t offset = 0;
    std::uint64_t size = 0;
    GlobalId block;
    bool live = true;
  };

  // Throws BadSize, BadRange, StaticPartitioned or PartitionOverlap if the
  // request is illegal. Has no effect otherwise.
  void validate(std::uint64_t parent_size, std::span<const PartitionRange> ranges,
                PartitionProps flags) const;

  // Validates, then records the new children.
  void admit(std::uint64_t parent_size, std::span<const PartitionRange> ranges,
             PartitionProps flags, std::span<const GlobalId> blocks);

  void mark_destroyed(const GlobalId& child);

  bool has_live_children() const;
  bool is_static() const { return static_; }
  const std::vector<Child>& children() const { return children_; }

 private:
  bool resets_on_next_call() const { return static_ && !has_live_children(); }

  bool static_ = false;
  std::vector<Child> children_;
};

}  // namespace ocrx
