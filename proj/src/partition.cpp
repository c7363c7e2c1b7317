#include "ocrx/partition.hpp"

#include <algorithm>

#include "ocrx/errors.hpp"

namespace ocrx {

void PartitionTree::validate(std::uint64_t parent_size, std::span<const PartitionRange> ranges,
                             PartitionProps flags) const {
  (void)flags;
  for (const auto& r : ranges) {
    if (r.size == 0) fail(ErrorKind::BadSize, "partition of size 0");
    if (!range_fits(r.offset, r.size, parent_size)) {
      fail(ErrorKind::BadRange, "partition [" + std::to_string(r.offset) + ", +" +
                                    std::to_string(r.size) + ") exceeds block of " +
                                    std::to_string(parent_size) + " bytes");
    }
  }
  if (static_ && has_live_children()) {
    fail(ErrorKind::StaticPartitioned, "block has live static partitions");
  }
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    for (std::size_t j = i + 1; j < ranges.size(); ++j) {
      if (ranges_overlap(ranges[i].offset, ranges[i].size, ranges[j].offset, ranges[j].size)) {
        fail(ErrorKind::PartitionOverlap, "requested partitions overlap each other");
      }
    }
  }
  if (resets_on_next_call()) return;
  for (const auto& r : ranges) {
    for (const auto& c : children_) {
      if (ranges_overlap(r.offset, r.size, c.offset, c.size)) {
        fail(ErrorKind::PartitionOverlap,
             "partition overlaps an existing partition at offset " + std::to_string(c.offset));
      }
    }
  }
}

void PartitionTree::admit(std::uint64_t parent_size, std::span<const PartitionRange> ranges,
                          PartitionProps flags, std::span<const GlobalId> blocks) {
  validate(parent_size, ranges, flags);
  if (blocks.size() != ranges.size()) {
    fail(ErrorKind::ProtocolError, "one block per partition range expected");
  }
  if (resets_on_next_call()) {
    children_.clear();
    static_ = false;
  }
  if (flags.has(props::kPartitionStatic)) static_ = true;
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    children_.push_back(Child{ranges[i].offset, ranges[i].size, blocks[i], true});
  }
}

void PartitionTree::mark_destroyed(const GlobalId& child) {
  for (auto& c : children_) {
    if (c.block == child) c.live = false;
  }
}

bool PartitionTree::has_live_children() const {
  return std::any_of(children_.begin(), children_.end(), [](const Child& c) { return c.live; });
}

}  // namespace ocrx
