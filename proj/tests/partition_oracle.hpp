#pragma once

#include <optional>
#include <set>
#include <vector>

#include "support.hpp"

namespace testing {

// Reference model of one block's partition bookkeeping, written against the
// byte-map checker rather than the library's range arithmetic.
class PartitionOracle {
 public:
  explicit PartitionOracle(std::uint64_t size) : size_(size), reserved_(size) {}

  std::optional<ErrorKind> request(const std::vector<PartitionRange>& ranges, bool make_static) {
    for (const auto& r : ranges) {
      if (r.size == 0) return ErrorKind::BadSize;
      if (r.offset > size_ || r.size > size_ - r.offset) return ErrorKind::BadRange;
    }
    if (static_ && !live_.empty()) return ErrorKind::StaticPartitioned;
    const bool fresh = static_ && live_.empty();
    IntervalChecker scratch = fresh ? IntervalChecker(size_) : reserved_;
    int who = next_;
    for (const auto& r : ranges) {
      if (!scratch.claim(r.offset, r.size, who++)) return ErrorKind::PartitionOverlap;
    }
    if (fresh) static_ = false;
    if (make_static) static_ = true;
    reserved_ = scratch;
    for (std::size_t i = 0; i < ranges.size(); ++i) live_.insert(next_++);
    return std::nullopt;
  }

  // children are numbered from 1 in admission order
  void destroy(int child) { live_.erase(child); }
  const std::set<int>& live() const { return live_; }
  int admitted() const { return next_ - 1; }

 private:
  std::uint64_t size_;
  IntervalChecker reserved_;
  std::set<int> live_;
  bool static_ = false;
  int next_ = 1;
};

struct PartitionCase {
  std::uint64_t size = 0;
  struct Step {
    std::vector<PartitionRange> ranges;
    bool make_static = false;
    std::vector<int> destroy_before;  // 1-based child numbers
  };
  std::vector<Step> steps;
};

inline PartitionCase random_partition_case(Gen& gen) {
  PartitionCase c;
  c.size = 1 + gen.below(256);
  const std::size_t steps = 1 + gen.below(4);
  int created = 0;
  for (std::size_t s = 0; s < steps; ++s) {
    PartitionCase::Step st;
    for (int i = 1; i <= created; ++i) {
      if (gen.below(3) == 0) st.destroy_before.push_back(i);
    }
    const std::size_t n = 1 + gen.below(4);
    for (std::size_t i = 0; i < n; ++i) {
      PartitionRange r;
      r.offset = gen.below(c.size + 8);
      // mostly small ranges so that legal sets are common
      r.size = gen.below(10) == 0 ? 0 : 1 + gen.below(gen.coin() ? c.size / 4 + 1 : c.size + 4);
      st.ranges.push_back(r);
    }
    st.make_static = gen.below(4) == 0;
    created += static_cast<int>(n);
    c.steps.push_back(std::move(st));
  }
  return c;
}

// Replays the case against both PartitionTree and the oracle; returns the
// number of disagreements.
inline int check_partition_case(const PartitionCase& c) {
  PartitionTree tree;
  PartitionOracle oracle(c.size);
  std::vector<GlobalId> ids;  // child number n is ids[n-1]
  std::uint64_t seq = 1;
  int mismatches = 0;
  for (const auto& st : c.steps) {
    for (int child : st.destroy_before) {
      if (child > static_cast<int>(ids.size())) continue;
      tree.mark_destroyed(ids[child - 1]);
      oracle.destroy(child);
    }
    std::vector<GlobalId> blocks;
    for (std::size_t i = 0; i < st.ranges.size(); ++i) {
      blocks.push_back(GlobalId{0, seq++, ObjectKind::DataBlock});
    }
    const auto expect = oracle.request(st.ranges, st.make_static);
    const auto got = error_of([&] {
      tree.admit(c.size, st.ranges, st.make_static ? props::kPartitionStatic : props::kPartitionNone,
                 blocks);
    });
    if (expect != got) ++mismatches;
    if (!got) ids.insert(ids.end(), blocks.begin(), blocks.end());

    // soundness: no two live children intersect
    const auto& kids = tree.children();
    for (std::size_t i = 0; i < kids.size(); ++i) {
      for (std::size_t j = i + 1; j < kids.size(); ++j) {
        if (kids[i].live && kids[j].live &&
            kids[i].offset < kids[j].offset + kids[j].size &&
            kids[j].offset < kids[i].offset + kids[i].size) {
          ++mismatches;
        }
      }
    }
  }
  return mismatches;
}

}  // namespace testing
