#include <algorithm>
#include <cstring>
#include <set>

#include "ocrx/runtime.hpp"

namespace ocrx {

std::size_t DbView::size() const { return rt_->block_at(block_).size; }

std::span<const std::byte> DbView::bytes() const {
  return rt_->view_span(block_, holder_, false);
}

std::span<std::byte> DbView::mutable_bytes() const {
  if (!is_writing(mode_)) {
    fail(ErrorKind::NotWritable,
         format(block_) + " acquired " + std::string(to_string(mode_)));
  }
  return rt_->view_span(block_, holder_, true);
}

GlobalId Runtime::create_block_at(NodeIndex home, std::uint64_t size, bool allocate) {
  if (size == 0) fail(ErrorKind::BadSize, "data block of size 0");
  const GlobalId id = issuer_.next(home, ObjectKind::DataBlock);
  BlockObject b;
  b.id = id;
  b.size = size;
  if (allocate) b.storage = std::make_shared<std::vector<std::byte>>(size);
  blocks_.emplace(id, std::move(b));
  return id;
}

GlobalId Runtime::holder_of(const Frame& frame) const {
  if (frame.task) return *frame.task;
  return GlobalId{frame.node, 0, ObjectKind::Task};
}

std::vector<HeldGrant>& Runtime::held_of(const GlobalId& holder) {
  if (holder.sequence == 0) return external_held_[holder];
  return task_at(holder).held;
}

bool Runtime::holds(const GlobalId& holder, const GlobalId& block) const {
  const std::vector<HeldGrant>* held = nullptr;
  if (holder.sequence == 0) {
    auto it = external_held_.find(holder);
    if (it != external_held_.end()) held = &it->second;
  } else {
    auto it = tasks_.find(holder);
    if (it != tasks_.end() && it->second.state != TaskObject::State::Done) held = &it->second.held;
  }
  if (!held) return false;
  return std::any_of(held->begin(), held->end(),
                     [&](const HeldGrant& h) { return h.active && h.block == block; });
}

std::span<std::byte> Runtime::view_span(const GlobalId& block, const GlobalId& holder,
                                        bool writable) {
  if (!holds(holder, block)) {
    fail(ErrorKind::NotAcquired, format(block) + " is not held by " + format(holder));
  }
  BlockObject& b = block_at(block);
  if (writable) prepare_write(b, 0, b.size);
  return bytes_of(b);
}

void Runtime::ensure_allocated(BlockObject& b) {
  if (b.storage) return;
  b.storage = std::make_shared<std::vector<std::byte>>(b.size);
  b.offset = 0;
}

std::span<std::byte> Runtime::bytes_of(BlockObject& b) {
  ensure_allocated(b);
  return std::span<std::byte>(b.storage->data() + b.offset, b.size);
}

std::vector<std::byte> Runtime::block_contents(const GlobalId& id) {
  auto it = blocks_.find(id);
  if (it == blocks_.end()) fail(ErrorKind::InvalidId, format(id) + " is not a data block");
  if (!it->second.storage) return std::vector<std::byte>(it->second.size);
  auto s = bytes_of(it->second);
  return {s.begin(), s.end()};
}

bool Runtime::sanctioned_alias(const BlockObject& writer, const BlockObject& other) const {
  if (is_explicit_ancestor(writer.id, other)) return true;
  std::vector<GlobalId> frontier{writer.id};
  std::set<GlobalId> seen;
  while (!frontier.empty()) {
    GlobalId c = frontier.back();
    frontier.pop_back();
    if (!seen.insert(c).second) continue;
    if (c == other.id) return true;
    const BlockObject& cb = blocks_.at(c);
    if (cb.parent) frontier.push_back(*cb.parent);
    if (cb.copy_source) frontier.push_back(*cb.copy_source);
  }
  return false;
}

void Runtime::prepare_write(BlockObject& b, std::uint64_t offset, std::uint64_t size) {
  ensure_allocated(b);
  const std::uint64_t start = b.offset + offset;
  for (const auto& [id, o] : blocks_) {
    if (id == b.id || o.destroyed || o.storage != b.storage) continue;
    if (!ranges_overlap(o.offset, o.size, start, size)) continue;
    if (sanctioned_alias(b, o)) continue;
    detach(b);
    return;
  }
}

void Runtime::detach(BlockObject& b) {
  auto old = b.storage;
  const std::uint64_t old_offset = b.offset;
  auto view = bytes_of(b);
  auto fresh = std::make_shared<std::vector<std::byte>>(view.begin(), view.end());
  for (auto& [id, o] : blocks_) {
    if (id == b.id || o.storage != old || !is_explicit_ancestor(b.id, o)) continue;
    o.storage = fresh;
    o.offset -= old_offset;
  }
  b.storage = fresh;
  b.offset = 0;
  bytes_copied_ += b.size;
  ++cow_copies_;
  trace_.emit_step("cow-copy " + format(b.id) + " bytes=" + std::to_string(b.size));
}

void Runtime::copy_bytes(BlockObject& dest, std::uint64_t dest_offset, BlockObject& source,
                         std::uint64_t source_offset, std::uint64_t size) {
  ensure_allocated(source);
  prepare_write(dest, dest_offset, size);
  auto d = bytes_of(dest);
  auto s = bytes_of(source);
  std::memmove(d.data() + dest_offset, s.data() + source_offset, size);
  bytes_copied_ += size;
}

}  // namespace ocrx
