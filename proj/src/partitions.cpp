#include "ocrx/runtime.hpp"

namespace ocrx {

std::vector<GlobalId> Runtime::create_partitions_at(const GlobalId& block,
                                                    std::span<const PartitionRange> ranges,
                                                    PartitionProps props) {
  BlockObject& b = block_at(block);
  if (b.destroy_requested) fail(ErrorKind::DestroyedTarget, format(block) + " is being destroyed");
  b.partitions.validate(b.size, ranges, props);
  ensure_allocated(b);

  std::vector<GlobalId> ids;
  std::string line = "partition " + format(block) + " ->";
  for (const auto& r : ranges) {
    const GlobalId id = create_block_at(block.node, r.size, false);
    BlockObject& c = blocks_.at(id);
    c.storage = b.storage;
    c.offset = b.offset + r.offset;
    c.parent = block;
    c.ready = b.ready;
    c.open_failed = b.open_failed;
    ids.push_back(id);
    line += " " + format(id) + "@" + std::to_string(r.offset) + "+" + std::to_string(r.size);
  }
  b.partitions.admit(b.size, ranges, props, ids);
  trace_.emit_step(line);
  return ids;
}

void Runtime::on_copy(const CopyData& m) {
  BlockObject& d = block_at(m.dest.global());
  BlockObject& s = block_at(m.source.global());
  if (!range_fits(m.dest_offset, m.size, d.size) || !range_fits(m.source_offset, m.size, s.size)) {
    fail(ErrorKind::BadRange, "copy range outside a block");
  }
  if (d.id == s.id && ranges_overlap(m.dest_offset, m.size, m.source_offset, m.size)) {
    fail(ErrorKind::BadRange, "overlapping copy within " + format(d.id));
  }

  const auto before = bytes_copied_;
  std::string kind = "PLAIN";
  if (m.type.has(props::kCopyPartition) && m.dest_offset == 0 && m.size == d.size &&
      d.partitions.children().empty() && !d.parent && !d.copy_source && d.id != s.id) {
    kind = "PARTITION";
    if (cfg_.partition_impl == PartitionImpl::ZeroCopy) {
      ensure_allocated(s);
      d.storage = s.storage;
      d.offset = s.offset + m.source_offset;
    } else {
      ensure_allocated(d);
      copy_bytes(d, 0, s, m.source_offset, m.size);
    }
    d.copy_source = s.id;
    s.copy_aliases.insert(d.id);
  } else if (m.type.has(props::kCopyPartitionBack)) {
    kind = "PARTITION_BACK";
    const bool related = s.copy_source && *s.copy_source == d.id;
    const bool in_place = related && s.storage && s.storage == d.storage &&
                          s.offset == d.offset + m.dest_offset;
    if (!in_place) copy_bytes(d, m.dest_offset, s, m.source_offset, m.size);
    if (related) {
      d.copy_aliases.erase(s.id);
      s.copy_source.reset();
    }
    request_destroy(s);
  } else {
    copy_bytes(d, m.dest_offset, s, m.source_offset, m.size);
  }
  trace_.emit_step("copy " + kind + " " + format(s.id) + "@" + std::to_string(m.source_offset) +
                   " -> " + format(d.id) + "@" + std::to_string(m.dest_offset) +
                   " size=" + std::to_string(m.size) +
                   " moved=" + std::to_string(bytes_copied_ - before));
  post(d.id.node, Satisfy{m.completion, 0, d.id});
}

}  // namespace ocrx
