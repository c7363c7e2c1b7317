#include <algorithm>
#include <vector>

#include "ocrx/runtime.hpp"

namespace ocrx {

void Runtime::on_file_op(const FileOp& m) {
  FileObject& f = file_at(m.file.global());
  if (m.op == FileOp::Op::Release) {
    maybe_close(f);
    return;
  }

  auto flags = std::ios::binary | std::ios::in;
  if (f.mode.writable) flags |= std::ios::out;
  if (f.mode.truncate) flags |= std::ios::trunc;
  f.stream = std::make_unique<std::fstream>(f.path, flags);
  f.opened = true;
  if (!*f.stream) {
    f.stream.reset();
    f.open_failed = true;
    trace_.emit_step("file-open-failed " + format(f.id));
  } else {
    f.stream->seekg(0, std::ios::end);
    f.size_at_open = static_cast<std::uint64_t>(f.stream->tellg());
    f.stream->clear();
    f.current_size = f.size_at_open;
    trace_.emit_step("file-open " + format(f.id) + " size=" + std::to_string(f.size_at_open));
  }
  complete_open(f);
}

void Runtime::complete_open(FileObject& f) {
  if (f.descriptor) {
    BlockObject& d = blocks_.at(*f.descriptor);
    if (!d.destroyed) {
      if (f.open_failed) {
        d.open_failed = true;
      } else {
        encode_descriptor(bytes_of(d), f.id, f.size_at_open);
      }
      d.ready = true;
      process_waiting(d);
    }
  }
  for (const auto& c : f.chunks) {
    if (!c.live) continue;
    BlockObject& cb = blocks_.at(c.block);
    if (f.open_failed) {
      cb.open_failed = true;
      cb.ready = true;
    } else {
      fill_chunk(f, cb);
    }
    process_waiting(cb);
  }
  maybe_close(f);
}

void Runtime::fill_chunk(FileObject& f, BlockObject& chunk) {
  const std::uint64_t end = chunk.file_offset + chunk.size;
  if (end > f.current_size) {
    if (!f.mode.writable) {
      fail(ErrorKind::BadRange, "chunk ends at " + std::to_string(end) + " past the end of " +
                                    "read-only file " + f.path);
    }
    std::vector<char> zeros(end - f.current_size, 0);
    f.stream->seekp(static_cast<std::streamoff>(f.current_size));
    f.stream->write(zeros.data(), static_cast<std::streamsize>(zeros.size()));
    f.stream->flush();
    if (!*f.stream) fail(ErrorKind::IoError, "cannot enlarge " + f.path);
    trace_.emit_step("file-enlarge " + format(f.id) + " size=" + std::to_string(end));
    f.current_size = end;
  }
  auto bytes = bytes_of(chunk);
  f.stream->seekg(static_cast<std::streamoff>(chunk.file_offset));
  f.stream->read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(chunk.size));
  if (!*f.stream) fail(ErrorKind::IoError, "cannot read " + f.path);
  chunk.ready = true;
}

void Runtime::write_back(BlockObject& chunk) {
  FileObject& f = file_at(*chunk.file);
  if (!f.stream || !f.mode.writable) return;
  auto bytes = bytes_of(chunk);
  f.stream->seekp(static_cast<std::streamoff>(chunk.file_offset));
  f.stream->write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
  f.stream->flush();
  if (!*f.stream) fail(ErrorKind::IoError, "cannot write back to " + f.path);
  trace_.emit_step("write-back " + format(chunk.id) + " offset=" +
                   std::to_string(chunk.file_offset) + " size=" + std::to_string(chunk.size));
}

void Runtime::maybe_close(FileObject& f) {
  if (!f.released || !f.opened || f.closed) return;
  if (std::any_of(f.chunks.begin(), f.chunks.end(), [](const auto& c) { return c.live; })) return;
  if (f.stream) f.stream->close();
  f.stream.reset();
  f.closed = true;
  trace_.emit_step("file-closed " + format(f.id));
}

void Runtime::close_files() {
  for (auto& [id, f] : files_) {
    if (f.closed) continue;
    if (f.stream) f.stream->close();
    f.stream.reset();
    f.closed = true;
  }
}

GlobalId Runtime::create_chunk_at(const GlobalId& file, std::uint64_t offset, std::uint64_t size) {
  FileObject& f = file_at(file);
  if (size == 0) fail(ErrorKind::BadSize, "chunk of size 0");
  if (f.closed) fail(ErrorKind::FileReleased, format(file) + " was released");
  for (const auto& c : f.chunks) {
    if (ranges_overlap(c.offset, c.size, offset, size)) {
      fail(ErrorKind::ChunkOverlap, "chunk [" + std::to_string(offset) + ", +" +
                                        std::to_string(size) + ") overlaps chunk at " +
                                        std::to_string(c.offset));
    }
  }
  if (f.opened && !f.open_failed && !f.mode.writable &&
      !range_fits(offset, size, f.current_size)) {
    fail(ErrorKind::BadRange, "chunk past the end of read-only file " + f.path);
  }
  const GlobalId id = create_block_at(file.node, size, true);
  BlockObject& cb = blocks_.at(id);
  cb.file = file;
  cb.file_offset = offset;
  cb.ready = false;
  f.chunks.push_back(FileObject::Chunk{offset, size, id, true});
  if (f.opened) {
    if (f.open_failed) {
      cb.open_failed = true;
      cb.ready = true;
    } else {
      fill_chunk(f, cb);
    }
  }
  return id;
}

}  // namespace ocrx
