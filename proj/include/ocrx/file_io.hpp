#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "ocrx/ids.hpp"

namespace ocrx {

// Descriptor block layout: bytes 0..15 hold the serialized file identifier,
// bytes 16..23 the file size at open time as u64LE.
inline constexpr std::size_t kDescriptorSize = 24;

struct OpenMode {
  bool writable = false;
  bool create = false;    // create if missing
  bool truncate = false;  // discard existing contents
};

// Accepts the fopen-style spellings r, rb, r+, rb+, r+b, w, wb, w+, wb+, w+b.
// Throws BadMode for anything else (including append modes).
OpenMode parse_open_mode(std::string_view mode);

void encode_descriptor(std::span<std::byte> out, const GlobalId& file, std::uint64_t size);

// Both throw BadDescriptor unless the view is exactly a descriptor block.
Identifier fileGetGuid(std::span<const std::byte> descriptor);
std::uint64_t fileGetSize(std::span<const std::byte> descriptor);

}  // namespace ocrx
