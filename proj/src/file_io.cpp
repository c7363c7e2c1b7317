#include "ocrx/file_io.hpp"

#include <string>

#include "ocrx/errors.hpp"

namespace ocrx {

OpenMode parse_open_mode(std::string_view mode) {
  std::string m;
  for (char c : mode) {
    if (c != 'b') m += c;
  }
  if (m == "r") return OpenMode{false, false, false};
  if (m == "r+") return OpenMode{true, false, false};
  if (m == "w" || m == "w+") return OpenMode{true, true, true};
  fail(ErrorKind::BadMode, "unsupported file mode '" + std::string(mode) + "'");
}

void encode_descriptor(std::span<std::byte> out, const GlobalId& file, std::uint64_t size) {
  if (out.size() != kDescriptorSize) fail(ErrorKind::BadDescriptor, "descriptor must be 24 bytes");
  serialize_id(file, out.subspan(0, kSerializedIdSize));
  store_u64le(out.subspan(kSerializedIdSize, 8), size);
}

namespace {

void check_descriptor(std::span<const std::byte> d) {
  if (d.size() != kDescriptorSize) {
    fail(ErrorKind::BadDescriptor,
         "descriptor view has " + std::to_string(d.size()) + " bytes, expected 24");
  }
}

}  // namespace

Identifier fileGetGuid(std::span<const std::byte> descriptor) {
  check_descriptor(descriptor);
  Identifier id = deserialize_id(descriptor.subspan(0, kSerializedIdSize));
  if (!id.is_global() || id.global().kind != ObjectKind::File) {
    fail(ErrorKind::BadDescriptor, "descriptor does not name a file");
  }
  return id;
}

std::uint64_t fileGetSize(std::span<const std::byte> descriptor) {
  check_descriptor(descriptor);
  return load_u64le(descriptor.subspan(kSerializedIdSize, 8));
}

}  // namespace ocrx
