#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "ocrx/runtime.hpp"

namespace ocrx::examples {

void register_matrix(FunctionRegistry& r);
void register_files(FunctionRegistry& r);
void register_partitions(FunctionRegistry& r);
void register_micro(FunctionRegistry& r);

// Identifiers stored in data blocks, 16 bytes each.
inline void put_id(std::span<std::byte> bytes, std::size_t slot, const Identifier& id) {
  serialize_id(id, bytes.subspan(slot * kSerializedIdSize, kSerializedIdSize));
}

inline Identifier get_id(std::span<const std::byte> bytes, std::size_t slot) {
  return deserialize_id(bytes.subspan(slot * kSerializedIdSize, kSerializedIdSize));
}

}  // namespace ocrx::examples
