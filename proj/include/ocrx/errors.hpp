#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ocrx {

enum class ErrorKind {
  InvalidId,
  BadArity,
  BadSlot,
  SlotOccupied,
  AlreadySatisfied,
  BadSize,
  BadMode,
  NotAcquired,
  NotWritable,
  LidOwnershipViolation,
  DeadlockDetected,
  BadIndex,
  CreatorContractViolation,
  OpenFailed,
  BadDescriptor,
  ChunkOverlap,
  BadRange,
  FileReleased,
  IoError,
  PartitionOverlap,
  StaticPartitioned,
  PartitionDeadlock,
  PartitionProtocolViolation,
  BadCopyType,
  DestroyedTarget,
  ProtocolError,
};

std::string_view to_string(ErrorKind kind);

class RuntimeError : public std::runtime_error {
 public:
  RuntimeError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw RuntimeError(kind, what);
}

}  // namespace ocrx
