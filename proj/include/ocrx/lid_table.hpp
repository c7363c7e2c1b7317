#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "ocrx/ids.hpp"
#include "ocrx/message.hpp"

namespace ocrx {

struct ResolutionRecord {
  LocalId lid;
  GlobalId guid;
  NodeIndex origin = 0;
};

// Ledger of local identifiers. A message that names an unresolved LID is
// parked here and released, patched, once every LID it names is resolved.
class LidTable {
 public:
  LocalId allocate(ContextId owner);

  bool known(const LocalId& lid) const { return entries_.contains(lid); }
  std::optional<GlobalId> lookup(const LocalId& lid) const;

  // Unresolved LIDs referenced by the payload, deduplicated, in visit order.
  std::vector<LocalId> unresolved_in(const Payload& p) const;

  // Replaces every resolved LID reference by its global identifier.
  void patch(Payload& p) const;

  // Parks `msg`; it must name at least one unresolved LID.
  void defer(Message msg);

  // Marks the LID resolved and returns the messages that became fully
  // resolved, patched and in their original send order.
  std::vector<Message> resolve(const ResolutionRecord& rec);

  // Number of parked messages.
  std::size_t deferred_count() const { return deferred_.size(); }
  // LIDs that still hold back at least one message.
  std::vector<LocalId> blocking_lids() const;

 private:
  struct Entry {
    std::optional<GlobalId> guid;
    std::vector<std::uint64_t> waiting;  // deferred message tickets, send order
  };
  struct Parked {
    Message msg;
    std::size_t unresolved = 0;
  };

  std::map<ContextId, std::uint64_t> next_sequence_;
  std::map<LocalId, Entry> entries_;
  std::map<std::uint64_t, Parked> deferred_;
  std::uint64_t next_ticket_ = 0;
};

}  // namespace ocrx
