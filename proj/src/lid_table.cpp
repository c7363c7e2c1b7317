#include "ocrx/lid_table.hpp"

#include <algorithm>

#include "ocrx/errors.hpp"

namespace ocrx {

LocalId LidTable::allocate(ContextId owner) {
  LocalId lid{owner, ++next_sequence_[owner]};
  entries_.emplace(lid, Entry{});
  return lid;
}

std::optional<GlobalId> LidTable::lookup(const LocalId& lid) const {
  auto it = entries_.find(lid);
  if (it == entries_.end()) return std::nullopt;
  return it->second.guid;
}

std::vector<LocalId> LidTable::unresolved_in(const Payload& p) const {
  std::vector<LocalId> out;
  for_each_reference(p, [&](const Identifier& id) {
    if (!id.is_local()) return;
    const LocalId& lid = id.local();
    auto it = entries_.find(lid);
    if (it == entries_.end()) {
      fail(ErrorKind::InvalidId, "unknown local identifier " + format(lid));
    }
    if (!it->second.guid && std::find(out.begin(), out.end(), lid) == out.end()) {
      out.push_back(lid);
    }
  });
  return out;
}

void LidTable::patch(Payload& p) const {
  for_each_reference(p, [&](Identifier& id) {
    if (!id.is_local()) return;
    if (auto g = lookup(id.local())) id = *g;
  });
}

void LidTable::defer(Message msg) {
  auto lids = unresolved_in(msg.payload);
  if (lids.empty()) {
    fail(ErrorKind::ProtocolError, "deferring a message with no unresolved identifier");
  }
  const std::uint64_t ticket = next_ticket_++;
  for (const auto& lid : lids) entries_.at(lid).waiting.push_back(ticket);
  deferred_.emplace(ticket, Parked{std::move(msg), lids.size()});
}

std::vector<Message> LidTable::resolve(const ResolutionRecord& rec) {
  auto it = entries_.find(rec.lid);
  if (it == entries_.end()) {
    fail(ErrorKind::ProtocolError, "resolution for unknown " + format(rec.lid));
  }
  if (it->second.guid) {
    fail(ErrorKind::ProtocolError, "duplicate resolution for " + format(rec.lid));
  }
  it->second.guid = rec.guid;

  std::vector<std::uint64_t> ready;
  for (auto ticket : it->second.waiting) {
    auto& parked = deferred_.at(ticket);
    if (--parked.unresolved == 0) ready.push_back(ticket);
  }
  it->second.waiting.clear();
  std::sort(ready.begin(), ready.end());

  std::vector<Message> out;
  out.reserve(ready.size());
  for (auto ticket : ready) {
    auto node = deferred_.extract(ticket);
    Message msg = std::move(node.mapped().msg);
    patch(msg.payload);
    out.push_back(std::move(msg));
  }
  return out;
}

std::vector<LocalId> LidTable::blocking_lids() const {
  std::vector<LocalId> out;
  for (const auto& [lid, e] : entries_) {
    if (!e.guid && !e.waiting.empty()) out.push_back(lid);
  }
  return out;
}

}  // namespace ocrx
