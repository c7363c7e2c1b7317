#include "ocrx/substrate.hpp"

#include <iterator>

#include "ocrx/errors.hpp"

namespace ocrx {

std::size_t SeededChoice::choose(std::size_t n) {
  // Raw engine output keeps the sequence identical across standard libraries.
  return n <= 1 ? 0 : static_cast<std::size_t>(rng_() % n);
}

std::size_t ScriptedChoice::choose(std::size_t n) {
  std::size_t c = 0;
  const std::size_t pos = taken_.size();
  if (pos < prefix_.size()) c = prefix_[pos];
  if (c >= n) c = n - 1;
  taken_.push_back(c);
  branching_.push_back(n);
  return c;
}

std::string TraceLog::text() const {
  std::string out;
  for (const auto& l : lines_) {
    out += l;
    out += '\n';
  }
  return out;
}

Substrate::Substrate(std::size_t nodes, ChoiceSource& choices, TraceLog& trace)
    : nodes_(nodes), choices_(choices), trace_(trace) {
  if (nodes_ == 0) fail(ErrorKind::ProtocolError, "substrate needs at least one node");
}

void Substrate::send(Message msg) {
  if (msg.origin >= nodes_ || msg.target >= nodes_) {
    fail(ErrorKind::ProtocolError, "message routed outside the configured nodes");
  }
  channels_[{msg.origin, msg.target}].push_back(std::move(msg));
  ++pending_;
}

std::size_t Substrate::active_channels() const {
  std::size_t n = 0;
  for (const auto& [key, q] : channels_) n += q.empty() ? 0 : 1;
  return n;
}

std::optional<Message> Substrate::deliver_next() {
  if (idle()) return std::nullopt;
  return deliver_from(choices_.choose(active_channels()));
}

Message Substrate::deliver_from(std::size_t rank) {
  auto it = channels_.begin();
  for (;; ++it) {
    if (it == channels_.end()) fail(ErrorKind::ProtocolError, "no such channel");
    if (it->second.empty()) continue;
    if (rank == 0) break;
    --rank;
  }
  Message msg = std::move(it->second.front());
  it->second.pop_front();
  --pending_;
  ++deliveries_;
  trace_.advance();
  trace_.emit_step("deliver " + std::string(to_string(msg.kind())) + " " +
                   std::to_string(msg.origin) + "→" + std::to_string(msg.target) + " " +
                   summarize(msg.payload));
  if (handler_) handler_(msg);
  return msg;
}

}  // namespace ocrx
