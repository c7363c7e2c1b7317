#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ocrx/message.hpp"

namespace ocrx {

// Source of scheduling decisions. Every nondeterministic choice the runtime
// makes goes through one of these, so a choice sequence identifies a run.
class ChoiceSource {
 public:
  virtual ~ChoiceSource() = default;
  // Returns a value in [0, n). n is at least 1.
  virtual std::size_t choose(std::size_t n) = 0;
};

class SeededChoice final : public ChoiceSource {
 public:
  explicit SeededChoice(std::uint64_t seed) : rng_(seed) {}
  std::size_t choose(std::size_t n) override;

 private:
  std::mt19937_64 rng_;
};

// Replays a fixed prefix of choices, then always picks 0. Records the
// branching factor of every decision it was asked to make.
class ScriptedChoice final : public ChoiceSource {
 public:
  explicit ScriptedChoice(std::vector<std::size_t> prefix) : prefix_(std::move(prefix)) {}
  std::size_t choose(std::size_t n) override;

  const std::vector<std::size_t>& taken() const { return taken_; }
  const std::vector<std::size_t>& branching() const { return branching_; }

 private:
  std::vector<std::size_t> prefix_;
  std::vector<std::size_t> taken_;
  std::vector<std::size_t> branching_;
};

// In-memory trace, optionally mirrored to a file by the caller.
class TraceLog {
 public:
  std::uint64_t step() const { return step_; }
  std::uint64_t advance() { return ++step_; }
  void emit(std::string line) { lines_.push_back(std::move(line)); }
  void emit_step(const std::string& body) {
    emit("step=" + std::to_string(step_) + " " + body);
  }
  const std::vector<std::string>& lines() const { return lines_; }
  std::string text() const;

 private:
  std::uint64_t step_ = 0;
  std::vector<std::string> lines_;
};

// N simulated nodes exchanging messages over FIFO channels, one per ordered
// (origin, target) pair. Which nonempty channel delivers next is decided by
// the ChoiceSource.
class Substrate {
 public:
  using Handler = std::function<void(const Message&)>;

  Substrate(std::size_t nodes, ChoiceSource& choices, TraceLog& trace);

  std::size_t nodes() const { return nodes_; }
  void set_handler(Handler h) { handler_ = std::move(h); }

  // Enqueues on the (origin, target) channel and returns at once.
  void send(Message msg);

  bool idle() const { return pending_ == 0; }
  std::size_t pending() const { return pending_; }
  std::size_t active_channels() const;
  std::uint64_t deliveries() const { return deliveries_; }

  // Picks a nonempty channel with the ChoiceSource and delivers its head.
  // Returns nullopt when every channel is empty.
  std::optional<Message> deliver_next();

  // Delivers the head of the `rank`-th nonempty channel in channel order.
  Message deliver_from(std::size_t rank);

 private:
  using ChannelKey = std::pair<NodeIndex, NodeIndex>;

  std::size_t nodes_;
  ChoiceSource& choices_;
  TraceLog& trace_;
  Handler handler_;
  std::map<ChannelKey, std::deque<Message>> channels_;
  std::size_t pending_ = 0;
  std::uint64_t deliveries_ = 0;
};

}  // namespace ocrx
