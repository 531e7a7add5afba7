#pragma once

// Layered content model and per-receiver reception state.
//
// Index conventions used throughout the library:
//   * receivers and packets are 0-based (packet j belongs to exactly one layer);
//   * layers and windows are 1-based counts: window `w` covers layers 1..w,
//     i.e. packets [0, prefix_size(w)).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace idnc {

class LayeredGop {
 public:
  explicit LayeredGop(std::vector<std::size_t> layer_sizes);

  std::size_t layer_count() const { return sizes_.size(); }
  std::size_t packet_count() const { return prefix_.back(); }
  std::size_t layer_size(std::size_t layer) const;
  // Packets in the first `window` layers; prefix_size(0) == 0.
  std::size_t prefix_size(std::size_t window) const;
  // 1-based layer that packet `packet` belongs to.
  std::size_t layer_of(std::size_t packet) const;
  std::span<const std::size_t> layer_sizes() const { return sizes_; }

  friend bool operator==(const LayeredGop&, const LayeredGop&) = default;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> prefix_;
};

// M x N binary reception state: missing(i, j) is true while receiver i still
// lacks packet j. Entries can only move from missing to received.
class StateFeedbackMatrix {
 public:
  StateFeedbackMatrix(std::size_t receivers, std::size_t packets);
  // Rows of 0 (received) / 1 (missing); all rows must have equal length.
  static StateFeedbackMatrix from_rows(const std::vector<std::vector<int>>& rows);

  std::size_t receivers() const { return receivers_; }
  std::size_t packets() const { return packets_; }
  bool missing(std::size_t receiver, std::size_t packet) const;
  bool has(std::size_t receiver, std::size_t packet) const { return !missing(receiver, packet); }
  void mark_received(std::size_t receiver, std::size_t packet);

  friend bool operator==(const StateFeedbackMatrix&, const StateFeedbackMatrix&) = default;

 private:
  std::size_t receivers_;
  std::size_t packets_;
  std::vector<std::uint8_t> missing_;
};

struct SessionClock {
  SessionClock(std::size_t slot, std::size_t theta);

  std::size_t slot;   // current slot t, 1-based
  std::size_t theta;  // deadline in slots

  // Q = theta - t + 1
  std::size_t remaining() const { return theta + 1 - slot; }
};

enum class ReceiverClass { Critical, Affected, NonCritical, Satisfied };

const char* to_string(ReceiverClass cls);

struct ReceiverPartition {
  std::size_t window = 0;
  std::size_t remaining = 0;
  std::vector<std::size_t> wants;  // W_i over the window, per receiver
  std::vector<ReceiverClass> classes;
  std::vector<std::size_t> critical;
  std::vector<std::size_t> affected;
  std::vector<std::size_t> non_critical;
  std::vector<std::size_t> satisfied;

  bool wanting(std::size_t receiver) const { return wants[receiver] > 0; }
  std::size_t receivers() const { return wants.size(); }
};

std::vector<std::size_t> wants_set(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                                   std::size_t receiver, std::size_t window);
std::size_t wants_count(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                        std::size_t receiver, std::size_t window);
// Complement of the wants set inside the window.
std::vector<std::size_t> has_set(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                                 std::size_t receiver, std::size_t window);

ReceiverPartition classify_receivers(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                                     std::size_t window, std::size_t remaining);

// Smallest window in which some receiver still wants a packet; nullopt once
// every receiver holds the whole GOP.
std::optional<std::size_t> smallest_feasible_window(const StateFeedbackMatrix& sfm,
                                                    const LayeredGop& gop);

// Largest window whose wants counts all fit in `remaining` slots, never below
// the smallest feasible window. Throws ContractViolation on a complete session.
std::size_t largest_feasible_window(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                                    std::size_t remaining);

// Number of leading layers receiver `receiver` already holds completely.
std::size_t complete_layers(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                            std::size_t receiver);

struct TargetedPacket {
  std::size_t receiver;
  std::size_t packet;
  friend bool operator==(const TargetedPacket&, const TargetedPacket&) = default;
};

// Clears f(i,j) for each targeted pair whose receiver's outcome is true.
// `received` is indexed by receiver.
StateFeedbackMatrix apply_feedback(StateFeedbackMatrix sfm, std::span<const TargetedPacket> targeted,
                                   const std::vector<bool>& received);

void validate_erasures(std::span<const double> erasures);

}  // namespace idnc
