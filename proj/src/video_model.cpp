#include "idnc/video_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "idnc/errors.hpp"

namespace idnc {

LayeredGop::LayeredGop(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.empty()) throw std::invalid_argument("a GOP needs at least one layer");
  prefix_.reserve(sizes_.size() + 1);
  prefix_.push_back(0);
  for (std::size_t n : sizes_) {
    if (n == 0) throw std::invalid_argument("every layer needs at least one packet");
    prefix_.push_back(prefix_.back() + n);
  }
}

std::size_t LayeredGop::layer_size(std::size_t layer) const {
  if (layer < 1 || layer > sizes_.size()) throw std::out_of_range("layer index out of range");
  return sizes_[layer - 1];
}

std::size_t LayeredGop::prefix_size(std::size_t window) const {
  if (window > sizes_.size()) throw std::out_of_range("window index out of range");
  return prefix_[window];
}

std::size_t LayeredGop::layer_of(std::size_t packet) const {
  if (packet >= packet_count()) throw std::out_of_range("packet index out of range");
  auto it = std::upper_bound(prefix_.begin(), prefix_.end(), packet);
  return static_cast<std::size_t>(it - prefix_.begin());
}

StateFeedbackMatrix::StateFeedbackMatrix(std::size_t receivers, std::size_t packets)
    : receivers_(receivers), packets_(packets), missing_(receivers * packets, 1) {}

StateFeedbackMatrix StateFeedbackMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  StateFeedbackMatrix sfm(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw std::invalid_argument("ragged state feedback rows");
    for (std::size_t j = 0; j < cols; ++j) {
      if (rows[i][j] != 0 && rows[i][j] != 1)
        throw std::invalid_argument("state feedback entries must be 0 or 1");
      sfm.missing_[i * cols + j] = static_cast<std::uint8_t>(rows[i][j]);
    }
  }
  return sfm;
}

bool StateFeedbackMatrix::missing(std::size_t receiver, std::size_t packet) const {
  if (receiver >= receivers_ || packet >= packets_)
    throw std::out_of_range("state feedback index out of range");
  return missing_[receiver * packets_ + packet] != 0;
}

void StateFeedbackMatrix::mark_received(std::size_t receiver, std::size_t packet) {
  if (receiver >= receivers_ || packet >= packets_)
    throw std::out_of_range("state feedback index out of range");
  missing_[receiver * packets_ + packet] = 0;
}

SessionClock::SessionClock(std::size_t slot_, std::size_t theta_) : slot(slot_), theta(theta_) {
  if (slot < 1 || slot > theta + 1) throw std::invalid_argument("slot must lie in [1, theta + 1]");
}

const char* to_string(ReceiverClass cls) {
  switch (cls) {
    case ReceiverClass::Critical: return "critical";
    case ReceiverClass::Affected: return "affected";
    case ReceiverClass::NonCritical: return "non-critical";
    case ReceiverClass::Satisfied: return "satisfied";
  }
  return "?";
}

namespace {

void check_shape(const StateFeedbackMatrix& sfm, const LayeredGop& gop) {
  if (sfm.packets() != gop.packet_count())
    throw std::invalid_argument("state feedback width does not match the GOP");
}

void check_window(const LayeredGop& gop, std::size_t window) {
  if (window < 1 || window > gop.layer_count())
    throw std::invalid_argument("window must lie in [1, L], got " + std::to_string(window));
}

void check_receiver(const StateFeedbackMatrix& sfm, std::size_t receiver) {
  if (receiver >= sfm.receivers())
    throw std::invalid_argument("receiver index out of range: " + std::to_string(receiver));
}

}  // namespace

std::vector<std::size_t> wants_set(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                                   std::size_t receiver, std::size_t window) {
  check_shape(sfm, gop);
  check_window(gop, window);
  check_receiver(sfm, receiver);
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < gop.prefix_size(window); ++j)
    if (sfm.missing(receiver, j)) out.push_back(j);
  return out;
}

std::size_t wants_count(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                        std::size_t receiver, std::size_t window) {
  check_shape(sfm, gop);
  check_window(gop, window);
  check_receiver(sfm, receiver);
  std::size_t count = 0;
  for (std::size_t j = 0; j < gop.prefix_size(window); ++j) count += sfm.missing(receiver, j);
  return count;
}

std::vector<std::size_t> has_set(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                                 std::size_t receiver, std::size_t window) {
  check_shape(sfm, gop);
  check_window(gop, window);
  check_receiver(sfm, receiver);
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < gop.prefix_size(window); ++j)
    if (sfm.has(receiver, j)) out.push_back(j);
  return out;
}

ReceiverPartition classify_receivers(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                                     std::size_t window, std::size_t remaining) {
  check_shape(sfm, gop);
  check_window(gop, window);
  ReceiverPartition p;
  p.window = window;
  p.remaining = remaining;
  p.wants.resize(sfm.receivers());
  p.classes.resize(sfm.receivers());
  for (std::size_t i = 0; i < sfm.receivers(); ++i) {
    const std::size_t w = wants_count(sfm, gop, i, window);
    p.wants[i] = w;
    ReceiverClass cls;
    if (w == 0) {
      cls = ReceiverClass::Satisfied;
      p.satisfied.push_back(i);
    } else if (w == remaining) {
      cls = ReceiverClass::Critical;
      p.critical.push_back(i);
    } else if (w > remaining) {
      cls = ReceiverClass::Affected;
      p.affected.push_back(i);
    } else {
      cls = ReceiverClass::NonCritical;
      p.non_critical.push_back(i);
    }
    p.classes[i] = cls;
  }
  return p;
}

std::optional<std::size_t> smallest_feasible_window(const StateFeedbackMatrix& sfm,
                                                    const LayeredGop& gop) {
  check_shape(sfm, gop);
  // The earliest missing packet over all receivers decides the window.
  std::optional<std::size_t> first;
  for (std::size_t i = 0; i < sfm.receivers(); ++i) {
    const std::size_t limit = first.value_or(sfm.packets());
    for (std::size_t j = 0; j < limit; ++j)
      if (sfm.missing(i, j)) {
        first = j;
        break;
      }
  }
  if (!first) return std::nullopt;
  return gop.layer_of(*first);
}

std::size_t largest_feasible_window(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                                    std::size_t remaining) {
  const auto smallest = smallest_feasible_window(sfm, gop);
  if (!smallest) throw ContractViolation("largest_feasible_window called on a complete session");
  std::size_t largest = *smallest;
  for (std::size_t w = *smallest; w <= gop.layer_count(); ++w) {
    bool fits = true;
    for (std::size_t i = 0; i < sfm.receivers() && fits; ++i)
      fits = wants_count(sfm, gop, i, w) <= remaining;
    // Wants counts grow with the window, so the first violation ends the scan.
    if (!fits) break;
    largest = w;
  }
  return largest;
}

std::size_t complete_layers(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                            std::size_t receiver) {
  check_shape(sfm, gop);
  check_receiver(sfm, receiver);
  std::size_t layers = 0;
  for (std::size_t w = 1; w <= gop.layer_count(); ++w) {
    if (wants_count(sfm, gop, receiver, w) != 0) break;
    layers = w;
  }
  return layers;
}

StateFeedbackMatrix apply_feedback(StateFeedbackMatrix sfm, std::span<const TargetedPacket> targeted,
                                   const std::vector<bool>& received) {
  if (received.size() != sfm.receivers())
    throw std::invalid_argument("one reception outcome per receiver is required");
  for (const auto& t : targeted) {
    if (!sfm.missing(t.receiver, t.packet))
      throw ContractViolation("receiver " + std::to_string(t.receiver) + " already holds packet " +
                              std::to_string(t.packet));
  }
  for (const auto& t : targeted)
    if (received[t.receiver]) sfm.mark_received(t.receiver, t.packet);
  return sfm;
}

void validate_erasures(std::span<const double> erasures) {
  for (double e : erasures)
    if (!(e >= 0.0 && e < 1.0) || std::isnan(e))
      throw std::invalid_argument("erasure probabilities must lie in [0, 1)");
}

}  // namespace idnc
