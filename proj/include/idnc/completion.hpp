#pragma once

// Negative-binomial completion-time probabilities and the post-selection
// upper bound used as the schedulers' decision metric.

#include <cstddef>
#include <span>
#include <vector>

#include "idnc/video_model.hpp"

namespace idnc {

// C(n, k) by the multiplicative recurrence.
double binomial_coefficient(std::size_t n, std::size_t k);

// P[T_W = W + extra]: the W-th success of a Bernoulli(1 - erasure) stream
// lands on trial W + extra. Requires wants >= 1.
double nb_pmf(std::size_t wants, std::size_t extra, double erasure);

// P[T_W <= remaining]; 1 when wants == 0, 0 when wants > remaining.
double prob_complete_within(std::size_t wants, std::size_t remaining, double erasure);

// 1 - P[T_W <= remaining], summed over the short tail (fewer than W
// receptions in `remaining` slots) so it stays accurate when tiny.
double prob_miss_deadline(std::size_t wants, std::size_t remaining, double erasure);

// log P[T_W <= remaining]; -inf when wants > remaining.
double log_prob_complete_within(std::size_t wants, std::size_t remaining, double erasure);

// Product of P[T_{W_i} <= Q] over the receivers still wanting packets of the
// window, assuming each is targeted in every remaining slot.
double upper_bound_all(const StateFeedbackMatrix& sfm, const LayeredGop& gop, std::size_t window,
                       std::size_t remaining, std::span<const double> erasures);

struct CompletionBound {
  double value = 0.0;
  std::size_t window = 0;
  std::size_t remaining = 0;
  std::vector<std::size_t> targeted;
};

// Upper bound on P[T^{1:w} <= Q - 1] after serving `targeted` in this slot.
// Zero when a critical receiver is left out or an affected receiver exists.
CompletionBound post_selection_bound(const ReceiverPartition& partition,
                                     std::span<const std::size_t> targeted,
                                     std::span<const double> erasures);
CompletionBound post_selection_bound(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                                     std::size_t window, std::size_t remaining,
                                     std::span<const std::size_t> targeted,
                                     std::span<const double> erasures);

}  // namespace idnc
