#include "idnc/completion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace idnc {

namespace {

void check_erasure(double erasure) {
  if (!(erasure >= 0.0 && erasure < 1.0)) throw std::invalid_argument("erasure must lie in [0, 1)");
}

}  // namespace

double binomial_coefficient(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::size_t r = 1; r <= k; ++r) c = c * static_cast<double>(n - k + r) / static_cast<double>(r);
  return c;
}

double nb_pmf(std::size_t wants, std::size_t extra, double erasure) {
  if (wants == 0) throw std::invalid_argument("nb_pmf needs at least one wanted packet");
  check_erasure(erasure);
  return binomial_coefficient(wants + extra - 1, extra) * std::pow(erasure, static_cast<double>(extra)) *
         std::pow(1.0 - erasure, static_cast<double>(wants));
}

double prob_complete_within(std::size_t wants, std::size_t remaining, double erasure) {
  check_erasure(erasure);
  if (wants == 0) return 1.0;
  if (wants > remaining) return 0.0;
  double sum = 0.0;
  for (std::size_t z = 0; z <= remaining - wants; ++z) sum += nb_pmf(wants, z, erasure);
  return std::min(sum, 1.0);
}

double prob_miss_deadline(std::size_t wants, std::size_t remaining, double erasure) {
  check_erasure(erasure);
  if (wants == 0) return 0.0;
  if (wants > remaining) return 1.0;
  const double p = 1.0 - erasure;
  double sum = 0.0;
  for (std::size_t k = 0; k < wants; ++k)
    sum += binomial_coefficient(remaining, k) * std::pow(p, static_cast<double>(k)) *
           std::pow(erasure, static_cast<double>(remaining - k));
  return std::min(sum, 1.0);
}

double log_prob_complete_within(std::size_t wants, std::size_t remaining, double erasure) {
  return std::log1p(-prob_miss_deadline(wants, remaining, erasure));
}

double upper_bound_all(const StateFeedbackMatrix& sfm, const LayeredGop& gop, std::size_t window,
                       std::size_t remaining, std::span<const double> erasures) {
  if (erasures.size() != sfm.receivers())
    throw std::invalid_argument("one erasure probability per receiver is required");
  double product = 1.0;
  for (std::size_t i = 0; i < sfm.receivers(); ++i)
    product *= prob_complete_within(wants_count(sfm, gop, i, window), remaining, erasures[i]);
  return product;
}

CompletionBound post_selection_bound(const ReceiverPartition& partition,
                                     std::span<const std::size_t> targeted,
                                     std::span<const double> erasures) {
  if (erasures.size() != partition.receivers())
    throw std::invalid_argument("one erasure probability per receiver is required");
  if (partition.remaining < 1) throw std::invalid_argument("post-selection bound needs Q >= 1");
  CompletionBound bound;
  bound.window = partition.window;
  bound.remaining = partition.remaining;
  bound.targeted.assign(targeted.begin(), targeted.end());
  std::sort(bound.targeted.begin(), bound.targeted.end());

  std::vector<bool> is_target(partition.receivers(), false);
  for (std::size_t i : targeted) {
    if (i >= partition.receivers()) throw std::invalid_argument("targeted receiver out of range");
    is_target[i] = true;
  }
  if (!partition.affected.empty()) return bound;
  for (std::size_t i : partition.critical)
    if (!is_target[i]) return bound;

  const std::size_t q = partition.remaining;
  double product = 1.0;
  for (std::size_t i = 0; i < partition.receivers(); ++i) {
    if (!partition.wanting(i)) continue;
    product *= prob_complete_within(partition.wants[i], is_target[i] ? q : q - 1, erasures[i]);
  }
  bound.value = product;
  return bound;
}

CompletionBound post_selection_bound(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                                     std::size_t window, std::size_t remaining,
                                     std::span<const std::size_t> targeted,
                                     std::span<const double> erasures) {
  return post_selection_bound(classify_receivers(sfm, gop, window, remaining), targeted, erasures);
}

}  // namespace idnc
