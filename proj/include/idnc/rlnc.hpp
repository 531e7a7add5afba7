#pragma once

// Expanding-window RLNC baseline: an open-loop policy z = [theta_1..theta_L]
// sends theta_w random combinations of window w's packets. Decodability is
// judged by the generic-rank condition for nested windows over a large field.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "idnc/video_model.hpp"

namespace idnc {

using TransmissionPolicy = std::vector<std::size_t>;
using ReceptionProfile = std::vector<std::size_t>;

inline constexpr std::size_t kDefaultPolicyBudget = 1'000'000;
inline constexpr std::size_t kDefaultProfileBudget = 1'000'000;

// All weak compositions of theta into `layers` parts, lexicographically
// ascending. Throws BudgetExceeded past `budget` policies.
std::vector<TransmissionPolicy> enumerate_policies(std::size_t theta, std::size_t layers,
                                                   std::size_t budget = kDefaultPolicyBudget);

// Largest j such that, for every m < j, the packets received from windows
// m+1..j cover the N^{1:j} - N^{1:m} unknowns they introduce; 0 if none.
std::size_t decodable_layers(const LayeredGop& gop, std::span<const std::size_t> received);

struct ProbabilityEstimate {
  double value = 0.0;
  double std_error = 0.0;
  bool exact = true;
};

struct DecodeProbOptions {
  std::size_t profile_budget = kDefaultProfileBudget;  // exact enumeration limit
  std::size_t samples = 100'000;                       // Monte Carlo fallback
  std::uint64_t seed = 1;
};

// P_i^l(n, z): probability that a receiver with the given erasure rate decodes
// layers 1..layer. Exact when prod(theta_k + 1) fits the profile budget.
ProbabilityEstimate per_receiver_decode_prob(const LayeredGop& gop, const TransmissionPolicy& policy,
                                             double erasure, std::size_t layer,
                                             const DecodeProbOptions& options = {});

// Product of the per-receiver probabilities; the error is first-order
// propagated when any factor is a Monte Carlo estimate.
ProbabilityEstimate all_receivers_prob(const LayeredGop& gop, const TransmissionPolicy& policy,
                                       std::span<const double> erasures, std::size_t layer,
                                       const DecodeProbOptions& options = {});

// Precomputed exact evaluator for one policy. The probability depends on the
// erasure rate only through the total reception count R, so the profile sum
// collapses to sum_R c_l(R) p^R (1-p)^(theta-R).
class PolicyEvaluator {
 public:
  PolicyEvaluator(const LayeredGop& gop, TransmissionPolicy policy,
                  std::size_t profile_budget = kDefaultProfileBudget);

  const TransmissionPolicy& policy() const { return policy_; }
  double decode_prob(double erasure, std::size_t layer) const;
  // All layers at once, given precomputed p^R (1-p)^(theta-R).
  void decode_probs(std::span<const double> weights, std::span<double> out) const;

 private:
  TransmissionPolicy policy_;
  std::size_t theta_ = 0;
  std::size_t layers_ = 0;
  std::vector<double> coeff_;  // layers_ x (theta_ + 1)
};

struct PolicySelection {
  TransmissionPolicy policy;
  std::size_t protected_layers = 0;  // leading layers meeting lambda
  std::vector<double> layer_probs;   // all-receiver probability per layer
};

// Evaluates every policy for one (GOP, theta) pair; reusable across erasure
// vectors.
class PolicySearch {
 public:
  PolicySearch(const LayeredGop& gop, std::size_t theta, std::size_t policy_budget = kDefaultPolicyBudget,
               std::size_t profile_budget = kDefaultProfileBudget);

  // Maximises the number of leading layers whose all-receiver probability
  // is >= lambda; ties prefer the higher probability on the next layer, then
  // the lexicographically smallest policy.
  PolicySelection select(std::span<const double> erasures, double lambda) const;
  std::vector<double> layer_probs(std::size_t policy_index, std::span<const double> erasures) const;
  const std::vector<TransmissionPolicy>& policies() const { return policies_; }

 private:
  LayeredGop gop_;
  std::size_t theta_;
  std::vector<TransmissionPolicy> policies_;
  std::vector<PolicyEvaluator> evaluators_;
};

PolicySelection select_policy(const LayeredGop& gop, std::size_t theta, std::span<const double> erasures,
                              double lambda);

}  // namespace idnc
