#include "idnc/rlnc.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "idnc/completion.hpp"
#include "idnc/errors.hpp"
#include "idnc/rng.hpp"

namespace idnc {

namespace {

void check_policy(const LayeredGop& gop, const TransmissionPolicy& policy) {
  if (policy.size() != gop.layer_count())
    throw std::invalid_argument("policy needs one entry per layer");
}

void check_layer(const LayeredGop& gop, std::size_t layer) {
  if (layer < 1 || layer > gop.layer_count()) throw std::invalid_argument("layer must lie in [1, L]");
}

// prod(theta_k + 1), saturating just past `cap`.
std::size_t profile_count(const TransmissionPolicy& policy, std::size_t cap) {
  std::size_t count = 1;
  for (std::size_t t : policy) {
    if (count > cap / (t + 1)) return cap + 1;
    count *= t + 1;
  }
  return count;
}

// Calls visit(profile) for every r with 0 <= r_k <= theta_k.
template <typename Visit>
void for_each_profile(const TransmissionPolicy& policy, Visit&& visit) {
  ReceptionProfile r(policy.size(), 0);
  while (true) {
    visit(static_cast<const ReceptionProfile&>(r));
    std::size_t k = 0;
    while (k < r.size() && r[k] == policy[k]) r[k++] = 0;
    if (k == r.size()) return;
    ++r[k];
  }
}

void compositions(std::size_t remaining, std::size_t part, TransmissionPolicy& cur,
                  std::vector<TransmissionPolicy>& out) {
  if (part + 1 == cur.size()) {
    cur[part] = remaining;
    out.push_back(cur);
    return;
  }
  for (std::size_t v = 0; v <= remaining; ++v) {
    cur[part] = v;
    compositions(remaining - v, part + 1, cur, out);
  }
}

double binomial_pmf(std::size_t n, std::size_t k, double p) {
  return binomial_coefficient(n, k) * std::pow(p, static_cast<double>(k)) *
         std::pow(1.0 - p, static_cast<double>(n - k));
}

std::vector<double> reception_weights(std::size_t theta, double erasure) {
  const double p = 1.0 - erasure;
  std::vector<double> w(theta + 1);
  for (std::size_t r = 0; r <= theta; ++r)
    w[r] = std::pow(p, static_cast<double>(r)) * std::pow(erasure, static_cast<double>(theta - r));
  return w;
}

bool definitely_greater(double a, double b) {
  return a - b > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

std::vector<TransmissionPolicy> enumerate_policies(std::size_t theta, std::size_t layers,
                                                   std::size_t budget) {
  if (layers < 1) throw std::invalid_argument("at least one layer is required");
  // C(theta + layers - 1, layers - 1) evaluated in floating point for the guard.
  const double count = binomial_coefficient(theta + layers - 1, layers - 1);
  if (count > static_cast<double>(budget))
    throw BudgetExceeded("EW-RLNC policy space has " + std::to_string(static_cast<long double>(count)) +
                         " policies (budget " + std::to_string(budget) +
                         "); reduce theta or the number of layers");
  std::vector<TransmissionPolicy> out;
  out.reserve(static_cast<std::size_t>(count));
  TransmissionPolicy cur(layers, 0);
  compositions(theta, 0, cur, out);
  return out;
}

std::size_t decodable_layers(const LayeredGop& gop, std::span<const std::size_t> received) {
  if (received.size() != gop.layer_count())
    throw std::invalid_argument("reception profile needs one entry per layer");
  for (std::size_t j = gop.layer_count(); j >= 1; --j) {
    bool full_rank = true;
    std::size_t rows = 0;
    // Scan m = j-1 down to 0, accumulating receptions from windows m+1..j.
    for (std::size_t m = j; m-- > 0 && full_rank;) {
      rows += received[m];
      full_rank = rows >= gop.prefix_size(j) - gop.prefix_size(m);
    }
    if (full_rank) return j;
  }
  return 0;
}

ProbabilityEstimate per_receiver_decode_prob(const LayeredGop& gop, const TransmissionPolicy& policy,
                                             double erasure, std::size_t layer,
                                             const DecodeProbOptions& options) {
  check_policy(gop, policy);
  check_layer(gop, layer);
  if (!(erasure >= 0.0 && erasure < 1.0)) throw std::invalid_argument("erasure must lie in [0, 1)");
  const double p = 1.0 - erasure;

  if (profile_count(policy, options.profile_budget) <= options.profile_budget) {
    double sum = 0.0;
    for_each_profile(policy, [&](const ReceptionProfile& r) {
      if (decodable_layers(gop, r) < layer) return;
      double prob = 1.0;
      for (std::size_t k = 0; k < r.size(); ++k) prob *= binomial_pmf(policy[k], r[k], p);
      sum += prob;
    });
    return {std::min(sum, 1.0), 0.0, true};
  }

  if (options.samples == 0) throw std::invalid_argument("Monte Carlo fallback needs samples");
  RandomStream rng(options.seed, StreamTag::RlncMonteCarlo, 0);
  std::size_t hits = 0;
  ReceptionProfile r(policy.size());
  for (std::size_t s = 0; s < options.samples; ++s) {
    for (std::size_t k = 0; k < policy.size(); ++k) {
      r[k] = 0;
      for (std::size_t t = 0; t < policy[k]; ++t) r[k] += rng.uniform() >= erasure;
    }
    hits += decodable_layers(gop, r) >= layer;
  }
  const double n = static_cast<double>(options.samples);
  const double value = static_cast<double>(hits) / n;
  return {value, std::sqrt(value * (1.0 - value) / n), false};
}

ProbabilityEstimate all_receivers_prob(const LayeredGop& gop, const TransmissionPolicy& policy,
                                       std::span<const double> erasures, std::size_t layer,
                                       const DecodeProbOptions& options) {
  ProbabilityEstimate total{1.0, 0.0, true};
  std::vector<ProbabilityEstimate> parts;
  for (double e : erasures) {
    parts.push_back(per_receiver_decode_prob(gop, policy, e, layer, options));
    total.value *= parts.back().value;
    total.exact = total.exact && parts.back().exact;
  }
  double var = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].exact) continue;
    double others = 1.0;
    for (std::size_t k = 0; k < parts.size(); ++k)
      if (k != i) others *= parts[k].value;
    var += others * others * parts[i].std_error * parts[i].std_error;
  }
  total.std_error = std::sqrt(var);
  return total;
}

PolicyEvaluator::PolicyEvaluator(const LayeredGop& gop, TransmissionPolicy policy,
                                 std::size_t profile_budget)
    : policy_(std::move(policy)) {
  check_policy(gop, policy_);
  if (profile_count(policy_, profile_budget) > profile_budget)
    throw BudgetExceeded("policy has too many reception profiles for exact evaluation");
  layers_ = gop.layer_count();
  for (std::size_t t : policy_) theta_ += t;
  coeff_.assign(layers_ * (theta_ + 1), 0.0);
  for_each_profile(policy_, [&](const ReceptionProfile& r) {
    const std::size_t decoded = decodable_layers(gop, r);
    if (decoded == 0) return;
    double ways = 1.0;
    std::size_t total = 0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      ways *= binomial_coefficient(policy_[k], r[k]);
      total += r[k];
    }
    for (std::size_t l = 1; l <= decoded; ++l) coeff_[(l - 1) * (theta_ + 1) + total] += ways;
  });
}

double PolicyEvaluator::decode_prob(double erasure, std::size_t layer) const {
  if (layer < 1 || layer > layers_) throw std::invalid_argument("layer must lie in [1, L]");
  std::vector<double> out(layers_);
  decode_probs(reception_weights(theta_, erasure), out);
  return out[layer - 1];
}

void PolicyEvaluator::decode_probs(std::span<const double> weights, std::span<double> out) const {
  for (std::size_t l = 0; l < layers_; ++l) {
    const double* c = &coeff_[l * (theta_ + 1)];
    double sum = 0.0;
    for (std::size_t r = 0; r <= theta_; ++r) sum += c[r] * weights[r];
    out[l] = std::min(sum, 1.0);
  }
}

PolicySearch::PolicySearch(const LayeredGop& gop, std::size_t theta, std::size_t policy_budget,
                           std::size_t profile_budget)
    : gop_(gop), theta_(theta), policies_(enumerate_policies(theta, gop.layer_count(), policy_budget)) {
  evaluators_.reserve(policies_.size());
  for (const auto& z : policies_) evaluators_.emplace_back(gop_, z, profile_budget);
}

std::vector<double> PolicySearch::layer_probs(std::size_t policy_index,
                                              std::span<const double> erasures) const {
  const std::size_t layers = gop_.layer_count();
  std::vector<double> total(layers, 1.0), one(layers);
  for (double e : erasures) {
    evaluators_[policy_index].decode_probs(reception_weights(theta_, e), one);
    for (std::size_t l = 0; l < layers; ++l) total[l] *= one[l];
  }
  return total;
}

PolicySelection PolicySearch::select(std::span<const double> erasures, double lambda) const {
  validate_erasures(erasures);
  const std::size_t layers = gop_.layer_count();
  std::vector<std::vector<double>> weights;
  weights.reserve(erasures.size());
  for (double e : erasures) weights.push_back(reception_weights(theta_, e));

  std::optional<PolicySelection> best;
  double best_next = 0.0;
  std::vector<double> one(layers);
  for (std::size_t k = 0; k < policies_.size(); ++k) {
    std::vector<double> probs(layers, 1.0);
    for (const auto& w : weights) {
      evaluators_[k].decode_probs(w, one);
      for (std::size_t l = 0; l < layers; ++l) probs[l] *= one[l];
    }
    std::size_t protected_layers = 0;
    while (protected_layers < layers && probs[protected_layers] >= lambda) ++protected_layers;
    const double next = protected_layers < layers ? probs[protected_layers] : 0.0;
    const bool better =
        !best || protected_layers > best->protected_layers ||
        (protected_layers == best->protected_layers && definitely_greater(next, best_next));
    if (better) {
      best = PolicySelection{policies_[k], protected_layers, std::move(probs)};
      best_next = next;
    }
  }
  return *best;
}

PolicySelection select_policy(const LayeredGop& gop, std::size_t theta, std::span<const double> erasures,
                              double lambda) {
  return PolicySearch(gop, theta).select(erasures, lambda);
}

}  // namespace idnc
