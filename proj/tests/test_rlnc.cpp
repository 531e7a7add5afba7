#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>

#include "fixtures.hpp"
#include "idnc/errors.hpp"
#include "idnc/rlnc.hpp"

using namespace idnc;

namespace {

// Arithmetic mod 2^31 - 1, large enough that random coefficients are
// generic with overwhelming probability.
constexpr std::uint64_t kPrime = 2147483647ULL;

std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e) {
  std::uint64_t r = 1;
  for (b %= kPrime; e; e >>= 1, b = b * b % kPrime)
    if (e & 1) r = r * b % kPrime;
  return r;
}

std::size_t rank_mod_p(std::vector<std::vector<std::uint64_t>> a) {
  if (a.empty()) return 0;
  const std::size_t cols = a.front().size();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < a.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < a.size() && a[pivot][c] == 0) ++pivot;
    if (pivot == a.size()) continue;
    std::swap(a[pivot], a[rank]);
    const std::uint64_t inv = pow_mod(a[rank][c], kPrime - 2);
    for (auto& x : a[rank]) x = x * inv % kPrime;
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (r == rank || a[r][c] == 0) continue;
      const std::uint64_t f = a[r][c];
      for (std::size_t k = 0; k < cols; ++k) a[r][k] = (a[r][k] + (kPrime - f) * a[rank][k]) % kPrime;
    }
    ++rank;
  }
  return rank;
}

// Layers recovered by actually solving random window-w combinations.
std::size_t decoded_by_elimination(const LayeredGop& gop, const std::vector<std::size_t>& received,
                                   std::mt19937_64& rng) {
  const std::size_t n = gop.packet_count();
  std::uniform_int_distribution<std::uint64_t> coef(1, kPrime - 1);
  std::vector<std::vector<std::uint64_t>> rows;
  for (std::size_t w = 1; w <= gop.layer_count(); ++w)
    for (std::size_t t = 0; t < received[w - 1]; ++t) {
      std::vector<std::uint64_t> row(n, 0);
      for (std::size_t j = 0; j < gop.prefix_size(w); ++j) row[j] = coef(rng);
      rows.push_back(row);
    }
  const std::size_t base = rank_mod_p(rows);
  std::size_t layers = 0;
  std::size_t packet = 0;
  for (std::size_t w = 1; w <= gop.layer_count(); ++w) {
    for (; packet < gop.prefix_size(w); ++packet) {
      auto extended = rows;
      std::vector<std::uint64_t> unit(n, 0);
      unit[packet] = 1;
      extended.push_back(unit);
      if (rank_mod_p(extended) != base) return layers;
    }
    layers = w;
  }
  return layers;
}

// Sums over every per-slot reception pattern: slot s carries window w(s).
double decode_prob_by_patterns(const LayeredGop& gop, const TransmissionPolicy& policy, double eps,
                               std::size_t layer) {
  std::vector<std::size_t> window_of_slot;
  for (std::size_t w = 0; w < policy.size(); ++w)
    for (std::size_t t = 0; t < policy[w]; ++t) window_of_slot.push_back(w);
  const std::size_t theta = window_of_slot.size();
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << theta); ++mask) {
    std::vector<std::size_t> r(policy.size(), 0);
    double prob = 1.0;
    for (std::size_t s = 0; s < theta; ++s) {
      const bool got = (mask >> s) & 1u;
      prob *= got ? 1.0 - eps : eps;
      r[window_of_slot[s]] += got;
    }
    if (decodable_layers(gop, r) >= layer) total += prob;
  }
  return total;
}

std::vector<double> layer_probs_oracle(const LayeredGop& gop, const TransmissionPolicy& z,
                                       const std::vector<double>& eps) {
  std::vector<double> out(gop.layer_count(), 1.0);
  for (std::size_t l = 1; l <= gop.layer_count(); ++l)
    for (double e : eps) out[l - 1] *= decode_prob_by_patterns(gop, z, e, l);
  return out;
}

}  // namespace

TEST_SUITE("rlnc") {

TEST_CASE("policy enumeration") {
  CHECK(enumerate_policies(25, 4).size() == 3276);
  CHECK(enumerate_policies(2, 2) == std::vector<TransmissionPolicy>{{0, 2}, {1, 1}, {2, 0}});
  CHECK(enumerate_policies(0, 3) == std::vector<TransmissionPolicy>{{0, 0, 0}});
  CHECK(enumerate_policies(7, 1) == std::vector<TransmissionPolicy>{{7}});
  CHECK_THROWS_AS(enumerate_policies(25, 4, 100), BudgetExceeded);
  const auto all = enumerate_policies(6, 3);
  CHECK(all.size() == 28);
  for (std::size_t k = 1; k < all.size(); ++k) CHECK(all[k - 1] < all[k]);
}

TEST_CASE("decodable layers from reception counts") {
  const LayeredGop gop({2, 1});
  CHECK(decodable_layers(gop, std::vector<std::size_t>{2, 0}) == 1);
  CHECK(decodable_layers(gop, std::vector<std::size_t>{3, 0}) == 1);
  CHECK(decodable_layers(gop, std::vector<std::size_t>{1, 2}) == 2);
  CHECK(decodable_layers(gop, std::vector<std::size_t>{0, 3}) == 2);
  CHECK(decodable_layers(gop, std::vector<std::size_t>{0, 2}) == 0);
  CHECK(decodable_layers(gop, std::vector<std::size_t>{1, 0}) == 0);
  CHECK(decodable_layers(gop, std::vector<std::size_t>{2, 1}) == 2);
  // Receptions from a later window never stand in for a missing earlier one.
  CHECK(decodable_layers(LayeredGop({1, 1, 1}), std::vector<std::size_t>{0, 0, 2}) == 0);
  CHECK(decodable_layers(LayeredGop({1, 1, 1}), std::vector<std::size_t>{1, 0, 2}) == 3);
  CHECK_THROWS_AS(decodable_layers(gop, std::vector<std::size_t>{1}), std::invalid_argument);
}

TEST_CASE("generic-rank rule agrees with elimination over a large field") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto gop = fixtures::random_gop(rng, std::uniform_int_distribution<std::size_t>(1, 6)(rng));
    std::vector<std::size_t> received(gop.layer_count());
    for (auto& r : received) r = std::uniform_int_distribution<std::size_t>(0, 4)(rng);
    REQUIRE(decodable_layers(gop, received) == decoded_by_elimination(gop, received, rng));
  }
}

TEST_CASE("per-receiver decode probability") {
  for (double eps : {0.0, 0.1, 0.5, 0.9})
    for (std::size_t theta : {1, 3, 8})
      CHECK(std::abs(per_receiver_decode_prob(LayeredGop({1}), {theta}, eps, 1).value -
                     (1.0 - std::pow(eps, theta))) < 1e-12);

  const LayeredGop two({1, 1});
  CHECK(std::abs(per_receiver_decode_prob(two, {1, 1}, 0.5, 2).value - 0.25) < 1e-12);
  CHECK(std::abs(per_receiver_decode_prob(two, {1, 1}, 0.5, 1).value - 0.5) < 1e-12);
  CHECK(std::abs(per_receiver_decode_prob(two, {0, 2}, 0.5, 1).value - 0.25) < 1e-12);
  CHECK(per_receiver_decode_prob(LayeredGop({3}), {2}, 0.0, 1).value == 0.0);
  CHECK(std::abs(all_receivers_prob(two, {1, 1}, std::vector<double>{0.5, 0.5}, 1).value - 0.25) < 1e-12);
  CHECK_THROWS_AS(per_receiver_decode_prob(two, {1, 1}, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(per_receiver_decode_prob(two, {1, 1}, 0.5, 3), std::invalid_argument);
}

TEST_CASE("exact evaluators match slot-pattern enumeration") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> unit(0.0, 0.9);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto gop = fixtures::random_gop(rng, std::uniform_int_distribution<std::size_t>(1, 5)(rng));
    const std::size_t theta = std::uniform_int_distribution<std::size_t>(0, 10)(rng);
    const auto policies = enumerate_policies(theta, gop.layer_count());
    const auto& z = policies[std::uniform_int_distribution<std::size_t>(0, policies.size() - 1)(rng)];
    const double eps = unit(rng);
    const std::size_t layer = std::uniform_int_distribution<std::size_t>(1, gop.layer_count())(rng);
    const double oracle = decode_prob_by_patterns(gop, z, eps, layer);
    const auto direct = per_receiver_decode_prob(gop, z, eps, layer);
    REQUIRE(direct.exact);
    REQUIRE(std::abs(direct.value - oracle) < 1e-12);
    REQUIRE(std::abs(PolicyEvaluator(gop, z).decode_prob(eps, layer) - oracle) < 1e-12);
  }
}

TEST_CASE("decode probability is monotone") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> unit(0.0, 0.95);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto gop = fixtures::random_gop(rng, std::uniform_int_distribution<std::size_t>(1, 6)(rng));
    const std::size_t theta = std::uniform_int_distribution<std::size_t>(0, 12)(rng);
    const auto policies = enumerate_policies(theta, gop.layer_count());
    const auto& z = policies[std::uniform_int_distribution<std::size_t>(0, policies.size() - 1)(rng)];
    const PolicyEvaluator ev(gop, z);
    double a = unit(rng), b = unit(rng);
    if (a > b) std::swap(a, b);
    for (std::size_t l = 1; l <= gop.layer_count(); ++l) {
      REQUIRE(ev.decode_prob(a, l) >= ev.decode_prob(b, l) - 1e-12);
      if (l > 1) REQUIRE(ev.decode_prob(a, l) <= ev.decode_prob(a, l - 1) + 1e-12);
    }
  }
}

TEST_CASE("Monte Carlo fallback is consistent with the exact value") {
  const LayeredGop gop({2, 1, 2});
  const TransmissionPolicy z{3, 2, 4};
  const std::vector<double> eps{0.2, 0.35};
  DecodeProbOptions mc;
  mc.profile_budget = 0;
  mc.samples = 200'000;
  for (std::size_t l = 1; l <= 3; ++l) {
    const auto exact = all_receivers_prob(gop, z, eps, l);
    const auto approx = all_receivers_prob(gop, z, eps, l, mc);
    REQUIRE(exact.exact);
    REQUIRE_FALSE(approx.exact);
    CHECK(approx.std_error > 0.0);
    CHECK(std::abs(approx.value - exact.value) < 4.0 * approx.std_error);
  }
}

TEST_CASE("policy selection") {
  const std::vector<double> eps{0.3, 0.1};
  CHECK(select_policy(LayeredGop({4}), 9, eps, 0.95).policy == TransmissionPolicy{9});
  CHECK(select_policy(LayeredGop({2, 2, 1}), 6, eps, 0.0).policy == TransmissionPolicy{0, 0, 6});
  const auto all_fail = select_policy(LayeredGop({3, 3}), 4, eps, 0.7);
  CHECK(all_fail.protected_layers == 0);

  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> unit(0.0, 0.6);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto gop = fixtures::random_gop(rng, std::uniform_int_distribution<std::size_t>(1, 4)(rng));
    if (gop.layer_count() > 3) continue;
    const std::size_t theta = std::uniform_int_distribution<std::size_t>(1, 7)(rng);
    std::vector<double> e(std::uniform_int_distribution<std::size_t>(1, 3)(rng));
    for (auto& x : e) x = unit(rng);
    const double lambda = std::uniform_real_distribution<double>(0.0, 1.0)(rng);

    // Independent argmax: leading layers meeting lambda, then next-layer probability.
    std::size_t best_protected = 0;
    double best_next = -1.0;
    for (const auto& z : enumerate_policies(theta, gop.layer_count())) {
      const auto p = layer_probs_oracle(gop, z, e);
      std::size_t k = 0;
      while (k < p.size() && p[k] >= lambda) ++k;
      const double next = k < p.size() ? p[k] : 0.0;
      if (k > best_protected || (k == best_protected && next > best_next)) {
        best_protected = k;
        best_next = next;
      }
    }
    const auto chosen = select_policy(gop, theta, e, lambda);
    const auto p = layer_probs_oracle(gop, chosen.policy, e);
    REQUIRE(chosen.protected_layers == best_protected);
    const double next = best_protected < p.size() ? p[best_protected] : 0.0;
    REQUIRE(std::abs(next - best_next) < 1e-9);
    for (std::size_t l = 0; l < p.size(); ++l) REQUIRE(std::abs(chosen.layer_probs[l] - p[l]) < 1e-12);
  }
}

}  // TEST_SUITE
