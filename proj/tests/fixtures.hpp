#pragma once

// Worked-example states and random instance generators shared by the tests.
// Matrices are written 1 = missing, rows are receivers, packets 0-based.

#include <cstddef>
#include <algorithm>
#include <random>
#include <vector>

#include "idnc/video_model.hpp"

namespace fixtures {

// Two receivers, five packets, layers {2,2,1}.
inline idnc::StateFeedbackMatrix example_small() {
  return idnc::StateFeedbackMatrix::from_rows({{1, 0, 1, 1, 1}, {0, 1, 1, 0, 0}});
}
inline idnc::LayeredGop example_small_gop() { return idnc::LayeredGop({2, 2, 1}); }

// Two receivers, two single-packet layers: the window trade-off example.
inline idnc::StateFeedbackMatrix example_tradeoff() {
  return idnc::StateFeedbackMatrix::from_rows({{0, 1}, {1, 1}});
}
inline idnc::LayeredGop example_tradeoff_gop() { return idnc::LayeredGop({1, 1}); }

// Two receivers, six packets, layers {2,2,1,1}: the feasible-window example.
inline idnc::StateFeedbackMatrix example_windows() {
  return idnc::StateFeedbackMatrix::from_rows({{0, 0, 1, 1, 1, 1}, {0, 0, 1, 0, 0, 1}});
}
inline idnc::LayeredGop example_windows_gop() { return idnc::LayeredGop({2, 2, 1, 1}); }

struct Instance {
  idnc::LayeredGop gop;
  idnc::StateFeedbackMatrix sfm;
  std::vector<double> erasures;
};

inline idnc::LayeredGop random_gop(std::mt19937_64& rng, std::size_t packets) {
  std::uniform_int_distribution<std::size_t> layers_dist(1, packets);
  const std::size_t layers = layers_dist(rng);
  // Random composition of `packets` into `layers` positive parts.
  std::vector<std::size_t> cuts(packets - 1);
  for (std::size_t k = 0; k < cuts.size(); ++k) cuts[k] = k + 1;
  std::shuffle(cuts.begin(), cuts.end(), rng);
  cuts.resize(layers - 1);
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::size_t> sizes;
  std::size_t prev = 0;
  for (auto c : cuts) {
    sizes.push_back(c - prev);
    prev = c;
  }
  sizes.push_back(packets - prev);
  return idnc::LayeredGop(sizes);
}

inline Instance random_instance(std::mt19937_64& rng, std::size_t max_receivers = 5,
                                std::size_t max_packets = 8, double missing_rate = -1.0) {
  std::uniform_int_distribution<std::size_t> m_dist(1, max_receivers), n_dist(1, max_packets);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t m = m_dist(rng), n = n_dist(rng);
  const double rate = missing_rate < 0 ? 0.2 + 0.6 * unit(rng) : missing_rate;
  idnc::StateFeedbackMatrix sfm(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (unit(rng) >= rate) sfm.mark_received(i, j);
  std::vector<double> eps(m);
  for (auto& e : eps) e = 0.05 + 0.5 * unit(rng);
  return {random_gop(rng, n), sfm, eps};
}

inline bool all_received(const idnc::StateFeedbackMatrix& sfm) {
  for (std::size_t i = 0; i < sfm.receivers(); ++i)
    for (std::size_t j = 0; j < sfm.packets(); ++j)
      if (sfm.missing(i, j)) return false;
  return true;
}

}  // namespace fixtures
