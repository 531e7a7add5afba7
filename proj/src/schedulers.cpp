#include "idnc/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "idnc/errors.hpp"

namespace idnc {

namespace {

constexpr double kTieTolerance = 1e-12;

bool definitely_less(double a, double b) {
  return b - a > kTieTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

bool definitely_greater(double a, double b) { return definitely_less(b, a); }

// Log objectives can be arbitrarily close to zero, so no absolute floor.
bool log_greater(double a, double b) { return a - b > kTieTolerance * std::max(std::abs(a), std::abs(b)); }

void check_erasures(const ReceiverPartition& p, std::span<const double> erasures) {
  if (erasures.size() != p.receivers())
    throw std::invalid_argument("one erasure probability per receiver is required");
  validate_erasures(erasures);
}

// Vertices of the window graph whose receiver is in class `cls`.
VertexSet vertices_of_class(const WindowState& s, ReceiverClass cls) {
  VertexSet set = s.graph.none();
  for (std::size_t k = 0; k < s.graph.size(); ++k)
    if (s.partition.classes[s.graph.vertex(k).receiver] == cls) set.set(k);
  return set;
}

// Receivers owning at least one vertex of `set`, as a membership mask.
std::vector<bool> owners(const IdncGraph& g, const VertexSet& set, std::size_t receivers) {
  std::vector<bool> mask(receivers, false);
  for (auto k = set.find_first(); k != VertexSet::npos; k = set.find_next(k))
    mask[g.vertex(k).receiver] = true;
  return mask;
}

double reception(std::span<const double> erasures, std::size_t i) { return 1.0 - erasures[i]; }

SchedulerDecision finish(const WindowState& s, Clique clique, std::span<const double> erasures) {
  SchedulerDecision d;
  d.window = s.partition.window;
  d.bound = post_selection_bound(s.partition, clique.targeted(), erasures);
  d.clique = std::move(clique);
  return d;
}

// Greedy stage minimising the lower bound on newly affected receivers: every
// step adds the candidate whose own receiver plus the receivers still
// reachable through its candidate neighbours carry the most reception mass.
// Also used to keep the channel busy when only affected receivers remain.
void greedy_mass_stage(const WindowState& s, std::span<const double> erasures, VertexSet cand,
                       VertexSet& chosen) {
  const auto& g = s.graph;
  const std::size_t receivers = s.partition.receivers();
  while (cand.any()) {
    std::size_t pick = VertexSet::npos;
    double best_gain = 0.0;
    for (auto v = cand.find_first(); v != VertexSet::npos; v = cand.find_next(v)) {
      const auto reachable = owners(g, cand & g.neighbours(v), receivers);
      double gain = reception(erasures, g.vertex(v).receiver);
      for (std::size_t m = 0; m < receivers; ++m)
        if (reachable[m]) gain += reception(erasures, m);
      if (pick == VertexSet::npos || definitely_greater(gain, best_gain)) {
        pick = v;
        best_gain = gain;
      }
    }
    chosen.set(pick);
    cand &= g.neighbours(pick);
  }
}

}  // namespace

WindowState analyze_window(const StateFeedbackMatrix& sfm, const LayeredGop& gop, std::size_t window,
                           std::size_t remaining) {
  return {classify_receivers(sfm, gop, window, remaining), IdncGraph::build(sfm, gop, window)};
}

double expected_affected_increase(const ReceiverPartition& partition,
                                  std::span<const std::size_t> targeted_critical,
                                  std::span<const double> erasures) {
  check_erasures(partition, erasures);
  double value = static_cast<double>(partition.critical.size());
  for (std::size_t i : targeted_critical) {
    if (i >= partition.receivers() || partition.classes[i] != ReceiverClass::Critical)
      throw std::invalid_argument("targeted receiver is not critical");
    value -= reception(erasures, i);
  }
  return value;
}

double critical_stage_objective(const ReceiverPartition& partition, const Clique& clique,
                                std::span<const double> erasures) {
  std::vector<std::size_t> xc;
  for (std::size_t i : clique.targeted())
    if (partition.classes[i] == ReceiverClass::Critical) xc.push_back(i);
  return expected_affected_increase(partition, xc, erasures);
}

double noncritical_stage_objective(const ReceiverPartition& partition, const Clique& clique,
                                   std::span<const double> erasures) {
  check_erasures(partition, erasures);
  if (partition.remaining < 1) throw std::invalid_argument("stage objective needs Q >= 1");
  const std::size_t q = partition.remaining;
  double product = 1.0;
  for (std::size_t i : partition.non_critical) {
    const bool targeted = clique.targets(i);
    product *= prob_complete_within(partition.wants[i], targeted ? q : q - 1, erasures[i]);
  }
  return product;
}

double noncritical_stage_log_objective(const ReceiverPartition& partition, const Clique& clique,
                                       std::span<const double> erasures) {
  check_erasures(partition, erasures);
  if (partition.remaining < 1) throw std::invalid_argument("stage objective needs Q >= 1");
  const std::size_t q = partition.remaining;
  double sum = 0.0;
  for (std::size_t i : partition.non_critical)
    sum += log_prob_complete_within(partition.wants[i], clique.targets(i) ? q : q - 1, erasures[i]);
  return sum;
}

SchedulerDecision select_clique_heuristic(const WindowState& s, std::span<const double> erasures) {
  check_erasures(s.partition, erasures);
  const auto& p = s.partition;
  const auto& g = s.graph;
  if (p.remaining < 1) throw std::invalid_argument("clique selection needs Q >= 1");
  const std::size_t q = p.remaining;
  VertexSet chosen = g.none();

  // Stage 1: critical receivers.
  greedy_mass_stage(s, erasures, vertices_of_class(s, ReceiverClass::Critical), chosen);

  // Stage 2: non-critical receivers compatible with the critical clique.
  VertexSet cand = vertices_of_class(s, ReceiverClass::NonCritical);
  for (auto k = chosen.find_first(); k != VertexSet::npos; k = chosen.find_next(k))
    cand &= g.neighbours(k);
  std::vector<double> served(p.receivers()), ignored(p.receivers());
  for (std::size_t i : p.non_critical) {
    served[i] = log_prob_complete_within(p.wants[i], q, erasures[i]);
    ignored[i] = log_prob_complete_within(p.wants[i], q - 1, erasures[i]);
  }
  std::vector<bool> in_kb(p.receivers(), false);
  while (cand.any()) {
    std::size_t pick = VertexSet::npos;
    double best = 0.0;
    for (auto v = cand.find_first(); v != VertexSet::npos; v = cand.find_next(v)) {
      auto reachable = owners(g, cand & g.neighbours(v), p.receivers());
      reachable[g.vertex(v).receiver] = true;
      double prob = 0.0;
      for (std::size_t i : p.non_critical) prob += (reachable[i] || in_kb[i]) ? served[i] : ignored[i];
      if (pick == VertexSet::npos || log_greater(prob, best)) {
        pick = v;
        best = prob;
      }
    }
    chosen.set(pick);
    in_kb[g.vertex(pick).receiver] = true;
    cand &= g.neighbours(pick);
  }

  // Only affected receivers left in the window: best-effort service.
  if (chosen.none())
    greedy_mass_stage(s, erasures, vertices_of_class(s, ReceiverClass::Affected), chosen);

  return finish(s, g.clique_of(chosen), erasures);
}

SchedulerDecision select_clique_heuristic(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                                          std::size_t window, std::size_t remaining,
                                          std::span<const double> erasures) {
  return select_clique_heuristic(analyze_window(sfm, gop, window, remaining), erasures);
}

SchedulerDecision select_clique_exact(const WindowState& s, std::span<const double> erasures,
                                      std::size_t vertex_budget) {
  check_erasures(s.partition, erasures);
  const auto& p = s.partition;
  const auto& g = s.graph;
  if (p.remaining < 1) throw std::invalid_argument("clique selection needs Q >= 1");

  // Stage 1: all maximal critical cliques attaining the minimum.
  std::vector<Clique> stage1{Clique{}};
  const VertexSet critical = vertices_of_class(s, ReceiverClass::Critical);
  if (critical.any()) {
    const auto cliques = enumerate_maximal_cliques(g.induced(critical), vertex_budget);
    double best = 0.0;
    stage1.clear();
    for (const auto& c : cliques) {
      const double obj = critical_stage_objective(p, c, erasures);
      if (stage1.empty() || definitely_less(obj, best)) {
        stage1 = {c};
        best = obj;
      } else if (!definitely_greater(obj, best)) {
        stage1.push_back(c);
      }
    }
  }

  // Stage 2 over the non-critical vertices adjacent to each stage-1 optimum.
  const VertexSet non_critical = vertices_of_class(s, ReceiverClass::NonCritical);
  std::optional<Clique> best_clique;
  double best_value = 0.0;
  for (const auto& kc : stage1) {
    const VertexSet sub = non_critical & g.common_neighbours(kc);
    std::vector<Clique> stage2{Clique{}};
    if (sub.any()) stage2 = enumerate_maximal_cliques(g.induced(sub), vertex_budget);
    for (const auto& kb : stage2) {
      const Clique k = kc.united(kb);
      const double value = noncritical_stage_log_objective(p, k, erasures);
      if (!best_clique || log_greater(value, best_value)) {
        best_clique = k;
        best_value = value;
      }
    }
  }
  Clique result = best_clique.value_or(Clique{});

  if (result.empty()) {
    const VertexSet affected = vertices_of_class(s, ReceiverClass::Affected);
    if (affected.any()) {
      double best_mass = 0.0;
      for (const auto& c : enumerate_maximal_cliques(g.induced(affected), vertex_budget)) {
        double mass = 0.0;
        for (std::size_t i : c.targeted()) mass += reception(erasures, i);
        if (result.empty() || definitely_greater(mass, best_mass)) {
          result = c;
          best_mass = mass;
        }
      }
    }
  }
  return finish(s, std::move(result), erasures);
}

SchedulerDecision select_clique_exact(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                                      std::size_t window, std::size_t remaining,
                                      std::span<const double> erasures, std::size_t vertex_budget) {
  return select_clique_exact(analyze_window(sfm, gop, window, remaining), erasures, vertex_budget);
}

SchedulerDecision select_clique(const WindowState& state, std::span<const double> erasures,
                                const SelectorOptions& options) {
  if (options.selector == CliqueSelector::Exact)
    return select_clique_exact(state, erasures, options.vertex_budget);
  return select_clique_heuristic(state, erasures);
}

SchedulerDecision ew_idnc_step(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                               const SessionClock& clock, double lambda,
                               std::span<const double> erasures, const SelectorOptions& options) {
  const auto smallest = smallest_feasible_window(sfm, gop);
  if (!smallest) throw ContractViolation("no receiver is missing a packet");
  const std::size_t q = clock.remaining();
  if (q < 1) throw ContractViolation("deadline already passed");
  const std::size_t largest = largest_feasible_window(sfm, gop, q);

  std::optional<SchedulerDecision> previous;
  std::vector<WindowTrial> trials;
  for (std::size_t w = *smallest; w <= largest; ++w) {
    SchedulerDecision d = select_clique(analyze_window(sfm, gop, w, q), erasures, options);
    trials.push_back({w, d.bound.value});
    const bool met = d.bound.value >= lambda;
    if (met && w < largest) {
      previous = std::move(d);
      continue;
    }
    SchedulerDecision out = (met || !previous) ? std::move(d) : std::move(*previous);
    out.trials = std::move(trials);
    return out;
  }
  throw std::logic_error("feasible window range is empty");
}

SchedulerDecision now_idnc_step(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                                const SessionClock& clock, std::span<const double> erasures,
                                const SelectorOptions& options) {
  const auto smallest = smallest_feasible_window(sfm, gop);
  if (!smallest) throw ContractViolation("no receiver is missing a packet");
  const std::size_t q = clock.remaining();
  if (q < 1) throw ContractViolation("deadline already passed");
  return select_clique(analyze_window(sfm, gop, *smallest, q), erasures, options);
}

SchedulerDecision max_clique_baseline_step(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                                           const SessionClock& clock,
                                           std::span<const double> erasures,
                                           std::size_t vertex_budget, std::size_t node_budget) {
  const std::size_t q = clock.remaining();
  if (q < 1) throw ContractViolation("deadline already passed");
  const WindowState s = analyze_window(sfm, gop, gop.layer_count(), q);
  if (s.graph.empty()) throw ContractViolation("no receiver is missing a packet");
  check_erasures(s.partition, erasures);

  Clique best;
  if (s.graph.size() <= vertex_budget) {
    for (const auto& c : enumerate_maximal_cliques(s.graph, vertex_budget)) {
      if (best.empty() || c.size() > best.size() ||
          (c.size() == best.size() && c.packet_index_sum() < best.packet_index_sum()))
        best = c;
    }
  } else if (auto found = maximum_clique(s.graph, node_budget)) {
    best = std::move(*found);
  } else {
    best = greedy_max_degree_clique(s.graph);
  }
  return finish(s, std::move(best), erasures);
}

}  // namespace idnc
