#pragma once

// Per-slot packet selection for layered IDNC broadcast.
//
// Selection over a window runs in two stages: a clique over the critical
// receivers (W_i == Q) minimising the expected growth of the affected set,
// then a clique over the non-critical receivers compatible with it,
// maximising the completion-probability bound. EW-IDNC grows the window
// while the post-selection bound meets the threshold; NOW-IDNC stays on the
// smallest feasible window.

#include <cstddef>
#include <span>
#include <vector>

#include "idnc/completion.hpp"
#include "idnc/idnc_graph.hpp"
#include "idnc/video_model.hpp"

namespace idnc {

enum class CliqueSelector { Heuristic, Exact };

struct SelectorOptions {
  CliqueSelector selector = CliqueSelector::Heuristic;
  std::size_t vertex_budget = kDefaultVertexBudget;
};

struct WindowState {
  ReceiverPartition partition;
  IdncGraph graph;
};

WindowState analyze_window(const StateFeedbackMatrix& sfm, const LayeredGop& gop, std::size_t window,
                           std::size_t remaining);

struct WindowTrial {
  std::size_t window;
  double bound;
};

struct SchedulerDecision {
  Clique clique;
  std::size_t window = 0;
  CompletionBound bound;
  // Windows evaluated by EW-IDNC, in order; empty for other policies.
  std::vector<WindowTrial> trials;
};

// C - sum over targeted critical receivers of (1 - eps_i).
double expected_affected_increase(const ReceiverPartition& partition,
                                  std::span<const std::size_t> targeted_critical,
                                  std::span<const double> erasures);

// Stage objectives of an arbitrary clique: the critical-stage value uses the
// critical receivers it targets, the non-critical-stage value the
// non-critical ones.
double critical_stage_objective(const ReceiverPartition& partition, const Clique& clique,
                                std::span<const double> erasures);
double noncritical_stage_objective(const ReceiverPartition& partition, const Clique& clique,
                                   std::span<const double> erasures);
// Logarithm of the above, computed from the miss probabilities; the
// selectors rank cliques by this since the product rounds to 1 when Q is
// large.
double noncritical_stage_log_objective(const ReceiverPartition& partition, const Clique& clique,
                                       std::span<const double> erasures);

// Exhaustive two-stage optimum. Stage-1 ties are resolved by the best stage-2
// value reachable from them. Throws OracleUnavailable past the vertex budget.
SchedulerDecision select_clique_exact(const WindowState& state, std::span<const double> erasures,
                                      std::size_t vertex_budget = kDefaultVertexBudget);
SchedulerDecision select_clique_exact(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                                      std::size_t window, std::size_t remaining,
                                      std::span<const double> erasures,
                                      std::size_t vertex_budget = kDefaultVertexBudget);

// Greedy vertex search for both stages.
SchedulerDecision select_clique_heuristic(const WindowState& state, std::span<const double> erasures);
SchedulerDecision select_clique_heuristic(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                                          std::size_t window, std::size_t remaining,
                                          std::span<const double> erasures);

SchedulerDecision select_clique(const WindowState& state, std::span<const double> erasures,
                                const SelectorOptions& options);

SchedulerDecision ew_idnc_step(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                               const SessionClock& clock, double lambda,
                               std::span<const double> erasures, const SelectorOptions& options = {});

SchedulerDecision now_idnc_step(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                                const SessionClock& clock, std::span<const double> erasures,
                                const SelectorOptions& options = {});

inline constexpr std::size_t kDefaultCliqueNodeBudget = 200'000;

// Serves the most receivers over the whole GOP, ignoring layers and deadline.
// Exact enumeration within the vertex budget, branch and bound above it,
// greedy by degree if the search exceeds its node budget.
SchedulerDecision max_clique_baseline_step(const StateFeedbackMatrix& sfm, const LayeredGop& gop,
                                           const SessionClock& clock,
                                           std::span<const double> erasures,
                                           std::size_t vertex_budget = kDefaultVertexBudget,
                                           std::size_t node_budget = kDefaultCliqueNodeBudget);

}  // namespace idnc
