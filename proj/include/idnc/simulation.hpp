#pragma once

// Session driver and Monte Carlo aggregation.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "idnc/rlnc.hpp"
#include "idnc/rng.hpp"
#include "idnc/schedulers.hpp"
#include "idnc/video_model.hpp"

namespace idnc {

enum class SchedulerKind { EwIdnc, NowIdnc, MaxClique, EwRlnc };

std::string_view scheduler_name(SchedulerKind kind);
SchedulerKind parse_scheduler(std::string_view name);  // throws ConfigError

struct SchedulerSpec {
  SchedulerKind kind = SchedulerKind::EwIdnc;
  double lambda = 0.95;
  SelectorOptions selector;
  std::size_t clique_node_budget = kDefaultCliqueNodeBudget;
};

// Independent Bernoulli erasures; the outcome for (receiver, slot) is fixed
// by (seed, run) regardless of what is transmitted.
class ErasureChannel {
 public:
  ErasureChannel(std::uint64_t seed, std::uint32_t run) : seed_(seed), run_(run) {}
  bool delivered(std::size_t receiver, std::size_t slot, double erasure) const;

 private:
  std::uint64_t seed_;
  std::uint32_t run_;
};

class BroadcastSession {
 public:
  // Starts from `initial`, or from an all-missing state when omitted.
  BroadcastSession(LayeredGop gop, std::vector<double> erasures, std::size_t theta,
                   std::optional<StateFeedbackMatrix> initial = std::nullopt);
  // theta = 0 gives a session that is finished before its first slot.

  const LayeredGop& gop() const { return gop_; }
  const StateFeedbackMatrix& state() const { return state_; }
  std::span<const double> erasures() const { return erasures_; }
  std::size_t theta() const { return theta_; }
  std::size_t slot() const { return slot_; }
  std::size_t transmissions() const { return slot_ - 1; }
  SessionClock clock() const { return SessionClock(slot_, theta_); }

  bool complete() const;
  bool finished() const { return slot_ > theta_ || complete(); }

  // Broadcasts the XOR of `packets` in the current slot. Each receiver that
  // gets it and can decode it instantly acknowledges the recovered packet.
  // Returns the (receiver, packet) pairs recovered in this slot.
  std::vector<TargetedPacket> transmit(std::span<const std::size_t> packets,
                                       const ErasureChannel& channel);

  // Complete leading layers per receiver.
  std::vector<std::size_t> decoded_layers() const;

 private:
  LayeredGop gop_;
  std::vector<double> erasures_;
  std::size_t theta_;
  StateFeedbackMatrix state_;
  std::size_t slot_ = 1;
};

struct EpisodeResult {
  std::size_t layers = 0;
  std::vector<std::size_t> decoded_layers;
  std::size_t transmissions = 0;

  double min_pct() const;
  double mean_pct() const;
};

// One IDNC scheduling decision for the session's current slot.
SchedulerDecision scheduler_step(const SchedulerSpec& spec, const BroadcastSession& session);

// Runs the session to its deadline or completion. EW-RLNC sends its policy
// open loop, assuming a fresh GOP; `rlnc` may supply a precomputed search
// for the session's (GOP, theta).
EpisodeResult run_episode(BroadcastSession session, const SchedulerSpec& spec,
                          const ErasureChannel& channel, const PolicySearch* rlnc = nullptr);

// floor(8 * bitrate / (1500 * 8 * 30)); throws ConfigError below one slot.
std::size_t theta_from_bitrate(double bits_per_second);

// Uniform draws in [mean - spread, mean + spread]; throws ConfigError when
// the interval leaves [0, 1).
std::vector<double> sample_receiver_erasures(double mean, double spread, std::size_t receivers,
                                             RandomStream& rng);

enum class GopSampling { Fixed, Poisson };

struct SimConfig {
  std::vector<std::size_t> layer_sizes{8, 3, 3, 3};
  GopSampling gop_sampling = GopSampling::Fixed;
  std::vector<double> layer_means{8.35, 3.11, 3.29, 3.43};  // Poisson sampler means
  std::size_t receivers = 15;
  double erasure_mean = 0.2;
  double erasure_spread = 0.15;
  std::size_t theta = 25;
  std::optional<double> bitrate;  // overrides theta when set
  SchedulerSpec scheduler;
  std::size_t runs = 1000;
  std::uint64_t seed = 1;
  std::size_t policy_budget = kDefaultPolicyBudget;

  std::size_t layer_count() const;
  std::size_t effective_theta() const;
  void validate() const;  // throws ConfigError
};

struct RunRecord {
  std::vector<std::size_t> layer_sizes;
  std::vector<double> erasures;
  EpisodeResult result;
};

struct MonteCarloReport {
  SimConfig config;
  std::size_t theta = 0;
  std::size_t layers = 0;
  double min_pct_mean = 0.0;
  double min_pct_se = 0.0;
  double mean_pct_mean = 0.0;
  double mean_pct_se = 0.0;
  std::vector<std::size_t> histogram;  // receiver-runs by decoded layers 0..L
  std::vector<RunRecord> runs;         // filled when requested

  std::size_t receiver_runs() const;
};

struct MonteCarloOptions {
  std::size_t threads = 0;  // 0: hardware concurrency
  bool keep_runs = false;
};

// Episode setup for run index `run`: GOP, erasure profile and channel all
// derive from (seed, run).
BroadcastSession make_session(const SimConfig& config, std::uint32_t run);

MonteCarloReport monte_carlo(const SimConfig& config, const MonteCarloOptions& options = {});

// Cartesian product of parameter lists; an empty list keeps the base value.
// Iteration order: lambda, theta, receivers, erasure mean (last varies
// fastest).
struct SweepGrid {
  std::vector<double> lambdas;
  std::vector<std::size_t> thetas;
  std::vector<std::size_t> receivers;
  std::vector<double> erasure_means;

  std::vector<SimConfig> expand(const SimConfig& base) const;
};

// Validates every combination before running any.
std::vector<MonteCarloReport> sweep(const SimConfig& base, const SweepGrid& grid,
                                    const MonteCarloOptions& options = {});

}  // namespace idnc
