#include "idnc/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>
#include <utility>

#include "idnc/errors.hpp"
#include "idnc/idnc_graph.hpp"

namespace idnc {

namespace {

constexpr std::pair<SchedulerKind, std::string_view> kSchedulerNames[] = {
    {SchedulerKind::EwIdnc, "ew-idnc"},
    {SchedulerKind::NowIdnc, "now-idnc"},
    {SchedulerKind::MaxClique, "max-clique"},
    {SchedulerKind::EwRlnc, "ew-rlnc"},
};

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe out;
  if (xs.empty()) return out;
  const double n = static_cast<double>(xs.size());
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

// One PolicySearch per distinct layer-size vector; built on first use.
class PolicyCache {
 public:
  PolicyCache(std::size_t theta, std::size_t policy_budget) : theta_(theta), budget_(policy_budget) {}

  const PolicySearch& get(const LayeredGop& gop) {
    std::lock_guard lock(mutex_);
    const auto sizes = gop.layer_sizes();
    auto& slot = cache_[std::vector<std::size_t>(sizes.begin(), sizes.end())];
    if (!slot) slot = std::make_unique<PolicySearch>(gop, theta_, budget_);
    return *slot;
  }

 private:
  std::size_t theta_;
  std::size_t budget_;
  std::mutex mutex_;
  std::map<std::vector<std::size_t>, std::unique_ptr<PolicySearch>> cache_;
};

EpisodeResult run_rlnc(const BroadcastSession& session, const SchedulerSpec& spec,
                       const ErasureChannel& channel, const PolicySearch& search) {
  const auto& gop = session.gop();
  const auto erasures = session.erasures();
  const auto selection = search.select(erasures, spec.lambda);

  EpisodeResult result;
  result.layers = gop.layer_count();
  result.transmissions = session.theta();
  for (std::size_t i = 0; i < erasures.size(); ++i) {
    ReceptionProfile received(gop.layer_count(), 0);
    std::size_t slot = 1;
    for (std::size_t w = 0; w < selection.policy.size(); ++w)
      for (std::size_t k = 0; k < selection.policy[w]; ++k, ++slot)
        if (channel.delivered(i, slot, erasures[i])) ++received[w];
    result.decoded_layers.push_back(decodable_layers(gop, received));
  }
  return result;
}

}  // namespace

std::string_view scheduler_name(SchedulerKind kind) {
  for (const auto& [k, name] : kSchedulerNames)
    if (k == kind) return name;
  throw ContractViolation("unknown scheduler kind");
}

SchedulerKind parse_scheduler(std::string_view name) {
  for (const auto& [k, n] : kSchedulerNames)
    if (n == name) return k;
  throw ConfigError("unknown scheduler '" + std::string(name) +
                    "' (expected ew-idnc, now-idnc, max-clique or ew-rlnc)");
}

bool ErasureChannel::delivered(std::size_t receiver, std::size_t slot, double erasure) const {
  return counter_uniform(seed_, StreamTag::Erasure, run_, static_cast<std::uint32_t>(receiver),
                         static_cast<std::uint32_t>(slot)) >= erasure;
}

BroadcastSession::BroadcastSession(LayeredGop gop, std::vector<double> erasures, std::size_t theta,
                                   std::optional<StateFeedbackMatrix> initial)
    : gop_(std::move(gop)),
      erasures_(std::move(erasures)),
      theta_(theta),
      state_(initial ? std::move(*initial) : StateFeedbackMatrix(erasures_.size(), gop_.packet_count())) {
  validate_erasures(erasures_);
  if (state_.receivers() != erasures_.size() || state_.packets() != gop_.packet_count())
    throw std::invalid_argument("state dimensions do not match the GOP and receiver count");
}

bool BroadcastSession::complete() const {
  for (std::size_t i = 0; i < state_.receivers(); ++i)
    for (std::size_t j = 0; j < state_.packets(); ++j)
      if (state_.missing(i, j)) return false;
  return true;
}

std::vector<TargetedPacket> BroadcastSession::transmit(std::span<const std::size_t> packets,
                                                       const ErasureChannel& channel) {
  if (slot_ > theta_) throw ContractViolation("transmission after the deadline");
  std::vector<TargetedPacket> recovered;
  std::vector<bool> received(state_.receivers(), false);
  for (std::size_t i = 0; i < state_.receivers(); ++i) {
    if (!channel.delivered(i, slot_, erasures_[i])) continue;
    if (auto p = decode_attempt(packets, state_, i)) {
      recovered.push_back({i, *p});
      received[i] = true;
    }
  }
  state_ = apply_feedback(std::move(state_), recovered, received);
  ++slot_;
  return recovered;
}

std::vector<std::size_t> BroadcastSession::decoded_layers() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < state_.receivers(); ++i) out.push_back(complete_layers(state_, gop_, i));
  return out;
}

double EpisodeResult::min_pct() const {
  if (decoded_layers.empty() || layers == 0) return 0.0;
  return 100.0 * static_cast<double>(*std::min_element(decoded_layers.begin(), decoded_layers.end())) /
         static_cast<double>(layers);
}

double EpisodeResult::mean_pct() const {
  if (decoded_layers.empty() || layers == 0) return 0.0;
  const double sum = std::accumulate(decoded_layers.begin(), decoded_layers.end(), 0.0);
  return 100.0 * sum / static_cast<double>(decoded_layers.size() * layers);
}

SchedulerDecision scheduler_step(const SchedulerSpec& spec, const BroadcastSession& session) {
  const auto clock = session.clock();
  switch (spec.kind) {
    case SchedulerKind::EwIdnc:
      return ew_idnc_step(session.state(), session.gop(), clock, spec.lambda, session.erasures(),
                          spec.selector);
    case SchedulerKind::NowIdnc:
      return now_idnc_step(session.state(), session.gop(), clock, session.erasures(), spec.selector);
    case SchedulerKind::MaxClique:
      return max_clique_baseline_step(session.state(), session.gop(), clock, session.erasures(),
                                      spec.selector.vertex_budget, spec.clique_node_budget);
    case SchedulerKind::EwRlnc:
      break;
  }
  throw ContractViolation("scheduler_step needs an IDNC scheduler");
}

EpisodeResult run_episode(BroadcastSession session, const SchedulerSpec& spec,
                          const ErasureChannel& channel, const PolicySearch* rlnc) {
  if (spec.kind == SchedulerKind::EwRlnc) {
    if (rlnc) return run_rlnc(session, spec, channel, *rlnc);
    const PolicySearch search(session.gop(), session.theta());
    return run_rlnc(session, spec, channel, search);
  }
  while (!session.finished()) {
    const auto decision = scheduler_step(spec, session);
    const auto packets = decision.clique.packets();
    if (packets.empty()) throw ContractViolation("scheduler returned an empty clique");
    session.transmit(packets, channel);
  }
  EpisodeResult result;
  result.layers = session.gop().layer_count();
  result.decoded_layers = session.decoded_layers();
  result.transmissions = session.transmissions();
  return result;
}

std::size_t theta_from_bitrate(double bits_per_second) {
  if (!(bits_per_second > 0.0) || !std::isfinite(bits_per_second))
    throw ConfigError("bitrate must be a positive number");
  const double slots = std::floor(8.0 * bits_per_second / (1500.0 * 8.0 * 30.0));
  if (slots < 1.0) throw ConfigError("bitrate allows less than one packet per GOP deadline");
  return static_cast<std::size_t>(slots);
}

std::vector<double> sample_receiver_erasures(double mean, double spread, std::size_t receivers,
                                             RandomStream& rng) {
  if (!(spread >= 0.0) || !(mean - spread >= 0.0) || !(mean + spread < 1.0))
    throw ConfigError("erasure interval [mean - spread, mean + spread] must lie in [0, 1)");
  std::vector<double> out(receivers);
  for (auto& e : out) e = mean - spread + 2.0 * spread * rng.uniform();
  return out;
}

std::size_t SimConfig::layer_count() const {
  return gop_sampling == GopSampling::Fixed ? layer_sizes.size() : layer_means.size();
}

std::size_t SimConfig::effective_theta() const { return bitrate ? theta_from_bitrate(*bitrate) : theta; }

void SimConfig::validate() const {
  if (gop_sampling == GopSampling::Fixed) {
    if (layer_sizes.empty()) throw ConfigError("layer_sizes must not be empty");
    for (auto n : layer_sizes)
      if (n < 1) throw ConfigError("every layer needs at least one packet");
  } else {
    if (layer_means.empty()) throw ConfigError("layer_means must not be empty");
    for (double m : layer_means)
      if (!(m > 0.0) || !std::isfinite(m)) throw ConfigError("layer means must be positive");
  }
  if (receivers < 1) throw ConfigError("at least one receiver is required");
  if (!(erasure_spread >= 0.0) || !(erasure_mean - erasure_spread >= 0.0) ||
      !(erasure_mean + erasure_spread < 1.0))
    throw ConfigError("erasure interval [mean - spread, mean + spread] must lie in [0, 1)");
  if (effective_theta() < 1) throw ConfigError("theta must be at least 1");
  if (!(scheduler.lambda >= 0.0 && scheduler.lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
  if (runs < 1) throw ConfigError("runs must be at least 1");
  if (scheduler.selector.vertex_budget < 1) throw ConfigError("vertex_budget must be at least 1");
  if (runs > std::numeric_limits<std::uint32_t>::max()) throw ConfigError("too many runs");
}

BroadcastSession make_session(const SimConfig& config, std::uint32_t run) {
  std::vector<std::size_t> sizes = config.layer_sizes;
  if (config.gop_sampling == GopSampling::Poisson) {
    RandomStream rng(config.seed, StreamTag::GopSizes, run);
    sizes.clear();
    for (double m : config.layer_means) {
      std::poisson_distribution<long> dist(m);
      sizes.push_back(static_cast<std::size_t>(std::max(1L, dist(rng))));
    }
  }
  RandomStream erasure_rng(config.seed, StreamTag::ErasureProfile, run);
  auto erasures =
      sample_receiver_erasures(config.erasure_mean, config.erasure_spread, config.receivers, erasure_rng);
  return BroadcastSession(LayeredGop(std::move(sizes)), std::move(erasures), config.effective_theta());
}

std::size_t MonteCarloReport::receiver_runs() const {
  return std::accumulate(histogram.begin(), histogram.end(), std::size_t{0});
}

std::vector<SimConfig> SweepGrid::expand(const SimConfig& base) const {
  auto or_base = []<typename T>(const std::vector<T>& xs, T fallback) {
    return xs.empty() ? std::vector<T>{fallback} : xs;
  };
  std::vector<SimConfig> out;
  for (double lambda : or_base(lambdas, base.scheduler.lambda))
    for (std::size_t theta : or_base(thetas, base.theta))
      for (std::size_t m : or_base(receivers, base.receivers))
        for (double e : or_base(erasure_means, base.erasure_mean)) {
          SimConfig c = base;
          c.scheduler.lambda = lambda;
          if (!thetas.empty()) {
            c.theta = theta;
            c.bitrate.reset();
          }
          c.receivers = m;
          c.erasure_mean = e;
          out.push_back(std::move(c));
        }
  return out;
}

std::vector<MonteCarloReport> sweep(const SimConfig& base, const SweepGrid& grid,
                                    const MonteCarloOptions& options) {
  auto configs = grid.expand(base);
  for (const auto& c : configs) c.validate();
  std::vector<MonteCarloReport> out;
  for (const auto& c : configs) out.push_back(monte_carlo(c, options));
  return out;
}

MonteCarloReport monte_carlo(const SimConfig& config, const MonteCarloOptions& options) {
  config.validate();
  const std::size_t theta = config.effective_theta();
  const std::size_t runs = config.runs;

  PolicyCache cache(theta, config.policy_budget);
  if (config.scheduler.kind == SchedulerKind::EwRlnc && config.gop_sampling == GopSampling::Fixed)
    cache.get(LayeredGop(config.layer_sizes));  // surface budget errors before spawning workers

  std::vector<RunRecord> records(runs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t r = next++; r < runs; r = next++) {
      try {
        auto session = make_session(config, static_cast<std::uint32_t>(r));
        const ErasureChannel channel(config.seed, static_cast<std::uint32_t>(r));
        RunRecord& rec = records[r];
        const auto sizes = session.gop().layer_sizes();
        rec.layer_sizes.assign(sizes.begin(), sizes.end());
        rec.erasures.assign(session.erasures().begin(), session.erasures().end());
        const PolicySearch* search =
            config.scheduler.kind == SchedulerKind::EwRlnc ? &cache.get(session.gop()) : nullptr;
        rec.result = run_episode(std::move(session), config.scheduler, channel, search);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = runs;
      }
    }
  };

  std::size_t threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, runs);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  MonteCarloReport report;
  report.config = config;
  report.theta = theta;
  report.layers = config.layer_count();
  report.histogram.assign(report.layers + 1, 0);
  std::vector<double> mins, means;
  mins.reserve(runs);
  means.reserve(runs);
  for (const auto& rec : records) {
    mins.push_back(rec.result.min_pct());
    means.push_back(rec.result.mean_pct());
    for (auto l : rec.result.decoded_layers) ++report.histogram[l];
  }
  const auto m = mean_se(mins);
  const auto a = mean_se(means);
  report.min_pct_mean = m.mean;
  report.min_pct_se = m.se;
  report.mean_pct_mean = a.mean;
  report.mean_pct_se = a.se;
  if (options.keep_runs) report.runs = std::move(records);
  return report;
}

}  // namespace idnc
