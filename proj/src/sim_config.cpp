#include "idnc/sim_config.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "idnc/errors.hpp"

namespace idnc {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items())
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

const char* selector_name(CliqueSelector s) { return s == CliqueSelector::Exact ? "exact" : "heuristic"; }

CliqueSelector parse_selector(const std::string& name) {
  if (name == "heuristic") return CliqueSelector::Heuristic;
  if (name == "exact") return CliqueSelector::Exact;
  throw ConfigError("unknown selector '" + name + "' (expected heuristic or exact)");
}

}  // namespace

SimConfig config_from_json(const json& doc, SimConfig c) {
  try {
    check_keys(doc, "config",
               {"gop", "receivers", "erasure", "theta", "bitrate", "scheduler", "rlnc", "runs", "seed"});
    if (doc.contains("gop")) {
      const auto& gop = doc.at("gop");
      check_keys(gop, "gop", {"layer_sizes", "sampler", "layer_means"});
      std::string sampler = c.gop_sampling == GopSampling::Poisson ? "poisson" : "fixed";
      read(gop, "sampler", sampler);
      if (sampler == "fixed") c.gop_sampling = GopSampling::Fixed;
      else if (sampler == "poisson") c.gop_sampling = GopSampling::Poisson;
      else throw ConfigError("unknown gop sampler '" + sampler + "' (expected fixed or poisson)");
      read(gop, "layer_sizes", c.layer_sizes);
      read(gop, "layer_means", c.layer_means);
    }
    read(doc, "receivers", c.receivers);
    if (doc.contains("erasure")) {
      const auto& e = doc.at("erasure");
      check_keys(e, "erasure", {"mean", "spread"});
      read(e, "mean", c.erasure_mean);
      read(e, "spread", c.erasure_spread);
    }
    if (doc.contains("theta") && doc.contains("bitrate"))
      throw ConfigError("give either theta or bitrate, not both");
    if (doc.contains("theta")) {
      read(doc, "theta", c.theta);
      c.bitrate.reset();
    }
    if (doc.contains("bitrate")) c.bitrate = doc.at("bitrate").get<double>();
    if (doc.contains("scheduler")) {
      const auto& s = doc.at("scheduler");
      check_keys(s, "scheduler", {"name", "lambda", "selector", "vertex_budget", "clique_node_budget"});
      if (s.contains("name")) c.scheduler.kind = parse_scheduler(s.at("name").get<std::string>());
      read(s, "lambda", c.scheduler.lambda);
      if (s.contains("selector")) c.scheduler.selector.selector = parse_selector(s.at("selector").get<std::string>());
      read(s, "vertex_budget", c.scheduler.selector.vertex_budget);
      read(s, "clique_node_budget", c.scheduler.clique_node_budget);
    }
    if (doc.contains("rlnc")) {
      const auto& r = doc.at("rlnc");
      check_keys(r, "rlnc", {"policy_budget"});
      read(r, "policy_budget", c.policy_budget);
    }
    read(doc, "runs", c.runs);
    read(doc, "seed", c.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return c;
}

SimConfig load_config(const std::filesystem::path& path, SimConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(doc, std::move(base));
}

json config_to_json(const SimConfig& c) {
  json doc;
  if (c.gop_sampling == GopSampling::Fixed)
    doc["gop"] = {{"sampler", "fixed"}, {"layer_sizes", c.layer_sizes}};
  else
    doc["gop"] = {{"sampler", "poisson"}, {"layer_means", c.layer_means}};
  doc["receivers"] = c.receivers;
  doc["erasure"] = {{"mean", c.erasure_mean}, {"spread", c.erasure_spread}};
  if (c.bitrate) doc["bitrate"] = *c.bitrate;
  else doc["theta"] = c.theta;
  doc["scheduler"] = {{"name", std::string(scheduler_name(c.scheduler.kind))},
                      {"lambda", c.scheduler.lambda},
                      {"selector", selector_name(c.scheduler.selector.selector)},
                      {"vertex_budget", c.scheduler.selector.vertex_budget},
                      {"clique_node_budget", c.scheduler.clique_node_budget}};
  doc["rlnc"] = {{"policy_budget", c.policy_budget}};
  doc["runs"] = c.runs;
  doc["seed"] = c.seed;
  return doc;
}

std::string csv_header(std::size_t layers) {
  std::string h =
      "scheduler,lambda,theta,receivers,erasure_mean,runs,min_pct_mean,min_pct_se,mean_pct_mean,mean_pct_se";
  for (std::size_t l = 0; l <= layers; ++l) h += ",hist_" + std::to_string(l);
  return h;
}

std::string csv_row(const MonteCarloReport& r) {
  const auto& c = r.config;
  std::string row = std::string(scheduler_name(c.scheduler.kind)) + "," + fmt(c.scheduler.lambda) + "," +
                    std::to_string(r.theta) + "," + std::to_string(c.receivers) + "," +
                    fmt(c.erasure_mean) + "," + std::to_string(c.runs) + "," + fmt(r.min_pct_mean) + "," +
                    fmt(r.min_pct_se) + "," + fmt(r.mean_pct_mean) + "," + fmt(r.mean_pct_se);
  const double total = static_cast<double>(r.receiver_runs());
  for (auto count : r.histogram) row += "," + fmt(total > 0 ? 100.0 * static_cast<double>(count) / total : 0.0);
  return row;
}

void write_csv(std::ostream& out, std::span<const MonteCarloReport> reports) {
  std::size_t layers = 0;
  for (const auto& r : reports) layers = std::max(layers, r.layers);
  out << csv_header(layers) << '\n';
  for (const auto& r : reports) {
    out << csv_row(r);
    for (std::size_t l = r.layers; l < layers; ++l) out << ',';
    out << '\n';
  }
}

json report_to_json(const MonteCarloReport& r) {
  json doc;
  doc["config"] = config_to_json(r.config);
  doc["scheduler"] = std::string(scheduler_name(r.config.scheduler.kind));
  doc["theta"] = r.theta;
  doc["layers"] = r.layers;
  doc["min_pct_mean"] = r.min_pct_mean;
  doc["min_pct_se"] = r.min_pct_se;
  doc["mean_pct_mean"] = r.mean_pct_mean;
  doc["mean_pct_se"] = r.mean_pct_se;
  doc["histogram_counts"] = r.histogram;
  if (!r.runs.empty()) {
    json runs = json::array();
    for (std::size_t k = 0; k < r.runs.size(); ++k) {
      const auto& rec = r.runs[k];
      runs.push_back({{"run", k},
                      {"layer_sizes", rec.layer_sizes},
                      {"erasures", rec.erasures},
                      {"decoded_layers", rec.result.decoded_layers},
                      {"transmissions", rec.result.transmissions},
                      {"min_pct", rec.result.min_pct()},
                      {"mean_pct", rec.result.mean_pct()}});
    }
    doc["runs_detail"] = std::move(runs);
  }
  return doc;
}

}  // namespace idnc
