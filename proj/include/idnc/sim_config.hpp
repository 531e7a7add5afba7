#pragma once

// Config files and result serialisation for the simulator.
//
// Config document (JSON, every key optional):
//   {
//     "gop": {"layer_sizes": [8, 3, 3, 3]}
//          | {"sampler": "poisson", "layer_means": [8.35, 3.11, 3.29, 3.43]},
//     "receivers": 15,
//     "erasure": {"mean": 0.2, "spread": 0.15},
//     "theta": 25,                 // or "bitrate": <bits per second>
//     "scheduler": {"name": "ew-idnc", "lambda": 0.95, "selector": "heuristic",
//                   "vertex_budget": 30, "clique_node_budget": 200000},
//     "rlnc": {"policy_budget": 1000000},
//     "runs": 1000,
//     "seed": 1
//   }

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "idnc/simulation.hpp"

namespace idnc {

// All throw ConfigError on malformed input; the result is not validated.
SimConfig config_from_json(const nlohmann::json& doc, SimConfig base = {});
SimConfig load_config(const std::filesystem::path& path, SimConfig base = {});
nlohmann::json config_to_json(const SimConfig& config);

std::string csv_header(std::size_t layers);
std::string csv_row(const MonteCarloReport& report);
// One header (sized by the largest L) followed by one row per report.
void write_csv(std::ostream& out, std::span<const MonteCarloReport> reports);

// Summary fields mirror the CSV; "runs_detail" is present when the report
// kept per-run records.
nlohmann::json report_to_json(const MonteCarloReport& report);

}  // namespace idnc
