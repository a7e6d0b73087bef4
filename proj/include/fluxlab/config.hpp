#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fluxlab/cohomology.hpp"

namespace fluxlab {

struct HolonomyConfig {
    int grid = 33;           // background grid resolution per Σ axis
    double step = 1e-4;      // curvature finite-difference step
    double tolerance = 1e-7; // singular-value rank threshold
    int sample_count = 3;    // survey points
};

struct ToleranceConfig {
    double zero_abs = 1e-10;  // absolute "zero component" threshold
    double oracle_rel = 1e-8; // relative threshold for oracle comparisons
    double degenerate = 1e-12;
};

/// One scenario: a product spec, a flux class, and the operations to run.
/// Parsed strictly: unknown fields anywhere are rejected.
struct ScenarioConfig {
    ProductSpec spec;
    std::vector<Rat> beta; // length b1(N) + k
    std::vector<int> dualize;
    bool dualize_given = false; // an explicit empty list still gets a duality echo
    std::optional<int> reduce;
    std::optional<HolonomyConfig> holonomy;
    ToleranceConfig tolerances;

    MixedFluxClass flux_class() const; // decompose(beta)
    void validate() const;
};

ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config_file(const std::string& path);

/// Normalized echo of a config (for embedding in reports); deterministic.
nlohmann::ordered_json config_to_json(const ScenarioConfig& cfg);

} // namespace fluxlab
