#pragma once

#include <string>
#include <vector>

#include "fluxlab/config.hpp"
#include "fluxlab/report.hpp"

namespace fluxlab {

struct RunOptions {
    bool include_timing = false; // timing is opt-in so default reports are byte-stable
};

/// Runs every section the config asks for (invariant, per-circle
/// diagnostics, composed duality, reduction, holonomy survey) and returns
/// the assembled report.
Report run_scenario(const ScenarioConfig& cfg, const RunOptions& opts = {});

/// Bundled worked configurations with recorded verdicts: "4.1", "4.2",
/// "4.3", "4.4" or a single variant ("4.1ii", "4.4b", ...). Throws
/// ExampleAssertionFailed with a diff when a computed verdict deviates.
Report run_example(const std::string& id, const RunOptions& opts = {});

std::vector<std::string> example_ids();

} // namespace fluxlab
