#pragma once

#include <string>

#include <json.hpp>

#include "fluxlab/rational.hpp"

namespace fluxlab {

/// Machine-readable scenario report. Field order is fixed at assembly time
/// (ordered_json), floats carry 17 significant digits, exact values are
/// "p/q" strings, so reports are byte-identical across runs.
struct Report {
    nlohmann::ordered_json doc;

    std::string to_string() const { return doc.dump(2) + "\n"; }
};

/// "%.17g" rendering used for every floating-point report value.
std::string str17(double v);

/// {"value": <17 digits>, "tolerance": <17 digits>}: numeric report fields
/// always carry the tolerance they were judged against.
nlohmann::ordered_json toleranced(double value, double tolerance);

} // namespace fluxlab
