#include "fluxlab/report.hpp"

#include <cstdio>

namespace fluxlab {

std::string str17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

nlohmann::ordered_json toleranced(double value, double tolerance) {
    nlohmann::ordered_json j;
    j["value"] = str17(value);
    j["tolerance"] = str17(tolerance);
    return j;
}

} // namespace fluxlab
