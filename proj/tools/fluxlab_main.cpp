// Command-line front end: every verb loads a scenario config (or a bundled
// example id), runs the requested sections, and prints the JSON report.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fluxlab/errors.hpp"
#include "fluxlab/scenario.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    bool timing = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required = true) {
    auto* opt = cmd->add_option("--config", args.config_path, "scenario config file (JSON)");
    if (config_required) opt->required();
    cmd->add_option("--out", args.out_path, "write the report here instead of stdout");
    cmd->add_flag("--timing", args.timing, "include wall-clock timing in the report");
}

void emit(const fluxlab::Report& report, const CommonArgs& args) {
    if (args.out_path.empty()) {
        std::cout << report.to_string();
        return;
    }
    std::ofstream out(args.out_path);
    if (!out) throw fluxlab::ConfigInvalid("cannot open output file " + args.out_path);
    out << report.to_string();
}

std::vector<int> parse_circle_list(const std::string& text) {
    std::vector<int> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            const int v = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw fluxlab::ConfigInvalid("--circles: \"" + item + "\" is not a circle index");
        }
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fluxlab: H-flux behaviour under dimensional reduction and circle dualities on product backgrounds"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string circles_override;
    int reduce_override = 0;
    std::string example_id;
    fluxlab::HolonomyConfig holo_override;

    auto* rsharp = app.add_subcommand("rsharp", "invariant, strata and kernel diagnostics");
    add_common(rsharp, args);

    auto* kernel = app.add_subcommand("kernel", "irreducible kernel of the flux class");
    add_common(kernel, args);

    auto* tdualize = app.add_subcommand("tdualize", "compose circle dualities and report the dual background");
    add_common(tdualize, args);
    tdualize->add_option("--circles", circles_override, "comma-separated circle list overriding the config");

    auto* reduce = app.add_subcommand("reduce", "restrict to a slice at fixed circle coordinate");
    add_common(reduce, args);
    reduce->add_option("--circle", reduce_override, "circle to collapse, overriding the config");

    auto* checkbem = app.add_subcommand("check-bem", "pairwise obstruction integrals and per-circle topology cases");
    add_common(checkbem, args);

    auto* holo = app.add_subcommand("verify-holonomy", "curvature rank survey against the invariant");
    add_common(holo, args);
    holo->add_option("--samples", holo_override.sample_count, "survey sample count");
    holo->add_option("--step", holo_override.step, "finite-difference step");
    holo->add_option("--grid", holo_override.grid, "background grid resolution");
    holo->add_option("--tol", holo_override.tolerance, "singular-value rank threshold");

    auto* example = app.add_subcommand("run-example", "run a bundled worked configuration and assert its verdicts");
    example->add_option("--id", example_id, "example id (4.1, 4.2, 4.3, 4.4 or a variant such as 4.4b)")->required();
    example->add_option("--out", args.out_path, "write the report here instead of stdout");
    example->add_flag("--timing", args.timing, "include wall-clock timing in the report");

    CLI11_PARSE(app, argc, argv);

    try {
        fluxlab::RunOptions ropts;
        ropts.include_timing = args.timing;

        fluxlab::Report report;
        if (example->parsed()) {
            report = fluxlab::run_example(example_id, ropts);
        } else {
            fluxlab::ScenarioConfig cfg = fluxlab::load_config_file(args.config_path);
            if (rsharp->parsed() || kernel->parsed() || checkbem->parsed()) {
                cfg.dualize.clear();
                cfg.reduce.reset();
                cfg.holonomy.reset();
            } else if (tdualize->parsed()) {
                if (!circles_override.empty()) cfg.dualize = parse_circle_list(circles_override);
                if (cfg.dualize.empty()) throw fluxlab::ConfigInvalid("tdualize needs a dualize list (config or --circles)");
                cfg.reduce.reset();
                cfg.holonomy.reset();
            } else if (reduce->parsed()) {
                if (reduce_override != 0) cfg.reduce = reduce_override;
                if (!cfg.reduce) throw fluxlab::ConfigInvalid("reduce needs a circle (config or --circle)");
                cfg.dualize.clear();
                cfg.holonomy.reset();
            } else if (holo->parsed()) {
                fluxlab::HolonomyConfig hc = cfg.holonomy.value_or(fluxlab::HolonomyConfig{});
                if (holo->count("--samples") > 0) hc.sample_count = holo_override.sample_count;
                if (holo->count("--step") > 0) hc.step = holo_override.step;
                if (holo->count("--grid") > 0) hc.grid = holo_override.grid;
                if (holo->count("--tol") > 0) hc.tolerance = holo_override.tolerance;
                cfg.holonomy = hc;
                cfg.dualize.clear();
                cfg.reduce.reset();
            }
            cfg.validate();
            report = fluxlab::run_scenario(cfg, ropts);
        }
        emit(report, args);
        return 0;
    } catch (const fluxlab::Error& e) {
        std::cerr << "fluxlab: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "fluxlab: unexpected error: " << e.what() << "\n";
        return 1;
    }
}
