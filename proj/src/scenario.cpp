#include "fluxlab/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>

#include "fluxlab/buscher.hpp"
#include "fluxlab/errors.hpp"
#include "fluxlab/holonomy.hpp"
#include "fluxlab/reduction.hpp"

namespace fluxlab {

namespace {

using nlohmann::ordered_json;

ordered_json flux_to_json(const MixedFluxClass& cls) {
    ordered_json j;
    j["gamma"] = rats_to_strings(cls.gamma);
    j["c"] = rats_to_strings(cls.c);
    return j;
}

ordered_json verdict_to_json(const StratumVerdict& v, const KernelResult& kern) {
    ordered_json j;
    j["r"] = v.r;
    j["dim_K"] = v.dim_k;
    j["r_sharp"] = v.r_sharp;
    j["in_P1"] = v.in_p1;
    j["kernel"] = rats_to_strings(kern.kernel);
    j["kernel_caveat"] = kern.caveat;
    return j;
}

/// Trivial product background carrying no field tier: every component an
/// exact constant, grid collapsed to a point.
BackgroundFields cohomological_background(const ProductSpec& spec) {
    const CoordMap cm{spec.dim_n(), spec.k()};
    std::vector<GridAxis> axes(static_cast<std::size_t>(cm.base_count()), GridAxis{1, 0.0, 1.0});
    return BackgroundFields(cm, ChartGrid(std::move(axes)), spec.torus.circumferences);
}

struct PreparedBackground {
    BackgroundFields bg;
    bool field_realized = false;
};

PreparedBackground prepare_background(const ProductSpec& spec, const MixedFluxClass& cls, int grid_points) {
    BackgroundOptions bopts;
    bopts.sigma_points = grid_points;
    try {
        return {make_product_background(spec, cls, bopts), true};
    } catch (const ConfigInvalid&) {
        return {cohomological_background(spec), false}; // class not chart-representable
    }
}

ordered_json circles_section(const MixedFluxClass& cls, const ProductSpec& spec) {
    ordered_json arr = ordered_json::array();
    const bool mask_free = spec.p1_mask_n().empty();
    const FluxComponents flux{cls, std::nullopt};
    for (int i = 1; i <= spec.k(); ++i) {
        ordered_json c;
        c["index"] = i;
        c["circumference"] = rat_to_string(spec.circumference(i));
        c["fiberwise_integral"] = rat_to_string(fiberwise_integral(cls, spec, i));
        c["chern_flag"] = fiberwise_integral(cls, spec, i) != 0;
        ordered_json row = ordered_json::array();
        for (int j = 1; j <= spec.k(); ++j) {
            if (j == i) continue;
            row.push_back(rat_to_string(bem_obstruction(flux, spec, i, j)));
        }
        c["bem_row"] = std::move(row);
        if (mask_free) {
            try {
                c["bem_case"] = std::string(1, bem_case_letter(classify_bem_case(cls, spec, i)));
            } catch (const Unclassified&) {
                c["bem_case"] = "unclassified";
            }
        } else {
            c["bem_case"] = "n/a";
        }
        arr.push_back(std::move(c));
    }
    return arr;
}

ordered_json ledger_to_json(const DualityFrame& frame, const BackgroundFields& bg, double zero_tol) {
    ordered_json arr = ordered_json::array();
    for (const auto& entry : frame.ledger) {
        ordered_json e;
        e["circle"] = entry.circle;
        e["converted_c"] = rat_to_string(entry.converted_c);
        ordered_json comps = ordered_json::array();
        for (const auto& [mu, field] : entry.offdiag) {
            ordered_json comp;
            comp["mu"] = bg.coords().coord_name(mu);
            comp["max_abs"] = toleranced(field.max_abs(), zero_tol);
            comps.push_back(std::move(comp));
        }
        e["offdiag_components"] = std::move(comps);
        arr.push_back(std::move(e));
    }
    return arr;
}

ordered_json duality_section(const ScenarioConfig& cfg, const MixedFluxClass& cls) {
    const PreparedBackground prep =
        prepare_background(cfg.spec, cls, cfg.holonomy ? cfg.holonomy->grid : 33);
    BuscherOptions bopts;
    bopts.zero_tol = cfg.tolerances.zero_abs;
    bopts.degenerate_tol = cfg.tolerances.degenerate;

    const BackgroundFields fixed = gauge_fix_torus_torus(prep.bg, bopts);
    const ComposeResult res = compose_dualities(fixed, cls, cfg.spec, cfg.dualize, bopts);

    ordered_json j;
    j["dualized"] = res.frame.dualized;
    j["dual_flux"] = flux_to_json(res.flux);
    j["ledger"] = ledger_to_json(res.frame, res.background, cfg.tolerances.zero_abs);
    j["chern_flags"] = res.frame.chern_flags;
    j["field_tier_realized"] = prep.field_realized;
    if (prep.field_realized) {
        // the sampled components must integrate back to the exact coefficients
        const std::vector<double> coeffs = integrate_field_tier(prep.bg, flux_field_tier(prep.bg));
        double consistency = 0.0;
        const int dim_n = cfg.spec.dim_n();
        for (int a = 0; a < dim_n; ++a) {
            const double exact = a < static_cast<int>(cls.gamma.size())
                                     ? rat_to_double(cls.gamma[static_cast<std::size_t>(a)])
                                     : 0.0;
            consistency = std::max(consistency, std::abs(coeffs[static_cast<std::size_t>(a)] - exact));
        }
        for (int i = 0; i < cfg.spec.k(); ++i)
            consistency = std::max(consistency, std::abs(coeffs[static_cast<std::size_t>(dim_n + i)] -
                                                         rat_to_double(cls.c[static_cast<std::size_t>(i)])));
        j["field_consistency"] = toleranced(consistency, cfg.tolerances.oracle_rel);
        ordered_json residuals = ordered_json::array();
        for (int i : cfg.dualize) {
            ordered_json r;
            r["circle"] = i;
            r["max_dual_theta_flux"] = toleranced(max_theta_flux_component(res.background, i), cfg.tolerances.zero_abs);
            residuals.push_back(std::move(r));
        }
        j["dual_theta_flux"] = std::move(residuals);
        ordered_json nonint = ordered_json::array();
        for (int i = 1; i <= cfg.spec.k(); ++i) {
            ordered_json f;
            f["circle"] = i;
            f["product_structure"] = res.background.product_flag(i, cfg.tolerances.zero_abs);
            nonint.push_back(std::move(f));
        }
        j["product_flags"] = std::move(nonint);
    }
    return j;
}

ordered_json reduction_section(const ScenarioConfig& cfg, const MixedFluxClass& cls) {
    const ReductionReport rep = reduced_verdict(cls, cfg.spec, *cfg.reduce);
    ordered_json j;
    j["circle"] = *cfg.reduce;
    j["restricted_class"] = flux_to_json(rep.restricted);
    j["vanished"] = rep.vanished;
    j["verdict"] = reduction_verdict_name(rep.verdict);
    j["restricted_r_sharp"] = rep.restricted_r_sharp;
    return j;
}

ordered_json holonomy_section(const ScenarioConfig& cfg, const MixedFluxClass& cls, const StratumVerdict& verdict) {
    const Chart chart = make_chart(cfg.spec);
    const TorsionField torsion = torsion_from_class(cls, cfg.spec);

    HolonomyOptions opts;
    opts.step = cfg.holonomy->step;
    opts.rank_tol = cfg.holonomy->tolerance;

    const double margin = std::max(0.1, 16.0 * opts.step);
    const auto points = survey_points(chart, cfg.holonomy->sample_count, margin);
    const RankSurvey survey = offdiag_rank_survey(chart, torsion, points, opts);

    const bool bound_satisfied = survey.max_rank >= verdict.r_sharp;
    const bool oracle_confirms = survey.oracle_max_rank >= verdict.r_sharp;
    if (!bound_satisfied && oracle_confirms)
        throw NumericFailure("off-diagonal rank " + std::to_string(survey.max_rank) + " below r_sharp " +
                             std::to_string(verdict.r_sharp) + " although the commutator oracle attains it");

    ordered_json j;
    j["sample_count"] = static_cast<int>(points.size());
    j["step"] = str17(opts.step);
    j["rank_tolerance"] = str17(opts.rank_tol);
    j["min_offdiag_rank"] = survey.min_rank;
    j["max_offdiag_rank"] = survey.max_rank;
    j["oracle_max_rank"] = survey.oracle_max_rank;
    j["r_sharp"] = verdict.r_sharp;
    j["bound_satisfied"] = bound_satisfied;
    ordered_json pts = ordered_json::array();
    for (std::size_t i = 0; i < survey.samples.size(); ++i) {
        ordered_json p;
        ordered_json coords = ordered_json::array();
        for (int a = 0; a < survey.samples[i].point.size(); ++a) coords.push_back(str17(survey.samples[i].point[a]));
        p["point"] = std::move(coords);
        p["offdiag_rank"] = survey.samples[i].offdiag_rank;
        p["oracle_rank"] = survey.oracle_ranks[i];
        p["antisymmetry_defect"] = toleranced(survey.samples[i].max_antisymmetry_defect, 1e-9);
        pts.push_back(std::move(p));
    }
    j["points"] = std::move(pts);
    return j;
}

// Downstream failures keep their kind (and exit code) but carry the
// section they happened in.
template <typename Fn>
ordered_json wrap_section(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.kind(), std::string(name) + " section: " + e.what());
    }
}

} // namespace

Report run_scenario(const ScenarioConfig& cfg, const RunOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    const MixedFluxClass cls = cfg.flux_class();
    const StratumVerdict verdict = r_sharp(cls, cfg.spec);
    const KernelResult kern = irreducible_kernel(cls, cfg.spec);

    Report rep;
    rep.doc["schema_version"] = "1";
    rep.doc["scenario"] = config_to_json(cfg);
    rep.doc["invariant"] = verdict_to_json(verdict, kern);
    rep.doc["circles"] = wrap_section("circles", [&] { return circles_section(cls, cfg.spec); });
    if (cfg.dualize_given || !cfg.dualize.empty())
        rep.doc["duality"] = wrap_section("duality", [&] { return duality_section(cfg, cls); });
    if (cfg.reduce) rep.doc["reduction"] = wrap_section("reduction", [&] { return reduction_section(cfg, cls); });
    if (cfg.holonomy)
        rep.doc["holonomy"] = wrap_section("holonomy", [&] { return holonomy_section(cfg, cls, verdict); });
    if (opts.include_timing) {
        const auto dt = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0);
        rep.doc["timing_ms"] = str17(dt.count());
    }
    return rep;
}

namespace {

struct DualityCheck {
    std::vector<int> circles;
    std::vector<Rat> expect_gamma;
    std::vector<Rat> expect_c;
};

struct ReduceCheck {
    int circle = 1;
    ReductionVerdict expect_verdict = ReductionVerdict::Indeterminate;
};

struct ExampleVariant {
    std::string id;
    std::string name;
    ScenarioConfig config;
    int expect_r = 1;
    int expect_r_sharp = 0;
    std::vector<Rat> expect_kernel;
    bool expect_kernel_caveat = false;
    std::vector<DualityCheck> duality_checks;
    std::optional<ReduceCheck> reduce_check;
};

ScenarioConfig product_config(int genus, FactorSpec n_part, int k, std::vector<Rat> beta) {
    ScenarioConfig cfg;
    cfg.spec.sigma = SurfaceFactor{genus};
    cfg.spec.n_parts.push_back(std::move(n_part));
    cfg.spec.torus.k = k;
    cfg.spec.torus.circumferences.assign(static_cast<std::size_t>(k), make_rat(1));
    cfg.beta = std::move(beta);
    return cfg;
}

std::vector<Rat> rats(std::initializer_list<long> vals) {
    std::vector<Rat> out;
    out.reserve(vals.size());
    for (long v : vals) out.push_back(make_rat(v));
    return out;
}

std::vector<ExampleVariant> make_variants(const std::string& id) {
    std::vector<ExampleVariant> variants;

    // "4.1" selects every 4.1 variant; "4.1ii" selects exactly one.
    auto add = [&](ExampleVariant v) {
        const bool family = id.size() == 3 && v.id.starts_with(id);
        if (id == v.id || family) variants.push_back(std::move(v));
    };

    // Double T-duality on Σ_g × Σ_{g'} × T².
    {
        ExampleVariant v;
        v.id = "4.1i";
        v.name = "double T-duality, nonzero kernel";
        v.config = product_config(2, SurfaceFactor{2}, 2, rats({1, 0, 0, 0, 3, -2}));
        v.expect_r = 1;
        v.expect_r_sharp = 1;
        v.expect_kernel = rats({1, 0, 0, 0});
        v.duality_checks.push_back({{1, 2}, rats({1, 0, 0, 0}), rats({0, 0})});
        v.duality_checks.push_back({{2, 1}, rats({1, 0, 0, 0}), rats({0, 0})});
        v.duality_checks.push_back({{1}, rats({1, 0, 0, 0}), rats({0, -2})});
        add(std::move(v));
    }
    {
        ExampleVariant v;
        v.id = "4.1ii";
        v.name = "double T-duality, full conversion";
        v.config = product_config(2, SurfaceFactor{2}, 2, rats({0, 0, 0, 0, 3, -1}));
        v.expect_r = 1;
        v.expect_r_sharp = 0;
        v.expect_kernel = rats({0, 0, 0, 0});
        v.duality_checks.push_back({{1, 2}, rats({0, 0, 0, 0}), rats({0, 0})});
        add(std::move(v));
    }

    // Hyperbolic three-manifold: flux survives, reduction stays irreducible.
    {
        ExampleVariant v;
        v.id = "4.2";
        v.name = "hyperbolic three-manifold";
        v.config = product_config(2, GenericFactor{3, 1, {}}, 1, rats({1, 0}));
        v.expect_r = 1;
        v.expect_r_sharp = 1;
        v.expect_kernel = rats({1});
        v.duality_checks.push_back({{1}, rats({1}), rats({0})});
        v.reduce_check = ReduceCheck{1, ReductionVerdict::IrreducibleSurvives};
        add(std::move(v));
    }

    // Flat torus factor: everything parallel, r_sharp = 0 for any class.
    {
        ExampleVariant v;
        v.id = "4.3a";
        v.name = "flat torus, beta along the explicit circle";
        v.config = product_config(2, GenericFactor{2, 2, {1, 2}}, 1, rats({0, 0, 1}));
        v.expect_r = 1;
        v.expect_r_sharp = 0;
        v.expect_kernel = rats({0, 0});
        v.duality_checks.push_back({{1}, rats({0, 0}), rats({0})}); // fully converted
        v.reduce_check = ReduceCheck{1, ReductionVerdict::Indeterminate}; // P1(N) != 0
        add(std::move(v));
    }
    {
        ExampleVariant v;
        v.id = "4.3b";
        v.name = "flat torus, beta inside N";
        v.config = product_config(2, GenericFactor{2, 2, {1, 2}}, 1, rats({1, 0, 0}));
        v.expect_r = 1;
        v.expect_r_sharp = 0;
        v.expect_kernel = rats({0, 0});
        v.expect_kernel_caveat = true; // conversion runs along a hidden circle factor
        v.duality_checks.push_back({{1}, rats({1, 0}), rats({0})}); // explicit circle does not convert
        add(std::move(v));
    }

    // Mixed parallel stratum on Σ_g × Σ_{g'} × S¹_φ × S¹_θ; the two
    // circles are explicit torus directions (φ = circle 1, θ = circle 2).
    {
        ExampleVariant v;
        v.id = "4.4a";
        v.name = "mixed stratum, beta in H1 of the hyperbolic factor";
        v.config = product_config(2, SurfaceFactor{2}, 2, rats({1, 0, 0, 0, 0, 0}));
        v.expect_r = 1;
        v.expect_r_sharp = 1;
        v.expect_kernel = rats({1, 0, 0, 0});
        v.duality_checks.push_back({{1}, rats({1, 0, 0, 0}), rats({0, 0})});
        v.duality_checks.push_back({{2}, rats({1, 0, 0, 0}), rats({0, 0})});
        v.duality_checks.push_back({{1, 2}, rats({1, 0, 0, 0}), rats({0, 0})});
        add(std::move(v));
    }
    {
        ExampleVariant v;
        v.id = "4.4b";
        v.name = "mixed stratum, beta = dphi";
        v.config = product_config(2, SurfaceFactor{2}, 2, rats({0, 0, 0, 0, 1, 0}));
        v.expect_r = 1;
        v.expect_r_sharp = 0;
        v.expect_kernel = rats({0, 0, 0, 0});
        v.duality_checks.push_back({{1}, rats({0, 0, 0, 0}), rats({0, 0})}); // converts
        v.duality_checks.push_back({{2}, rats({0, 0, 0, 0}), rats({1, 0})}); // does not
        add(std::move(v));
    }
    {
        ExampleVariant v;
        v.id = "4.4c";
        v.name = "mixed stratum, beta = dtheta";
        v.config = product_config(2, SurfaceFactor{2}, 2, rats({0, 0, 0, 0, 0, 1}));
        v.expect_r = 1;
        v.expect_r_sharp = 0;
        v.expect_kernel = rats({0, 0, 0, 0});
        v.duality_checks.push_back({{2}, rats({0, 0, 0, 0}), rats({0, 0})}); // converts
        v.duality_checks.push_back({{1}, rats({0, 0, 0, 0}), rats({0, 1})}); // does not
        add(std::move(v));
    }
    return variants;
}

std::string flux_diff(const MixedFluxClass& got, const std::vector<Rat>& want_gamma, const std::vector<Rat>& want_c) {
    std::ostringstream os;
    os << "expected gamma=(";
    for (const auto& q : want_gamma) os << rat_to_string(q) << " ";
    os << ") c=(";
    for (const auto& q : want_c) os << rat_to_string(q) << " ";
    os << "), computed gamma=(";
    for (const auto& q : got.gamma) os << rat_to_string(q) << " ";
    os << ") c=(";
    for (const auto& q : got.c) os << rat_to_string(q) << " ";
    os << ")";
    return os.str();
}

} // namespace

std::vector<std::string> example_ids() { return {"4.1", "4.1i", "4.1ii", "4.2", "4.3", "4.3a", "4.3b", "4.4", "4.4a", "4.4b", "4.4c"}; }

Report run_example(const std::string& raw_id, const RunOptions& opts) {
    std::string id; // "4.1(i)" and "4.1i" both name the same variant
    for (char ch : raw_id)
        if (ch != '(' && ch != ')') id.push_back(ch);
    const std::vector<ExampleVariant> variants = make_variants(id);
    if (variants.empty()) throw ConfigInvalid("unknown example id \"" + raw_id + "\" (4.1, 4.2, 4.3, 4.4 or a variant)");

    Report rep;
    rep.doc["schema_version"] = "1";
    rep.doc["example"] = id;
    ordered_json out_variants = ordered_json::array();
    std::vector<std::string> failures;

    for (const auto& v : variants) {
        ordered_json vj;
        vj["id"] = v.id;
        vj["name"] = v.name;
        vj["scenario"] = config_to_json(v.config);

        const MixedFluxClass cls = v.config.flux_class();
        const StratumVerdict verdict = r_sharp(cls, v.config.spec);
        const KernelResult kern = irreducible_kernel(cls, v.config.spec);
        vj["invariant"] = verdict_to_json(verdict, kern);

        auto fail = [&](const std::string& what) { failures.push_back(v.id + ": " + what); };

        if (verdict.r != v.expect_r)
            fail("r expected " + std::to_string(v.expect_r) + ", computed " + std::to_string(verdict.r));
        if (verdict.r_sharp != v.expect_r_sharp)
            fail("r_sharp expected " + std::to_string(v.expect_r_sharp) + ", computed " +
                 std::to_string(verdict.r_sharp));
        if (kern.kernel != v.expect_kernel) fail("kernel mismatch");
        if (kern.caveat != v.expect_kernel_caveat) fail("kernel caveat mismatch");

        ordered_json checks = ordered_json::array();
        BuscherOptions bopts;
        const PreparedBackground prep = prepare_background(v.config.spec, cls, 17);
        const BackgroundFields fixed = gauge_fix_torus_torus(prep.bg, bopts);
        for (const auto& check : v.duality_checks) {
            const ComposeResult res = compose_dualities(fixed, cls, v.config.spec, check.circles, bopts);
            const bool pass = res.flux.gamma == check.expect_gamma && res.flux.c == check.expect_c;
            ordered_json cj;
            cj["op"] = "compose_dualities";
            cj["circles"] = check.circles;
            ordered_json expected;
            expected["gamma"] = rats_to_strings(check.expect_gamma);
            expected["c"] = rats_to_strings(check.expect_c);
            cj["expected_flux"] = std::move(expected);
            cj["computed_flux"] = flux_to_json(res.flux);
            cj["pass"] = pass;
            checks.push_back(std::move(cj));
            if (!pass)
                fail("dual flux after dualizing along listed circles: " +
                     flux_diff(res.flux, check.expect_gamma, check.expect_c));
        }
        if (v.reduce_check) {
            const ReductionReport rr = reduced_verdict(cls, v.config.spec, v.reduce_check->circle);
            const bool pass = rr.verdict == v.reduce_check->expect_verdict;
            ordered_json cj;
            cj["op"] = "reduced_verdict";
            cj["circle"] = v.reduce_check->circle;
            cj["expected"] = reduction_verdict_name(v.reduce_check->expect_verdict);
            cj["computed"] = reduction_verdict_name(rr.verdict);
            cj["pass"] = pass;
            checks.push_back(std::move(cj));
            if (!pass)
                fail(std::string("reduction verdict expected ") + reduction_verdict_name(v.reduce_check->expect_verdict) +
                     ", computed " + reduction_verdict_name(rr.verdict));
        }
        vj["checks"] = std::move(checks);
        out_variants.push_back(std::move(vj));
    }

    rep.doc["variants"] = std::move(out_variants);
    rep.doc["passed"] = failures.empty();
    if (!failures.empty()) {
        std::ostringstream os;
        os << "example " << id << ": " << failures.size() << " verdict(s) deviate:";
        for (const auto& f : failures) os << "\n  " << f;
        throw ExampleAssertionFailed(os.str());
    }
    (void)opts;
    return rep;
}

} // namespace fluxlab
