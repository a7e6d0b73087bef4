#include <doctest.h>

#include <json.hpp>

#include "fluxlab/config.hpp"
#include "fluxlab/errors.hpp"
#include "fluxlab/report.hpp"
#include "fluxlab/scenario.hpp"

using namespace fluxlab;
using nlohmann::json;

namespace {

json minimal_config() {
    return json::parse(R"({
      "factors": [
        {"kind": "surface", "genus": 2},
        {"kind": "generic", "dim": 3, "b1": 1, "p1_mask": []},
        {"kind": "torus", "k": 1}
      ],
      "beta": ["1", "0"]
    })");
}

} // namespace

TEST_CASE("minimal config parses with defaults") {
    const ScenarioConfig cfg = parse_config(minimal_config());
    CHECK(cfg.spec.sigma.genus == 2);
    CHECK(cfg.spec.b1_n() == 1);
    CHECK(cfg.spec.k() == 1);
    CHECK(cfg.spec.circumference(1) == 1); // default length
    CHECK(cfg.beta.size() == 2);
    CHECK(cfg.dualize.empty());
    CHECK(!cfg.reduce);
    CHECK(!cfg.holonomy);
    CHECK(cfg.tolerances.zero_abs == 1e-10);
}

TEST_CASE("unknown fields are rejected at every level") {
    json j = minimal_config();
    j["surprise"] = 1;
    CHECK_THROWS_AS(parse_config(j), ConfigInvalid);

    j = minimal_config();
    j["factors"][0]["color"] = "blue";
    CHECK_THROWS_AS(parse_config(j), ConfigInvalid);

    j = minimal_config();
    j["holonomy"] = {{"grid", 9}, {"bogus", 1}};
    CHECK_THROWS_AS(parse_config(j), ConfigInvalid);

    j = minimal_config();
    j["tolerances"] = {{"zero_abs", 1e-9}, {"bogus", 1}};
    CHECK_THROWS_AS(parse_config(j), ConfigInvalid);
}

TEST_CASE("schema violations carry the field path") {
    json j = minimal_config();
    j["beta"] = json::array({"1"});
    try {
        parse_config(j);
        FAIL("expected ConfigInvalid");
    } catch (const ConfigInvalid& e) {
        CHECK(std::string(e.what()).find("beta") != std::string::npos);
        CHECK(e.exit_code() == 2);
    }

    j = minimal_config();
    j["beta"] = json::array({1.5, 0});
    CHECK_THROWS_AS(parse_config(j), ConfigInvalid); // floats are not exact rationals

    j = minimal_config();
    j["dualize"] = json::array({1, 1});
    CHECK_THROWS_AS(parse_config(j), ConfigInvalid);

    j = minimal_config();
    j["reduce"] = 7;
    CHECK_THROWS_AS(parse_config(j), ConfigInvalid);

    j = minimal_config();
    j["factors"][0] = {{"kind", "generic"}, {"dim", 2}, {"b1", 1}};
    CHECK_THROWS_AS(parse_config(j), ConfigInvalid); // surface must lead

    j = minimal_config();
    j["factors"].push_back({{"kind", "generic"}, {"dim", 1}, {"b1", 0}});
    CHECK_THROWS_AS(parse_config(j), ConfigInvalid); // torus must come last

    j = minimal_config();
    j["schema_version"] = "2";
    CHECK_THROWS_AS(parse_config(j), ConfigInvalid);
}

TEST_CASE("products without an explicit torus factor parse with k = 0") {
    const json j = json::parse(R"({
      "factors": [
        {"kind": "surface", "genus": 2},
        {"kind": "generic", "dim": 3, "b1": 2, "p1_mask": []}
      ],
      "beta": ["1", "0"]
    })");
    const ScenarioConfig cfg = parse_config(j);
    CHECK(cfg.spec.k() == 0);
    CHECK(run_scenario(cfg).doc["invariant"]["r_sharp"] == 1);

    json with_reduce = j;
    with_reduce["reduce"] = 1; // no circle to collapse
    CHECK_THROWS_AS(parse_config(with_reduce), ConfigInvalid);
}

TEST_CASE("circumference sources must not conflict") {
    json j = minimal_config();
    j["factors"][2]["circumferences"] = json::array({"2"});
    const ScenarioConfig ok = parse_config(j);
    CHECK(ok.spec.circumference(1) == 2);

    j["circles"] = json::array({"3"});
    CHECK_THROWS_AS(parse_config(j), ConfigInvalid);

    json k = minimal_config();
    k["circles"] = json::array({"3/2"});
    CHECK(parse_config(k).spec.circumference(1) == make_rat(3, 2));
}

TEST_CASE("reports are byte-identical across runs") {
    json j = minimal_config();
    j["dualize"] = json::array({1});
    j["reduce"] = 1;
    const ScenarioConfig cfg = parse_config(j);
    const std::string a = run_scenario(cfg).to_string();
    const std::string b = run_scenario(cfg).to_string();
    CHECK(a == b);
    CHECK(a.find("timing") == std::string::npos); // timing only on request

    RunOptions timed;
    timed.include_timing = true;
    CHECK(run_scenario(cfg, timed).to_string().find("timing_ms") != std::string::npos);

    const std::string e1 = run_example("4.4").to_string();
    const std::string e2 = run_example("4.4").to_string();
    CHECK(e1 == e2);
}

TEST_CASE("report sections mirror the requested operations") {
    json j = minimal_config();
    j["dualize"] = json::array({1});
    j["reduce"] = 1;
    const Report rep = run_scenario(parse_config(j));
    CHECK(rep.doc["schema_version"] == "1");
    CHECK(rep.doc.contains("invariant"));
    CHECK(rep.doc.contains("circles"));
    CHECK(rep.doc.contains("duality"));
    CHECK(rep.doc.contains("reduction"));
    CHECK(!rep.doc.contains("holonomy"));
    CHECK(rep.doc["invariant"]["r_sharp"] == 1);
    CHECK(rep.doc["duality"]["dual_flux"]["gamma"][0] == "1");
    CHECK(rep.doc["reduction"]["verdict"] == "IrreducibleSurvives");
    CHECK(rep.doc["circles"][0]["bem_case"] == "B");

    // field tier was realized: residuals and the back-integration are reported
    CHECK(rep.doc["duality"]["field_tier_realized"] == true);
    const double consistency = std::stod(rep.doc["duality"]["field_consistency"]["value"].get<std::string>());
    CHECK(consistency < 1e-8);
    const double residual =
        std::stod(rep.doc["duality"]["dual_theta_flux"][0]["max_dual_theta_flux"]["value"].get<std::string>());
    CHECK(residual < 1e-8);
    CHECK(rep.doc["duality"]["product_flags"][0]["product_structure"] == true);
}

TEST_CASE("an explicit empty dualize list echoes the flux unchanged") {
    json j = minimal_config();
    j["dualize"] = json::array();
    const Report rep = run_scenario(parse_config(j));
    REQUIRE(rep.doc.contains("duality"));
    CHECK(rep.doc["duality"]["dualized"].empty());
    CHECK(rep.doc["duality"]["dual_flux"]["gamma"][0] == "1");
    CHECK(rep.doc["duality"]["dual_flux"]["c"][0] == "0");
    CHECK(rep.doc["duality"]["ledger"].empty());

    json absent = minimal_config(); // no dualize key at all: no duality section
    CHECK(!run_scenario(parse_config(absent)).doc.contains("duality"));
}

TEST_CASE("holonomy section survey against the invariant") {
    json j = minimal_config();
    j["holonomy"] = {{"grid", 9}, {"sample_count", 2}};
    const Report rep = run_scenario(parse_config(j));
    CHECK(rep.doc.contains("holonomy"));
    CHECK(rep.doc["holonomy"]["r_sharp"] == 1);
    CHECK(rep.doc["holonomy"]["bound_satisfied"] == true);
    CHECK(rep.doc["holonomy"]["max_offdiag_rank"].get<int>() >= 1);
    CHECK(rep.doc["holonomy"]["points"].size() == 2);
}

TEST_CASE("float rendering carries 17 significant digits") {
    CHECK(str17(1.0) == "1");
    CHECK(str17(1.0 / 3.0) == "0.33333333333333331");
    const auto j = toleranced(0.5, 1e-8);
    CHECK(j["value"] == "0.5");
    CHECK(j["tolerance"] == "1e-08");
    CHECK(str17(2.0 / 3.0) == "0.66666666666666663");
}

TEST_CASE("bundled examples resolve ids") {
    CHECK_THROWS_AS(run_example("9.9"), ConfigInvalid);
    const Report one = run_example("4.4b");
    CHECK(one.doc["variants"].size() == 1);
    const Report fam = run_example("4.4");
    CHECK(fam.doc["variants"].size() == 3);
    CHECK(fam.doc["passed"] == true);
    for (const char* id : {"4.1i", "4.1ii", "4.2", "4.3a", "4.3b", "4.4a", "4.4b", "4.4c"})
        CHECK(run_example(id).doc["passed"] == true);
}

TEST_CASE("error kinds map to exit codes") {
    CHECK(ConfigInvalid("x").exit_code() == 2);
    CHECK(ExampleAssertionFailed("x").exit_code() == 3);
    CHECK(DegenerateFiber("x").exit_code() == 4);
    CHECK(StepTooLarge("x").exit_code() == 4);
}
