#include "fluxlab/config.hpp"

#include <fstream>
#include <set>

#include "fluxlab/errors.hpp"

namespace fluxlab {

namespace {

using nlohmann::json;

void expect_keys(const json& j, const std::set<std::string>& allowed, const std::string& path) {
    if (!j.is_object()) throw ConfigInvalid(path + ": expected an object");
    for (const auto& item : j.items()) {
        if (!allowed.contains(item.key())) throw ConfigInvalid(path + ": unknown field \"" + item.key() + "\"");
    }
}

Rat json_rat(const json& v, const std::string& path) {
    if (v.is_string()) return rat_from_string(v.get<std::string>());
    if (v.is_number_integer()) return make_rat(v.get<long>());
    throw ConfigInvalid(path + ": rationals must be \"p/q\" strings or integers");
}

int json_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ConfigInvalid(path + ": expected an integer");
    return v.get<int>();
}

double json_num(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigInvalid(path + ": expected a number");
    return v.get<double>();
}

FactorSpec parse_factor(const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("kind")) throw ConfigInvalid(path + ": factor needs a \"kind\"");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "surface") {
        expect_keys(j, {"kind", "genus"}, path);
        if (!j.contains("genus")) throw ConfigInvalid(path + ": surface needs \"genus\"");
        return SurfaceFactor{json_int(j.at("genus"), path + ".genus")};
    }
    if (kind == "generic") {
        expect_keys(j, {"kind", "dim", "b1", "p1_mask"}, path);
        if (!j.contains("dim") || !j.contains("b1")) throw ConfigInvalid(path + ": generic needs \"dim\" and \"b1\"");
        GenericFactor g;
        g.dim = json_int(j.at("dim"), path + ".dim");
        g.b1 = json_int(j.at("b1"), path + ".b1");
        if (j.contains("p1_mask")) {
            if (!j.at("p1_mask").is_array()) throw ConfigInvalid(path + ".p1_mask: expected an array");
            for (const auto& v : j.at("p1_mask")) g.p1_mask.insert(json_int(v, path + ".p1_mask[]"));
        }
        return g;
    }
    if (kind == "torus") {
        expect_keys(j, {"kind", "k", "circumferences"}, path);
        if (!j.contains("k")) throw ConfigInvalid(path + ": torus needs \"k\"");
        TorusFactor t;
        t.k = json_int(j.at("k"), path + ".k");
        if (j.contains("circumferences")) {
            if (!j.at("circumferences").is_array()) throw ConfigInvalid(path + ".circumferences: expected an array");
            for (const auto& v : j.at("circumferences")) t.circumferences.push_back(json_rat(v, path + ".circumferences[]"));
        }
        return t;
    }
    throw ConfigInvalid(path + ": unknown factor kind \"" + kind + "\" (surface|generic|torus)");
}

} // namespace

MixedFluxClass ScenarioConfig::flux_class() const { return decompose(beta, spec); }

void ScenarioConfig::validate() const {
    spec.validate();
    const std::size_t expected = static_cast<std::size_t>(spec.b1_n() + spec.k());
    if (beta.size() != expected)
        throw ConfigInvalid("beta: expected b1(N)+k = " + std::to_string(expected) + " coefficients, got " +
                            std::to_string(beta.size()));
    std::set<int> seen;
    for (int i : dualize) {
        if (i < 1 || i > spec.k()) throw ConfigInvalid("dualize: circle " + std::to_string(i) + " out of range");
        if (!seen.insert(i).second) throw ConfigInvalid("dualize: circle " + std::to_string(i) + " repeated");
    }
    if (reduce && (*reduce < 1 || *reduce > spec.k()))
        throw ConfigInvalid("reduce: circle " + std::to_string(*reduce) + " out of range");
    if (holonomy) {
        if (holonomy->grid < 2) throw ConfigInvalid("holonomy.grid must be >= 2");
        if (holonomy->step <= 0) throw ConfigInvalid("holonomy.step must be positive");
        if (holonomy->tolerance <= 0) throw ConfigInvalid("holonomy.tolerance must be positive");
        if (holonomy->sample_count < 1) throw ConfigInvalid("holonomy.sample_count must be >= 1");
    }
    if (tolerances.zero_abs <= 0 || tolerances.oracle_rel <= 0 || tolerances.degenerate <= 0)
        throw ConfigInvalid("tolerances must be positive");
}

ScenarioConfig parse_config(const json& doc) {
    expect_keys(doc, {"schema_version", "factors", "beta", "circles", "dualize", "reduce", "holonomy", "tolerances"},
                "config");
    if (doc.contains("schema_version")) {
        const auto& v = doc.at("schema_version");
        if (!v.is_string() || v.get<std::string>() != "1")
            throw ConfigInvalid("schema_version: only \"1\" is supported");
    }
    if (!doc.contains("factors")) throw ConfigInvalid("config: \"factors\" is required");
    if (!doc.at("factors").is_array() || doc.at("factors").empty())
        throw ConfigInvalid("factors: expected a non-empty array");

    ScenarioConfig cfg;
    bool saw_torus = false;
    const auto& factors = doc.at("factors");
    for (std::size_t i = 0; i < factors.size(); ++i) {
        const std::string path = "factors[" + std::to_string(i) + "]";
        FactorSpec f = parse_factor(factors[i], path);
        if (i == 0) {
            const auto* s = std::get_if<SurfaceFactor>(&f);
            if (s == nullptr) throw ConfigInvalid(path + ": the first factor must be the surface");
            cfg.spec.sigma = *s;
            continue;
        }
        if (saw_torus) throw ConfigInvalid(path + ": the torus factor must come last");
        if (const auto* t = std::get_if<TorusFactor>(&f)) {
            cfg.spec.torus = *t;
            saw_torus = true;
        } else {
            cfg.spec.n_parts.push_back(std::move(f));
        }
    }

    if (doc.contains("circles")) {
        if (!doc.at("circles").is_array()) throw ConfigInvalid("circles: expected an array");
        if (!cfg.spec.torus.circumferences.empty())
            throw ConfigInvalid("circles: circumferences already given in the torus factor");
        for (const auto& v : doc.at("circles")) cfg.spec.torus.circumferences.push_back(json_rat(v, "circles[]"));
    }
    if (cfg.spec.torus.circumferences.empty())
        cfg.spec.torus.circumferences.assign(static_cast<std::size_t>(cfg.spec.torus.k), make_rat(1));

    if (!doc.contains("beta")) throw ConfigInvalid("config: \"beta\" is required");
    if (!doc.at("beta").is_array()) throw ConfigInvalid("beta: expected an array");
    for (const auto& v : doc.at("beta")) cfg.beta.push_back(json_rat(v, "beta[]"));

    if (doc.contains("dualize")) {
        if (!doc.at("dualize").is_array()) throw ConfigInvalid("dualize: expected an array");
        cfg.dualize_given = true;
        for (const auto& v : doc.at("dualize")) cfg.dualize.push_back(json_int(v, "dualize[]"));
    }
    if (doc.contains("reduce")) cfg.reduce = json_int(doc.at("reduce"), "reduce");

    if (doc.contains("holonomy")) {
        const auto& h = doc.at("holonomy");
        expect_keys(h, {"grid", "step", "tolerance", "sample_count"}, "holonomy");
        HolonomyConfig hc;
        if (h.contains("grid")) hc.grid = json_int(h.at("grid"), "holonomy.grid");
        if (h.contains("step")) hc.step = json_num(h.at("step"), "holonomy.step");
        if (h.contains("tolerance")) hc.tolerance = json_num(h.at("tolerance"), "holonomy.tolerance");
        if (h.contains("sample_count")) hc.sample_count = json_int(h.at("sample_count"), "holonomy.sample_count");
        cfg.holonomy = hc;
    }

    if (doc.contains("tolerances")) {
        const auto& t = doc.at("tolerances");
        expect_keys(t, {"zero_abs", "oracle_rel", "degenerate"}, "tolerances");
        if (t.contains("zero_abs")) cfg.tolerances.zero_abs = json_num(t.at("zero_abs"), "tolerances.zero_abs");
        if (t.contains("oracle_rel")) cfg.tolerances.oracle_rel = json_num(t.at("oracle_rel"), "tolerances.oracle_rel");
        if (t.contains("degenerate")) cfg.tolerances.degenerate = json_num(t.at("degenerate"), "tolerances.degenerate");
    }

    cfg.validate();
    return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot open config file " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigInvalid(std::string("JSON parse error in ") + path + ": " + e.what());
    }
    return parse_config(doc);
}

nlohmann::ordered_json config_to_json(const ScenarioConfig& cfg) {
    nlohmann::ordered_json j;
    j["schema_version"] = "1";
    nlohmann::ordered_json factors = nlohmann::ordered_json::array();
    {
        nlohmann::ordered_json s;
        s["kind"] = "surface";
        s["genus"] = cfg.spec.sigma.genus;
        factors.push_back(std::move(s));
    }
    for (const auto& part : cfg.spec.n_parts) {
        nlohmann::ordered_json f;
        if (const auto* s = std::get_if<SurfaceFactor>(&part)) {
            f["kind"] = "surface";
            f["genus"] = s->genus;
        } else if (const auto* g = std::get_if<GenericFactor>(&part)) {
            f["kind"] = "generic";
            f["dim"] = g->dim;
            f["b1"] = g->b1;
            f["p1_mask"] = std::vector<int>(g->p1_mask.begin(), g->p1_mask.end());
        }
        factors.push_back(std::move(f));
    }
    {
        nlohmann::ordered_json t;
        t["kind"] = "torus";
        t["k"] = cfg.spec.torus.k;
        t["circumferences"] = rats_to_strings(cfg.spec.torus.circumferences);
        factors.push_back(std::move(t));
    }
    j["factors"] = std::move(factors);
    j["beta"] = rats_to_strings(cfg.beta);
    j["dualize"] = cfg.dualize;
    if (cfg.reduce) j["reduce"] = *cfg.reduce;
    if (cfg.holonomy) {
        nlohmann::ordered_json h;
        h["grid"] = cfg.holonomy->grid;
        h["step"] = cfg.holonomy->step;
        h["tolerance"] = cfg.holonomy->tolerance;
        h["sample_count"] = cfg.holonomy->sample_count;
        j["holonomy"] = std::move(h);
    }
    {
        nlohmann::ordered_json t;
        t["zero_abs"] = cfg.tolerances.zero_abs;
        t["oracle_rel"] = cfg.tolerances.oracle_rel;
        t["degenerate"] = cfg.tolerances.degenerate;
        j["tolerances"] = std::move(t);
    }
    return j;
}

} // namespace fluxlab
