#include "fluxlab/reduction.hpp"

#include <string>

#include "fluxlab/errors.hpp"

namespace fluxlab {

const char* reduction_verdict_name(ReductionVerdict v) {
    switch (v) {
        case ReductionVerdict::IrreducibleSurvives: return "IrreducibleSurvives";
        case ReductionVerdict::ReducesToLeviCivita: return "ReducesToLeviCivita";
        default: return "Indeterminate";
    }
}

ReductionReport pullback_flux(const MixedFluxClass& cls, const ProductSpec& spec, int circle) {
    require_class_matches(cls, spec);
    if (circle < 1 || circle > spec.k())
        throw ConfigInvalid("collapse circle " + std::to_string(circle) + " outside 1.." + std::to_string(spec.k()));

    ReductionReport rep;
    rep.restricted_spec = spec;
    rep.restricted_spec.torus.k = spec.k() - 1;
    rep.restricted_spec.torus.circumferences.erase(rep.restricted_spec.torus.circumferences.begin() + (circle - 1));

    rep.restricted.sigma_genus = cls.sigma_genus;
    rep.restricted.gamma = cls.gamma;
    rep.restricted.c = cls.c;
    rep.restricted.c.erase(rep.restricted.c.begin() + (circle - 1));

    rep.vanished = rep.restricted.is_zero();
    rep.verdict = ReductionVerdict::Indeterminate;
    rep.restricted_r_sharp = r_sharp(rep.restricted, rep.restricted_spec).r_sharp;
    return rep;
}

ReductionReport reduced_verdict(const MixedFluxClass& cls, const ProductSpec& spec, int circle) {
    ReductionReport rep = pullback_flux(cls, spec, circle);
    if (spec.k() != 1 || !spec.p1_mask_n().empty()) return rep; // outside the decisive hypotheses

    const StratumVerdict v = r_sharp(cls, spec);
    rep.verdict = (v.r_sharp == 1) ? ReductionVerdict::IrreducibleSurvives : ReductionVerdict::ReducesToLeviCivita;
    return rep;
}

} // namespace fluxlab
