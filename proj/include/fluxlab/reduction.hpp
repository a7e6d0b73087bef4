#pragma once

#include "fluxlab/cohomology.hpp"

namespace fluxlab {

enum class ReductionVerdict { IrreducibleSurvives, ReducesToLeviCivita, Indeterminate };

const char* reduction_verdict_name(ReductionVerdict v);

struct ReductionReport {
    MixedFluxClass restricted;   // class on Σ_g × N × T^{k-1}
    ProductSpec restricted_spec; // torus rank reduced by one
    bool vanished = false;
    ReductionVerdict verdict = ReductionVerdict::Indeterminate;
    int restricted_r_sharp = 0;
};

/// Restriction to a slice at fixed θᵢ: the dθᵢ component dies, everything
/// else pulls back unchanged. Verdict left Indeterminate.
ReductionReport pullback_flux(const MixedFluxClass& cls, const ProductSpec& spec, int circle);

/// Holonomy verdict for the restricted connection. Decisive only under the
/// hypotheses k = 1 and P1(N) = {0}; anything else reports Indeterminate
/// with the pullback data intact.
ReductionReport reduced_verdict(const MixedFluxClass& cls, const ProductSpec& spec, int circle);

} // namespace fluxlab
