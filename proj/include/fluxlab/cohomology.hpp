#pragma once

#include <set>
#include <span>
#include <variant>
#include <vector>

#include "fluxlab/rational.hpp"

namespace fluxlab {

/// Declarative description of one factor manifold. The harmonic basis of
/// H¹ is user-declared (b1 plus the subset of basis indices spanned by
/// Levi-Civita-parallel forms); nothing is computed from a metric here.
struct SurfaceFactor {
    int genus = 1; // >= 1

    // b1 = 2g. On a flat torus every harmonic 1-form is parallel; for
    // genus >= 2 negative Ricci curvature kills parallel fields.
    int b1() const { return 2 * genus; }
    std::set<int> p1_mask() const {
        return genus == 1 ? std::set<int>{1, 2} : std::set<int>{};
    }
};

struct GenericFactor {
    int dim = 1;            // >= 1
    int b1 = 0;             // >= 0
    std::set<int> p1_mask;  // 1-based indices into 1..b1
};

struct TorusFactor {
    int k = 0;                        // >= 0
    std::vector<Rat> circumferences;  // length k, each > 0; default 1 (exact)
};

using FactorSpec = std::variant<SurfaceFactor, GenericFactor, TorusFactor>;

int factor_dim(const FactorSpec& f);
int factor_b1(const FactorSpec& f);
std::set<int> factor_p1_mask(const FactorSpec& f);

/// The product Σ_g × N × T^k. N may itself be a product; its H¹ basis is
/// the concatenation of the part bases in declaration order, torus basis
/// directions come after all of N (circle order 1..k).
struct ProductSpec {
    SurfaceFactor sigma;
    std::vector<FactorSpec> n_parts; // Surface or Generic only
    TorusFactor torus;

    int dim_n() const;
    int b1_n() const;
    std::set<int> p1_mask_n() const; // offsets applied across n_parts
    int k() const { return torus.k; }
    const Rat& circumference(int circle) const; // 1-based

    void validate() const; // throws ConfigInvalid on a malformed spec
};

/// Exact coefficients of the harmonic 1-form entering the mixed class:
/// gamma over the H¹(N) basis, c over the torus directions.
struct MixedFluxClass {
    std::vector<Rat> gamma;
    std::vector<Rat> c;
    int sigma_genus = 1;

    bool is_zero() const { return all_zero(gamma) && all_zero(c); }
};

struct StratumVerdict {
    int r = 0;        // rank of the mixed class, 0 or 1
    int dim_k = 0;    // dimension of the parallel-strata obstruction, 0 or 1
    int r_sharp = 0;  // r - dim_k
    bool in_p1 = false;
    bool kernel_caveat = false; // gamma has support on parallel N directions
};

struct KernelResult {
    std::vector<Rat> kernel; // length b1(N)
    bool caveat = false;     // a nonzero parallel-direction entry was dropped
};

/// Splits a raw coefficient vector of length b1(N)+k into (gamma, c).
/// Exact copy, no arithmetic. Throws LengthMismatch on a wrong length.
MixedFluxClass decompose(std::span<const Rat> beta_raw, const ProductSpec& spec);

/// Coefficient vectors must match the owning spec (b1(N) and k).
void require_class_matches(const MixedFluxClass& cls, const ProductSpec& spec);

/// True iff every nonzero gamma coefficient sits on a parallel basis
/// direction of N. Torus directions are flat, so the c-part never obstructs.
bool is_in_parallel_stratum(const MixedFluxClass& cls, const ProductSpec& spec);

/// The invariant r♯ = r - dim K together with the stratum diagnostics.
StratumVerdict r_sharp(const MixedFluxClass& cls, const ProductSpec& spec);

/// The component of the flux that survives T-duality along every flat
/// circle factor: gamma with parallel-direction entries zeroed. Entries
/// dropped that way are only convertible along a hidden circle factor when
/// the associated parallel field has closed orbits; the caveat flag
/// reports that assumption instead of applying it.
KernelResult irreducible_kernel(const MixedFluxClass& cls, const ProductSpec& spec);

} // namespace fluxlab
