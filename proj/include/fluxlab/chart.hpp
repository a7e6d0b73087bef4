#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

#include "fluxlab/cohomology.hpp"
#include "fluxlab/fields.hpp"

namespace fluxlab {

enum class PatchKind { Flat, Hyperbolic };

/// One factor of the product chart. Flat patches are boxes [0,1]^dim with
/// metric diag(scale²) (torus circumference scaling enters here);
/// hyperbolic patches are upper-half-space boxes y^{-2}·δ with the last
/// local coordinate y restricted to [1, 2].
struct FactorPatch {
    PatchKind kind = PatchKind::Flat;
    int dim = 1;
    std::vector<double> scale; // flat only; empty = all ones

    double scale_at(int local) const {
        return (kind == PatchKind::Flat && local < static_cast<int>(scale.size()))
                   ? scale[static_cast<std::size_t>(local)]
                   : 1.0;
    }
};

/// Product chart Σ × N × T^k with a diagonal metric evaluator and
/// closed-form Levi-Civita symbols per block. Holonomy quantities are
/// local, so a box patch per factor is all the geometry needed.
class Chart {
public:
    Chart(FactorPatch sigma, std::vector<FactorPatch> n_patches, FactorPatch torus);

    int D() const { return dim_; }
    const CoordMap& coords() const { return coords_; }

    double lo(int axis) const;
    double hi(int axis) const;
    void require_interior(const Eigen::VectorXd& p, double margin) const;
    Eigen::VectorXd center() const;

    Eigen::VectorXd metric_diag(const Eigen::VectorXd& p) const;
    double sigma_density(const Eigen::VectorXd& p) const; // sqrt det of the Σ block

    /// gamma[a](i,j) = Γ^i_{aj}, Levi-Civita, closed form.
    std::vector<Eigen::MatrixXd> christoffel(const Eigen::VectorXd& p) const;

private:
    struct PlacedPatch {
        FactorPatch patch;
        int offset = 0;
    };
    std::vector<PlacedPatch> patches_;
    CoordMap coords_;
    int dim_ = 0;
};

/// T = h · vol_Σ ∧ τ with τ constant-coefficient on the N × T^k block in
/// chart coordinates; h ≡ 1 unless a profile is supplied.
struct TorsionField {
    std::vector<double> tau; // length dim_n + k, coordinate components
    std::function<double(const Eigen::VectorXd&)> h; // empty = identically 1

    double h_at(const Eigen::VectorXd& p) const { return h ? h(p) : 1.0; }
};

/// Full antisymmetric component array T_{μνρ} at a point (lower indices).
std::vector<Eigen::MatrixXd> torsion_tensor(const Chart& chart, const TorsionField& torsion,
                                            const Eigen::VectorXd& p);

/// Numeric-tier chart for a declared product: flat boxes for genus-1 and
/// fully-parallel factors, hyperbolic patches for genus >= 2 surfaces and
/// mask-free generic factors, circumference-scaled flat torus block.
Chart make_chart(const ProductSpec& spec);

/// τ from the exact class: harmonic basis direction j of N maps to chart
/// covector dy^j (requires supp(gamma) ⊆ 1..dim N), circle i to dθᵢ.
TorsionField torsion_from_class(const MixedFluxClass& cls, const ProductSpec& spec);

} // namespace fluxlab
