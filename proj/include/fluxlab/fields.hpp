#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fluxlab/cohomology.hpp"
#include "fluxlab/rational.hpp"

namespace fluxlab {

struct GridAxis {
    int n = 1;
    double lo = 0.0;
    double hi = 1.0;
    double step() const { return n > 1 ? (hi - lo) / (n - 1) : 0.0; }
};

/// Uniform tensor-product grid over the base (non-torus) coordinates of a
/// chart. Torus coordinates are never gridded: every component function is
/// independent of them on a product.
class ChartGrid {
public:
    ChartGrid() { recompute(); }
    explicit ChartGrid(std::vector<GridAxis> axes) : axes_(std::move(axes)) { recompute(); }

    int naxes() const { return static_cast<int>(axes_.size()); }
    const GridAxis& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }
    std::size_t total() const { return total_; }
    std::size_t stride(int a) const { return strides_[static_cast<std::size_t>(a)]; }
    double coord(int a, int i) const { return axis(a).lo + axis(a).step() * i; }
    int axis_index_of(std::size_t flat, int a) const {
        return static_cast<int>((flat / stride(a)) % static_cast<std::size_t>(axis(a).n));
    }
    std::vector<double> point(std::size_t flat) const;

private:
    void recompute();
    std::vector<GridAxis> axes_;
    std::vector<std::size_t> strides_;
    std::size_t total_ = 1;
};

/// One metric or B-field component: either an exact rational constant or a
/// double-valued sample vector over a ChartGrid. Arithmetic between two
/// constants stays rational; anything touching samples is promoted.
class ScalarField {
public:
    ScalarField() : data_(Rat(0)) {}

    static ScalarField constant(Rat v) { return ScalarField(std::move(v)); }
    static ScalarField constant(long v) { return ScalarField(make_rat(v)); }
    static ScalarField sampled(std::vector<double> v) { return ScalarField(std::move(v)); }

    bool is_constant() const { return std::holds_alternative<Rat>(data_); }
    const Rat& rat() const { return std::get<Rat>(data_); }
    const std::vector<double>& samples() const { return std::get<std::vector<double>>(data_); }

    std::size_t size() const { return is_constant() ? 1 : samples().size(); }
    double value(std::size_t flat) const {
        return is_constant() ? rat_to_double(rat()) : samples()[flat];
    }
    bool is_exact(long v) const { return is_constant() && rat() == v; }
    double max_abs() const;

private:
    explicit ScalarField(Rat v) : data_(std::move(v)) {}
    explicit ScalarField(std::vector<double> v) : data_(std::move(v)) {}
    std::variant<Rat, std::vector<double>> data_;
};

ScalarField f_neg(const ScalarField& a);
ScalarField f_add(const ScalarField& a, const ScalarField& b);
ScalarField f_sub(const ScalarField& a, const ScalarField& b);
ScalarField f_mul(const ScalarField& a, const ScalarField& b);
ScalarField f_div(const ScalarField& a, const ScalarField& b);

/// Largest pointwise |a - b|; exactly 0.0 when both are equal constants.
double max_abs_diff(const ScalarField& a, const ScalarField& b);
bool exactly_equal(const ScalarField& a, const ScalarField& b);

/// 4th-order finite difference along a grid axis. Constant fields and
/// size-1 axes differentiate to the exact constant zero; interior points
/// use the central stencil, edges one-sided stencils of the same order.
ScalarField derivative(const ScalarField& f, const ChartGrid& grid, int axis);

ScalarField sample_function(const ChartGrid& grid, const std::function<double(const std::vector<double>&)>& fn);

/// Flat-index bookkeeping for the splitting Σ(2) | N(dim_n) | T^k.
struct CoordMap {
    int dim_n = 0;
    int k = 0;

    int D() const { return 2 + dim_n + k; }
    int base_count() const { return 2 + dim_n; }
    bool is_sigma(int idx) const { return idx < 2; }
    bool is_n(int idx) const { return idx >= 2 && idx < 2 + dim_n; }
    bool is_torus(int idx) const { return idx >= 2 + dim_n; }
    int torus_flat(int circle) const { return 2 + dim_n + circle - 1; } // circle is 1-based
    int circle_of(int flat) const { return flat - (2 + dim_n) + 1; }
    std::string coord_name(int idx) const;
};

/// Component functions G_{MN}, B_{MN} over a chart grid. Symmetry and
/// antisymmetry are enforced by the setters; every component is independent
/// of the torus coordinates by representation.
class BackgroundFields {
public:
    BackgroundFields(CoordMap coords, ChartGrid grid, std::vector<Rat> circumferences);

    const CoordMap& coords() const { return coords_; }
    const ChartGrid& grid() const { return grid_; }
    const Rat& circumference(int circle) const;

    const ScalarField& g(int i, int j) const { return g_[at(i, j)]; }
    const ScalarField& b(int i, int j) const { return b_[at(i, j)]; }
    void set_g(int i, int j, ScalarField f);
    void set_b(int i, int j, ScalarField f);

    bool product_flag(int circle, double tol = 1e-10) const;
    std::vector<bool> product_flags(double tol = 1e-10) const;

    /// Positive definiteness at every sample; exact pivoted elimination when
    /// all components are rational constants, per-sample LDLT otherwise.
    void verify_positive_definite() const;

private:
    std::size_t at(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(coords_.D()) + static_cast<std::size_t>(j);
    }
    CoordMap coords_;
    ChartGrid grid_;
    std::vector<Rat> circumferences_;
    std::vector<ScalarField> g_, b_;
};

/// Sampled flux components H_{12a}(x), H_{12θᵢ}(x). Pure bidegree (2,1) is
/// structural: there is no slot for a component with two torus indices or
/// fewer than two Σ indices.
struct FluxFieldTier {
    std::vector<ScalarField> h12_n;     // length dim_n
    std::vector<ScalarField> h12_torus; // length k
};

struct FluxComponents {
    MixedFluxClass cohomological;
    std::optional<FluxFieldTier> field_tier;
};

struct BackgroundOptions {
    int sigma_points = 33; // per Σ axis
    int n_points = 1;      // per N axis (flat N components are constant)
};

/// Product background realizing a flux class: G = g_Σ ⊕ I_N ⊕ I_k and
/// B_{2a} = γ_a·A, B_{2θᵢ} = cᵢ·A with A = ∫√g_Σ dx¹ on the chart, so that
/// dB = vol_Σ ∧ (γ + Σ cᵢ dθᵢ) component-wise. Requires supp(γ) ⊆ 1..dim N.
BackgroundFields make_product_background(const ProductSpec& spec, const MixedFluxClass& cls,
                                         const BackgroundOptions& opts = {});

/// Field tier of H = dB extracted from a background by finite differences.
FluxFieldTier flux_field_tier(const BackgroundFields& bg);

/// max over μ<ν of |(dB)_{μνθᵢ}| on the grid: the θᵢ-indexed H components.
double max_theta_flux_component(const BackgroundFields& bg, int circle);

/// Quadrature-normalized coefficients recovered from the field tier
/// (∫ H_{12·} / ∫ √g_Σ over the Σ chart), for consistency checks against
/// the exact cohomological coefficients.
std::vector<double> integrate_field_tier(const BackgroundFields& bg, const FluxFieldTier& tier);

} // namespace fluxlab
