#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fluxlab/cohomology.hpp"
#include "fluxlab/fields.hpp"

namespace fluxlab {

struct BuscherOptions {
    double zero_tol = 1e-10;       // absolute threshold for "zero component"
    double degenerate_tol = 1e-12; // fiber metric magnitude below this is degenerate
};

/// One conversion record: T-duality along a circle trades the B_{μθᵢ}
/// column for off-diagonal metric components (geometric flux).
struct LedgerEntry {
    int circle = 0;
    Rat converted_c = Rat(0); // cohomological coefficient removed by this step
    std::vector<std::pair<int, ScalarField>> offdiag; // mu -> G~_{mu theta_i}
};

struct DualityFrame {
    std::vector<int> dualized;
    std::vector<LedgerEntry> ledger;
    std::vector<bool> chern_flags; // aligned with dualized: fiberwise integral nonzero
};

/// Shifts B by the closed form -B_{θᵢθⱼ} dθᵢ∧dθⱼ, zeroing every
/// torus-torus component. Each such component must be constant on the grid;
/// variation beyond tolerance means the flux was not of pure bidegree (2,1).
BackgroundFields gauge_fix_torus_torus(const BackgroundFields& bg, const BuscherOptions& opts = {});

/// Buscher rules along one circle with general denominator G_{θθ}:
///   G~_θθ = 1/G_θθ,  G~_μθ = B_μθ/G_θθ,  B~_μθ = G_μθ/G_θθ,
///   G~_μν = G_μν - (G_μθ G_νθ - B_μθ B_νθ)/G_θθ,
///   B~_μν = B_μν - (G_μθ B_νθ - B_μθ G_νθ)/G_θθ.
/// On a product fiber (G_θθ = 1, G_μθ = 0) this is the textbook special
/// case. Appends a ledger entry to frame when the circle carried B-flux.
BackgroundFields buscher_dualize(const BackgroundFields& bg, int circle, DualityFrame* frame = nullptr,
                                 const BuscherOptions& opts = {});

struct ComposeResult {
    BackgroundFields background;
    DualityFrame frame;
    MixedFluxClass flux; // gamma + sum over circles not dualized of c_i dθᵢ
};

/// Iterated duality along an ordered circle list. Requires the torus-torus
/// gauge fix and verifies the pairwise obstruction integrals vanish before
/// touching the background.
ComposeResult compose_dualities(const BackgroundFields& bg, const MixedFluxClass& cls, const ProductSpec& spec,
                                std::span<const int> circles, const BuscherOptions& opts = {});

/// Integral of H over the (θᵢ, θⱼ) subtorus at a fixed base point:
/// circumference_i · circumference_j · (two-torus-index component). The
/// component slot does not exist for pure bidegree (2,1), so the result is
/// the exact rational zero.
Rat bem_obstruction(const FluxComponents& flux, const ProductSpec& spec, int i, int j);

/// Trapezoidal quadrature of an arbitrary two-torus component over the
/// (θᵢ, θⱼ) subtorus, the sensitivity path for synthetic inputs that are
/// not of pure bidegree (2,1).
double bem_obstruction_quadrature(const std::function<double(double, double)>& component, double circ_i,
                                  double circ_j, int points_per_axis = 33);

/// c_i times the stored circumference of circle i, exact.
Rat fiberwise_integral(const MixedFluxClass& cls, const ProductSpec& spec, int circle);

/// Topological T-duality outcome for one circle, assuming P1(N) = {0}:
///   A: flux fully absorbed into dual topology (γ = 0, cᵢ ≠ 0)
///   B: no topological change, flux persists (γ ≠ 0, cᵢ = 0)
///   C: topological change and residual flux (γ ≠ 0, cᵢ ≠ 0)
enum class BemCase { A, B, C };

BemCase classify_bem_case(const MixedFluxClass& cls, const ProductSpec& spec, int circle);

char bem_case_letter(BemCase c);

} // namespace fluxlab
