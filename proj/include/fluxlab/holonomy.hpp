#pragma once

#include <Eigen/Core>

#include <vector>

#include "fluxlab/chart.hpp"

namespace fluxlab {

struct HolonomyOptions {
    double step = 1e-4;             // finite-difference step for curvature
    double richardson_factor = 2.0; // cross-check step multiplier
    double richardson_tol = 1e-6;   // disagreement beyond this is StepTooLarge
    double antisym_tol = 1e-9;      // metricity defect budget
    double rank_tol = 1e-7;         // singular values below tol * s_max count as zero
};

/// gamma[a](i, j) = Γ^i_{aj} of the torsion connection: closed-form
/// Levi-Civita symbols plus the contorsion ½ T raised on the first index.
using ConnectionMatrices = std::vector<Eigen::MatrixXd>;

ConnectionMatrices connection_coefficients(const Chart& chart, const TorsionField& torsion, const Eigen::VectorXd& p,
                                           double step = 1e-4);

struct CurvatureSample {
    Eigen::VectorXd point;
    /// R(e_a, e_b) for pairs a < b in lexicographic order, expressed in the
    /// orthonormal coordinate-aligned frame (antisymmetric matrices).
    std::vector<Eigen::MatrixXd> operators;
    int offdiag_rank = 0;
    double tolerance_used = 0.0;
    double max_antisymmetry_defect = 0.0;
    double richardson_disagreement = 0.0;
};

/// R(e_a,e_b) = ∂_a Γ_b − ∂_b Γ_a + [Γ_a, Γ_b] by 4th-order central
/// differences of the connection, with a Richardson cross-check at
/// richardson_factor × step.
CurvatureSample curvature_operators(const Chart& chart, const TorsionField& torsion, const Eigen::VectorXd& p,
                                    double step, const HolonomyOptions& opts = {});

/// Algebraic curvature contribution ¼[T_a, T_b] of a (locally) constant
/// torsion in the orthonormal frame; equals the full curvature on flat
/// charts and guards the finite-difference rank estimate elsewhere.
std::vector<Eigen::MatrixXd> commutator_curvature_oracle(const Chart& chart, const TorsionField& torsion,
                                                         const Eigen::VectorXd& p);

/// Numerical rank of the stacked V_Σ × V_{M₂} blocks of the operators.
int offdiag_rank(const std::vector<Eigen::MatrixXd>& frame_ops, double rank_tol);

struct RankSurvey {
    std::vector<CurvatureSample> samples;
    std::vector<int> oracle_ranks;
    int min_rank = 0;
    int max_rank = 0;
    int oracle_max_rank = 0;
};

RankSurvey offdiag_rank_survey(const Chart& chart, const TorsionField& torsion,
                               const std::vector<Eigen::VectorXd>& points, const HolonomyOptions& opts = {});

/// Parallel transport around a closed polyline by RK4 integration of
/// v' = -Γ(x(t)) ẋ v, `steps` substeps per segment; returns the transport
/// matrix in coordinate components.
Eigen::MatrixXd loop_transport(const Chart& chart, const TorsionField& torsion,
                               const std::vector<Eigen::VectorXd>& loop, int steps);

/// Coordinate square of side eps at p in the (axis_a, axis_b) plane,
/// traversed (+b, +a, -b, -a) so that log(transport) ≈ +eps²·R(∂_a, ∂_b).
Eigen::MatrixXd square_loop_transport(const Chart& chart, const TorsionField& torsion, const Eigen::VectorXd& p,
                                      int axis_a, int axis_b, double eps, int steps);

/// Principal log of a matrix close to the identity (series).
Eigen::MatrixXd matrix_log_near_identity(const Eigen::MatrixXd& m);

/// Deterministic low-discrepancy interior sample points.
std::vector<Eigen::VectorXd> survey_points(const Chart& chart, int count, double margin);

} // namespace fluxlab
