#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "fluxlab/errors.hpp"
#include "fluxlab/holonomy.hpp"

using namespace fluxlab;

namespace {

Chart flat_t2_t2_s1() {
    return Chart(FactorPatch{PatchKind::Flat, 2, {}}, {FactorPatch{PatchKind::Flat, 2, {}}},
                 FactorPatch{PatchKind::Flat, 1, {}});
}

TorsionField vol_wedge_dtheta() {
    TorsionField t;
    t.tau = {0.0, 0.0, 1.0};
    return t;
}

} // namespace

TEST_CASE("zero torsion on a flat chart gives zero connection and curvature") {
    const Chart chart = flat_t2_t2_s1();
    TorsionField t;
    t.tau = {0.0, 0.0, 0.0};
    for (const auto& gam : connection_coefficients(chart, t, chart.center(), 1e-4))
        CHECK(gam.cwiseAbs().maxCoeff() == 0.0);
    const CurvatureSample sample = curvature_operators(chart, t, chart.center(), 1e-4);
    for (const auto& op : sample.operators) CHECK(op.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(sample.offdiag_rank == 0);
}

TEST_CASE("contorsion on a flat chart is half the torsion, skew after lowering") {
    const Chart chart = flat_t2_t2_s1();
    const TorsionField t = vol_wedge_dtheta();
    const Eigen::VectorXd p = chart.center();
    const auto gam = connection_coefficients(chart, t, p, 1e-4);
    const auto tt = torsion_tensor(chart, t, p);
    for (std::size_t a = 0; a < gam.size(); ++a) {
        CHECK((gam[a] - 0.5 * tt[a]).cwiseAbs().maxCoeff() == 0.0);
        CHECK((gam[a] + gam[a].transpose()).cwiseAbs().maxCoeff() == 0.0); // lowering is trivial here
    }
}

TEST_CASE("constant torsion on a flat chart: curvature equals the commutator") {
    const Chart chart = flat_t2_t2_s1();
    const TorsionField t = vol_wedge_dtheta();
    const Eigen::VectorXd p = chart.center();
    const CurvatureSample sample = curvature_operators(chart, t, p, 1e-4);
    const auto oracle = commutator_curvature_oracle(chart, t, p);
    REQUIRE(sample.operators.size() == oracle.size());

    double scale = 0.0;
    for (const auto& op : oracle) scale = std::max(scale, op.cwiseAbs().maxCoeff());
    REQUIRE(scale > 0.0);
    for (std::size_t i = 0; i < oracle.size(); ++i)
        CHECK((sample.operators[i] - oracle[i]).cwiseAbs().maxCoeff() < 1e-8 * scale);

    CHECK(sample.max_antisymmetry_defect < 1e-9);
    CHECK(sample.offdiag_rank == 1);
    CHECK(offdiag_rank(oracle, 1e-7) == 1);

    // explicit entries: R(e1, eθ) mixes Σ and the circle with weight ±1/4
    // pairs are lexicographic over (a, b); (0, 4) is index 3
    CHECK(sample.operators[3](0, 4) == doctest::Approx(-0.25).epsilon(1e-8));
}

TEST_CASE("circumference scaling passes through the frame machinery") {
    // circle of length 3: coordinate metric 9, orthonormal frame rescales it away
    Chart chart(FactorPatch{PatchKind::Flat, 2, {}}, {FactorPatch{PatchKind::Flat, 2, {}}},
                FactorPatch{PatchKind::Flat, 1, {3.0}});
    const TorsionField t = vol_wedge_dtheta();
    const Eigen::VectorXd p = chart.center();
    const CurvatureSample sample = curvature_operators(chart, t, p, 1e-4);
    const auto oracle = commutator_curvature_oracle(chart, t, p);
    double scale = 0.0;
    for (const auto& op : oracle) scale = std::max(scale, op.cwiseAbs().maxCoeff());
    REQUIRE(scale > 0.0);
    for (std::size_t i = 0; i < oracle.size(); ++i)
        CHECK((sample.operators[i] - oracle[i]).cwiseAbs().maxCoeff() < 1e-8 * scale);
    CHECK(sample.offdiag_rank == 1);
}

TEST_CASE("hyperbolic surface block carries curvature -1 and no mixing") {
    Chart chart(FactorPatch{PatchKind::Hyperbolic, 2, {}}, {FactorPatch{PatchKind::Flat, 2, {}}},
                FactorPatch{PatchKind::Flat, 0, {}});
    TorsionField t;
    t.tau = {0.0, 0.0};
    Eigen::VectorXd p = chart.center();
    const CurvatureSample sample = curvature_operators(chart, t, p, 1e-4);
    // pair (0,1) is the Σ plane; op(0,1) = <R(e1,e2)e2, e1> = K = -1
    CHECK(sample.operators[0](0, 1) == doctest::Approx(-1.0).epsilon(1e-6));
    for (std::size_t i = 1; i < sample.operators.size(); ++i)
        CHECK(sample.operators[i].cwiseAbs().maxCoeff() < 1e-8);
    CHECK(sample.offdiag_rank == 0);
}

TEST_CASE("mixed hyperbolic background keeps the operators antisymmetric") {
    Chart chart(FactorPatch{PatchKind::Hyperbolic, 2, {}}, {FactorPatch{PatchKind::Hyperbolic, 3, {}}},
                FactorPatch{PatchKind::Flat, 1, {}});
    TorsionField t;
    t.tau = {1.0, 0.0, 0.0, 0.0};
    Eigen::VectorXd p = chart.center();
    const CurvatureSample sample = curvature_operators(chart, t, p, 1e-4);
    CHECK(sample.max_antisymmetry_defect < 1e-9);
    CHECK(sample.offdiag_rank >= 1);
}

TEST_CASE("step and boundary guards") {
    const Chart chart = flat_t2_t2_s1();
    TorsionField rough = vol_wedge_dtheta();
    rough.h = [](const Eigen::VectorXd& q) { return std::sin(40.0 * M_PI * q[0]); };
    CHECK_THROWS_AS(curvature_operators(chart, rough, chart.center(), 0.02), StepTooLarge);

    Eigen::VectorXd near_edge = chart.center();
    near_edge[0] = 1e-5;
    CHECK_THROWS_AS(curvature_operators(chart, vol_wedge_dtheta(), near_edge, 1e-4), BoundaryTooClose);
    CHECK_THROWS_AS(connection_coefficients(chart, vol_wedge_dtheta(), near_edge, 1e-4), BoundaryTooClose);
}

TEST_CASE("loop transport is the identity without curvature") {
    const Chart chart = flat_t2_t2_s1();
    TorsionField t;
    t.tau = {0.0, 0.0, 0.0};
    Eigen::VectorXd a = chart.center(), b = chart.center(), c = chart.center();
    b[0] += 0.2;
    c[1] += 0.15;
    const Eigen::MatrixXd v = loop_transport(chart, t, {a, b, c}, 16);
    CHECK((v - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("small square loops reproduce the curvature operators") {
    const Chart chart = flat_t2_t2_s1();
    const TorsionField t = vol_wedge_dtheta();
    const Eigen::VectorXd p = chart.center();
    const auto oracle = commutator_curvature_oracle(chart, t, p);
    const double eps = 1e-2;

    // plane (0, 4): oracle index 3 in lexicographic pair order
    const Eigen::MatrixXd transport = square_loop_transport(chart, t, p, 0, 4, eps, 32);
    const Eigen::MatrixXd approx = matrix_log_near_identity(transport) / (eps * eps);
    const double scale = oracle[3].cwiseAbs().maxCoeff();
    REQUIRE(scale > 0.0);
    CHECK((approx - oracle[3]).cwiseAbs().maxCoeff() < 0.05 * scale);

    // second-order convergence: the log shrinks like eps^2
    const double n1 = matrix_log_near_identity(square_loop_transport(chart, t, p, 0, 4, eps, 32)).norm();
    const double n2 = matrix_log_near_identity(square_loop_transport(chart, t, p, 0, 4, eps / 2.0, 32)).norm();
    const double slope = std::log2(n1 / n2);
    CHECK(slope == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("hyperbolic square loop rotates by the enclosed area") {
    Chart chart(FactorPatch{PatchKind::Hyperbolic, 2, {}}, {}, FactorPatch{PatchKind::Flat, 0, {}});
    TorsionField t;
    t.tau = {};
    Eigen::VectorXd p(2);
    p << 0.5, 1.5;
    const double eps = 0.02;
    const Eigen::MatrixXd transport = square_loop_transport(chart, t, p, 0, 1, eps, 32);
    const Eigen::MatrixXd logm = matrix_log_near_identity(transport);
    const double angle = std::abs(logm(0, 1));
    const double expected = eps * eps / (p[1] * p[1]); // |K| × hyperbolic area of the square
    CHECK(angle == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("rank survey reports extremes and the oracle guard") {
    const Chart chart = flat_t2_t2_s1();
    const TorsionField t = vol_wedge_dtheta();
    const auto points = survey_points(chart, 4, 0.1);
    REQUIRE(points.size() == 4);
    const RankSurvey survey = offdiag_rank_survey(chart, t, points);
    CHECK(survey.min_rank == 1);
    CHECK(survey.max_rank == 1);
    CHECK(survey.oracle_max_rank == 1);

    TorsionField none;
    none.tau = {0.0, 0.0, 0.0};
    const RankSurvey empty = offdiag_rank_survey(chart, none, points);
    CHECK(empty.min_rank == 0);
    CHECK(empty.max_rank == 0);
    CHECK_THROWS_AS(offdiag_rank_survey(chart, none, {}), ConfigInvalid);
}

TEST_CASE("survey points are deterministic and interior") {
    const Chart chart = flat_t2_t2_s1();
    const auto a = survey_points(chart, 5, 0.05);
    const auto b = survey_points(chart, 5, 0.05);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == b[i]);
        chart.require_interior(a[i], 0.04);
    }
}
