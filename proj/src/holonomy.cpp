#include "fluxlab/holonomy.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <string>

#include "fluxlab/errors.hpp"

namespace fluxlab {

ConnectionMatrices connection_coefficients(const Chart& chart, const TorsionField& torsion, const Eigen::VectorXd& p,
                                           double step) {
    chart.require_interior(p, 2.0 * step);
    ConnectionMatrices gam = chart.christoffel(p);
    const std::vector<Eigen::MatrixXd> t = torsion_tensor(chart, torsion, p);
    const Eigen::VectorXd g = chart.metric_diag(p);
    const int d = chart.D();
    for (int a = 0; a < d; ++a)
        for (int i = 0; i < d; ++i)
            gam[static_cast<std::size_t>(a)].row(i) += (0.5 / g[i]) * t[static_cast<std::size_t>(a)].row(i);
    return gam;
}

namespace {

// Curvature operators in coordinate components for one finite-difference
// step; Γ evaluations reuse the closed-form connection.
std::vector<Eigen::MatrixXd> curvature_coordinate(const Chart& chart, const TorsionField& torsion,
                                                  const Eigen::VectorXd& p, double h) {
    const int d = chart.D();
    auto gamma_at = [&](const Eigen::VectorXd& q) { return connection_coefficients(chart, torsion, q, h); };

    // d/dx^a of every Γ_b at once, 4th-order central stencil.
    std::vector<std::vector<Eigen::MatrixXd>> dgam(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        Eigen::VectorXd q = p;
        auto shifted = [&](double offset) {
            q[a] = p[a] + offset;
            return gamma_at(q);
        };
        const auto m2 = shifted(-2.0 * h), m1 = shifted(-h), p1 = shifted(h), p2 = shifted(2.0 * h);
        dgam[static_cast<std::size_t>(a)].reserve(static_cast<std::size_t>(d));
        for (int b = 0; b < d; ++b)
            dgam[static_cast<std::size_t>(a)].push_back(
                (m2[static_cast<std::size_t>(b)] - 8.0 * m1[static_cast<std::size_t>(b)] +
                 8.0 * p1[static_cast<std::size_t>(b)] - p2[static_cast<std::size_t>(b)]) /
                (12.0 * h));
    }

    const ConnectionMatrices gam = gamma_at(p);
    std::vector<Eigen::MatrixXd> ops;
    ops.reserve(static_cast<std::size_t>(d * (d - 1) / 2));
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b)
            ops.push_back(dgam[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] -
                          dgam[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] +
                          gam[static_cast<std::size_t>(a)] * gam[static_cast<std::size_t>(b)] -
                          gam[static_cast<std::size_t>(b)] * gam[static_cast<std::size_t>(a)]);
    return ops;
}

std::vector<Eigen::MatrixXd> to_frame(const Chart& chart, const Eigen::VectorXd& p,
                                      const std::vector<Eigen::MatrixXd>& coord_ops) {
    const int d = chart.D();
    const Eigen::VectorXd g = chart.metric_diag(p);
    Eigen::VectorXd sqrtg(d);
    for (int i = 0; i < d; ++i) sqrtg[i] = std::sqrt(g[i]);

    std::vector<Eigen::MatrixXd> ops;
    ops.reserve(coord_ops.size());
    std::size_t idx = 0;
    for (int a = 0; a < d; ++a) {
        for (int b = a + 1; b < d; ++b, ++idx) {
            Eigen::MatrixXd m = coord_ops[idx];
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) m(i, j) *= sqrtg[i] / sqrtg[j];
            ops.push_back(m / (sqrtg[a] * sqrtg[b]));
        }
    }
    return ops;
}

double max_entry(const std::vector<Eigen::MatrixXd>& ops) {
    double m = 0.0;
    for (const auto& op : ops) m = std::max(m, op.cwiseAbs().maxCoeff());
    return m;
}

} // namespace

CurvatureSample curvature_operators(const Chart& chart, const TorsionField& torsion, const Eigen::VectorXd& p,
                                    double step, const HolonomyOptions& opts) {
    if (step <= 0.0) throw ConfigInvalid("finite-difference step must be positive");
    chart.require_interior(p, 4.0 * step * opts.richardson_factor);

    const auto coarse = curvature_coordinate(chart, torsion, p, step * opts.richardson_factor);
    const auto fine = curvature_coordinate(chart, torsion, p, step);

    double disagreement = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i)
        disagreement = std::max(disagreement, (fine[i] - coarse[i]).cwiseAbs().maxCoeff());
    const double scale = std::max(1.0, max_entry(fine));
    if (disagreement > opts.richardson_tol * scale)
        throw StepTooLarge("curvature estimates at steps h and " + std::to_string(opts.richardson_factor) +
                           "h disagree by " + std::to_string(disagreement));

    CurvatureSample sample;
    sample.point = p;
    sample.operators = to_frame(chart, p, fine);
    sample.richardson_disagreement = disagreement;
    for (const auto& op : sample.operators)
        sample.max_antisymmetry_defect =
            std::max(sample.max_antisymmetry_defect, (op + op.transpose()).cwiseAbs().maxCoeff());
    if (sample.max_antisymmetry_defect > opts.antisym_tol * scale)
        throw NumericFailure("curvature operator not antisymmetric: metricity defect " +
                             std::to_string(sample.max_antisymmetry_defect));
    sample.tolerance_used = opts.rank_tol;
    sample.offdiag_rank = offdiag_rank(sample.operators, opts.rank_tol);
    return sample;
}

std::vector<Eigen::MatrixXd> commutator_curvature_oracle(const Chart& chart, const TorsionField& torsion,
                                                         const Eigen::VectorXd& p) {
    const int d = chart.D();
    const std::vector<Eigen::MatrixXd> t = torsion_tensor(chart, torsion, p);
    const Eigen::VectorXd g = chart.metric_diag(p);
    Eigen::VectorXd f(d); // frame factors e_i = f_i ∂_i
    for (int i = 0; i < d; ++i) f[i] = 1.0 / std::sqrt(g[i]);

    // Frame components: T̂_a(i,j) = T_{iaj} f_i f_a f_j (raising is trivial
    // in an orthonormal frame).
    std::vector<Eigen::MatrixXd> that(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        Eigen::MatrixXd m = t[static_cast<std::size_t>(a)] * f[a];
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m(i, j) *= f[i] * f[j];
        that[static_cast<std::size_t>(a)] = m;
    }

    std::vector<Eigen::MatrixXd> ops;
    ops.reserve(static_cast<std::size_t>(d * (d - 1) / 2));
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b)
            ops.push_back(0.25 * (that[static_cast<std::size_t>(a)] * that[static_cast<std::size_t>(b)] -
                                  that[static_cast<std::size_t>(b)] * that[static_cast<std::size_t>(a)]));
    return ops;
}

int offdiag_rank(const std::vector<Eigen::MatrixXd>& frame_ops, double rank_tol) {
    if (frame_ops.empty()) return 0;
    const int d = static_cast<int>(frame_ops.front().rows());
    const int cols = d - 2;
    if (cols <= 0) return 0;

    Eigen::MatrixXd stacked(2 * static_cast<int>(frame_ops.size()), cols);
    for (std::size_t i = 0; i < frame_ops.size(); ++i) {
        stacked.row(2 * static_cast<int>(i)) = frame_ops[i].row(0).segment(2, cols);
        stacked.row(2 * static_cast<int>(i) + 1) = frame_ops[i].row(1).segment(2, cols);
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double smax = sv[0];
    // Guard against counting pure finite-difference noise as rank: the
    // leading singular value must register against the operator scale.
    if (smax <= rank_tol * std::max(1.0, max_entry(frame_ops))) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > rank_tol * smax) ++rank;
    return rank;
}

RankSurvey offdiag_rank_survey(const Chart& chart, const TorsionField& torsion,
                               const std::vector<Eigen::VectorXd>& points, const HolonomyOptions& opts) {
    if (points.empty()) throw ConfigInvalid("rank survey needs at least one sample point");
    RankSurvey survey;
    survey.samples.reserve(points.size());
    survey.oracle_ranks.reserve(points.size());
    for (const auto& p : points) {
        survey.samples.push_back(curvature_operators(chart, torsion, p, opts.step, opts));
        survey.oracle_ranks.push_back(offdiag_rank(commutator_curvature_oracle(chart, torsion, p), opts.rank_tol));
    }
    survey.min_rank = survey.samples.front().offdiag_rank;
    survey.max_rank = survey.samples.front().offdiag_rank;
    survey.oracle_max_rank = 0;
    for (std::size_t i = 0; i < survey.samples.size(); ++i) {
        survey.min_rank = std::min(survey.min_rank, survey.samples[i].offdiag_rank);
        survey.max_rank = std::max(survey.max_rank, survey.samples[i].offdiag_rank);
        survey.oracle_max_rank = std::max(survey.oracle_max_rank, survey.oracle_ranks[i]);
    }
    return survey;
}

Eigen::MatrixXd loop_transport(const Chart& chart, const TorsionField& torsion,
                               const std::vector<Eigen::VectorXd>& loop, int steps) {
    if (loop.size() < 3) throw ConfigInvalid("loop needs at least three vertices");
    if (steps < 1) throw ConfigInvalid("at least one integration step per segment required");
    for (const auto& v : loop) chart.require_interior(v, 0.0);

    const int d = chart.D();
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(d, d);

    auto rhs = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& u, const Eigen::MatrixXd& m) {
        const ConnectionMatrices gam = connection_coefficients(chart, torsion, x, 0.0);
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
        for (int c = 0; c < d; ++c)
            if (u[c] != 0.0) a += u[c] * gam[static_cast<std::size_t>(c)];
        return Eigen::MatrixXd(-a * m);
    };

    const std::size_t nseg = loop.size(); // closing segment included
    for (std::size_t s = 0; s < nseg; ++s) {
        const Eigen::VectorXd& q0 = loop[s];
        const Eigen::VectorXd& q1 = loop[(s + 1) % loop.size()];
        const Eigen::VectorXd u = q1 - q0;
        if (u.norm() == 0.0) continue;
        const double h = 1.0 / steps;
        for (int n = 0; n < steps; ++n) {
            const double t0 = n * h;
            const Eigen::VectorXd x0 = q0 + t0 * u;
            const Eigen::VectorXd xh = q0 + (t0 + 0.5 * h) * u;
            const Eigen::VectorXd x1 = q0 + (t0 + h) * u;
            const Eigen::MatrixXd k1 = rhs(x0, u, v);
            const Eigen::MatrixXd k2 = rhs(xh, u, v + 0.5 * h * k1);
            const Eigen::MatrixXd k3 = rhs(xh, u, v + 0.5 * h * k2);
            const Eigen::MatrixXd k4 = rhs(x1, u, v + h * k3);
            v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    return v;
}

Eigen::MatrixXd square_loop_transport(const Chart& chart, const TorsionField& torsion, const Eigen::VectorXd& p,
                                      int axis_a, int axis_b, double eps, int steps) {
    const int d = chart.D();
    if (axis_a < 0 || axis_a >= d || axis_b < 0 || axis_b >= d || axis_a == axis_b)
        throw ConfigInvalid("square loop needs two distinct axes");
    Eigen::VectorXd ea = Eigen::VectorXd::Zero(d), eb = Eigen::VectorXd::Zero(d);
    ea[axis_a] = eps;
    eb[axis_b] = eps;
    const std::vector<Eigen::VectorXd> loop{p, p + eb, p + eb + ea, p + ea};
    return loop_transport(chart, torsion, loop, steps);
}

Eigen::MatrixXd matrix_log_near_identity(const Eigen::MatrixXd& m) {
    const Eigen::MatrixXd x = m - Eigen::MatrixXd::Identity(m.rows(), m.cols());
    const double nx = x.norm();
    if (nx >= 0.5) throw NumericFailure("matrix too far from the identity for the log series");
    Eigen::MatrixXd term = x;
    Eigen::MatrixXd acc = x;
    for (int n = 2; n <= 64; ++n) {
        term = term * x;
        const Eigen::MatrixXd contrib = term * (((n % 2 == 0) ? -1.0 : 1.0) / n);
        acc += contrib;
        if (contrib.norm() < 1e-17) break;
    }
    return acc;
}

std::vector<Eigen::VectorXd> survey_points(const Chart& chart, int count, double margin) {
    if (count < 1) throw ConfigInvalid("sample count must be >= 1");
    // Weyl sequence offsets per axis keep the points deterministic and
    // spread without clustering on symmetry axes.
    static constexpr double kIrr[8] = {0.6180339887498949, 0.7548776662466927, 0.5698402909980532,
                                       0.8566748838545029, 0.6777843178599826, 0.7958078335814814,
                                       0.6470014512610825, 0.8191725133961645};
    const int d = chart.D();
    std::vector<Eigen::VectorXd> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int s = 0; s < count; ++s) {
        Eigen::VectorXd p(d);
        for (int a = 0; a < d; ++a) {
            const double u = std::fmod(0.5 + (s + 1) * kIrr[a % 8], 1.0);
            p[a] = chart.lo(a) + margin + u * (chart.hi(a) - chart.lo(a) - 2.0 * margin);
        }
        pts.push_back(std::move(p));
    }
    return pts;
}

} // namespace fluxlab
