#include "fluxlab/fields.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "fluxlab/errors.hpp"

namespace fluxlab {

void ChartGrid::recompute() {
    total_ = 1;
    strides_.assign(axes_.size(), 1);
    for (int a = static_cast<int>(axes_.size()) - 1; a >= 0; --a) {
        strides_[static_cast<std::size_t>(a)] = total_;
        if (axes_[static_cast<std::size_t>(a)].n < 1) throw ConfigInvalid("grid axis needs at least one point");
        total_ *= static_cast<std::size_t>(axes_[static_cast<std::size_t>(a)].n);
    }
}

std::vector<double> ChartGrid::point(std::size_t flat) const {
    std::vector<double> p(axes_.size());
    for (int a = 0; a < naxes(); ++a) p[static_cast<std::size_t>(a)] = coord(a, axis_index_of(flat, a));
    return p;
}

double ScalarField::max_abs() const {
    if (is_constant()) return std::abs(rat_to_double(rat()));
    double m = 0.0;
    for (double v : samples()) m = std::max(m, std::abs(v));
    return m;
}

namespace {

std::size_t merged_size(const ScalarField& a, const ScalarField& b) {
    if (!a.is_constant() && !b.is_constant() && a.size() != b.size())
        throw NumericFailure("sampled fields live on different grids");
    return std::max(a.size(), b.size());
}

template <typename Op>
ScalarField combine(const ScalarField& a, const ScalarField& b, Op op) {
    const std::size_t n = merged_size(a, b);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = op(a.value(a.is_constant() ? 0 : i), b.value(b.is_constant() ? 0 : i));
    return ScalarField::sampled(std::move(out));
}

} // namespace

ScalarField f_neg(const ScalarField& a) {
    if (a.is_constant()) return ScalarField::constant(Rat(-a.rat()));
    std::vector<double> out = a.samples();
    for (double& v : out) v = -v;
    return ScalarField::sampled(std::move(out));
}

ScalarField f_add(const ScalarField& a, const ScalarField& b) {
    if (a.is_exact(0)) return b;
    if (b.is_exact(0)) return a;
    if (a.is_constant() && b.is_constant()) return ScalarField::constant(Rat(a.rat() + b.rat()));
    return combine(a, b, [](double x, double y) { return x + y; });
}

ScalarField f_sub(const ScalarField& a, const ScalarField& b) {
    if (b.is_exact(0)) return a;
    if (a.is_constant() && b.is_constant()) return ScalarField::constant(Rat(a.rat() - b.rat()));
    return combine(a, b, [](double x, double y) { return x - y; });
}

ScalarField f_mul(const ScalarField& a, const ScalarField& b) {
    if (a.is_exact(0) || b.is_exact(0)) return ScalarField::constant(0);
    if (a.is_exact(1)) return b;
    if (b.is_exact(1)) return a;
    if (a.is_constant() && b.is_constant()) return ScalarField::constant(Rat(a.rat() * b.rat()));
    return combine(a, b, [](double x, double y) { return x * y; });
}

ScalarField f_div(const ScalarField& a, const ScalarField& b) {
    if (b.is_constant() && b.rat() == 0) throw DegenerateFiber("division by an exactly zero component");
    if (a.is_exact(0)) return ScalarField::constant(0);
    if (b.is_exact(1)) return a;
    if (a.is_constant() && b.is_constant()) return ScalarField::constant(Rat(a.rat() / b.rat()));
    return combine(a, b, [](double x, double y) { return x / y; });
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    if (a.is_constant() && b.is_constant()) {
        if (a.rat() == b.rat()) return 0.0;
        return std::abs(rat_to_double(Rat(a.rat() - b.rat())));
    }
    const std::size_t n = merged_size(a, b);
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        m = std::max(m, std::abs(a.value(a.is_constant() ? 0 : i) - b.value(b.is_constant() ? 0 : i)));
    return m;
}

bool exactly_equal(const ScalarField& a, const ScalarField& b) {
    return a.is_constant() && b.is_constant() && a.rat() == b.rat();
}

ScalarField derivative(const ScalarField& f, const ChartGrid& grid, int axis) {
    const int n = grid.axis(axis).n;
    if (f.is_constant() || n == 1) return ScalarField::constant(0);
    if (n < 5) throw NumericFailure("grid axis needs >= 5 points for 4th-order differences");
    if (f.size() != grid.total()) throw NumericFailure("field does not match grid");

    const double h = grid.axis(axis).step();
    const std::size_t s = grid.stride(axis);
    const auto& v = f.samples();
    std::vector<double> out(v.size());

    auto fv = [&](std::size_t base, int i) { return v[base + static_cast<std::size_t>(i) * s]; };
    for (std::size_t p = 0; p < v.size(); ++p) {
        const int i = grid.axis_index_of(p, axis);
        const std::size_t base = p - static_cast<std::size_t>(i) * s;
        double d;
        if (i >= 2 && i <= n - 3) {
            d = (fv(base, i - 2) - 8.0 * fv(base, i - 1) + 8.0 * fv(base, i + 1) - fv(base, i + 2)) / (12.0 * h);
        } else if (i == 0) {
            d = (-25.0 * fv(base, 0) + 48.0 * fv(base, 1) - 36.0 * fv(base, 2) + 16.0 * fv(base, 3) -
                 3.0 * fv(base, 4)) /
                (12.0 * h);
        } else if (i == 1) {
            d = (-3.0 * fv(base, 0) - 10.0 * fv(base, 1) + 18.0 * fv(base, 2) - 6.0 * fv(base, 3) + fv(base, 4)) /
                (12.0 * h);
        } else if (i == n - 2) {
            d = (3.0 * fv(base, n - 1) + 10.0 * fv(base, n - 2) - 18.0 * fv(base, n - 3) + 6.0 * fv(base, n - 4) -
                 fv(base, n - 5)) /
                (12.0 * h);
        } else { // i == n - 1
            d = (25.0 * fv(base, n - 1) - 48.0 * fv(base, n - 2) + 36.0 * fv(base, n - 3) - 16.0 * fv(base, n - 4) +
                 3.0 * fv(base, n - 5)) /
                (12.0 * h);
        }
        out[p] = d;
    }
    return ScalarField::sampled(std::move(out));
}

ScalarField sample_function(const ChartGrid& grid, const std::function<double(const std::vector<double>&)>& fn) {
    std::vector<double> out(grid.total());
    for (std::size_t p = 0; p < grid.total(); ++p) out[p] = fn(grid.point(p));
    return ScalarField::sampled(std::move(out));
}

std::string CoordMap::coord_name(int idx) const {
    if (idx < 2) return "x" + std::to_string(idx + 1);
    if (is_n(idx)) return "y" + std::to_string(idx - 1);
    return "th" + std::to_string(circle_of(idx));
}

BackgroundFields::BackgroundFields(CoordMap coords, ChartGrid grid, std::vector<Rat> circumferences)
    : coords_(coords), grid_(std::move(grid)), circumferences_(std::move(circumferences)) {
    if (grid_.naxes() != coords_.base_count())
        throw ConfigInvalid("grid must cover exactly the base (non-torus) coordinates");
    if (static_cast<int>(circumferences_.size()) != coords_.k)
        throw ConfigInvalid("one circumference per circle required");
    const std::size_t dd = static_cast<std::size_t>(coords_.D()) * static_cast<std::size_t>(coords_.D());
    g_.assign(dd, ScalarField::constant(0));
    b_.assign(dd, ScalarField::constant(0));
    for (int i = 0; i < coords_.D(); ++i) g_[at(i, i)] = ScalarField::constant(1);
}

const Rat& BackgroundFields::circumference(int circle) const {
    if (circle < 1 || circle > coords_.k) throw ConfigInvalid("circle index out of range");
    return circumferences_[static_cast<std::size_t>(circle - 1)];
}

void BackgroundFields::set_g(int i, int j, ScalarField f) {
    if (!f.is_constant() && f.size() != grid_.total()) throw ConfigInvalid("sampled component does not match grid");
    g_[at(j, i)] = f;
    g_[at(i, j)] = std::move(f);
}

void BackgroundFields::set_b(int i, int j, ScalarField f) {
    if (!f.is_constant() && f.size() != grid_.total()) throw ConfigInvalid("sampled component does not match grid");
    if (i == j) {
        if (!f.is_exact(0)) throw ConfigInvalid("diagonal B components must vanish");
        return;
    }
    b_[at(j, i)] = f_neg(f);
    b_[at(i, j)] = std::move(f);
}

bool BackgroundFields::product_flag(int circle, double tol) const {
    const int t = coords_.torus_flat(circle);
    const ScalarField one = ScalarField::constant(1);
    if (max_abs_diff(g(t, t), one) > tol) return false;
    for (int mu = 0; mu < coords_.D(); ++mu) {
        if (mu == t) continue;
        if (g(mu, t).max_abs() > tol) return false;
    }
    return true;
}

std::vector<bool> BackgroundFields::product_flags(double tol) const {
    std::vector<bool> flags;
    flags.reserve(static_cast<std::size_t>(coords_.k));
    for (int i = 1; i <= coords_.k; ++i) flags.push_back(product_flag(i, tol));
    return flags;
}

namespace {

// Symmetric elimination with diagonal pivoting; exact, so the verdict for a
// constant-rational metric is not a tolerance call.
bool rat_positive_definite(std::vector<Rat> m, int d) {
    auto at = [d](int r, int c) { return static_cast<std::size_t>(r) * static_cast<std::size_t>(d) + static_cast<std::size_t>(c); };
    for (int step = 0; step < d; ++step) {
        int piv = step;
        for (int r = step + 1; r < d; ++r)
            if (m[at(r, r)] > m[at(piv, piv)]) piv = r;
        if (m[at(piv, piv)] <= 0) return false;
        if (piv != step) {
            for (int c = 0; c < d; ++c) std::swap(m[at(step, c)], m[at(piv, c)]);
            for (int r = 0; r < d; ++r) std::swap(m[at(r, step)], m[at(r, piv)]);
        }
        for (int r = step + 1; r < d; ++r) {
            const Rat factor = m[at(r, step)] / m[at(step, step)];
            for (int c = step; c < d; ++c) m[at(r, c)] -= factor * m[at(step, c)];
        }
    }
    return true;
}

} // namespace

void BackgroundFields::verify_positive_definite() const {
    const int d = coords_.D();
    bool all_const = true;
    for (const auto& f : g_)
        if (!f.is_constant()) { all_const = false; break; }

    if (all_const) {
        std::vector<Rat> m;
        m.reserve(static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m.push_back(g(i, j).rat());
        if (!rat_positive_definite(std::move(m), d))
            throw NumericFailure("metric is not positive definite");
        return;
    }

    Eigen::MatrixXd m(d, d);
    for (std::size_t p = 0; p < grid_.total(); ++p) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m(i, j) = g(i, j).value(g(i, j).is_constant() ? 0 : p);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
        if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0)
            throw NumericFailure("metric is not positive definite at sample " + std::to_string(p));
    }
}

BackgroundFields make_product_background(const ProductSpec& spec, const MixedFluxClass& cls,
                                         const BackgroundOptions& opts) {
    spec.validate();
    const int dim_n = spec.dim_n();
    const int b1 = spec.b1_n();
    if (static_cast<int>(cls.gamma.size()) != b1 || static_cast<int>(cls.c.size()) != spec.k())
        throw LengthMismatch("flux class does not match the product spec");
    for (int a = dim_n; a < b1; ++a)
        if (cls.gamma[static_cast<std::size_t>(a)] != 0)
            throw ConfigInvalid("field tier needs supp(gamma) within the first dim(N) basis directions");

    const bool hyperbolic_sigma = spec.sigma.genus >= 2;
    std::vector<GridAxis> axes;
    axes.push_back({opts.sigma_points, 0.0, 1.0});
    axes.push_back(hyperbolic_sigma ? GridAxis{opts.sigma_points, 1.0, 2.0} : GridAxis{opts.sigma_points, 0.0, 1.0});
    for (int a = 0; a < dim_n; ++a) axes.push_back({opts.n_points, 0.0, 1.0});
    ChartGrid grid(std::move(axes));

    CoordMap coords{dim_n, spec.k()};
    BackgroundFields bg(coords, grid, spec.torus.circumferences);

    // Chart-local potential A with dA/dx1 = sqrt(g_Sigma).
    ScalarField area_potential;
    if (hyperbolic_sigma) {
        const ScalarField conformal =
            sample_function(grid, [](const std::vector<double>& p) { return 1.0 / (p[1] * p[1]); });
        bg.set_g(0, 0, conformal);
        bg.set_g(1, 1, conformal);
        area_potential = sample_function(grid, [](const std::vector<double>& p) { return p[0] / (p[1] * p[1]); });
    } else {
        area_potential = sample_function(grid, [](const std::vector<double>& p) { return p[0]; });
    }

    for (int a = 1; a <= std::min(dim_n, b1); ++a) {
        const Rat& coeff = cls.gamma[static_cast<std::size_t>(a - 1)];
        if (coeff != 0) bg.set_b(1, 2 + a - 1, f_mul(ScalarField::constant(coeff), area_potential));
    }
    for (int i = 1; i <= spec.k(); ++i) {
        const Rat& coeff = cls.c[static_cast<std::size_t>(i - 1)];
        if (coeff != 0) bg.set_b(1, coords.torus_flat(i), f_mul(ScalarField::constant(coeff), area_potential));
    }

    bg.verify_positive_definite();
    return bg;
}

FluxFieldTier flux_field_tier(const BackgroundFields& bg) {
    const CoordMap& cm = bg.coords();
    const ChartGrid& grid = bg.grid();
    FluxFieldTier tier;

    auto h12 = [&](int target) {
        // H_{12t} = d1 B_{2t} - d2 B_{1t} + dt B_{12}; the last term vanishes
        // for torus targets (theta-independence) and is a grid derivative for
        // N targets.
        ScalarField h = f_sub(derivative(bg.b(1, target), grid, 0), derivative(bg.b(0, target), grid, 1));
        if (cm.is_n(target)) h = f_add(h, derivative(bg.b(0, 1), grid, target));
        return h;
    };

    for (int a = 0; a < cm.dim_n; ++a) tier.h12_n.push_back(h12(2 + a));
    for (int i = 1; i <= cm.k; ++i) tier.h12_torus.push_back(h12(cm.torus_flat(i)));
    return tier;
}

double max_theta_flux_component(const BackgroundFields& bg, int circle) {
    const CoordMap& cm = bg.coords();
    const ChartGrid& grid = bg.grid();
    const int t = cm.torus_flat(circle);
    double worst = 0.0;
    for (int mu = 0; mu < cm.D(); ++mu) {
        if (mu == t) continue;
        for (int nu = mu + 1; nu < cm.D(); ++nu) {
            if (nu == t) continue;
            ScalarField h = ScalarField::constant(0);
            if (mu < cm.base_count()) h = f_add(h, derivative(bg.b(nu, t), grid, mu));
            if (nu < cm.base_count()) h = f_sub(h, derivative(bg.b(mu, t), grid, nu));
            // dt B_{mu nu} = 0: components are independent of torus coordinates.
            worst = std::max(worst, h.max_abs());
        }
    }
    return worst;
}

namespace {

double trapezoid_sigma(const BackgroundFields& bg, const ScalarField& f) {
    const ChartGrid& grid = bg.grid();
    const int n0 = grid.axis(0).n, n1 = grid.axis(1).n;
    const double h0 = grid.axis(0).step(), h1 = grid.axis(1).step();
    auto w = [](int i, int n, double h) { return (n == 1) ? 1.0 : ((i == 0 || i == n - 1) ? h / 2.0 : h); };
    double acc = 0.0;
    for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j) {
            const std::size_t flat =
                static_cast<std::size_t>(i) * grid.stride(0) + static_cast<std::size_t>(j) * grid.stride(1);
            acc += w(i, n0, h0) * w(j, n1, h1) * f.value(f.is_constant() ? 0 : flat);
        }
    return acc;
}

} // namespace

std::vector<double> integrate_field_tier(const BackgroundFields& bg, const FluxFieldTier& tier) {
    // sqrt(det) of the Sigma block, sampled.
    const ChartGrid& grid = bg.grid();
    std::vector<double> dens(grid.total());
    for (std::size_t p = 0; p < grid.total(); ++p) {
        const double g00 = bg.g(0, 0).value(bg.g(0, 0).is_constant() ? 0 : p);
        const double g11 = bg.g(1, 1).value(bg.g(1, 1).is_constant() ? 0 : p);
        const double g01 = bg.g(0, 1).value(bg.g(0, 1).is_constant() ? 0 : p);
        dens[p] = std::sqrt(std::max(0.0, g00 * g11 - g01 * g01));
    }
    const double norm = trapezoid_sigma(bg, ScalarField::sampled(std::move(dens)));

    std::vector<double> out;
    out.reserve(tier.h12_n.size() + tier.h12_torus.size());
    for (const auto& h : tier.h12_n) out.push_back(trapezoid_sigma(bg, h) / norm);
    for (const auto& h : tier.h12_torus) out.push_back(trapezoid_sigma(bg, h) / norm);
    return out;
}

} // namespace fluxlab
