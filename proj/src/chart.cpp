#include "fluxlab/chart.hpp"

#include <cmath>
#include <string>

#include "fluxlab/errors.hpp"

namespace fluxlab {

Chart::Chart(FactorPatch sigma, std::vector<FactorPatch> n_patches, FactorPatch torus) {
    if (sigma.dim != 2) throw ConfigInvalid("surface patch must be two-dimensional");
    int offset = 0;
    auto place = [&](FactorPatch p) {
        if (p.dim < 0) throw ConfigInvalid("negative patch dimension");
        patches_.push_back({std::move(p), offset});
        offset += patches_.back().patch.dim;
    };
    place(std::move(sigma));
    int dim_n = 0;
    for (auto& p : n_patches) {
        dim_n += p.dim;
        place(std::move(p));
    }
    if (torus.kind != PatchKind::Flat) throw ConfigInvalid("torus patch must be flat");
    const int k = torus.dim;
    place(std::move(torus));
    dim_ = offset;
    coords_ = CoordMap{dim_n, k};
}

double Chart::lo(int axis) const {
    for (const auto& pp : patches_) {
        if (axis < pp.offset + pp.patch.dim) {
            const int local = axis - pp.offset;
            return (pp.patch.kind == PatchKind::Hyperbolic && local == pp.patch.dim - 1) ? 1.0 : 0.0;
        }
    }
    throw ConfigInvalid("axis out of range");
}

double Chart::hi(int axis) const {
    for (const auto& pp : patches_) {
        if (axis < pp.offset + pp.patch.dim) {
            const int local = axis - pp.offset;
            return (pp.patch.kind == PatchKind::Hyperbolic && local == pp.patch.dim - 1) ? 2.0 : 1.0;
        }
    }
    throw ConfigInvalid("axis out of range");
}

void Chart::require_interior(const Eigen::VectorXd& p, double margin) const {
    if (p.size() != dim_) throw ConfigInvalid("point dimension does not match chart");
    for (int a = 0; a < dim_; ++a) {
        if (p[a] < lo(a) + margin || p[a] > hi(a) - margin)
            throw BoundaryTooClose("coordinate " + std::to_string(a) + " = " + std::to_string(p[a]) +
                                   " within margin " + std::to_string(margin) + " of the patch boundary");
    }
}

Eigen::VectorXd Chart::center() const {
    Eigen::VectorXd p(dim_);
    for (int a = 0; a < dim_; ++a) p[a] = 0.5 * (lo(a) + hi(a));
    return p;
}

Eigen::VectorXd Chart::metric_diag(const Eigen::VectorXd& p) const {
    Eigen::VectorXd g(dim_);
    for (const auto& pp : patches_) {
        if (pp.patch.kind == PatchKind::Hyperbolic) {
            const double y = p[pp.offset + pp.patch.dim - 1];
            for (int l = 0; l < pp.patch.dim; ++l) g[pp.offset + l] = 1.0 / (y * y);
        } else {
            for (int l = 0; l < pp.patch.dim; ++l) {
                const double s = pp.patch.scale_at(l);
                g[pp.offset + l] = s * s;
            }
        }
    }
    return g;
}

double Chart::sigma_density(const Eigen::VectorXd& p) const {
    const Eigen::VectorXd g = metric_diag(p);
    return std::sqrt(g[0] * g[1]);
}

std::vector<Eigen::MatrixXd> Chart::christoffel(const Eigen::VectorXd& p) const {
    std::vector<Eigen::MatrixXd> gam(static_cast<std::size_t>(dim_), Eigen::MatrixXd::Zero(dim_, dim_));
    for (const auto& pp : patches_) {
        if (pp.patch.kind != PatchKind::Hyperbolic) continue; // flat blocks contribute nothing
        const int m = pp.patch.dim, o = pp.offset;
        const int yl = m - 1; // local index of the conformal coordinate
        const double inv_y = 1.0 / p[o + yl];
        // Γ^k_{ij} = -(1/y)(δ_kj δ_iy + δ_ki δ_jy - δ_ij δ_ky) within the block.
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                for (int k = 0; k < m; ++k) {
                    double val = 0.0;
                    if (k == j && i == yl) val -= inv_y;
                    if (k == i && j == yl) val -= inv_y;
                    if (i == j && k == yl) val += inv_y;
                    if (val != 0.0) gam[static_cast<std::size_t>(o + i)](o + k, o + j) += val;
                }
            }
        }
    }
    return gam;
}

std::vector<Eigen::MatrixXd> torsion_tensor(const Chart& chart, const TorsionField& torsion,
                                            const Eigen::VectorXd& p) {
    // Layout: t[a](i, j) = T_{i a j}, so raising the first index is a row
    // scaling by the inverse (diagonal) metric.
    const int d = chart.D();
    if (static_cast<int>(torsion.tau.size()) != d - 2)
        throw ConfigInvalid("torsion covector must have dim N + k components");
    std::vector<Eigen::MatrixXd> t(static_cast<std::size_t>(d), Eigen::MatrixXd::Zero(d, d));
    const double density = torsion.h_at(p) * chart.sigma_density(p);
    for (int w = 2; w < d; ++w) {
        // T_{01w} = density * tau_w plus total antisymmetry in (0, 1, w).
        const double val = density * torsion.tau[static_cast<std::size_t>(w - 2)];
        if (val == 0.0) continue;
        t[0](1, w) = -val;
        t[0](w, 1) = val;
        t[1](0, w) = val;
        t[1](w, 0) = -val;
        t[static_cast<std::size_t>(w)](0, 1) = -val;
        t[static_cast<std::size_t>(w)](1, 0) = val;
    }
    return t;
}

Chart make_chart(const ProductSpec& spec) {
    spec.validate();
    auto surface_patch = [](int genus) {
        return FactorPatch{genus >= 2 ? PatchKind::Hyperbolic : PatchKind::Flat, 2, {}};
    };
    FactorPatch sigma = surface_patch(spec.sigma.genus);

    std::vector<FactorPatch> n_patches;
    for (const auto& part : spec.n_parts) {
        if (const auto* s = std::get_if<SurfaceFactor>(&part)) {
            n_patches.push_back(surface_patch(s->genus));
        } else if (const auto* gf = std::get_if<GenericFactor>(&part)) {
            // Mask-free declarations stand for negatively curved factors;
            // anything with parallel directions gets a flat box.
            const bool hyperbolic = gf->p1_mask.empty() && gf->b1 > 0 && gf->dim >= 2;
            n_patches.push_back(FactorPatch{hyperbolic ? PatchKind::Hyperbolic : PatchKind::Flat, gf->dim, {}});
        }
    }

    FactorPatch torus{PatchKind::Flat, spec.k(), {}};
    torus.scale.reserve(static_cast<std::size_t>(spec.k()));
    for (const Rat& len : spec.torus.circumferences) torus.scale.push_back(rat_to_double(len));
    return Chart(std::move(sigma), std::move(n_patches), std::move(torus));
}

TorsionField torsion_from_class(const MixedFluxClass& cls, const ProductSpec& spec) {
    const int dim_n = spec.dim_n();
    const int b1 = spec.b1_n();
    for (int j = dim_n; j < b1; ++j)
        if (cls.gamma[static_cast<std::size_t>(j)] != 0)
            throw ConfigInvalid("chart torsion needs supp(gamma) within the first dim(N) basis directions");
    TorsionField torsion;
    torsion.tau.assign(static_cast<std::size_t>(dim_n + spec.k()), 0.0);
    for (int j = 0; j < std::min(dim_n, b1); ++j)
        torsion.tau[static_cast<std::size_t>(j)] = rat_to_double(cls.gamma[static_cast<std::size_t>(j)]);
    for (int i = 0; i < spec.k(); ++i)
        torsion.tau[static_cast<std::size_t>(dim_n + i)] = rat_to_double(cls.c[static_cast<std::size_t>(i)]);
    return torsion;
}

} // namespace fluxlab
