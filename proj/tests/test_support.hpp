#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "fluxlab/buscher.hpp"
#include "fluxlab/cohomology.hpp"
#include "fluxlab/fields.hpp"

namespace testsupport {

using namespace fluxlab;

inline Rat random_rat(std::mt19937_64& rng, int lo = -9, int hi = 9, int den_hi = 9) {
    std::uniform_int_distribution<int> num(lo, hi), den(1, den_hi);
    return make_rat(num(rng), den(rng));
}

inline Rat random_nonzero_rat(std::mt19937_64& rng) {
    for (;;) {
        Rat q = random_rat(rng);
        if (q != 0) return q;
    }
}

struct RandomProduct {
    ProductSpec spec;
    MixedFluxClass cls;
};

/// Random spec with k in [1, max_k]; mask-free N unless with_mask.
inline RandomProduct random_product(std::mt19937_64& rng, int max_k = 4, bool with_mask = false,
                                    bool zero_gamma_allowed = true) {
    std::uniform_int_distribution<int> kd(1, max_k), b1d(1, 4), dimd(1, 3), coin(0, 1);
    RandomProduct rp;
    rp.spec.sigma = SurfaceFactor{coin(rng) ? 2 : 1};
    GenericFactor n;
    n.dim = dimd(rng);
    n.b1 = b1d(rng);
    if (with_mask) {
        for (int i = 1; i <= n.b1; ++i)
            if (coin(rng)) n.p1_mask.insert(i);
    }
    rp.spec.n_parts.push_back(n);
    rp.spec.torus.k = kd(rng);
    for (int i = 0; i < rp.spec.torus.k; ++i) rp.spec.torus.circumferences.push_back(make_rat(1));

    rp.cls.sigma_genus = rp.spec.sigma.genus;
    for (int i = 0; i < n.b1; ++i) rp.cls.gamma.push_back(random_rat(rng));
    for (int i = 0; i < rp.spec.torus.k; ++i) rp.cls.c.push_back(random_rat(rng));
    if (!zero_gamma_allowed && all_zero(rp.cls.gamma)) rp.cls.gamma[0] = random_nonzero_rat(rng);
    return rp;
}

/// Constant-rational background: exact SPD metric coupling the base
/// coordinates and the circles outside `product_circles`; identity block
/// (circle fiber metric 1, no off-diagonal coupling) on `product_circles`;
/// random B. Torus-torus B components vanish unless keep_torus_torus.
inline BackgroundFields random_background(std::mt19937_64& rng, const ProductSpec& spec,
                                          const std::vector<int>& product_circles, bool sampled_fields = false,
                                          bool keep_torus_torus = false) {
    const CoordMap cm{spec.dim_n(), spec.k()};
    const int d = cm.D();

    std::vector<GridAxis> axes(static_cast<std::size_t>(cm.base_count()), GridAxis{1, 0.0, 1.0});
    if (sampled_fields) {
        axes[0] = GridAxis{7, 0.0, 1.0};
        axes[1] = GridAxis{7, 0.0, 1.0};
    }
    ChartGrid grid(axes);
    BackgroundFields bg(cm, grid, spec.torus.circumferences);

    auto is_product_circle = [&](int idx) {
        if (!cm.is_torus(idx)) return false;
        const int circle = cm.circle_of(idx);
        for (int c : product_circles)
            if (c == circle) return true;
        return false;
    };

    // SPD block on the coupled indices: M = A^T A + d * I, exact.
    std::vector<int> coupled;
    for (int i = 0; i < d; ++i)
        if (!is_product_circle(i)) coupled.push_back(i);
    const int m = static_cast<int>(coupled.size());
    std::vector<Rat> a(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
    for (auto& q : a) q = random_rat(rng, -2, 2, 3);
    for (int r = 0; r < m; ++r) {
        for (int c = r; c < m; ++c) {
            Rat acc = (r == c) ? make_rat(m) : make_rat(0);
            for (int t = 0; t < m; ++t)
                acc += a[static_cast<std::size_t>(t) * static_cast<std::size_t>(m) + static_cast<std::size_t>(r)] *
                       a[static_cast<std::size_t>(t) * static_cast<std::size_t>(m) + static_cast<std::size_t>(c)];
            bg.set_g(coupled[static_cast<std::size_t>(r)], coupled[static_cast<std::size_t>(c)],
                     ScalarField::constant(acc));
        }
    }

    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            const bool torus_pair = cm.is_torus(i) && cm.is_torus(j);
            if (torus_pair && !keep_torus_torus) continue;
            bg.set_b(i, j, ScalarField::constant(random_rat(rng, -3, 3, 4)));
        }
    }

    if (sampled_fields) {
        // Promote the couplings of every product circle to x-dependent
        // samples with distinct profiles.
        for (std::size_t idx = 0; idx < product_circles.size(); ++idx) {
            const int t = cm.torus_flat(product_circles[idx]);
            const double amp = 0.25 + 0.5 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            const double tilt = 0.5 + static_cast<double>(idx);
            bg.set_b(1, t, sample_function(grid, [amp, tilt](const std::vector<double>& p) {
                         return amp * p[0] * (1.0 + tilt * p[1]);
                     }));
        }
    }

    bg.verify_positive_definite();
    return bg;
}

/// Componentwise distance between backgrounds (both tiers).
inline double bg_max_diff(const BackgroundFields& a, const BackgroundFields& b) {
    double worst = 0.0;
    const int d = a.coords().D();
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            worst = std::max(worst, max_abs_diff(a.g(i, j), b.g(i, j)));
            worst = std::max(worst, max_abs_diff(a.b(i, j), b.b(i, j)));
        }
    }
    return worst;
}

/// True when every component of both tensors is an identical exact rational.
inline bool bg_exact_equal(const BackgroundFields& a, const BackgroundFields& b) {
    const int d = a.coords().D();
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const bool g_ok = exactly_equal(a.g(i, j), b.g(i, j)) ||
                              (!a.g(i, j).is_constant() && !b.g(i, j).is_constant() && max_abs_diff(a.g(i, j), b.g(i, j)) == 0.0);
            const bool b_ok = exactly_equal(a.b(i, j), b.b(i, j)) ||
                              (!a.b(i, j).is_constant() && !b.b(i, j).is_constant() && max_abs_diff(a.b(i, j), b.b(i, j)) == 0.0);
            if (!g_ok || !b_ok) return false;
        }
    }
    return true;
}

} // namespace testsupport
