#include "fluxlab/buscher.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "fluxlab/errors.hpp"

namespace fluxlab {

namespace {

void check_circle(const CoordMap& cm, int circle) {
    if (circle < 1 || circle > cm.k)
        throw ConfigInvalid("circle index " + std::to_string(circle) + " outside 1.." + std::to_string(cm.k));
}

double spread(const ScalarField& f) {
    if (f.is_constant()) return 0.0;
    const auto& v = f.samples();
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
}

} // namespace

BackgroundFields gauge_fix_torus_torus(const BackgroundFields& bg, const BuscherOptions& opts) {
    BackgroundFields out = bg;
    const CoordMap& cm = bg.coords();
    for (int i = 1; i <= cm.k; ++i) {
        for (int j = i + 1; j <= cm.k; ++j) {
            const int ti = cm.torus_flat(i), tj = cm.torus_flat(j);
            const ScalarField& f = bg.b(ti, tj);
            if (spread(f) > opts.zero_tol)
                throw NotConstant("B_{th" + std::to_string(i) + " th" + std::to_string(j) +
                                  "} varies over the grid; the flux is not of pure bidegree (2,1)");
            out.set_b(ti, tj, ScalarField::constant(0));
        }
    }
    return out;
}

BackgroundFields buscher_dualize(const BackgroundFields& bg, int circle, DualityFrame* frame,
                                 const BuscherOptions& opts) {
    const CoordMap& cm = bg.coords();
    check_circle(cm, circle);
    const int t = cm.torus_flat(circle);
    const int d = cm.D();

    const ScalarField& gtt = bg.g(t, t);
    if (gtt.is_constant()) {
        if (std::abs(rat_to_double(gtt.rat())) < opts.degenerate_tol)
            throw DegenerateFiber("G_{thth} vanishes on circle " + std::to_string(circle));
    } else {
        for (double v : gtt.samples())
            if (std::abs(v) < opts.degenerate_tol)
                throw DegenerateFiber("G_{thth} vanishes at a sample on circle " + std::to_string(circle));
    }

    std::vector<ScalarField> gmt(static_cast<std::size_t>(d)), bmt(static_cast<std::size_t>(d));
    for (int mu = 0; mu < d; ++mu) {
        if (mu == t) continue;
        gmt[static_cast<std::size_t>(mu)] = bg.g(mu, t);
        bmt[static_cast<std::size_t>(mu)] = bg.b(mu, t);
    }

    BackgroundFields out = bg;
    out.set_g(t, t, f_div(ScalarField::constant(1), gtt));
    for (int mu = 0; mu < d; ++mu) {
        if (mu == t) continue;
        out.set_g(mu, t, f_div(bmt[static_cast<std::size_t>(mu)], gtt));
        out.set_b(mu, t, f_div(gmt[static_cast<std::size_t>(mu)], gtt));
    }
    for (int mu = 0; mu < d; ++mu) {
        if (mu == t) continue;
        for (int nu = mu; nu < d; ++nu) {
            if (nu == t) continue;
            const auto& gm = gmt[static_cast<std::size_t>(mu)];
            const auto& gn = gmt[static_cast<std::size_t>(nu)];
            const auto& bm = bmt[static_cast<std::size_t>(mu)];
            const auto& bn = bmt[static_cast<std::size_t>(nu)];
            out.set_g(mu, nu, f_sub(bg.g(mu, nu), f_div(f_sub(f_mul(gm, gn), f_mul(bm, bn)), gtt)));
            // the antisymmetric correction vanishes identically for mu == nu
            if (mu != nu) out.set_b(mu, nu, f_sub(bg.b(mu, nu), f_div(f_sub(f_mul(gm, bn), f_mul(bm, gn)), gtt)));
        }
    }

    if (frame != nullptr) {
        LedgerEntry entry;
        entry.circle = circle;
        for (int mu = 0; mu < d; ++mu) {
            if (mu == t) continue;
            if (bmt[static_cast<std::size_t>(mu)].max_abs() > opts.zero_tol)
                entry.offdiag.emplace_back(mu, out.g(mu, t));
        }
        if (!entry.offdiag.empty()) frame->ledger.push_back(std::move(entry));
    }
    return out;
}

ComposeResult compose_dualities(const BackgroundFields& bg, const MixedFluxClass& cls, const ProductSpec& spec,
                                std::span<const int> circles, const BuscherOptions& opts) {
    const CoordMap& cm = bg.coords();
    require_class_matches(cls, spec);
    if (cm.k != spec.k()) throw ConfigInvalid("background and spec disagree on the number of circles");
    std::set<int> seen;
    for (int i : circles) {
        check_circle(cm, i);
        if (!seen.insert(i).second) throw ConfigInvalid("duplicate circle " + std::to_string(i) + " in dualize list");
    }

    // Precondition: torus-torus components already gauged away for every
    // pair that touches a dualized circle.
    for (int i = 1; i <= cm.k; ++i) {
        for (int j = i + 1; j <= cm.k; ++j) {
            if (!seen.contains(i) && !seen.contains(j)) continue;
            if (bg.b(cm.torus_flat(i), cm.torus_flat(j)).max_abs() > opts.zero_tol)
                throw PreconditionViolated("B_{th" + std::to_string(i) + " th" + std::to_string(j) +
                                           "} nonzero: apply gauge_fix_torus_torus before composing dualities");
        }
    }

    const FluxComponents flux{cls, std::nullopt};
    for (std::size_t a = 0; a < circles.size(); ++a) {
        for (std::size_t b = a + 1; b < circles.size(); ++b) {
            const Rat obstruction = bem_obstruction(flux, spec, circles[a], circles[b]);
            if (obstruction != 0)
                throw ObstructionNonzero("pairwise obstruction integral nonzero for circles " +
                                         std::to_string(circles[a]) + "," + std::to_string(circles[b]));
        }
    }

    ComposeResult res{bg, DualityFrame{}, cls};
    for (int i : circles) {
        const std::size_t before = res.frame.ledger.size();
        res.background = buscher_dualize(res.background, i, &res.frame, opts);
        const Rat& ci = res.flux.c[static_cast<std::size_t>(i - 1)];
        if (res.frame.ledger.size() > before) {
            res.frame.ledger.back().converted_c = ci;
        } else if (ci != 0) {
            LedgerEntry entry;
            entry.circle = i;
            entry.converted_c = ci;
            res.frame.ledger.push_back(std::move(entry));
        }
        res.frame.dualized.push_back(i);
        res.frame.chern_flags.push_back(fiberwise_integral(res.flux, spec, i) != 0);
        res.flux.c[static_cast<std::size_t>(i - 1)] = 0;
    }
    return res;
}

Rat bem_obstruction(const FluxComponents& flux, const ProductSpec& spec, int i, int j) {
    if (i == j) throw ConfigInvalid("obstruction integral needs two distinct circles");
    if (i < 1 || i > spec.k() || j < 1 || j > spec.k()) throw ConfigInvalid("circle index out of range");
    (void)flux; // a (2,1) flux has no slot for a two-torus-index component
    const Rat two_torus_component(0);
    return spec.circumference(i) * spec.circumference(j) * two_torus_component;
}

double bem_obstruction_quadrature(const std::function<double(double, double)>& component, double circ_i,
                                  double circ_j, int points_per_axis) {
    const int n = std::max(points_per_axis, 2);
    const double hi = circ_i / (n - 1), hj = circ_j / (n - 1);
    auto w = [](int idx, int count) { return (idx == 0 || idx == count - 1) ? 0.5 : 1.0; };
    double acc = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) acc += w(a, n) * w(b, n) * component(a * hi, b * hj);
    return acc * hi * hj;
}

Rat fiberwise_integral(const MixedFluxClass& cls, const ProductSpec& spec, int circle) {
    require_class_matches(cls, spec);
    if (circle < 1 || circle > spec.k()) throw ConfigInvalid("circle index out of range");
    return cls.c[static_cast<std::size_t>(circle - 1)] * spec.circumference(circle);
}

BemCase classify_bem_case(const MixedFluxClass& cls, const ProductSpec& spec, int circle) {
    require_class_matches(cls, spec);
    if (!spec.p1_mask_n().empty())
        throw PreconditionViolated("topological case classification assumes P1(N) = {0}");
    if (circle < 1 || circle > spec.k()) throw ConfigInvalid("circle index out of range");
    const bool gamma_zero = all_zero(cls.gamma);
    const bool ci_zero = cls.c[static_cast<std::size_t>(circle - 1)] == 0;
    if (gamma_zero && ci_zero)
        throw Unclassified("flux does not couple to circle " + std::to_string(circle) + " and has no kernel");
    if (gamma_zero) return BemCase::A;
    return ci_zero ? BemCase::B : BemCase::C;
}

char bem_case_letter(BemCase c) {
    switch (c) {
        case BemCase::A: return 'A';
        case BemCase::B: return 'B';
        default: return 'C';
    }
}

} // namespace fluxlab
