#include <doctest.h>

#include <random>

#include "fluxlab/errors.hpp"
#include "fluxlab/reduction.hpp"
#include "test_support.hpp"

using namespace fluxlab;
using testsupport::random_product;
using testsupport::random_rat;

namespace {

ProductSpec hyperbolic_spec(int k) {
    ProductSpec spec;
    spec.sigma = SurfaceFactor{2};
    spec.n_parts.push_back(GenericFactor{3, 1, {}});
    spec.torus.k = k;
    spec.torus.circumferences.assign(static_cast<std::size_t>(k), make_rat(1));
    return spec;
}

} // namespace

TEST_CASE("pullback drops exactly the collapsed circle component") {
    const ProductSpec spec = hyperbolic_spec(1);

    SUBCASE("gamma-only flux survives restriction") {
        const MixedFluxClass cls{{make_rat(1)}, {make_rat(0)}, 2};
        const ReductionReport rep = pullback_flux(cls, spec, 1);
        CHECK(rep.restricted.gamma == cls.gamma);
        CHECK(rep.restricted.c.empty());
        CHECK(!rep.vanished);
        CHECK(rep.verdict == ReductionVerdict::Indeterminate);
    }
    SUBCASE("pure circle flux dies") {
        const MixedFluxClass cls{{make_rat(0)}, {make_rat(5)}, 2};
        const ReductionReport rep = pullback_flux(cls, spec, 1);
        CHECK(rep.vanished);
        CHECK(rep.restricted.is_zero());
    }
    SUBCASE("zero flux restricts to zero") {
        const MixedFluxClass cls{{make_rat(0)}, {make_rat(0)}, 2};
        CHECK(pullback_flux(cls, spec, 1).vanished);
    }
    SUBCASE("other circles survive a single collapse") {
        const ProductSpec two = hyperbolic_spec(2);
        const MixedFluxClass cls{{make_rat(0)}, {make_rat(3), make_rat(-1)}, 2};
        const ReductionReport rep = pullback_flux(cls, two, 1);
        CHECK(rep.restricted.c == std::vector<Rat>{make_rat(-1)});
        CHECK(!rep.vanished);
        CHECK(rep.restricted_spec.k() == 1);
    }
    CHECK_THROWS_AS(pullback_flux(MixedFluxClass{{make_rat(0)}, {make_rat(0)}, 2}, spec, 2), ConfigInvalid);
}

TEST_CASE("reduced verdict under the decisive hypotheses") {
    const ProductSpec spec = hyperbolic_spec(1);

    SUBCASE("nonzero gamma keeps the connection irreducible") {
        const MixedFluxClass cls{{make_rat(1)}, {make_rat(0)}, 2};
        const ReductionReport rep = reduced_verdict(cls, spec, 1);
        CHECK(rep.verdict == ReductionVerdict::IrreducibleSurvives);
        CHECK(rep.restricted_r_sharp == 1);
        CHECK(!rep.vanished);
    }
    SUBCASE("pure circle flux reduces to the torsion-free connection") {
        const MixedFluxClass cls{{make_rat(0)}, {make_rat(5)}, 2};
        const ReductionReport rep = reduced_verdict(cls, spec, 1);
        CHECK(rep.verdict == ReductionVerdict::ReducesToLeviCivita);
        CHECK(rep.vanished);
    }
    SUBCASE("zero torsion also reduces") {
        const MixedFluxClass cls{{make_rat(0)}, {make_rat(0)}, 2};
        CHECK(reduced_verdict(cls, spec, 1).verdict == ReductionVerdict::ReducesToLeviCivita);
    }
}

TEST_CASE("outside the hypotheses the verdict stays indeterminate") {
    SUBCASE("parallel directions in N") {
        ProductSpec spec;
        spec.sigma = SurfaceFactor{2};
        spec.n_parts.push_back(SurfaceFactor{2});
        spec.n_parts.push_back(GenericFactor{1, 1, {1}}); // φ circle folded into N
        spec.torus.k = 1;
        spec.torus.circumferences = {make_rat(1)};
        // beta = dφ: collapsing the outer circle keeps the class nonzero
        MixedFluxClass cls{{make_rat(0), make_rat(0), make_rat(0), make_rat(0), make_rat(1)}, {make_rat(0)}, 2};
        const ReductionReport rep = reduced_verdict(cls, spec, 1);
        CHECK(rep.verdict == ReductionVerdict::Indeterminate);
        CHECK(!rep.restricted.is_zero());
        CHECK(!rep.vanished);
    }
    SUBCASE("more than one explicit circle") {
        const ProductSpec spec = hyperbolic_spec(2);
        const MixedFluxClass cls{{make_rat(1)}, {make_rat(0), make_rat(0)}, 2};
        CHECK(reduced_verdict(cls, spec, 1).verdict == ReductionVerdict::Indeterminate);
    }
}

TEST_CASE("pullback is linear and collapses commute") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 100; ++trial) {
        auto rp = random_product(rng, 3, true);
        if (rp.spec.k() < 2) continue;

        // linearity: pullback(a x + b y) = a pullback(x) + b pullback(y)
        MixedFluxClass other = rp.cls;
        for (auto& q : other.gamma) q = random_rat(rng);
        for (auto& q : other.c) q = random_rat(rng);
        const Rat a = random_rat(rng), b = random_rat(rng);
        MixedFluxClass combo = rp.cls;
        for (std::size_t i = 0; i < combo.gamma.size(); ++i) combo.gamma[i] = a * rp.cls.gamma[i] + b * other.gamma[i];
        for (std::size_t i = 0; i < combo.c.size(); ++i) combo.c[i] = a * rp.cls.c[i] + b * other.c[i];

        const auto px = pullback_flux(rp.cls, rp.spec, 1).restricted;
        const auto py = pullback_flux(other, rp.spec, 1).restricted;
        const auto pc = pullback_flux(combo, rp.spec, 1).restricted;
        for (std::size_t i = 0; i < pc.gamma.size(); ++i) CHECK(pc.gamma[i] == a * px.gamma[i] + b * py.gamma[i]);
        for (std::size_t i = 0; i < pc.c.size(); ++i) CHECK(pc.c[i] == a * px.c[i] + b * py.c[i]);

        // commuting collapses: circle 2 then 1 equals circle 1 then 2
        const auto r12 = pullback_flux(pullback_flux(rp.cls, rp.spec, 1).restricted,
                                       pullback_flux(rp.cls, rp.spec, 1).restricted_spec, 1);
        const auto r21_first = pullback_flux(rp.cls, rp.spec, 2);
        const auto r21 = pullback_flux(r21_first.restricted, r21_first.restricted_spec, 1);
        CHECK(r12.restricted.gamma == r21.restricted.gamma);
        CHECK(r12.restricted.c == r21.restricted.c);
    }
}

TEST_CASE("a Levi-Civita verdict forces r_sharp = 0") {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 100; ++trial) {
        auto rp = random_product(rng, 1, false);
        const ReductionReport rep = reduced_verdict(rp.cls, rp.spec, 1);
        if (rep.verdict == ReductionVerdict::ReducesToLeviCivita) {
            CHECK(r_sharp(rp.cls, rp.spec).r_sharp == 0);
            CHECK(rep.vanished); // reducing means the restricted torsion is gone
        }
        if (r_sharp(rp.cls, rp.spec).r_sharp == 1) CHECK(rep.verdict == ReductionVerdict::IrreducibleSurvives);
    }
}
