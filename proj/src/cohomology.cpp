#include "fluxlab/cohomology.hpp"

#include <algorithm>
#include <string>

#include "fluxlab/errors.hpp"

namespace fluxlab {

int factor_dim(const FactorSpec& f) {
    return std::visit(
        [](const auto& v) -> int {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, SurfaceFactor>) return 2;
            else if constexpr (std::is_same_v<T, GenericFactor>) return v.dim;
            else return v.k;
        },
        f);
}

int factor_b1(const FactorSpec& f) {
    return std::visit(
        [](const auto& v) -> int {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, SurfaceFactor>) return v.b1();
            else if constexpr (std::is_same_v<T, GenericFactor>) return v.b1;
            else return v.k;
        },
        f);
}

std::set<int> factor_p1_mask(const FactorSpec& f) {
    return std::visit(
        [](const auto& v) -> std::set<int> {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, SurfaceFactor>) {
                return v.p1_mask();
            } else if constexpr (std::is_same_v<T, GenericFactor>) {
                return v.p1_mask;
            } else {
                std::set<int> all;
                for (int i = 1; i <= v.k; ++i) all.insert(i);
                return all;
            }
        },
        f);
}

int ProductSpec::dim_n() const {
    int d = 0;
    for (const auto& part : n_parts) d += factor_dim(part);
    return d;
}

int ProductSpec::b1_n() const {
    int b = 0;
    for (const auto& part : n_parts) b += factor_b1(part);
    return b;
}

std::set<int> ProductSpec::p1_mask_n() const {
    std::set<int> mask;
    int offset = 0;
    for (const auto& part : n_parts) {
        for (int idx : factor_p1_mask(part)) mask.insert(offset + idx);
        offset += factor_b1(part);
    }
    return mask;
}

const Rat& ProductSpec::circumference(int circle) const {
    if (circle < 1 || circle > torus.k)
        throw ConfigInvalid("circle index " + std::to_string(circle) + " outside 1.." + std::to_string(torus.k));
    return torus.circumferences[static_cast<std::size_t>(circle - 1)];
}

void ProductSpec::validate() const {
    if (sigma.genus < 1) throw ConfigInvalid("surface genus must be >= 1");
    for (const auto& part : n_parts) {
        if (std::holds_alternative<TorusFactor>(part))
            throw ConfigInvalid("torus factors belong at the end of the product, not inside N");
        if (const auto* s = std::get_if<SurfaceFactor>(&part); s && s->genus < 1)
            throw ConfigInvalid("surface genus must be >= 1");
        if (const auto* gf = std::get_if<GenericFactor>(&part)) {
            if (gf->dim < 1) throw ConfigInvalid("generic factor dimension must be >= 1");
            if (gf->b1 < 0) throw ConfigInvalid("b1 must be >= 0");
            for (int idx : gf->p1_mask)
                if (idx < 1 || idx > gf->b1)
                    throw ConfigInvalid("p1_mask index " + std::to_string(idx) + " outside 1.." +
                                        std::to_string(gf->b1));
        }
    }
    if (torus.k < 0) throw ConfigInvalid("torus rank must be >= 0");
    if (static_cast<int>(torus.circumferences.size()) != torus.k)
        throw ConfigInvalid("expected " + std::to_string(torus.k) + " circumferences, got " +
                            std::to_string(torus.circumferences.size()));
    for (const Rat& len : torus.circumferences)
        if (len <= 0) throw ConfigInvalid("circle circumferences must be positive");
}

MixedFluxClass decompose(std::span<const Rat> beta_raw, const ProductSpec& spec) {
    const std::size_t b1 = static_cast<std::size_t>(spec.b1_n());
    const std::size_t k = static_cast<std::size_t>(spec.k());
    if (beta_raw.size() != b1 + k)
        throw LengthMismatch("beta has " + std::to_string(beta_raw.size()) + " coefficients, expected b1(N)+k = " +
                             std::to_string(b1 + k));
    MixedFluxClass cls;
    cls.gamma.assign(beta_raw.begin(), beta_raw.begin() + static_cast<std::ptrdiff_t>(b1));
    cls.c.assign(beta_raw.begin() + static_cast<std::ptrdiff_t>(b1), beta_raw.end());
    cls.sigma_genus = spec.sigma.genus;
    return cls;
}

void require_class_matches(const MixedFluxClass& cls, const ProductSpec& spec) {
    if (static_cast<int>(cls.gamma.size()) != spec.b1_n() || static_cast<int>(cls.c.size()) != spec.k())
        throw LengthMismatch("flux class has (" + std::to_string(cls.gamma.size()) + ", " +
                             std::to_string(cls.c.size()) + ") coefficients, spec needs (" +
                             std::to_string(spec.b1_n()) + ", " + std::to_string(spec.k()) + ")");
}

bool is_in_parallel_stratum(const MixedFluxClass& cls, const ProductSpec& spec) {
    require_class_matches(cls, spec);
    const auto mask = spec.p1_mask_n();
    for (std::size_t i = 0; i < cls.gamma.size(); ++i) {
        if (cls.gamma[i] != 0 && !mask.contains(static_cast<int>(i) + 1)) return false;
    }
    return true;
}

StratumVerdict r_sharp(const MixedFluxClass& cls, const ProductSpec& spec) {
    require_class_matches(cls, spec);
    StratumVerdict v;
    v.r = cls.is_zero() ? 0 : 1;
    v.in_p1 = is_in_parallel_stratum(cls, spec);
    v.dim_k = (v.r == 1 && v.in_p1) ? 1 : 0;
    v.r_sharp = v.r - v.dim_k;

    const auto mask = spec.p1_mask_n();
    for (std::size_t i = 0; i < cls.gamma.size(); ++i) {
        if (cls.gamma[i] != 0 && mask.contains(static_cast<int>(i) + 1)) {
            v.kernel_caveat = true;
            break;
        }
    }
    return v;
}

KernelResult irreducible_kernel(const MixedFluxClass& cls, const ProductSpec& spec) {
    require_class_matches(cls, spec);
    const auto mask = spec.p1_mask_n();
    KernelResult res;
    res.kernel = cls.gamma;
    for (std::size_t i = 0; i < res.kernel.size(); ++i) {
        if (mask.contains(static_cast<int>(i) + 1) && res.kernel[i] != 0) {
            res.kernel[i] = 0;
            res.caveat = true;
        }
    }
    return res;
}

} // namespace fluxlab
