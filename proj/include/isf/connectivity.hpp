#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "isf/gradient.hpp"
#include "isf/lattice.hpp"
#include "isf/seeding.hpp"

namespace isf {

inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

// The three extension rules. RootColor and MeanColor are the additive forms
// referenced to the tree root's own color and to the superpixel mean color;
// GradientMax is the watershed-style max rule over a gradient image.
enum class CostVariant { RootColor, MeanColor, GradientMax };

struct PathCostSpec {
    CostVariant variant = CostVariant::MeanColor;
    double alpha = 0.5;
    double beta = 12.0;
    const GradientMap* gradient = nullptr;  // required for GradientMax

    void validate() const {
        if (alpha < 0.0) throw std::invalid_argument("path cost: alpha < 0");
        if (beta < 1.0) throw std::invalid_argument("path cost: beta < 1");
        if (variant == CostVariant::GradientMax && gradient == nullptr)
            throw std::invalid_argument("path cost: gradient map required");
    }
};

// Trivial-path initialization: zero at seeds, unreached elsewhere.
inline double trivial_cost(const Coord& site, const SeedSet& seeds) {
    for (const Coord& s : seeds.seeds)
        if (s == site) return 0.0;
    return kInfiniteCost;
}

namespace detail {

// pow for the common case of an integral exponent; beta = 12 by default.
inline double pow_beta(double base, double beta) {
    const int e = int(beta);
    if (double(e) != beta || e < 0 || e > 64) return std::pow(base, beta);
    double r = 1.0, b = base;
    for (int n = e; n > 0; n >>= 1) {
        if (n & 1) r *= b;
        b *= b;
    }
    return r;
}

}  // namespace detail

// One path extension. Additive variants add (||I(t)-ref|| * alpha)^beta plus
// the spatial step; GradientMax folds in the gradient at the new terminus.
// Non-decreasing in cost_s for every variant.
inline double extend_cost(const PathCostSpec& spec, double cost_s,
                          const Lab& color_t, const Lab& ref_color,
                          double step, int grad_t) {
    if (!(cost_s < kInfiniteCost))
        throw std::invalid_argument("extend_cost: unreached path");
    if (spec.variant == CostVariant::GradientMax)
        return std::max(cost_s, double(grad_t));
    return cost_s +
           detail::pow_beta(lab_dist(color_t, ref_color) * spec.alpha,
                            spec.beta) +
           step;
}

}  // namespace isf
