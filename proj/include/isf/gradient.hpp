#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "isf/lattice.hpp"

namespace isf {

// Per-site non-negative integer gradient, quantized to [0, maxval].
struct GradientMap {
    std::vector<int> values;
    int maxval = 0;

    int at(SiteIndex i) const { return values[i]; }
};

// Maximal connected equal-valued plateaus with no strictly lower neighbor.
// Components are listed in scan order of their first site; each carries the
// lexicographically smallest member as representative.
struct MinimaSet {
    std::vector<std::vector<SiteIndex>> components;
    std::vector<Coord> representatives;

    bool empty() const { return components.empty(); }
};

// Max Lab distance to any neighbor, linearly quantized to [0, levels-1]
// against the global maximum. A constant image maps to all zeros.
inline GradientMap gradient_map(const Lattice& lat, const Adjacency& adj,
                                int levels) {
    if (levels < 2) throw std::invalid_argument("gradient_map: levels < 2");
    const SiteIndex n = lat.size();
    std::vector<double> raw(std::size_t(n), 0.0);
    double global_max = 0.0;
    for (SiteIndex i = 0; i < n; ++i) {
        const Coord c = lat.coord_of(i);
        double d = 0.0;
        for (const auto& [nc, step] : neighbors(lat, c, adj))
            d = std::max(d, lab_dist(lat.color(i), lat.color(nc)));
        raw[i] = d;
        global_max = std::max(global_max, d);
    }
    GradientMap g;
    g.maxval = levels - 1;
    g.values.assign(std::size_t(n), 0);
    if (global_max > 0.0) {
        for (SiteIndex i = 0; i < n; ++i)
            g.values[i] =
                int(std::llround(raw[i] / global_max * (levels - 1)));
    }
    return g;
}

inline MinimaSet regional_minima(const GradientMap& grad, const Lattice& lat,
                                 const Adjacency& adj) {
    const SiteIndex n = lat.size();
    MinimaSet out;
    std::vector<std::uint8_t> visited(std::size_t(n), 0);
    std::vector<SiteIndex> stack;
    for (SiteIndex start = 0; start < n; ++start) {
        if (visited[start]) continue;
        // Flood the plateau containing `start`.
        const int level = grad.at(start);
        std::vector<SiteIndex> plateau;
        bool is_minimum = true;
        visited[start] = 1;
        stack.assign(1, start);
        while (!stack.empty()) {
            const SiteIndex s = stack.back();
            stack.pop_back();
            plateau.push_back(s);
            for (const auto& [nc, step] : neighbors(lat, lat.coord_of(s), adj)) {
                const SiteIndex t = lat.index_of(nc);
                const int v = grad.at(t);
                if (v < level) {
                    is_minimum = false;
                } else if (v == level && !visited[t]) {
                    visited[t] = 1;
                    stack.push_back(t);
                }
            }
        }
        if (!is_minimum) continue;
        Coord rep = lat.coord_of(plateau.front());
        for (SiteIndex s : plateau) {
            const Coord c = lat.coord_of(s);
            if (lex_less(c, rep)) rep = c;
        }
        out.components.push_back(std::move(plateau));
        out.representatives.push_back(rep);
    }
    return out;
}

// Representative of the component whose nearest member minimizes Euclidean
// distance to `site`; distance ties go to the lexicographically smallest
// nearest member.
inline Coord closest_minimum(const Coord& site, const MinimaSet& minima,
                             const Lattice& lat) {
    if (minima.empty())
        throw std::invalid_argument("closest_minimum: empty minima set");
    double best_dist = std::numeric_limits<double>::infinity();
    Coord best_member{};
    std::size_t best_comp = 0;
    for (std::size_t ci = 0; ci < minima.components.size(); ++ci) {
        for (SiteIndex s : minima.components[ci]) {
            const Coord c = lat.coord_of(s);
            const double d = euclid(c, site);
            if (d < best_dist ||
                (d == best_dist && lex_less(c, best_member))) {
                best_dist = d;
                best_member = c;
                best_comp = ci;
            }
        }
    }
    return minima.representatives[best_comp];
}

}  // namespace isf
