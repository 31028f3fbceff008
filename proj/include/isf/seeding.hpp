#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "isf/gradient.hpp"
#include "isf/lattice.hpp"

namespace isf {

// Ordered seed sites; labels are the consecutive list positions 1..k.
// ref_colors carries the per-seed reference color M(s_j): the seed's own
// color initially, the superpixel mean color after recomputation.
struct SeedSet {
    std::vector<Coord> seeds;
    std::vector<Lab> ref_colors;

    int count() const { return int(seeds.size()); }

    friend bool operator==(const SeedSet&, const SeedSet&) = default;
};

enum class RecomputePolicy { ColorMedoid, CenterMedoid };

namespace detail {

// Grid sampling restricted to a window: interval S = floor((sites/k)^(1/d))
// per axis, one seed per cell at start + floor(S/2) clipped into the window,
// excess cells truncated in scan order. Requires 1 <= k <= window size, and
// always returns exactly k sites.
inline std::vector<Coord> grid_window(const Coord& origin, const Coord& extent,
                                      int ndim, int k) {
    const std::int64_t sites =
        std::int64_t(extent.x) * extent.y * (ndim == 3 ? extent.z : 1);
    if (k < 1 || k > sites)
        throw std::invalid_argument("grid sampling: k out of range");
    const double root = ndim == 3 ? std::cbrt(double(sites) / k)
                                  : std::sqrt(double(sites) / k);
    const int interval = std::max(1, int(std::floor(root)));
    const int half = interval / 2;
    auto centers = [&](int lo, int len) {
        std::vector<int> cs;
        for (int start = 0; start < len; start += interval)
            cs.push_back(lo + std::min(start + half, len - 1));
        return cs;
    };
    const std::vector<int> xs = centers(origin.x, extent.x);
    const std::vector<int> ys = centers(origin.y, extent.y);
    const std::vector<int> zs =
        ndim == 3 ? centers(origin.z, extent.z) : std::vector<int>{origin.z};
    std::vector<Coord> out;
    out.reserve(std::size_t(k));
    for (int z : zs)
        for (int y : ys)
            for (int x : xs) {
                if (int(out.size()) == k) return out;
                out.push_back({x, y, z});
            }
    return out;
}

}  // namespace detail

inline SeedSet grid_sample(const Lattice& lat, int k) {
    const Coord extent{lat.dim(0), lat.dim(1), lat.ndim() == 3 ? lat.dim(2) : 1};
    SeedSet s;
    s.seeds = detail::grid_window({0, 0, 0}, extent, lat.ndim(), k);
    s.ref_colors.reserve(s.seeds.size());
    for (const Coord& c : s.seeds) s.ref_colors.push_back(lat.color(c));
    return s;
}

// Normalized Shannon entropy of a histogram, with n = number of distinct
// values present. Defined as 0 for a single-valued histogram.
inline double nse(const std::vector<std::int64_t>& counts) {
    std::int64_t total = 0;
    int distinct = 0;
    for (std::int64_t c : counts) {
        if (c < 0) throw std::invalid_argument("nse: negative count");
        if (c > 0) ++distinct, total += c;
    }
    if (total == 0) throw std::invalid_argument("nse: empty histogram");
    if (distinct == 1) return 0.0;
    double h = 0.0;
    for (std::int64_t c : counts) {
        if (c == 0) continue;
        const double p = double(c) / double(total);
        h -= p * std::log2(p);
    }
    return h / std::log2(double(distinct));
}

// One rectangular quad-tree region and its entropy.
struct Quadrant {
    Coord origin;
    Coord extent;
    double nse_value = 0.0;

    std::int64_t sites() const { return std::int64_t(extent.x) * extent.y; }
};

// Two-level entropy quad-tree over a 2D lattice: the four first-level
// quadrants, their NSE mean/deviation, and the leaf list after re-splitting
// every quadrant with |NSE - mu| > sigma.
struct QuadTreeStats {
    std::vector<Quadrant> first_level;
    double mu = 0.0;
    double sigma = 0.0;
    std::vector<Quadrant> leaves;
};

namespace detail {

inline double window_nse(const Lattice& lat, const Coord& origin,
                         const Coord& extent) {
    if (extent.x <= 0 || extent.y <= 0) return 0.0;
    std::vector<std::int64_t> hist(256, 0);
    for (int y = origin.y; y < origin.y + extent.y; ++y)
        for (int x = origin.x; x < origin.x + extent.x; ++x) {
            const double l = lat.color(Coord{x, y, 0}).l;
            const int bin = std::clamp(int(std::lround(l * 2.55)), 0, 255);
            ++hist[bin];
        }
    return nse(hist);
}

inline std::vector<Quadrant> split4(const Lattice& lat, const Coord& origin,
                                    const Coord& extent) {
    const int mx = extent.x / 2, my = extent.y / 2;
    const std::array<Coord, 4> org{Coord{origin.x, origin.y, 0},
                                   Coord{origin.x + mx, origin.y, 0},
                                   Coord{origin.x, origin.y + my, 0},
                                   Coord{origin.x + mx, origin.y + my, 0}};
    const std::array<Coord, 4> ext{Coord{mx, my, 0},
                                   Coord{extent.x - mx, my, 0},
                                   Coord{mx, extent.y - my, 0},
                                   Coord{extent.x - mx, extent.y - my, 0}};
    std::vector<Quadrant> out;
    for (int q = 0; q < 4; ++q) {
        Quadrant quad{org[q], ext[q], 0.0};
        if (quad.sites() > 0) quad.nse_value = window_nse(lat, quad.origin, quad.extent);
        out.push_back(quad);
    }
    return out;
}

// Largest-remainder apportionment of k seats by non-negative weights, with a
// per-leaf capacity and a minimum of one seat per leaf when k allows it.
inline std::vector<int> apportion(int k, const std::vector<double>& weights,
                                  const std::vector<std::int64_t>& capacity) {
    const std::size_t n = weights.size();
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j)
        w[j] = total > 0.0 ? weights[j] / total : 1.0 / double(n);

    std::vector<int> alloc(n, 0);
    std::vector<std::pair<double, std::size_t>> rem;
    int assigned = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const double quota = k * w[j];
        alloc[j] = int(std::floor(quota));
        assigned += alloc[j];
        rem.emplace_back(quota - alloc[j], j);
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
        return a.first > b.first;
    });
    for (std::size_t i = 0; assigned < k; ++i, ++assigned)
        ++alloc[rem[i % n].second];

    if (k >= int(n)) {
        for (std::size_t j = 0; j < n; ++j) {
            if (alloc[j] > 0) continue;
            std::size_t donor = n;
            for (std::size_t d = 0; d < n; ++d)
                if (alloc[d] > 1 && (donor == n || alloc[d] > alloc[donor]))
                    donor = d;
            if (donor == n) break;
            --alloc[donor];
            alloc[j] = 1;
        }
    }
    // Respect per-leaf capacity; overflow spills to leaves with room.
    for (std::size_t j = 0; j < n; ++j) {
        while (alloc[j] > capacity[j]) {
            std::size_t best = n;
            for (std::size_t d = 0; d < n; ++d)
                if (alloc[d] < capacity[d] &&
                    (best == n || w[d] > w[best]))
                    best = d;
            if (best == n)
                throw std::invalid_argument("apportion: k exceeds total capacity");
            --alloc[j];
            ++alloc[best];
        }
    }
    return alloc;
}

}  // namespace detail

inline QuadTreeStats quadtree_stats(const Lattice& lat) {
    if (lat.ndim() != 2)
        throw std::invalid_argument("quadtree_stats: 2D lattices only");
    QuadTreeStats qt;
    qt.first_level = detail::split4(lat, {0, 0, 0},
                                    {lat.dim(0), lat.dim(1), 0});
    double sum = 0.0;
    for (const Quadrant& q : qt.first_level) sum += q.nse_value;
    qt.mu = sum / 4.0;
    double var = 0.0;
    for (const Quadrant& q : qt.first_level) {
        const double d = q.nse_value - qt.mu;
        var += d * d;
    }
    qt.sigma = std::sqrt(var / 4.0);
    for (const Quadrant& q : qt.first_level) {
        if (q.sites() == 0) continue;
        if (std::abs(q.nse_value - qt.mu) > qt.sigma) {
            for (const Quadrant& sub : detail::split4(lat, q.origin, q.extent))
                if (sub.sites() > 0) qt.leaves.push_back(sub);
        } else {
            qt.leaves.push_back(q);
        }
    }
    return qt;
}

// Entropy-guided mixed sampling: seeds are apportioned to the two-level
// quad-tree leaves in proportion to their NSE values (equal split when all
// entropies vanish), then placed by local grid sampling inside each leaf.
inline SeedSet mixed_sample(const Lattice& lat, int k) {
    if (lat.ndim() != 2)
        throw std::invalid_argument("mixed_sample: 2D lattices only");
    if (k < 4 || k > lat.size())
        throw std::invalid_argument("mixed_sample: k out of range");

    const QuadTreeStats qt = quadtree_stats(lat);
    std::vector<double> weights;
    std::vector<std::int64_t> capacity;
    for (const Quadrant& leaf : qt.leaves) {
        weights.push_back(leaf.nse_value);
        capacity.push_back(leaf.sites());
    }
    const std::vector<int> alloc = detail::apportion(k, weights, capacity);

    SeedSet s;
    for (std::size_t j = 0; j < qt.leaves.size(); ++j) {
        if (alloc[j] == 0) continue;
        const Quadrant& leaf = qt.leaves[j];
        for (const Coord& c :
             detail::grid_window(leaf.origin, leaf.extent, 2, alloc[j])) {
            s.seeds.push_back(c);
            s.ref_colors.push_back(lat.color(c));
        }
    }
    return s;
}

// Grid seeds relocated to their closest regional minima; seeds landing on
// the same minimum collapse to one, so the result may have fewer than k.
inline SeedSet regmin_seeds(const Lattice& lat, int k, const GradientMap&,
                            const MinimaSet& minima) {
    const SeedSet grid = grid_sample(lat, k);
    SeedSet s;
    for (const Coord& c : grid.seeds) {
        const Coord rep = closest_minimum(c, minima, lat);
        const bool seen =
            std::find(s.seeds.begin(), s.seeds.end(), rep) != s.seeds.end();
        if (!seen) {
            s.seeds.push_back(rep);
            s.ref_colors.push_back(lat.color(rep));
        }
    }
    return s;
}

// Per-superpixel statistics that drive seed recomputation.
struct SeedUpdateStats {
    Lab mean_color;
    double center_x = 0.0, center_y = 0.0, center_z = 0.0;
    double mu_color = 0.0;    // mean color distance of members to the seed
    double mu_spatial = 0.0;  // mean spatial distance of members to the seed
    std::int64_t count = 0;
};

inline std::vector<SeedUpdateStats>
seed_update_stats(const Lattice& lat, const std::vector<std::int32_t>& labels,
                  const SeedSet& prev) {
    const int k = prev.count();
    std::vector<SeedUpdateStats> st(k);
    for (SiteIndex i = 0; i < lat.size(); ++i) {
        const int lbl = labels[i];
        if (lbl < 1 || lbl > k)
            throw std::logic_error("seed stats: site label out of range");
        SeedUpdateStats& s = st[lbl - 1];
        const Coord c = lat.coord_of(i);
        const Lab& col = lat.color(i);
        s.mean_color.l += col.l;
        s.mean_color.a += col.a;
        s.mean_color.b += col.b;
        s.center_x += c.x;
        s.center_y += c.y;
        s.center_z += c.z;
        const Coord seed = prev.seeds[lbl - 1];
        s.mu_color += lab_dist(col, lat.color(seed));
        s.mu_spatial += euclid(c, seed);
        ++s.count;
    }
    for (int j = 0; j < k; ++j) {
        SeedUpdateStats& s = st[j];
        if (s.count == 0)
            throw std::logic_error("seed stats: label with no sites");
        const double inv = 1.0 / double(s.count);
        s.mean_color.l *= inv;
        s.mean_color.a *= inv;
        s.mean_color.b *= inv;
        s.center_x *= inv;
        s.center_y *= inv;
        s.center_z *= inv;
        s.mu_color *= inv;
        s.mu_spatial *= inv;
    }
    return st;
}

// One seed recomputation step. The medoid candidate (closest member to the
// mean color or to the geometric center, ties to the lexicographically
// smallest coordinate) replaces the previous seed only when it moved further
// than sqrt(mu_color) in color or sqrt(mu_spatial) in space. Reference
// colors always become the superpixel mean colors.
inline SeedSet recompute_seeds(const Lattice& lat,
                               const std::vector<std::int32_t>& labels,
                               const SeedSet& prev, RecomputePolicy policy) {
    const int k = prev.count();
    const std::vector<SeedUpdateStats> st = seed_update_stats(lat, labels, prev);

    std::vector<Coord> candidate(k);
    std::vector<double> best(k,
                             std::numeric_limits<double>::infinity());
    for (SiteIndex i = 0; i < lat.size(); ++i) {
        const int j = labels[i] - 1;
        const Coord c = lat.coord_of(i);
        const SeedUpdateStats& s = st[j];
        double d;
        if (policy == RecomputePolicy::ColorMedoid) {
            d = lab_dist(lat.color(i), s.mean_color);
        } else {
            const double dx = c.x - s.center_x, dy = c.y - s.center_y,
                         dz = c.z - s.center_z;
            d = std::sqrt(dx * dx + dy * dy + dz * dz);
        }
        if (d < best[j] ||
            (d == best[j] && lex_less(c, candidate[j]))) {
            best[j] = d;
            candidate[j] = c;
        }
    }

    SeedSet next;
    next.seeds.reserve(std::size_t(k));
    next.ref_colors.reserve(std::size_t(k));
    for (int j = 0; j < k; ++j) {
        const Coord old = prev.seeds[j];
        const Coord cand = candidate[j];
        const SeedUpdateStats& s = st[j];
        const bool moved =
            lab_dist(lat.color(cand), lat.color(old)) > std::sqrt(s.mu_color) ||
            euclid(cand, old) > std::sqrt(s.mu_spatial);
        next.seeds.push_back(moved ? cand : old);
        next.ref_colors.push_back(s.mean_color);
    }
    return next;
}

}  // namespace isf
