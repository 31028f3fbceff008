#pragma once

#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include "isf/lattice.hpp"
#include "isf/metrics.hpp"

namespace isf {

inline std::vector<Lab> superpixel_mean_colors(const Lattice& lat,
                                               const LabelMap& labels) {
    const int k = labels.max_label();
    std::vector<Lab> sum(k);
    std::vector<std::int64_t> cnt(k, 0);
    for (SiteIndex i = 0; i < lat.size(); ++i) {
        const int j = labels.v[i] - 1;
        if (j < 0) throw std::invalid_argument("mean colors: unlabeled site");
        const Lab& c = lat.color(i);
        sum[j].l += c.l;
        sum[j].a += c.a;
        sum[j].b += c.b;
        ++cnt[j];
    }
    for (int j = 0; j < k; ++j) {
        if (cnt[j] == 0) continue;
        const double inv = 1.0 / double(cnt[j]);
        sum[j].l *= inv;
        sum[j].a *= inv;
        sum[j].b *= inv;
    }
    return sum;
}

namespace detail {

class UnionFind {
public:
    explicit UnionFind(int n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    int find(int a) {
        while (parent_[a] != a) {
            parent_[a] = parent_[parent_[a]];
            a = parent_[a];
        }
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<int> parent_;
};

}  // namespace detail

// Single-linkage merge over the region-adjacency graph: superpixels whose
// mean colors differ by at most `threshold` and that touch in the image end
// up in the same region. Returns a region id (0-based, smallest member
// label) per superpixel label 1..k.
inline std::vector<int> merge_regions(const LabelMap& labels,
                                      const std::vector<Lab>& mean_colors,
                                      double threshold) {
    const int k = int(mean_colors.size());
    detail::UnionFind uf(k);
    const int dx = labels.dims[0], dy = labels.dims[1];
    for (int y = 0; y < dy; ++y)
        for (int x = 0; x < dx; ++x) {
            const std::int32_t a = labels.at(x, y);
            for (int axis = 0; axis < 2; ++axis) {
                const int nx = x + (axis == 0 ? 1 : 0);
                const int ny = y + (axis == 1 ? 1 : 0);
                if (nx >= dx || ny >= dy) continue;
                const std::int32_t b = labels.at(nx, ny);
                if (a == b) continue;
                if (lab_dist(mean_colors[a - 1],
                             mean_colors[b - 1]) <= threshold)
                    uf.unite(a - 1, b - 1);
            }
        }
    std::vector<int> region(k);
    for (int j = 0; j < k; ++j) region[j] = uf.find(j);
    return region;
}

// Among regions touching the top image row, selects the one covering the
// most pixels; the mask marks its sites 255.
inline std::vector<std::uint8_t> sky_mask(const LabelMap& labels,
                                          const std::vector<int>& region_of) {
    const int dx = labels.dims[0], dy = labels.dims[1];
    std::set<int> top_regions;
    for (int x = 0; x < dx; ++x)
        top_regions.insert(region_of[labels.at(x, 0) - 1]);
    std::vector<std::int64_t> area(region_of.size(), 0);
    for (int y = 0; y < dy; ++y)
        for (int x = 0; x < dx; ++x)
            ++area[region_of[labels.at(x, y) - 1]];
    int best = -1;
    for (int r : top_regions)
        if (best < 0 || area[r] > area[best]) best = r;
    std::vector<std::uint8_t> mask(labels.size(), 0);
    for (SiteIndex i = 0; i < labels.size(); ++i)
        if (region_of[labels.v[i] - 1] == best)
            mask[i] = 255;
    return mask;
}

}  // namespace isf
