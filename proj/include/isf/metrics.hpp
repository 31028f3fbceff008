#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "isf/lattice.hpp"

namespace isf {

// Dense integer label image/volume, x-fastest row-major like Lattice.
// Superpixel maps use 1..k; ground-truth maps may use any non-negative
// labels with 0 as background.
struct LabelMap {
    std::array<int, 3> dims{1, 1, 1};
    int ndim = 2;
    std::vector<std::int32_t> v;

    LabelMap() = default;
    LabelMap(int dx, int dy, std::vector<std::int32_t> values)
        : dims{dx, dy, 1}, ndim(2), v(std::move(values)) {}
    LabelMap(int dx, int dy, int dz, std::vector<std::int32_t> values)
        : dims{dx, dy, dz}, ndim(3), v(std::move(values)) {}

    SiteIndex size() const {
        return SiteIndex(dims[0]) * dims[1] * dims[2];
    }
    std::int32_t at(int x, int y, int z = 0) const {
        return v[std::size_t(x) + std::size_t(dims[0]) * (std::size_t(y) + std::size_t(dims[1]) * std::size_t(z))];
    }
    bool same_dims(const LabelMap& o) const {
        return dims == o.dims && ndim == o.ndim;
    }
    int max_label() const {
        std::int32_t m = 0;
        for (std::int32_t l : v) m = std::max(m, l);
        return m;
    }
};

namespace detail {

// Boundary mask under 4-/6-adjacency: a site is boundary when some axis
// neighbor carries a different label.
inline std::vector<std::uint8_t> boundary_mask(const LabelMap& m) {
    std::vector<std::uint8_t> mask(std::size_t(m.size()), 0);
    const int dx = m.dims[0], dy = m.dims[1], dz = m.dims[2];
    auto idx = [&](int x, int y, int z) {
        return std::size_t(x) + std::size_t(dx) * (std::size_t(y) + std::size_t(dy) * std::size_t(z));
    };
    for (int z = 0; z < dz; ++z)
        for (int y = 0; y < dy; ++y)
            for (int x = 0; x < dx; ++x) {
                const std::int32_t l = m.v[idx(x, y, z)];
                const bool b =
                    (x + 1 < dx && m.v[idx(x + 1, y, z)] != l) ||
                    (x > 0 && m.v[idx(x - 1, y, z)] != l) ||
                    (y + 1 < dy && m.v[idx(x, y + 1, z)] != l) ||
                    (y > 0 && m.v[idx(x, y - 1, z)] != l) ||
                    (m.ndim == 3 &&
                     ((z + 1 < dz && m.v[idx(x, y, z + 1)] != l) ||
                      (z > 0 && m.v[idx(x, y, z - 1)] != l)));
                mask[idx(x, y, z)] = b ? 1 : 0;
            }
    return mask;
}

inline void require_same_dims(const LabelMap& a, const LabelMap& b,
                              const char* what) {
    if (!a.same_dims(b))
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace detail

// Fraction of ground-truth boundary sites with a segmentation boundary site
// within Chebyshev distance `radius`. 1.0 when the ground truth has no
// boundary at all.
inline double boundary_recall(const LabelMap& labels, const LabelMap& gt,
                              int radius) {
    detail::require_same_dims(labels, gt, "boundary_recall");
    const std::vector<std::uint8_t> seg = detail::boundary_mask(labels);
    const std::vector<std::uint8_t> ref = detail::boundary_mask(gt);
    const int dx = gt.dims[0], dy = gt.dims[1], dz = gt.dims[2];
    auto idx = [&](int x, int y, int z) {
        return std::size_t(x) + std::size_t(dx) * (std::size_t(y) + std::size_t(dy) * std::size_t(z));
    };
    std::int64_t total = 0, hit = 0;
    for (int z = 0; z < dz; ++z)
        for (int y = 0; y < dy; ++y)
            for (int x = 0; x < dx; ++x) {
                if (!ref[idx(x, y, z)]) continue;
                ++total;
                bool found = false;
                const int z0 = std::max(0, z - (gt.ndim == 3 ? radius : 0));
                const int z1 = std::min(dz - 1, z + (gt.ndim == 3 ? radius : 0));
                for (int zz = z0; zz <= z1 && !found; ++zz)
                    for (int yy = std::max(0, y - radius);
                         yy <= std::min(dy - 1, y + radius) && !found; ++yy)
                        for (int xx = std::max(0, x - radius);
                             xx <= std::min(dx - 1, x + radius) && !found; ++xx)
                            found = seg[idx(xx, yy, zz)] != 0;
                if (found) ++hit;
            }
    return total == 0 ? 1.0 : double(hit) / double(total);
}

// Undersegmentation error in the min(inside, outside) form: each superpixel
// leaks min(overlap, remainder) sites relative to its maximal-overlap
// ground-truth segment, normalized by the site count.
inline double undersegmentation_error(const LabelMap& labels,
                                      const LabelMap& gt) {
    detail::require_same_dims(labels, gt, "undersegmentation_error");
    const SiteIndex n = labels.size();
    std::map<std::pair<std::int32_t, std::int32_t>, std::int64_t> overlap;
    std::map<std::int32_t, std::int64_t> sp_size;
    for (SiteIndex i = 0; i < n; ++i) {
        const auto key = std::make_pair(labels.v[i], gt.v[i]);
        ++overlap[key];
        ++sp_size[key.first];
    }
    std::map<std::int32_t, std::pair<std::int64_t, std::int32_t>> best;
    for (const auto& [key, cnt] : overlap) {
        auto it = best.find(key.first);
        // Maximal overlap; ties go to the smaller ground-truth label.
        if (it == best.end() || cnt > it->second.first)
            best[key.first] = {cnt, key.second};
    }
    std::int64_t leak = 0;
    for (const auto& [sp, pick] : best) {
        const std::int64_t inside = pick.first;
        const std::int64_t outside = sp_size[sp] - inside;
        leak += std::min(inside, outside);
    }
    return double(leak) / double(n);
}

// Dice overlap of two masks; 1.0 when both are empty.
inline double dice(const std::vector<std::uint8_t>& mask_a,
                   const std::vector<std::uint8_t>& mask_b) {
    if (mask_a.size() != mask_b.size())
        throw std::invalid_argument("dice: dimension mismatch");
    std::int64_t a = 0, b = 0, both = 0;
    for (std::size_t i = 0; i < mask_a.size(); ++i) {
        if (mask_a[i]) ++a;
        if (mask_b[i]) ++b;
        if (mask_a[i] && mask_b[i]) ++both;
    }
    if (a + b == 0) return 1.0;
    return 2.0 * double(both) / double(a + b);
}

// Assigns each supervoxel to the object covering strictly more than half of
// its sites; everything else becomes background 0.
inline LabelMap majority_object_labels(const LabelMap& supervoxels,
                                       const LabelMap& objects) {
    detail::require_same_dims(supervoxels, objects, "majority_object_labels");
    const SiteIndex n = supervoxels.size();
    std::map<std::int32_t, std::int64_t> sv_size;
    std::map<std::pair<std::int32_t, std::int32_t>, std::int64_t> overlap;
    for (SiteIndex i = 0; i < n; ++i) {
        const std::int32_t sv = supervoxels.v[i];
        const std::int32_t obj = objects.v[i];
        ++sv_size[sv];
        if (obj != 0) ++overlap[{sv, obj}];
    }
    std::map<std::int32_t, std::int32_t> assign;
    for (const auto& [key, cnt] : overlap)
        if (2 * cnt > sv_size[key.first]) assign[key.first] = key.second;
    LabelMap out = supervoxels;
    for (SiteIndex i = 0; i < n; ++i) {
        auto it = assign.find(supervoxels.v[i]);
        out.v[i] = it == assign.end() ? 0 : it->second;
    }
    return out;
}

}  // namespace isf
