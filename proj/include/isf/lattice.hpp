#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace isf {

using SiteIndex = std::int32_t;

struct Coord {
    int x = 0;
    int y = 0;
    int z = 0;

    friend bool operator==(const Coord&, const Coord&) = default;
};

// Lexicographic order on (x, y, z); used wherever a deterministic
// representative among equivalent sites is needed.
inline bool lex_less(const Coord& a, const Coord& b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return a.z < b.z;
}

inline double euclid(const Coord& a, const Coord& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

struct Lab {
    double l = 0.0;
    double a = 0.0;
    double b = 0.0;

    friend bool operator==(const Lab&, const Lab&) = default;
};

inline double lab_dist(const Lab& p, const Lab& q) {
    const double dl = p.l - q.l, da = p.a - q.a, db = p.b - q.b;
    return std::sqrt(dl * dl + da * da + db * db);
}

// CIE L*a*b* from 8-bit-scaled sRGB channels (D65 white point, standard
// piecewise gamma). Channels are reals in [0,255] so 16-bit inputs can be
// rescaled by the caller without loss.
inline Lab rgb_to_lab(double r, double g, double b) {
    auto linear = [](double c) {
        c /= 255.0;
        return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
    };
    const double rl = linear(r), gl = linear(g), bl = linear(b);
    const double x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
    const double y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
    const double z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;
    auto f = [](double t) {
        constexpr double d = 6.0 / 29.0;
        return t > d * d * d ? std::cbrt(t) : t / (3.0 * d * d) + 4.0 / 29.0;
    };
    const double fx = f(x / 0.95047), fy = f(y / 1.0), fz = f(z / 1.08883);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

inline Lab gray_to_lab(double intensity, double maxval) {
    return {100.0 * intensity / maxval, 0.0, 0.0};
}

enum class AdjacencyKind { Four2D, Six3D };

// Symmetric unit-step neighborhood: 4 offsets in 2D, 6 in 3D.
struct Adjacency {
    AdjacencyKind kind;
    std::vector<Coord> offsets;
    std::vector<double> steps;

    static Adjacency four_2d() {
        Adjacency a;
        a.kind = AdjacencyKind::Four2D;
        a.offsets = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
        a.steps.assign(4, 1.0);
        return a;
    }
    static Adjacency six_3d() {
        Adjacency a;
        a.kind = AdjacencyKind::Six3D;
        a.offsets = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                     {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
        a.steps.assign(6, 1.0);
        return a;
    }
    static Adjacency for_dims(int ndim) {
        return ndim == 3 ? six_3d() : four_2d();
    }
};

// Pixel/voxel domain with per-site Lab colors. Sites are addressed either by
// Coord or by a flat index in x-fastest row-major order:
//   index = x + dx*(y + dy*z).
// Immutable after construction.
class Lattice {
public:
    Lattice(int dx, int dy, std::vector<Lab> colors)
        : dims_{dx, dy, 1}, ndim_(2), colors_(std::move(colors)) {
        check_sizes();
    }
    Lattice(int dx, int dy, int dz, std::vector<Lab> colors)
        : dims_{dx, dy, dz}, ndim_(3), colors_(std::move(colors)) {
        check_sizes();
    }

    static Lattice constant(int dx, int dy, Lab color) {
        return Lattice(dx, dy, std::vector<Lab>(std::size_t(dx) * dy, color));
    }

    int ndim() const { return ndim_; }
    int dim(int axis) const { return dims_[axis]; }
    SiteIndex size() const {
        return SiteIndex(dims_[0]) * dims_[1] * dims_[2];
    }

    bool in_bounds(const Coord& c) const {
        return c.x >= 0 && c.x < dims_[0] && c.y >= 0 && c.y < dims_[1] &&
               c.z >= 0 && c.z < dims_[2];
    }

    SiteIndex index_of(const Coord& c) const {
        return SiteIndex(c.x + dims_[0] * (c.y + std::int64_t(dims_[1]) * c.z));
    }
    Coord coord_of(SiteIndex i) const {
        const int x = int(i % dims_[0]);
        const int y = int((i / dims_[0]) % dims_[1]);
        const int z = int(i / (std::int64_t(dims_[0]) * dims_[1]));
        return {x, y, z};
    }

    const Lab& color(SiteIndex i) const { return colors_[i]; }
    const Lab& color(const Coord& c) const { return colors_[index_of(c)]; }
    const std::vector<Lab>& colors() const { return colors_; }

    // Original 8-bit samples, retained when the lattice was decoded from a
    // file so overlays can reproduce the source bytes. Empty otherwise.
    const std::vector<std::uint8_t>& source_rgb() const { return source_rgb_; }
    void set_source_rgb(std::vector<std::uint8_t> rgb) { source_rgb_ = std::move(rgb); }

    int channels() const { return channels_; }
    void set_channels(int c) { channels_ = c; }

private:
    void check_sizes() const {
        for (int a = 0; a < ndim_; ++a)
            if (dims_[a] <= 0)
                throw std::invalid_argument("lattice: non-positive extent");
        if (colors_.size() != std::size_t(size()))
            throw std::invalid_argument("lattice: color count does not match dims");
    }

    std::array<int, 3> dims_;
    int ndim_;
    int channels_ = 3;
    std::vector<Lab> colors_;
    std::vector<std::uint8_t> source_rgb_;
};

// In-bounds neighbors of `site` in fixed offset order, with step lengths.
inline std::vector<std::pair<Coord, double>>
neighbors(const Lattice& lat, const Coord& site, const Adjacency& adj) {
    if (!lat.in_bounds(site))
        throw std::invalid_argument("neighbors: site out of bounds");
    std::vector<std::pair<Coord, double>> out;
    out.reserve(adj.offsets.size());
    for (std::size_t i = 0; i < adj.offsets.size(); ++i) {
        const Coord n{site.x + adj.offsets[i].x, site.y + adj.offsets[i].y,
                      site.z + adj.offsets[i].z};
        if (lat.in_bounds(n)) out.emplace_back(n, adj.steps[i]);
    }
    return out;
}

}  // namespace isf
