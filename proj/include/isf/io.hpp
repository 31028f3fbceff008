#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "isf/lattice.hpp"
#include "isf/metrics.hpp"

namespace isf {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t offset)
        : std::runtime_error(msg + " (byte " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

using Bytes = std::vector<std::uint8_t>;

namespace detail {

struct PnmHeader {
    int type = 0;  // 5 or 6
    int width = 0;
    int height = 0;
    int maxval = 0;
    std::size_t payload = 0;  // offset of the first sample byte
};

inline PnmHeader parse_pnm_header(const Bytes& b) {
    std::size_t i = 0;
    auto need = [&](std::size_t k) {
        if (i + k > b.size()) throw ParseError("pnm: truncated header", i);
    };
    need(2);
    if (b[0] != 'P' || (b[1] != '5' && b[1] != '6'))
        throw ParseError("pnm: bad magic", 0);
    PnmHeader h;
    h.type = b[1] - '0';
    i = 2;
    auto skip_space = [&]() {
        while (i < b.size()) {
            if (b[i] == '#') {
                while (i < b.size() && b[i] != '\n') ++i;
            } else if (std::isspace(b[i])) {
                ++i;
            } else {
                break;
            }
        }
    };
    auto read_int = [&]() {
        skip_space();
        need(1);
        if (!std::isdigit(b[i])) throw ParseError("pnm: expected integer", i);
        long v = 0;
        while (i < b.size() && std::isdigit(b[i])) {
            v = v * 10 + (b[i] - '0');
            if (v > 1 << 30) throw ParseError("pnm: integer overflow", i);
            ++i;
        }
        return int(v);
    };
    h.width = read_int();
    h.height = read_int();
    h.maxval = read_int();
    need(1);
    if (!std::isspace(b[i])) throw ParseError("pnm: expected whitespace", i);
    ++i;
    h.payload = i;
    if (h.width <= 0 || h.height <= 0)
        throw ParseError("pnm: non-positive dimensions", h.payload);
    if (h.maxval != 255 && h.maxval != 65535)
        throw ParseError("pnm: unsupported maxval", h.payload);
    const std::size_t per = (h.maxval > 255 ? 2 : 1) * (h.type == 6 ? 3 : 1);
    const std::size_t expect = std::size_t(h.width) * std::size_t(h.height) * per;
    if (b.size() - h.payload < expect)
        throw ParseError("pnm: truncated payload", b.size());
    return h;
}

inline int sample_at(const Bytes& b, std::size_t payload, int maxval,
                     std::size_t idx) {
    if (maxval > 255) {
        const std::size_t o = payload + 2 * idx;
        return int(b[o]) << 8 | int(b[o + 1]);  // big-endian per PNM
    }
    return int(b[payload + idx]);
}

inline void put_u16be(Bytes& out, int v) {
    out.push_back(std::uint8_t(v >> 8));
    out.push_back(std::uint8_t(v & 0xff));
}

inline void put_u32le(Bytes& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(std::uint8_t(v >> (8 * k)));
}

inline std::uint32_t get_u32le(const Bytes& b, std::size_t o) {
    return std::uint32_t(b[o]) | std::uint32_t(b[o + 1]) << 8 |
           std::uint32_t(b[o + 2]) << 16 | std::uint32_t(b[o + 3]) << 24;
}

inline Bytes pnm_header_bytes(int type, int w, int h, int maxval) {
    std::ostringstream os;
    os << 'P' << type << '\n' << w << ' ' << h << '\n' << maxval << '\n';
    const std::string s = os.str();
    return Bytes(s.begin(), s.end());
}

}  // namespace detail

// Decodes binary PPM (P6) to a Lab lattice or PGM (P5) to a grayscale
// lattice. 16-bit samples are big-endian. The original 8-bit RGB rendition
// is retained for overlays.
inline Lattice read_pnm_image(const Bytes& b) {
    const detail::PnmHeader h = detail::parse_pnm_header(b);
    const std::size_t n = std::size_t(h.width) * std::size_t(h.height);
    std::vector<Lab> colors(n);
    Bytes rgb(n * 3);
    const double scale8 = 255.0 / h.maxval;
    for (std::size_t i = 0; i < n; ++i) {
        if (h.type == 6) {
            const int r = detail::sample_at(b, h.payload, h.maxval, 3 * i);
            const int g = detail::sample_at(b, h.payload, h.maxval, 3 * i + 1);
            const int bb = detail::sample_at(b, h.payload, h.maxval, 3 * i + 2);
            colors[i] = rgb_to_lab(r * scale8, g * scale8, bb * scale8);
            rgb[3 * i] = std::uint8_t(std::lround(r * scale8));
            rgb[3 * i + 1] = std::uint8_t(std::lround(g * scale8));
            rgb[3 * i + 2] = std::uint8_t(std::lround(bb * scale8));
        } else {
            const int v = detail::sample_at(b, h.payload, h.maxval, i);
            colors[i] = gray_to_lab(v, h.maxval);
            const std::uint8_t g8 = std::uint8_t(std::lround(v * scale8));
            rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = g8;
        }
    }
    Lattice lat(h.width, h.height, std::move(colors));
    lat.set_channels(h.type == 6 ? 3 : 1);
    lat.set_source_rgb(std::move(rgb));
    return lat;
}

// Decodes a P5 as a raw label map (samples are labels, big-endian if 16-bit).
inline LabelMap read_pnm_labels(const Bytes& b) {
    const detail::PnmHeader h = detail::parse_pnm_header(b);
    if (h.type != 5) throw ParseError("pnm labels: expected P5", 0);
    const std::size_t n = std::size_t(h.width) * std::size_t(h.height);
    std::vector<std::int32_t> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = detail::sample_at(b, h.payload, h.maxval, i);
    return LabelMap(h.width, h.height, std::move(v));
}

// Labels as canonical 16-bit big-endian P5 (maxval 65535).
inline Bytes write_labels(const LabelMap& m) {
    if (m.ndim != 2)
        throw std::invalid_argument("write_labels: 2D maps only; use volumes for 3D");
    Bytes out = detail::pnm_header_bytes(5, m.dims[0], m.dims[1], 65535);
    for (std::int32_t l : m.v) {
        if (l < 0 || l > 65535)
            throw std::invalid_argument("write_labels: label out of 16-bit range");
        detail::put_u16be(out, l);
    }
    return out;
}

inline Bytes write_pgm8(int w, int h, const Bytes& samples) {
    Bytes out = detail::pnm_header_bytes(5, w, h, 255);
    out.insert(out.end(), samples.begin(), samples.end());
    return out;
}

inline Bytes write_ppm8(int w, int h, const Bytes& rgb) {
    Bytes out = detail::pnm_header_bytes(6, w, h, 255);
    out.insert(out.end(), rgb.begin(), rgb.end());
    return out;
}

// The source image with segmentation boundaries painted cyan and, when given,
// ground-truth boundaries magenta underneath (so boundaries the segmentation
// misses stay magenta).
inline Bytes write_overlay(const Lattice& lat, const LabelMap& labels,
                           const LabelMap* gt = nullptr) {
    if (lat.ndim() != 2)
        throw std::invalid_argument("write_overlay: 2D lattices only");
    if (labels.dims[0] != lat.dim(0) || labels.dims[1] != lat.dim(1))
        throw std::invalid_argument("write_overlay: dimension mismatch");
    const std::size_t n = std::size_t(lat.size());
    Bytes rgb = lat.source_rgb();
    if (rgb.size() != 3 * n) {
        rgb.assign(3 * n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint8_t g =
                std::uint8_t(std::clamp(std::lround(lat.color(SiteIndex(i)).l * 2.55), 0L, 255L));
            rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = g;
        }
    }
    if (gt) {
        detail::require_same_dims(labels, *gt, "write_overlay");
        const std::vector<std::uint8_t> gb = detail::boundary_mask(*gt);
        for (std::size_t i = 0; i < n; ++i)
            if (gb[i]) {
                rgb[3 * i] = 255;
                rgb[3 * i + 1] = 0;
                rgb[3 * i + 2] = 255;
            }
    }
    const std::vector<std::uint8_t> sb = detail::boundary_mask(labels);
    for (std::size_t i = 0; i < n; ++i)
        if (sb[i]) {
            rgb[3 * i] = 0;
            rgb[3 * i + 1] = 255;
            rgb[3 * i + 2] = 255;
        }
    return write_ppm8(lat.dim(0), lat.dim(1), rgb);
}

// "ISF3" volume: 4 magic bytes, then dx, dy, dz, maxval as little-endian
// uint32, then dx*dy*dz little-endian uint16 samples in x-fastest order.
inline Bytes write_volume(int dx, int dy, int dz, int maxval,
                          const std::vector<int>& samples) {
    if (maxval < 1 || maxval > 65535)
        throw std::invalid_argument("write_volume: bad maxval");
    if (samples.size() != std::size_t(dx) * dy * dz)
        throw std::invalid_argument("write_volume: sample count mismatch");
    Bytes out{'I', 'S', 'F', '3'};
    detail::put_u32le(out, std::uint32_t(dx));
    detail::put_u32le(out, std::uint32_t(dy));
    detail::put_u32le(out, std::uint32_t(dz));
    detail::put_u32le(out, std::uint32_t(maxval));
    for (int s : samples) {
        if (s < 0 || s > maxval)
            throw std::invalid_argument("write_volume: sample out of range");
        out.push_back(std::uint8_t(s & 0xff));
        out.push_back(std::uint8_t(s >> 8));
    }
    return out;
}

namespace detail {

struct VolumeHeader {
    int dx, dy, dz, maxval;
};

inline VolumeHeader parse_volume_header(const Bytes& b) {
    if (b.size() < 4 || b[0] != 'I' || b[1] != 'S' || b[2] != 'F' || b[3] != '3')
        throw ParseError("volume: bad magic", 0);
    if (b.size() < 20) throw ParseError("volume: truncated header", b.size());
    VolumeHeader h;
    h.dx = int(get_u32le(b, 4));
    h.dy = int(get_u32le(b, 8));
    h.dz = int(get_u32le(b, 12));
    h.maxval = int(get_u32le(b, 16));
    if (h.dx <= 0 || h.dy <= 0 || h.dz <= 0)
        throw ParseError("volume: non-positive dimensions", 4);
    if (h.maxval < 1 || h.maxval > 65535)
        throw ParseError("volume: bad maxval", 16);
    const std::size_t expect = 20 + 2 * std::size_t(h.dx) * h.dy * h.dz;
    if (b.size() != expect)
        throw ParseError("volume: payload size mismatch", b.size());
    return h;
}

inline int volume_sample(const Bytes& b, std::size_t i) {
    return int(b[20 + 2 * i]) | int(b[20 + 2 * i + 1]) << 8;
}

}  // namespace detail

inline Lattice read_volume_image(const Bytes& b) {
    const detail::VolumeHeader h = detail::parse_volume_header(b);
    const std::size_t n = std::size_t(h.dx) * h.dy * h.dz;
    std::vector<Lab> colors(n);
    for (std::size_t i = 0; i < n; ++i)
        colors[i] = gray_to_lab(detail::volume_sample(b, i), h.maxval);
    Lattice lat(h.dx, h.dy, h.dz, std::move(colors));
    lat.set_channels(1);
    return lat;
}

inline LabelMap read_volume_labels(const Bytes& b) {
    const detail::VolumeHeader h = detail::parse_volume_header(b);
    const std::size_t n = std::size_t(h.dx) * h.dy * h.dz;
    std::vector<std::int32_t> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = detail::volume_sample(b, i);
    return LabelMap(h.dx, h.dy, h.dz, std::move(v));
}

struct MetricsRow {
    std::string image;
    std::string method;
    int k = 0;
    double alpha = 0.0;
    std::optional<double> br;
    std::optional<double> ue;
    std::optional<double> dice;
    double seconds = 0.0;
};

inline constexpr const char* kMetricsCsvHeader =
    "image,method,k,alpha,br,ue,dice,seconds";

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace detail

inline std::string write_metrics_csv(const std::vector<MetricsRow>& rows) {
    std::string out = kMetricsCsvHeader;
    out += '\n';
    for (const MetricsRow& r : rows) {
        out += detail::csv_field(r.image);
        out += ',';
        out += detail::csv_field(r.method);
        out += ',';
        out += std::to_string(r.k);
        out += ',';
        out += detail::fixed6(r.alpha);
        out += ',';
        out += r.br ? detail::fixed6(*r.br) : "";
        out += ',';
        out += r.ue ? detail::fixed6(*r.ue) : "";
        out += ',';
        out += r.dice ? detail::fixed6(*r.dice) : "";
        out += ',';
        out += detail::fixed6(r.seconds);
        out += '\n';
    }
    return out;
}

inline Bytes read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return Bytes(std::istreambuf_iterator<char>(in),
                 std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, const Bytes& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(data.data()),
              std::streamsize(data.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_file(const std::string& path, const std::string& data) {
    write_file(path, Bytes(data.begin(), data.end()));
}

}  // namespace isf
