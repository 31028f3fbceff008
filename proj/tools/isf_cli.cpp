// Command-line front end: segmentation, metric evaluation, benchmark sweeps,
// and sky-region extraction.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "isf/isf.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnreadable = 2;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitInternal = 70;

const std::map<std::string, isf::Preset> kMethods = {
    {"grid-root", isf::Preset::GridRoot}, {"mix-root", isf::Preset::MixRoot},
    {"grid-mean", isf::Preset::GridMean}, {"mix-mean", isf::Preset::MixMean},
    {"regmin", isf::Preset::RegMin},
};

bool has_magic(const isf::Bytes& b, const char* m) {
    for (std::size_t i = 0; m[i]; ++i)
        if (i >= b.size() || b[i] != std::uint8_t(m[i])) return false;
    return true;
}

isf::Lattice read_image_any(const std::string& path) {
    const isf::Bytes b = isf::read_file(path);
    if (has_magic(b, "ISF3")) return isf::read_volume_image(b);
    return isf::read_pnm_image(b);
}

isf::LabelMap read_labels_any(const std::string& path) {
    const isf::Bytes b = isf::read_file(path);
    if (has_magic(b, "ISF3")) return isf::read_volume_labels(b);
    return isf::read_pnm_labels(b);
}

void write_labels_any(const std::string& path, const isf::LabelMap& m) {
    if (m.ndim == 3) {
        std::vector<int> samples(m.v.begin(), m.v.end());
        isf::write_file(path, isf::write_volume(m.dims[0], m.dims[1], m.dims[2],
                                                65535, samples));
    } else {
        isf::write_file(path, isf::write_labels(m));
    }
}

// Macro-averaged Dice of the majority-object labeling against the ground
// truth, over the ground truth's nonzero labels.
double object_dice(const isf::LabelMap& labels, const isf::LabelMap& gt) {
    const isf::LabelMap assigned = isf::majority_object_labels(labels, gt);
    std::vector<std::int32_t> objects;
    for (std::int32_t l : gt.v)
        if (l != 0 && std::find(objects.begin(), objects.end(), l) == objects.end())
            objects.push_back(l);
    if (objects.empty()) return 1.0;
    std::sort(objects.begin(), objects.end());
    double sum = 0.0;
    for (std::int32_t o : objects) {
        std::vector<std::uint8_t> a(assigned.v.size()), b(gt.v.size());
        for (std::size_t i = 0; i < gt.v.size(); ++i) {
            a[i] = assigned.v[i] == o;
            b[i] = gt.v[i] == o;
        }
        sum += isf::dice(a, b);
    }
    return sum / double(objects.size());
}

struct SegmentOpts {
    std::string input, method = "mix-mean", labels_out, overlay_out, gt_path,
                seed_dump;
    int k = 0;
    double alpha = 0.5, beta = 12.0;
    int iters = 10;
    int br_radius = 2;
    bool verbose = false;
};

int cmd_segment(const SegmentOpts& o) {
    const isf::Lattice lat = read_image_any(o.input);
    isf::IsfConfig cfg =
        isf::IsfConfig::preset(kMethods.at(o.method), o.k, o.alpha, o.beta,
                               o.iters);
    const auto t0 = std::chrono::steady_clock::now();
    const isf::IsfResult r = isf_run(lat, cfg);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    write_labels_any(o.labels_out, r.labels);
    if (!o.overlay_out.empty()) {
        const isf::LabelMap* gtp = nullptr;
        isf::LabelMap gt;
        if (!o.gt_path.empty()) {
            gt = read_labels_any(o.gt_path);
            gtp = &gt;
        }
        isf::write_file(o.overlay_out, isf::write_overlay(lat, r.labels, gtp));
    }
    if (!o.seed_dump.empty()) {
        std::string csv = "iter,label,x,y,z\n";
        for (std::size_t it = 0; it < r.diag.seeds.size(); ++it)
            for (int j = 0; j < r.diag.seeds[it].count(); ++j) {
                const isf::Coord& c = r.diag.seeds[it].seeds[j];
                csv += std::to_string(it) + "," + std::to_string(j + 1) + "," +
                       std::to_string(c.x) + "," + std::to_string(c.y) + "," +
                       std::to_string(c.z) + "\n";
            }
        isf::write_file(o.seed_dump, csv);
    }
    if (o.verbose) {
        std::cerr << "realized k' = " << r.final_seeds.count() << "\n";
        for (std::size_t i = 0; i < r.diag.functional.size(); ++i)
            std::cerr << "iter " << i << ": F = " << r.diag.functional[i]
                      << ", changed = " << r.diag.changed[i] << "\n";
    }
    if (!o.gt_path.empty()) {
        const isf::LabelMap gt = read_labels_any(o.gt_path);
        isf::MetricsRow row;
        row.image = fs::path(o.input).filename().string();
        row.method = o.method;
        row.k = o.k;
        row.alpha = o.alpha;
        row.br = isf::boundary_recall(r.labels, gt, o.br_radius);
        row.ue = isf::undersegmentation_error(r.labels, gt);
        row.dice = object_dice(r.labels, gt);
        row.seconds = seconds;
        std::cout << isf::write_metrics_csv({row});
    }
    return kExitOk;
}

struct MetricsOpts {
    std::string labels_path, gt_path;
    int br_radius = 2;
};

int cmd_metrics(const MetricsOpts& o) {
    const isf::LabelMap labels = read_labels_any(o.labels_path);
    const isf::LabelMap gt = read_labels_any(o.gt_path);
    isf::MetricsRow row;
    row.image = fs::path(o.labels_path).filename().string();
    row.method = "-";
    row.k = labels.max_label();
    row.alpha = 0.0;
    row.br = isf::boundary_recall(labels, gt, o.br_radius);
    row.ue = isf::undersegmentation_error(labels, gt);
    row.dice = object_dice(labels, gt);
    row.seconds = 0.0;
    std::cout << isf::write_metrics_csv({row});
    return kExitOk;
}

struct BenchOpts {
    std::string input, method = "mix-mean", gt_path, gt_dir;
    std::vector<int> ks{500};
    std::vector<double> alphas{0.5};
    int repeat = 1;
    int iters = 10;
    int br_radius = 2;
};

int cmd_bench(const BenchOpts& o) {
    std::vector<std::string> inputs;
    if (fs::is_directory(o.input)) {
        for (const auto& e : fs::directory_iterator(o.input)) {
            const std::string ext = e.path().extension().string();
            if (e.is_regular_file() &&
                (ext == ".ppm" || ext == ".pgm" || ext == ".pnm" || ext == ".isf3"))
                inputs.push_back(e.path().string());
        }
        std::sort(inputs.begin(), inputs.end());
    } else {
        inputs.push_back(o.input);
    }
    if (inputs.empty()) throw std::runtime_error("bench: no inputs found");

    std::vector<isf::MetricsRow> rows;
    for (const std::string& path : inputs) {
        const isf::Lattice lat = read_image_any(path);  // outside the timer
        std::optional<isf::LabelMap> gt;
        if (!o.gt_path.empty()) {
            gt = read_labels_any(o.gt_path);
        } else if (!o.gt_dir.empty()) {
            const fs::path cand = fs::path(o.gt_dir) / fs::path(path).filename();
            if (fs::exists(cand)) gt = read_labels_any(cand.string());
        }
        for (int k : o.ks)
            for (double alpha : o.alphas) {
                isf::IsfConfig cfg = isf::IsfConfig::preset(
                    kMethods.at(o.method), k, alpha, 12.0, o.iters);
                double total = 0.0;
                isf::IsfResult r;
                for (int rep = 0; rep < o.repeat; ++rep) {
                    const auto t0 = std::chrono::steady_clock::now();
                    r = isf_run(lat, cfg);  // the timer brackets only this call
                    total += std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
                }
                isf::MetricsRow row;
                row.image = fs::path(path).filename().string();
                row.method = o.method;
                row.k = k;
                row.alpha = alpha;
                row.seconds = total / o.repeat;
                if (gt) {
                    row.br = isf::boundary_recall(r.labels, *gt, o.br_radius);
                    row.ue = isf::undersegmentation_error(r.labels, *gt);
                    row.dice = object_dice(r.labels, *gt);
                }
                rows.push_back(row);
            }
    }
    std::cout << isf::write_metrics_csv(rows);
    return kExitOk;
}

struct SkyOpts {
    std::string input, out;
    int k = 0;
    double alpha = 0.08;
    double threshold = 0.0;
    int iters = 10;
};

int cmd_sky(const SkyOpts& o) {
    const isf::Lattice lat = read_image_any(o.input);
    if (lat.ndim() != 2 || lat.channels() != 3)
        throw std::invalid_argument("sky: requires a 2D color image");
    isf::IsfConfig cfg =
        isf::IsfConfig::preset(isf::Preset::MixMean, o.k, o.alpha, 12.0, o.iters);
    const isf::IsfResult r = isf_run(lat, cfg);
    const std::vector<isf::Lab> means = isf::superpixel_mean_colors(lat, r.labels);
    const std::vector<int> region = isf::merge_regions(r.labels, means, o.threshold);
    const std::vector<std::uint8_t> mask = isf::sky_mask(r.labels, region);
    isf::write_file(o.out, isf::write_pgm8(lat.dim(0), lat.dim(1), mask));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Iterative spanning forest superpixels"};
    app.require_subcommand(1);

    SegmentOpts seg;
    CLI::App* s = app.add_subcommand("segment", "Segment an image or volume");
    s->add_option("--input", seg.input, "Input P5/P6 PNM image or ISF3 volume")
        ->required();
    s->add_option("--method", seg.method, "Method preset")
        ->check(CLI::IsMember(
            {"grid-root", "mix-root", "grid-mean", "mix-mean", "regmin"}));
    s->add_option("--superpixels", seg.k, "Requested superpixel count")
        ->required();
    s->add_option("--alpha", seg.alpha, "Color weight");
    s->add_option("--beta", seg.beta, "Color exponent");
    s->add_option("--iters", seg.iters, "Iterations");
    s->add_option("--labels", seg.labels_out, "Label map output path")
        ->required();
    s->add_option("--overlay", seg.overlay_out, "Boundary overlay output path");
    s->add_option("--gt", seg.gt_path, "Ground-truth label map");
    s->add_option("--seed-dump", seg.seed_dump, "Per-iteration seed CSV path");
    s->add_option("--br-radius", seg.br_radius, "Boundary recall radius");
    s->add_flag("--verbose", seg.verbose, "Print diagnostics to stderr");

    MetricsOpts met;
    CLI::App* m = app.add_subcommand("metrics", "Evaluate a saved label map");
    m->add_option("--labels", met.labels_path, "Label map")->required();
    m->add_option("--gt", met.gt_path, "Ground-truth label map")->required();
    m->add_option("--br-radius", met.br_radius, "Boundary recall radius");

    BenchOpts ben;
    CLI::App* b = app.add_subcommand("bench", "Timing and metric sweeps");
    b->add_option("--input", ben.input, "Image file or directory")->required();
    b->add_option("--method", ben.method, "Method preset")
        ->check(CLI::IsMember(
            {"grid-root", "mix-root", "grid-mean", "mix-mean", "regmin"}));
    b->add_option("--superpixels", ben.ks, "Superpixel counts")->delimiter(',');
    b->add_option("--alpha", ben.alphas, "Color weights")->delimiter(',');
    b->add_option("--repeat", ben.repeat, "Timing repetitions");
    b->add_option("--iters", ben.iters, "Iterations");
    b->add_option("--gt", ben.gt_path, "Ground truth for a single input");
    b->add_option("--gt-dir", ben.gt_dir, "Directory of ground-truth maps");
    b->add_option("--br-radius", ben.br_radius, "Boundary recall radius");

    SkyOpts sky;
    CLI::App* y = app.add_subcommand("sky", "Extract the sky region");
    y->add_option("--input", sky.input, "Input P6 PNM image")->required();
    y->add_option("--superpixels", sky.k, "Requested superpixel count")
        ->required();
    y->add_option("--alpha", sky.alpha, "Color weight");
    y->add_option("--threshold", sky.threshold, "Lab merge threshold")
        ->required();
    y->add_option("--iters", sky.iters, "Iterations");
    y->add_option("--out", sky.out, "Sky mask output path (P5)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (s->parsed()) return cmd_segment(seg);
        if (m->parsed()) return cmd_metrics(met);
        if (b->parsed()) return cmd_bench(ben);
        if (y->parsed()) return cmd_sky(sky);
    } catch (const isf::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUnreadable;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::logic_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUnreadable;
    }
    return kExitUsage;
}
