#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "isf/connectivity.hpp"
#include "isf/gradient.hpp"
#include "isf/lattice.hpp"
#include "isf/metrics.hpp"
#include "isf/queue.hpp"
#include "isf/seeding.hpp"

namespace isf {

enum class SiteState : std::uint8_t { White = 0, Gray = 1, Black = 2 };

// The five maps of one spanning-forest pass: optimal cost C, predecessor P
// (-1 at roots), root R, label L, and queue state S.
struct ForestState {
    std::vector<double> cost;
    std::vector<SiteIndex> pred;
    std::vector<SiteIndex> root;
    std::vector<std::int32_t> label;
    std::vector<SiteState> state;
    int k = 0;

    SiteIndex size() const { return SiteIndex(cost.size()); }
};

enum class QueueKind { Auto, BinaryHeap, LazyHeap, Bucket };

namespace detail {

template <class Queue>
void run_pass(Queue& q, const Lattice& lat, const Adjacency& adj,
              const SeedSet& seeds, const PathCostSpec& spec,
              ForestState& f, std::vector<SiteIndex>* extraction_order) {
    const SiteIndex n = lat.size();
    const int w = lat.dim(0), h = lat.dim(1);
    const int d = lat.ndim() == 3 ? lat.dim(2) : 1;

    // Reference color per seed: the seed pixel's own color for the
    // root-referenced rule, the carried mean color otherwise.
    std::vector<Lab> ref(seeds.seeds.size());
    std::vector<std::int32_t> seed_of(std::size_t(n), -1);
    for (std::size_t j = 0; j < seeds.seeds.size(); ++j) {
        const SiteIndex s = lat.index_of(seeds.seeds[j]);
        ref[j] = spec.variant == CostVariant::RootColor ? lat.color(s)
                                                        : seeds.ref_colors[j];
        seed_of[s] = std::int32_t(j);
    }

    for (std::size_t j = 0; j < seeds.seeds.size(); ++j) {
        const SiteIndex s = lat.index_of(seeds.seeds[j]);
        f.cost[s] = 0.0;
        f.label[s] = std::int32_t(j) + 1;
        f.state[s] = SiteState::Gray;
        q.push(s, 0.0);
    }

    struct Step {
        int dx, dy, dz;
        SiteIndex delta;
        double len;
    };
    std::vector<Step> steps;
    for (std::size_t i = 0; i < adj.offsets.size(); ++i) {
        const Coord& o = adj.offsets[i];
        steps.push_back({o.x, o.y, o.z,
                         SiteIndex(o.x + std::int64_t(w) * (o.y + std::int64_t(h) * o.z)),
                         adj.steps[i]});
    }

    const bool gradient_rule = spec.variant == CostVariant::GradientMax;
    const GradientMap* grad = spec.gradient;

    while (!q.empty()) {
        const SiteIndex s = q.pop();
        f.state[s] = SiteState::Black;
        if (extraction_order) extraction_order->push_back(s);

        const int x = int(s % w);
        const int y = int((s / w) % h);
        const int z = int(s / (std::int64_t(w) * h));
        const double cost_s = f.cost[s];
        const Lab& ref_s = ref[seed_of[f.root[s]]];

        for (const Step& st : steps) {
            const int tx = x + st.dx, ty = y + st.dy, tz = z + st.dz;
            if (tx < 0 || tx >= w || ty < 0 || ty >= h || tz < 0 || tz >= d)
                continue;
            const SiteIndex t = s + st.delta;
            if (f.state[t] == SiteState::Black) continue;

            double c;
            if (gradient_rule) {
                const double g = double(grad->at(t));
                c = cost_s > g ? cost_s : g;
            } else {
                c = cost_s +
                    detail::pow_beta(lab_dist(lat.color(t), ref_s) * spec.alpha,
                                     spec.beta) +
                    st.len;
            }
            if (c < f.cost[t]) {
                f.pred[t] = s;
                f.root[t] = f.root[s];
                f.cost[t] = c;
                f.label[t] = f.label[s];
                if (f.state[t] == SiteState::Gray) {
                    q.update(t, c);
                } else {
                    q.push(t, c);
                    f.state[t] = SiteState::Gray;
                }
            }
        }
    }
}

inline void check_seeds(const Lattice& lat, const SeedSet& seeds) {
    if (seeds.seeds.empty())
        throw std::invalid_argument("ift_pass: empty seed set");
    if (seeds.seeds.size() != seeds.ref_colors.size())
        throw std::invalid_argument("ift_pass: seeds/ref_colors size mismatch");
    std::set<SiteIndex> seen;
    for (const Coord& c : seeds.seeds) {
        if (!lat.in_bounds(c))
            throw std::invalid_argument("ift_pass: seed out of bounds");
        if (!seen.insert(lat.index_of(c)).second)
            throw std::invalid_argument("ift_pass: duplicate seed");
    }
}

}  // namespace detail

// One ordered-propagation pass: grows a spanning forest from the seeds under
// the given path-cost rule. Extractions follow non-decreasing cost with
// first-in-first-out tie breaking; integer gradient costs route to the
// bucket queue by default.
inline ForestState ift_pass(const Lattice& lat, const Adjacency& adj,
                            const SeedSet& seeds, const PathCostSpec& spec,
                            QueueKind queue = QueueKind::Auto,
                            std::vector<SiteIndex>* extraction_order = nullptr) {
    spec.validate();
    detail::check_seeds(lat, seeds);

    const SiteIndex n = lat.size();
    ForestState f;
    f.cost.assign(std::size_t(n), kInfiniteCost);
    f.pred.assign(std::size_t(n), -1);
    f.root.resize(std::size_t(n));
    for (SiteIndex i = 0; i < n; ++i) f.root[i] = i;
    f.label.assign(std::size_t(n), 0);
    f.state.assign(std::size_t(n), SiteState::White);
    f.k = seeds.count();

    if (queue == QueueKind::Auto)
        queue = spec.variant == CostVariant::GradientMax ? QueueKind::Bucket
                                                         : QueueKind::BinaryHeap;
    switch (queue) {
        case QueueKind::BinaryHeap: {
            HeapQueue q(n);
            detail::run_pass(q, lat, adj, seeds, spec, f, extraction_order);
            break;
        }
        case QueueKind::LazyHeap: {
            LazyHeapQueue q(n);
            detail::run_pass(q, lat, adj, seeds, spec, f, extraction_order);
            break;
        }
        case QueueKind::Bucket: {
            if (spec.variant != CostVariant::GradientMax)
                throw std::invalid_argument("bucket queue requires integer costs");
            BucketQueue q(n, spec.gradient->maxval);
            detail::run_pass(q, lat, adj, seeds, spec, f, extraction_order);
            break;
        }
        case QueueKind::Auto:
            break;
    }
    return f;
}

// Sum of the cost map over all sites; every site must have been reached.
inline double functional_F(const ForestState& f) {
    double sum = 0.0;
    for (double c : f.cost) {
        if (!(c < kInfiniteCost))
            throw std::logic_error("functional_F: unreached site");
        sum += c;
    }
    return sum;
}

enum class SeedSampler { Grid, Mixed, RegMin };

enum class Preset { GridRoot, MixRoot, GridMean, MixMean, RegMin };

inline const char* preset_name(Preset p) {
    switch (p) {
        case Preset::GridRoot: return "grid-root";
        case Preset::MixRoot: return "mix-root";
        case Preset::GridMean: return "grid-mean";
        case Preset::MixMean: return "mix-mean";
        case Preset::RegMin: return "regmin";
    }
    return "?";
}

// Full run configuration. The factory binds the five method presets; the
// fields stay open so the sampling strategy, cost rule, and recomputation
// policy can also be combined freely.
struct IsfConfig {
    SeedSampler sampler = SeedSampler::Mixed;
    CostVariant variant = CostVariant::MeanColor;
    std::optional<RecomputePolicy> recompute = RecomputePolicy::CenterMedoid;
    int k = 0;
    double alpha = 0.5;
    double beta = 12.0;
    int max_iters = 10;
    int gradient_levels = 256;
    std::optional<AdjacencyKind> adjacency;  // derived from the lattice if unset
    QueueKind queue = QueueKind::Auto;

    static IsfConfig preset(Preset p, int k, double alpha = 0.5,
                            double beta = 12.0, int max_iters = 10) {
        IsfConfig c;
        c.k = k;
        c.alpha = alpha;
        c.beta = beta;
        c.max_iters = max_iters;
        switch (p) {
            case Preset::GridRoot:
                c.sampler = SeedSampler::Grid;
                c.variant = CostVariant::RootColor;
                c.recompute = RecomputePolicy::ColorMedoid;
                break;
            case Preset::MixRoot:
                c.sampler = SeedSampler::Mixed;
                c.variant = CostVariant::RootColor;
                c.recompute = RecomputePolicy::ColorMedoid;
                break;
            case Preset::GridMean:
                c.sampler = SeedSampler::Grid;
                c.variant = CostVariant::MeanColor;
                c.recompute = RecomputePolicy::CenterMedoid;
                break;
            case Preset::MixMean:
                c.sampler = SeedSampler::Mixed;
                c.variant = CostVariant::MeanColor;
                c.recompute = RecomputePolicy::CenterMedoid;
                break;
            case Preset::RegMin:
                c.sampler = SeedSampler::RegMin;
                c.variant = CostVariant::GradientMax;
                c.recompute = std::nullopt;
                c.max_iters = 1;
                break;
        }
        return c;
    }

    void validate() const {
        if (k < 1) throw std::invalid_argument("config: k < 1");
        if (max_iters < 1) throw std::invalid_argument("config: max_iters < 1");
        if (sampler == SeedSampler::RegMin &&
            (max_iters != 1 || variant != CostVariant::GradientMax ||
             recompute.has_value()))
            throw std::invalid_argument(
                "config: regional-minima sampling implies one gradient-rule "
                "pass with no recomputation");
    }
};

struct IsfDiagnostics {
    std::vector<double> functional;    // F per iteration
    std::vector<SeedSet> seeds;        // seed set used by each iteration
    std::vector<SiteIndex> changed;    // sites whose label changed
    std::vector<double> seconds;       // wall time of each pass
};

struct IsfResult {
    LabelMap labels;
    ForestState forest;
    SeedSet final_seeds;
    IsfDiagnostics diag;
    PathCostSpec spec;                  // gradient points into `gradient`
    std::optional<GradientMap> gradient;
};

// Called after each completed pass; used for per-iteration checks and dumps.
using IterationObserver =
    std::function<void(int iter, const ForestState&, const SeedSet&)>;

// The outer loop: sample seeds, run a pass, recompute seeds, repeat.
inline IsfResult isf_run(const Lattice& lat, const IsfConfig& config,
                         const IterationObserver& observer = {}) {
    config.validate();
    const Adjacency adj = config.adjacency
                              ? (*config.adjacency == AdjacencyKind::Six3D
                                     ? Adjacency::six_3d()
                                     : Adjacency::four_2d())
                              : Adjacency::for_dims(lat.ndim());
    if (int(adj.kind == AdjacencyKind::Six3D ? 3 : 2) != lat.ndim())
        throw std::invalid_argument("config: adjacency does not match lattice");

    IsfResult r;
    if (config.variant == CostVariant::GradientMax ||
        config.sampler == SeedSampler::RegMin)
        r.gradient = gradient_map(lat, adj, config.gradient_levels);

    SeedSet seeds;
    switch (config.sampler) {
        case SeedSampler::Grid:
            seeds = grid_sample(lat, config.k);
            break;
        case SeedSampler::Mixed:
            seeds = mixed_sample(lat, config.k);
            break;
        case SeedSampler::RegMin: {
            const MinimaSet minima = regional_minima(*r.gradient, lat, adj);
            seeds = regmin_seeds(lat, config.k, *r.gradient, minima);
            break;
        }
    }

    PathCostSpec spec{config.variant, config.alpha, config.beta,
                      r.gradient ? &*r.gradient : nullptr};

    std::vector<std::int32_t> prev_labels;
    for (int iter = 0; iter < config.max_iters; ++iter) {
        const auto t0 = std::chrono::steady_clock::now();
        r.forest = ift_pass(lat, adj, seeds, spec, config.queue);
        const auto t1 = std::chrono::steady_clock::now();

        r.diag.seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
        r.diag.functional.push_back(functional_F(r.forest));
        r.diag.seeds.push_back(seeds);
        SiteIndex changed = 0;
        if (prev_labels.empty()) {
            changed = lat.size();
        } else {
            for (SiteIndex i = 0; i < lat.size(); ++i)
                if (prev_labels[i] != r.forest.label[i])
                    ++changed;
        }
        r.diag.changed.push_back(changed);
        prev_labels = r.forest.label;

        if (observer) observer(iter, r.forest, seeds);

        if (iter + 1 < config.max_iters && config.recompute)
            seeds = recompute_seeds(lat, r.forest.label, seeds, *config.recompute);
    }

    r.final_seeds = std::move(seeds);
    r.spec = spec;
    if (lat.ndim() == 3)
        r.labels = LabelMap(lat.dim(0), lat.dim(1), lat.dim(2), r.forest.label);
    else
        r.labels = LabelMap(lat.dim(0), lat.dim(1), r.forest.label);
    return r;
}

// ForestState-based recomputation, matching the engine's own update step.
inline SeedSet recompute_seeds(const Lattice& lat, const ForestState& forest,
                               const SeedSet& prev, RecomputePolicy policy) {
    return recompute_seeds(lat, forest.label, prev, policy);
}

struct VerifyReport {
    bool acyclic = true;
    bool labels_consistent = true;
    bool connected = true;
    bool boundary_protected = true;
    bool roots_agree = true;
    std::string detail;

    bool ok() const {
        return acyclic && labels_consistent && connected &&
               boundary_protected && roots_agree;
    }
};

// Structural audit of a completed pass: predecessor acyclicity, label/root
// consistency along edges, one connected component per label, the cross-label
// cost inequality, and root/seed agreement. Failures are reported, not thrown.
inline VerifyReport verify_forest(const ForestState& f, const Lattice& lat,
                                  const Adjacency& adj,
                                  const PathCostSpec& spec,
                                  const SeedSet& seeds,
                                  double tolerance = 1e-9) {
    VerifyReport rep;
    const SiteIndex n = lat.size();
    auto fail = [&rep](bool& flag, const std::string& msg) {
        flag = false;
        if (rep.detail.empty()) rep.detail = msg;
    };

    // (a) predecessor chains terminate.
    {
        std::vector<std::uint8_t> mark(std::size_t(n), 0);  // 0 new, 1 open, 2 done
        std::vector<SiteIndex> chain;
        for (SiteIndex i = 0; i < n && rep.acyclic; ++i) {
            SiteIndex s = i;
            chain.clear();
            while (s >= 0 && mark[s] == 0) {
                mark[s] = 1;
                chain.push_back(s);
                s = f.pred[s];
            }
            if (s >= 0 && mark[s] == 1)
                fail(rep.acyclic, "predecessor cycle at site " + std::to_string(s));
            for (SiteIndex c : chain) mark[c] = 2;
        }
    }

    // (b) labels and roots propagate along predecessor edges.
    for (SiteIndex i = 0; i < n; ++i) {
        const SiteIndex p = f.pred[i];
        if (p < 0) {
            if (f.root[i] != i)
                fail(rep.labels_consistent,
                     "root of a predecessor-less site is not itself");
        } else if (f.label[i] != f.label[p] ||
                   f.root[i] != f.root[p]) {
            fail(rep.labels_consistent,
                 "label/root mismatch along edge into " + std::to_string(i));
        }
    }

    // (c) each label class is one connected component and covers every site.
    {
        std::vector<std::uint8_t> seen(std::size_t(n), 0);
        std::vector<SiteIndex> stack;
        std::vector<std::uint8_t> label_seen(std::size_t(f.k) + 1, 0);
        for (SiteIndex i = 0; i < n; ++i) {
            const std::int32_t l = f.label[i];
            if (l < 1 || l > f.k) {
                fail(rep.connected, "site " + std::to_string(i) + " unlabeled");
                continue;
            }
            if (seen[i]) continue;
            if (label_seen[l]) {
                fail(rep.connected,
                     "label " + std::to_string(l) + " is disconnected");
                continue;
            }
            label_seen[l] = 1;
            seen[i] = 1;
            stack.assign(1, i);
            while (!stack.empty()) {
                const SiteIndex s = stack.back();
                stack.pop_back();
                for (const auto& [nc, step] :
                     neighbors(lat, lat.coord_of(s), adj)) {
                    const SiteIndex t = lat.index_of(nc);
                    if (!seen[t] &&
                        f.label[t] == l) {
                        seen[t] = 1;
                        stack.push_back(t);
                    }
                }
            }
        }
    }

    // Reference color per seed site, as the pass resolved it.
    std::vector<std::int32_t> seed_of(std::size_t(n), -1);
    for (std::size_t j = 0; j < seeds.seeds.size(); ++j)
        seed_of[lat.index_of(seeds.seeds[j])] = std::int32_t(j);
    auto ref_of = [&](SiteIndex root) -> Lab {
        const std::int32_t j = seed_of[root];
        return spec.variant == CostVariant::RootColor
                   ? lat.color(root)
                   : seeds.ref_colors[j];
    };

    // (d) boundary protection across every cross-label adjacent pair.
    for (SiteIndex t = 0; t < n && rep.boundary_protected; ++t) {
        for (const auto& [nc, step] : neighbors(lat, lat.coord_of(t), adj)) {
            const SiteIndex s = lat.index_of(nc);
            if (f.label[s] == f.label[t]) continue;
            if (seed_of[f.root[s]] < 0) continue;
            const int g = spec.gradient ? spec.gradient->at(t) : 0;
            const double ext =
                extend_cost(spec, f.cost[s], lat.color(t),
                            ref_of(f.root[s]), step, g);
            if (f.cost[t] > ext + tolerance) {
                fail(rep.boundary_protected,
                     "cross-label cost violation at site " + std::to_string(t));
                break;
            }
        }
    }

    // (e) roots are exactly the seeds.
    for (std::size_t j = 0; j < seeds.seeds.size(); ++j) {
        const SiteIndex s = lat.index_of(seeds.seeds[j]);
        if (f.root[s] != s || f.pred[s] >= 0 ||
            f.cost[s] != 0.0 ||
            f.label[s] != std::int32_t(j) + 1)
            fail(rep.roots_agree, "seed " + std::to_string(j) + " is not a root");
    }
    for (SiteIndex i = 0; i < n; ++i)
        if (seed_of[f.root[i]] < 0)
            fail(rep.roots_agree,
                 "site " + std::to_string(i) + " roots at a non-seed");

    return rep;
}

}  // namespace isf
