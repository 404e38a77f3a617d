#include "fieldnet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "fieldnet/errors.hpp"
#include "fieldnet/windowing.hpp"

namespace fieldnet {

namespace {

// String interner preserving first-appearance order.
struct Index {
    std::vector<std::string> ids;
    std::unordered_map<std::string, std::uint32_t> lookup;

    std::uint32_t intern(const std::string& id) {
        auto [it, inserted] = lookup.try_emplace(id, static_cast<std::uint32_t>(ids.size()));
        if (inserted) ids.push_back(id);
        return it->second;
    }
};

BipartiteGraph from_weight_maps(
    FactKind kind, Index&& musicians, Index&& facts,
    const std::vector<std::unordered_map<std::uint32_t, double>>& weights) {
    BipartiteGraph graph;
    graph.kind = kind;
    graph.musicians = std::move(musicians.ids);
    graph.facts = std::move(facts.ids);
    graph.fact_edges.resize(graph.facts.size());
    for (std::size_t f = 0; f < weights.size(); ++f) {
        auto& edges = graph.fact_edges[f];
        edges.assign(weights[f].begin(), weights[f].end());
        std::sort(edges.begin(), edges.end());
    }
    return graph;
}

}  // namespace

std::size_t BipartiteGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& edges : fact_edges) n += edges.size();
    return n;
}

std::size_t ProjectedGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& row : adj) n += row.size();
    return n / 2;
}

double ProjectedGraph::weight(std::uint32_t a, std::uint32_t b) const {
    const auto& row = adj[a];
    auto it = std::lower_bound(row.begin(), row.end(), b,
                               [](const auto& e, std::uint32_t v) { return e.first < v; });
    if (it != row.end() && it->first == b) return it->second;
    return 0.0;
}

std::vector<PerformanceRecord> filter_gigs(
    std::span<const PerformanceRecord> performances) {
    // Lineup size = distinct musicians per gig.
    std::unordered_map<std::string, std::unordered_set<std::string>> lineups;
    for (const auto& rec : performances) lineups[rec.gig_id].insert(rec.musician_id);
    if (lineups.empty()) return {};

    double mean = 0.0;
    for (const auto& [gig, lineup] : lineups) mean += static_cast<double>(lineup.size());
    mean /= static_cast<double>(lineups.size());
    double ss = 0.0;
    for (const auto& [gig, lineup] : lineups) {
        const double d = static_cast<double>(lineup.size()) - mean;
        ss += d * d;
    }
    const double sd =
        lineups.size() > 1 ? std::sqrt(ss / static_cast<double>(lineups.size() - 1)) : 0.0;
    const double cutoff = mean + 3.0 * sd;

    std::vector<PerformanceRecord> kept;
    kept.reserve(performances.size());
    for (const auto& rec : performances) {
        const auto size = static_cast<double>(lineups.at(rec.gig_id).size());
        if (size <= 1.0 || size > cutoff) continue;
        kept.push_back(rec);
    }
    return kept;
}

BipartiteGraph build_bipartite(std::span<const PerformanceRecord> records,
                               FactKind kind) {
    if (kind != FactKind::Gig && kind != FactKind::Venue)
        throw ValidationError("performance records build gig or venue networks");
    Index musicians, facts;
    std::vector<std::unordered_map<std::uint32_t, double>> weights;
    for (const auto& rec : records) {
        const std::uint32_t m = musicians.intern(rec.musician_id);
        const std::uint32_t f =
            facts.intern(kind == FactKind::Gig ? rec.gig_id : rec.venue_id);
        if (f >= weights.size()) weights.resize(f + 1);
        if (kind == FactKind::Gig)
            weights[f][m] = 1.0;  // a gig is a one-time event
        else
            weights[f][m] += 1.0;
    }
    return from_weight_maps(kind, std::move(musicians), std::move(facts), weights);
}

BipartiteGraph build_bipartite(std::span<const ReleaseRecord> records, FactKind kind) {
    if (kind != FactKind::Label && kind != FactKind::Style)
        throw ValidationError("release records build label or style networks");
    Index musicians, facts;
    std::vector<std::unordered_map<std::uint32_t, double>> weights;
    // Multi-style rows expand to one record per style; a label selection is
    // the release itself, so label weights count each release once.
    std::unordered_set<std::string> seen_releases;
    for (const auto& rec : records) {
        if (kind == FactKind::Label &&
            !seen_releases.insert(rec.musician_id + '\x1f' + rec.release_id + '\x1f' +
                                  rec.label_id)
                 .second)
            continue;
        const std::uint32_t m = musicians.intern(rec.musician_id);
        const std::uint32_t f =
            facts.intern(kind == FactKind::Label ? rec.label_id : rec.style_id);
        if (f >= weights.size()) weights.resize(f + 1);
        weights[f][m] += 1.0;
    }
    return from_weight_maps(kind, std::move(musicians), std::move(facts), weights);
}

BipartiteGraph prune_weak(const BipartiteGraph& graph) {
    if (graph.kind == FactKind::Gig)
        throw ValidationError("gig networks are filtered by lineup size, not pruned");

    BipartiteGraph out;
    out.kind = graph.kind;

    std::vector<std::vector<std::pair<std::uint32_t, double>>> kept(graph.facts.size());
    std::vector<bool> musician_used(graph.musicians.size(), false);
    for (std::size_t f = 0; f < graph.fact_edges.size(); ++f) {
        for (const auto& [m, w] : graph.fact_edges[f]) {
            if (w < 2.0) continue;
            kept[f].emplace_back(m, w);
            musician_used[m] = true;
        }
    }

    std::vector<std::uint32_t> musician_map(graph.musicians.size(), 0);
    for (std::size_t m = 0; m < graph.musicians.size(); ++m) {
        if (!musician_used[m]) continue;
        musician_map[m] = static_cast<std::uint32_t>(out.musicians.size());
        out.musicians.push_back(graph.musicians[m]);
    }
    for (std::size_t f = 0; f < kept.size(); ++f) {
        if (kept[f].empty()) continue;
        out.facts.push_back(graph.facts[f]);
        auto& edges = out.fact_edges.emplace_back();
        edges.reserve(kept[f].size());
        for (const auto& [m, w] : kept[f]) edges.emplace_back(musician_map[m], w);
        std::sort(edges.begin(), edges.end());
    }
    return out;
}

BipartiteGraph normalize(const BipartiteGraph& graph) {
    BipartiteGraph out = graph;
    for (auto& edges : out.fact_edges) {
        double sum = 0.0;
        for (const auto& [m, w] : edges) sum += w;
        if (sum <= 0.0) continue;
        for (auto& [m, w] : edges) w /= sum;
    }
    return out;
}

double max_fact_sum_error(const BipartiteGraph& graph) {
    double worst = 0.0;
    for (const auto& edges : graph.fact_edges) {
        if (edges.empty()) continue;
        double sum = 0.0;
        for (const auto& [m, w] : edges) sum += w;
        worst = std::max(worst, std::abs(sum - 1.0));
    }
    return worst;
}

namespace {

// One musician's projection row. Shared facts are visited in ascending fact
// index from both endpoints of a pair, so s(a,b) and s(b,a) accumulate the
// same products in the same order and come out bitwise equal.
void project_row(const BipartiteGraph& graph,
                 const std::vector<std::vector<std::pair<std::uint32_t, double>>>&
                     musician_facts,
                 std::uint32_t a, std::vector<double>& acc,
                 std::vector<std::uint32_t>& touched,
                 std::vector<std::pair<std::uint32_t, double>>& row) {
    for (const auto& [f, wa] : musician_facts[a]) {
        for (const auto& [b, wb] : graph.fact_edges[f]) {
            if (b == a) continue;
            if (acc[b] == 0.0) touched.push_back(b);
            acc[b] += wa * wb;
        }
    }
    std::sort(touched.begin(), touched.end());
    row.clear();
    row.reserve(touched.size());
    for (const std::uint32_t b : touched) {
        if (acc[b] != 0.0) row.emplace_back(b, acc[b]);
        acc[b] = 0.0;
    }
    touched.clear();
}

std::vector<std::vector<std::pair<std::uint32_t, double>>> facts_per_musician(
    const BipartiteGraph& graph) {
    std::vector<std::vector<std::pair<std::uint32_t, double>>> out(
        graph.musicians.size());
    for (std::size_t f = 0; f < graph.fact_edges.size(); ++f)
        for (const auto& [m, w] : graph.fact_edges[f])
            out[m].emplace_back(static_cast<std::uint32_t>(f), w);
    return out;  // fact indices ascending by construction
}

}  // namespace

ProjectedGraph project(const BipartiteGraph& graph) {
    ProjectedGraph out;
    out.nodes = graph.musicians;
    const std::size_t n = out.nodes.size();
    out.adj.resize(n);
    const auto musician_facts = facts_per_musician(graph);

#pragma omp parallel
    {
        std::vector<double> acc(n, 0.0);
        std::vector<std::uint32_t> touched;
#pragma omp for schedule(dynamic, 64)
        for (std::int64_t a = 0; a < static_cast<std::int64_t>(n); ++a)
            project_row(graph, musician_facts, static_cast<std::uint32_t>(a), acc,
                        touched, out.adj[a]);
    }
    return out;
}

namespace serial {

ProjectedGraph project(const BipartiteGraph& graph) {
    ProjectedGraph out;
    out.nodes = graph.musicians;
    const std::size_t n = out.nodes.size();
    out.adj.resize(n);
    const auto musician_facts = facts_per_musician(graph);

    std::vector<double> acc(n, 0.0);
    std::vector<std::uint32_t> touched;
    for (std::uint32_t a = 0; a < n; ++a)
        project_row(graph, musician_facts, a, acc, touched, out.adj[a]);
    return out;
}

}  // namespace serial

WindowNetwork build_window_network(std::span<const PerformanceRecord> performances,
                                   std::span<const ReleaseRecord> releases,
                                   FactKind kind, YearRange window) {
    BipartiteGraph raw;
    if (kind == FactKind::Gig) {
        const auto sliced = slice(performances, window);
        const auto filtered = filter_gigs(sliced);
        raw = build_bipartite(std::span<const PerformanceRecord>(filtered), kind);
    } else if (kind == FactKind::Venue) {
        const auto sliced = slice(performances, window);
        raw = prune_weak(
            build_bipartite(std::span<const PerformanceRecord>(sliced), kind));
    } else {
        const auto sliced = slice(releases, window);
        raw = prune_weak(build_bipartite(std::span<const ReleaseRecord>(sliced), kind));
    }
    WindowNetwork net;
    net.bipartite = normalize(raw);
    net.projected = project(net.bipartite);
    return net;
}

}  // namespace fieldnet
