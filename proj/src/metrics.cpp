#include "fieldnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace fieldnet {

const char* to_string(NetworkKind kind) {
    switch (kind) {
        case NetworkKind::CoGig: return "cogig";
        case NetworkKind::CoVenue: return "covenue";
        case NetworkKind::CoLabel: return "colabel";
        case NetworkKind::CoStyle: return "costyle";
    }
    return "?";
}

FactKind fact_kind_of(NetworkKind kind) {
    switch (kind) {
        case NetworkKind::CoGig: return FactKind::Gig;
        case NetworkKind::CoVenue: return FactKind::Venue;
        case NetworkKind::CoLabel: return FactKind::Label;
        case NetworkKind::CoStyle: return FactKind::Style;
    }
    return FactKind::Gig;
}

namespace metrics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using HeapEntry = std::pair<double, std::uint32_t>;
using MinHeap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>>;

// Dijkstra with edge cost 1/similarity.
void shortest_paths(const ProjectedGraph& g, std::uint32_t source,
                    std::vector<double>& dist) {
    dist.assign(g.node_count(), kInf);
    dist[source] = 0.0;
    MinHeap heap;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) continue;
        for (const auto& [u, w] : g.adj[v]) {
            const double nd = d + 1.0 / w;
            if (nd < dist[u]) {
                dist[u] = nd;
                heap.emplace(nd, u);
            }
        }
    }
}

double closeness_of(const ProjectedGraph& g, std::uint32_t v,
                    std::vector<double>& dist, const Options& opts) {
    const std::size_t n = g.node_count();
    if (n < 2) return 0.0;
    shortest_paths(g, v, dist);
    double sum = 0.0;
    std::size_t reached = 0;
    for (std::size_t u = 0; u < n; ++u) {
        if (u == v || dist[u] == kInf) continue;
        sum += dist[u];
        ++reached;
    }
    if (reached == 0 || sum <= 0.0) return 0.0;
    const double r = static_cast<double>(reached);
    const double inv_mean = r / sum;
    if (!opts.component_scaled_closeness) return inv_mean;
    return r / static_cast<double>(n - 1) * inv_mean;
}

// Brandes dependency vector for one source.
void brandes_source(const ProjectedGraph& g, std::uint32_t source,
                    std::vector<double>& dist, std::vector<double>& sigma,
                    std::vector<double>& delta,
                    std::vector<std::vector<std::uint32_t>>& preds,
                    std::vector<std::uint32_t>& order) {
    const std::size_t n = g.node_count();
    dist.assign(n, kInf);
    sigma.assign(n, 0.0);
    delta.assign(n, 0.0);
    for (auto& p : preds) p.clear();
    order.clear();

    dist[source] = 0.0;
    sigma[source] = 1.0;
    MinHeap heap;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) continue;
        order.push_back(v);
        for (const auto& [u, w] : g.adj[v]) {
            const double nd = d + 1.0 / w;
            if (nd < dist[u]) {
                dist[u] = nd;
                sigma[u] = sigma[v];
                preds[u].assign(1, v);
                heap.emplace(nd, u);
            } else if (nd == dist[u]) {
                sigma[u] += sigma[v];
                preds[u].push_back(v);
            }
        }
    }

    for (std::size_t i = order.size(); i-- > 1;) {
        const std::uint32_t v = order[i];
        const double share = (1.0 + delta[v]) / sigma[v];
        for (const std::uint32_t p : preds[v]) delta[p] += sigma[p] * share;
    }
    delta[source] = 0.0;
}

struct BrandesScratch {
    std::vector<double> dist, sigma, delta;
    std::vector<std::vector<std::uint32_t>> preds;
    std::vector<std::uint32_t> order;

    explicit BrandesScratch(std::size_t n) : preds(n) {}
};

// Barrat coefficient: closed neighbor pairs weighted by the mean of the two
// spokes, against strength * (k-1). Equals the Watts-Strogatz value at
// uniform weights.
double clustering_of(const ProjectedGraph& g, std::uint32_t v) {
    const auto& nbrs = g.adj[v];
    const std::size_t k = nbrs.size();
    if (k < 2) return 0.0;
    double strength = 0.0;
    for (const auto& [u, w] : nbrs) strength += w;
    if (strength <= 0.0) return 0.0;
    double pair_sum = 0.0;
    for (std::size_t i = 0; i < nbrs.size(); ++i)
        for (std::size_t j = i + 1; j < nbrs.size(); ++j)
            if (g.weight(nbrs[i].first, nbrs[j].first) != 0.0)
                pair_sum += nbrs[i].second + nbrs[j].second;
    return pair_sum / (static_cast<double>(k - 1) * strength);
}

}  // namespace

std::vector<double> closeness(const ProjectedGraph& g, const Options& opts) {
    const std::size_t n = g.node_count();
    std::vector<double> out(n, 0.0);
#pragma omp parallel
    {
        std::vector<double> dist;
#pragma omp for schedule(dynamic, 16)
        for (std::int64_t v = 0; v < static_cast<std::int64_t>(n); ++v)
            out[v] = closeness_of(g, static_cast<std::uint32_t>(v), dist, opts);
    }
    return out;
}

std::vector<double> betweenness(const ProjectedGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<double> out(n, 0.0);
    if (n == 0) return out;

    // Sources are processed in blocks; each block's dependency vectors are
    // merged in source order, so totals do not depend on the thread count.
    constexpr std::size_t kBlock = 64;
    std::vector<std::vector<double>> block(std::min(kBlock, n));

    for (std::size_t base = 0; base < n; base += kBlock) {
        const std::size_t count = std::min(kBlock, n - base);
#pragma omp parallel
        {
            BrandesScratch scratch(n);
#pragma omp for schedule(dynamic, 4)
            for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
                brandes_source(g, static_cast<std::uint32_t>(base + i), scratch.dist,
                               scratch.sigma, scratch.delta, scratch.preds,
                               scratch.order);
                block[i] = scratch.delta;
            }
        }
        for (std::size_t i = 0; i < count; ++i)
            for (std::size_t v = 0; v < n; ++v) out[v] += block[i][v];
    }

    // Undirected: every pair was counted from both endpoints.
    for (auto& b : out) b /= 2.0;
    return out;
}

std::vector<int> coreness(const ProjectedGraph& g) {
    // Peeling on the binarized graph (Batagelj-Zaversnik bucket version).
    const std::size_t n = g.node_count();
    std::vector<int> degree(n);
    std::size_t max_degree = 0;
    for (std::size_t v = 0; v < n; ++v) {
        degree[v] = static_cast<int>(g.adj[v].size());
        max_degree = std::max(max_degree, g.adj[v].size());
    }

    std::vector<std::uint32_t> bucket_start(max_degree + 2, 0);
    for (std::size_t v = 0; v < n; ++v) ++bucket_start[degree[v] + 1];
    for (std::size_t d = 1; d < bucket_start.size(); ++d)
        bucket_start[d] += bucket_start[d - 1];

    std::vector<std::uint32_t> position(n), vertices(n);
    {
        std::vector<std::uint32_t> fill(bucket_start.begin(), bucket_start.end() - 1);
        for (std::uint32_t v = 0; v < n; ++v) {
            position[v] = fill[degree[v]]++;
            vertices[position[v]] = v;
        }
    }

    std::vector<int> core(degree);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t v = vertices[i];
        for (const auto& [u, w] : g.adj[v]) {
            if (core[u] <= core[v]) continue;
            // Swap u with the first vertex of its degree bucket, shrink bucket.
            const std::uint32_t pu = position[u];
            const std::uint32_t pw = bucket_start[core[u]];
            const std::uint32_t head = vertices[pw];
            if (u != head) {
                std::swap(vertices[pu], vertices[pw]);
                position[u] = pw;
                position[head] = pu;
            }
            ++bucket_start[core[u]];
            --core[u];
        }
    }
    return core;
}

std::vector<double> clustering(const ProjectedGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<double> out(n, 0.0);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t v = 0; v < static_cast<std::int64_t>(n); ++v)
        out[v] = clustering_of(g, static_cast<std::uint32_t>(v));
    return out;
}

namespace serial {

std::vector<double> closeness(const ProjectedGraph& g, const Options& opts) {
    const std::size_t n = g.node_count();
    std::vector<double> out(n, 0.0);
    std::vector<double> dist;
    for (std::uint32_t v = 0; v < n; ++v) out[v] = closeness_of(g, v, dist, opts);
    return out;
}

std::vector<double> betweenness(const ProjectedGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<double> out(n, 0.0);
    BrandesScratch scratch(n);
    for (std::uint32_t s = 0; s < n; ++s) {
        brandes_source(g, s, scratch.dist, scratch.sigma, scratch.delta, scratch.preds,
                       scratch.order);
        for (std::size_t v = 0; v < n; ++v) out[v] += scratch.delta[v];
    }
    for (auto& b : out) b /= 2.0;
    return out;
}

std::vector<int> coreness(const ProjectedGraph& g) { return metrics::coreness(g); }

std::vector<double> clustering(const ProjectedGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<double> out(n, 0.0);
    for (std::uint32_t v = 0; v < n; ++v) out[v] = clustering_of(g, v);
    return out;
}

}  // namespace serial

}  // namespace metrics

std::vector<PositionVector> position_vectors(const ProjectedGraph& g, NetworkKind kind,
                                             int year, const metrics::Options& opts) {
    const auto close = metrics::closeness(g, opts);
    const auto core = metrics::coreness(g);
    const auto between = metrics::betweenness(g);
    const auto cluster = metrics::clustering(g);

    std::vector<PositionVector> out(g.node_count());
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        out[v] = PositionVector{g.nodes[v], kind,       year,        close[v],
                                core[v],    between[v], cluster[v]};
    }
    return out;
}

}  // namespace fieldnet
