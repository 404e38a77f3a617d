// Brute-force reference computations for tests. Everything here is written
// independently of the library kernels: path measures by exhaustive simple-
// path enumeration, coreness by literal peeling, the projection by a triple
// loop over dense weight tables.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <tuple>
#include <map>
#include <string>
#include <vector>

#include "fieldnet/graph.hpp"
#include "fieldnet/rng.hpp"

namespace oracle {

using fieldnet::ProjectedGraph;

inline ProjectedGraph graph_from_edges(
    std::size_t n, const std::vector<std::tuple<int, int, double>>& edges) {
    ProjectedGraph g;
    g.nodes.resize(n);
    g.adj.resize(n);
    for (std::size_t v = 0; v < n; ++v) g.nodes[v] = "n" + std::to_string(v);
    for (const auto& [a, b, w] : edges) {
        g.adj[a].emplace_back(b, w);
        g.adj[b].emplace_back(a, w);
    }
    for (auto& row : g.adj) std::sort(row.begin(), row.end());
    return g;
}

// Random graph on <= max_nodes nodes with dyadic weights, so path costs and
// their ties are exact in double arithmetic.
inline ProjectedGraph random_graph(fieldnet::Rng& rng, int max_nodes,
                                   bool unit_weights) {
    const int n = 2 + static_cast<int>(rng.below(max_nodes - 1));
    std::vector<std::tuple<int, int, double>> edges;
    static constexpr double kWeights[] = {0.25, 0.5, 1.0, 2.0, 4.0};
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            if (!rng.bernoulli(0.45)) continue;
            const double w = unit_weights ? 1.0 : kWeights[rng.below(5)];
            edges.emplace_back(a, b, w);
        }
    return graph_from_edges(n, edges);
}

struct PairPaths {
    double cost = std::numeric_limits<double>::infinity();
    long long count = 0;                 // shortest paths
    std::vector<long long> through;      // per node: shortest paths crossing it
};

// All-pairs shortest-path structure by exhaustive enumeration of simple
// paths. Usable for graphs up to ~8 nodes.
struct AllPairs {
    std::size_t n = 0;
    std::vector<std::vector<PairPaths>> pair;  // [s][t], s < t

    explicit AllPairs(const ProjectedGraph& g) : n(g.node_count()) {
        pair.assign(n, std::vector<PairPaths>(n));
        std::vector<bool> used(n, false);
        std::vector<int> path;
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t t = s + 1; t < n; ++t) {
                used.assign(n, false);
                path.clear();
                used[s] = true;
                path.push_back(static_cast<int>(s));
                walk(g, static_cast<int>(t), 0.0, used, path, pair[s][t]);
            }
    }

private:
    void walk(const ProjectedGraph& g, int target, double cost,
              std::vector<bool>& used, std::vector<int>& path, PairPaths& out) {
        const int v = path.back();
        if (v == target) {
            if (cost < out.cost) {
                out.cost = cost;
                out.count = 1;
                out.through.assign(n, 0);
                for (std::size_t i = 1; i + 1 < path.size(); ++i)
                    out.through[path[i]] = 1;
            } else if (cost == out.cost) {
                ++out.count;
                if (out.through.empty()) out.through.assign(n, 0);
                for (std::size_t i = 1; i + 1 < path.size(); ++i)
                    ++out.through[path[i]];
            }
            return;
        }
        for (const auto& [u, w] : g.adj[v]) {
            if (used[u]) continue;
            used[u] = true;
            path.push_back(static_cast<int>(u));
            walk(g, target, cost + 1.0 / w, used, path, out);
            path.pop_back();
            used[u] = false;
        }
    }
};

inline std::vector<double> closeness(const ProjectedGraph& g, const AllPairs& ap) {
    const std::size_t n = g.node_count();
    std::vector<double> out(n, 0.0);
    if (n < 2) return out;
    for (std::size_t v = 0; v < n; ++v) {
        double sum = 0.0;
        std::size_t reached = 0;
        for (std::size_t u = 0; u < n; ++u) {
            if (u == v) continue;
            const auto& pp = u < v ? ap.pair[u][v] : ap.pair[v][u];
            if (pp.count == 0) continue;
            sum += pp.cost;
            ++reached;
        }
        if (reached == 0 || sum <= 0.0) continue;
        const double r = static_cast<double>(reached);
        out[v] = r / static_cast<double>(n - 1) * (r / sum);
    }
    return out;
}

inline std::vector<double> betweenness(const ProjectedGraph& g, const AllPairs& ap) {
    const std::size_t n = g.node_count();
    std::vector<double> out(n, 0.0);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = s + 1; t < n; ++t) {
            const auto& pp = ap.pair[s][t];
            if (pp.count == 0) continue;
            for (std::size_t v = 0; v < n; ++v)
                if (!pp.through.empty() && pp.through[v] > 0)
                    out[v] += static_cast<double>(pp.through[v]) /
                              static_cast<double>(pp.count);
        }
    return out;
}

inline std::vector<int> peel_coreness(const ProjectedGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<int> core(n, 0);
    std::vector<bool> removed(n, false);
    auto live_degree = [&](std::size_t v) {
        int d = 0;
        for (const auto& [u, w] : g.adj[v])
            if (!removed[u]) ++d;
        return d;
    };
    for (int k = 0;; ++k) {
        // Remove everything of degree < k+1 iteratively; whatever is removed
        // in this round has coreness k.
        bool all_removed = true;
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t v = 0; v < n; ++v) {
                if (removed[v] || live_degree(v) > k) continue;
                removed[v] = true;
                core[v] = k;
                changed = true;
            }
        }
        for (std::size_t v = 0; v < n; ++v) all_removed = all_removed && removed[v];
        if (all_removed) break;
    }
    return core;
}

inline std::vector<double> barrat_clustering(const ProjectedGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<double> out(n, 0.0);
    // Dense weight table, independent of the adjacency search in the kernel.
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    for (std::size_t a = 0; a < n; ++a)
        for (const auto& [b, weight] : g.adj[a]) w[a][b] = weight;
    for (std::size_t v = 0; v < n; ++v) {
        std::vector<std::size_t> nbrs;
        double strength = 0.0;
        for (std::size_t u = 0; u < n; ++u)
            if (w[v][u] > 0.0) {
                nbrs.push_back(u);
                strength += w[v][u];
            }
        if (nbrs.size() < 2) continue;
        double sum = 0.0;
        for (std::size_t i = 0; i < nbrs.size(); ++i)
            for (std::size_t j = 0; j < nbrs.size(); ++j) {
                if (i == j || w[nbrs[i]][nbrs[j]] == 0.0) continue;
                sum += (w[v][nbrs[i]] + w[v][nbrs[j]]) / 2.0;
            }
        out[v] = sum / (static_cast<double>(nbrs.size() - 1) * strength);
    }
    return out;
}

// Dense prune -> normalize -> inner-product projection from raw selection
// counts, the reference for the bipartite pipeline.
struct DenseProjection {
    std::vector<std::string> musicians;
    std::map<std::pair<std::string, std::string>, double> similarity;
};

inline DenseProjection project_reference(
    const std::vector<std::string>& musicians, const std::vector<std::string>& facts,
    const std::map<std::pair<std::string, std::string>, double>& counts) {
    // prune: drop entries selected once
    std::map<std::pair<std::string, std::string>, double> kept;
    for (const auto& [key, w] : counts)
        if (w >= 2.0) kept[key] = w;
    // normalize columns
    std::map<std::string, double> fact_sum;
    for (const auto& [key, w] : kept) fact_sum[key.second] += w;
    std::map<std::pair<std::string, std::string>, double> norm;
    for (const auto& [key, w] : kept) norm[key] = w / fact_sum[key.second];

    DenseProjection out;
    out.musicians = musicians;
    for (const auto& a : musicians)
        for (const auto& b : musicians) {
            if (a >= b) continue;
            double s = 0.0;
            for (const auto& f : facts) {
                const auto ia = norm.find({a, f});
                const auto ib = norm.find({b, f});
                if (ia != norm.end() && ib != norm.end()) s += ia->second * ib->second;
            }
            if (s != 0.0) out.similarity[{a, b}] = s;
        }
    return out;
}

}  // namespace oracle
