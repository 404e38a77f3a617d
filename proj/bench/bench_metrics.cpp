// Compares the serial reference kernels with their OpenMP counterparts on a
// synthetic projected network.
//
//   fieldnet_bench [n_nodes] [avg_degree] [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#else
static int omp_get_max_threads() { return 1; }
#endif

#include "fieldnet/graph.hpp"
#include "fieldnet/metrics.hpp"
#include "fieldnet/rng.hpp"

namespace {

using fieldnet::ProjectedGraph;

ProjectedGraph random_graph(std::size_t n, double avg_degree, std::uint64_t seed) {
    ProjectedGraph g;
    g.nodes.resize(n);
    g.adj.resize(n);
    for (std::size_t v = 0; v < n; ++v) g.nodes[v] = "n" + std::to_string(v);

    fieldnet::Rng rng(seed);
    const std::size_t n_edges = static_cast<std::size_t>(n * avg_degree / 2.0);
    for (std::size_t e = 0; e < n_edges; ++e) {
        const auto a = static_cast<std::uint32_t>(rng.below(n));
        const auto b = static_cast<std::uint32_t>(rng.below(n));
        if (a == b) continue;
        const double w = 0.25 * (1.0 + rng.below(8));
        g.adj[a].emplace_back(b, w);
        g.adj[b].emplace_back(a, w);
    }
    for (auto& row : g.adj) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end(),
                              [](const auto& x, const auto& y) {
                                  return x.first == y.first;
                              }),
                  row.end());
    }
    return g;
}

template <class F>
double time_ms(F&& body, int repeats) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        body();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best,
                        std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void report(const char* name, double serial_ms, double parallel_ms, bool equal) {
    std::printf("%-12s %10.2f ms %10.2f ms %8.2fx   %s\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms, equal ? "match" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 2000;
    const double degree = argc > 2 ? std::strtod(argv[2], nullptr) : 12.0;
    const int repeats = argc > 3 ? std::atoi(argv[3]) : 3;

    const ProjectedGraph g = random_graph(n, degree, 99);
    std::printf("nodes=%zu edges=%zu threads=%d repeats=%d\n", g.node_count(),
                g.edge_count(), omp_get_max_threads(), repeats);
    std::printf("%-12s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

    namespace fm = fieldnet::metrics;

    std::vector<double> serial_d, parallel_d;
    serial_d = fm::serial::closeness(g);
    double s = time_ms([&] { serial_d = fm::serial::closeness(g); }, repeats);
    double p = time_ms([&] { parallel_d = fm::closeness(g); }, repeats);
    report("closeness", s, p, serial_d == parallel_d);

    s = time_ms([&] { serial_d = fm::serial::betweenness(g); }, repeats);
    p = time_ms([&] { parallel_d = fm::betweenness(g); }, repeats);
    report("betweenness", s, p, serial_d == parallel_d);

    s = time_ms([&] { serial_d = fm::serial::clustering(g); }, repeats);
    p = time_ms([&] { parallel_d = fm::clustering(g); }, repeats);
    report("clustering", s, p, serial_d == parallel_d);

    // Projection benchmark reuses the random graph as a bipartite incidence
    // structure: facts = nodes, edges = fact memberships.
    fieldnet::BipartiteGraph bg;
    bg.kind = fieldnet::FactKind::Venue;
    bg.musicians = g.nodes;
    bg.facts.resize(n / 4);
    bg.fact_edges.resize(bg.facts.size());
    fieldnet::Rng rng(7);
    for (std::size_t f = 0; f < bg.facts.size(); ++f) {
        bg.facts[f] = "f" + std::to_string(f);
        for (int k = 0; k < 8; ++k)
            bg.fact_edges[f].emplace_back(static_cast<std::uint32_t>(rng.below(n)),
                                          1.0);
        std::sort(bg.fact_edges[f].begin(), bg.fact_edges[f].end());
        bg.fact_edges[f].erase(
            std::unique(bg.fact_edges[f].begin(), bg.fact_edges[f].end(),
                        [](const auto& a, const auto& b) { return a.first == b.first; }),
            bg.fact_edges[f].end());
    }
    const auto norm = fieldnet::normalize(bg);
    fieldnet::ProjectedGraph ps, pp;
    s = time_ms([&] { ps = fieldnet::serial::project(norm); }, repeats);
    p = time_ms([&] { pp = fieldnet::project(norm); }, repeats);
    report("projection", s, p, ps.adj == pp.adj);

    return 0;
}
