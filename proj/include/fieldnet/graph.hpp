#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fieldnet/records.hpp"

namespace fieldnet {

// Weighted musician x fact incidence structure for one time window.
// Edges are stored per fact, sorted by musician index; zero weights are
// never stored. Musician and fact indices follow first appearance in the
// input records, so construction is deterministic.
struct BipartiteGraph {
    FactKind kind = FactKind::Gig;
    std::vector<std::string> musicians;  // index -> id
    std::vector<std::string> facts;      // index -> id
    std::vector<std::vector<std::pair<std::uint32_t, double>>> fact_edges;

    std::size_t edge_count() const;
};

// Symmetric musician-musician similarity network. adj[a] holds (b, s(a,b))
// sorted by b; both directions of an edge are stored.
struct ProjectedGraph {
    std::vector<std::string> nodes;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;

    std::size_t node_count() const { return nodes.size(); }
    std::size_t edge_count() const;
    double weight(std::uint32_t a, std::uint32_t b) const;  // 0 when absent
};

// Lineup-size filters for live events: drops gigs with a single musician
// and gigs whose lineup exceeds mean + 3 sd of the window's lineup sizes
// (both statistics taken before the singleton removal). Keeps record order.
std::vector<PerformanceRecord> filter_gigs(
    std::span<const PerformanceRecord> performances);

// w(m, gig) = 1; w(m, venue) = number of performances there.
BipartiteGraph build_bipartite(std::span<const PerformanceRecord> records,
                               FactKind kind);
// w(m, label) = number of distinct releases on it; w(m, style) = number of
// (release, style) selections.
BipartiteGraph build_bipartite(std::span<const ReleaseRecord> records,
                               FactKind kind);

// Removes edges with weight < 2, then facts and musicians left bare.
// Not defined for gig networks (their edges are unweighted by construction);
// throws ValidationError for FactKind::Gig.
BipartiteGraph prune_weak(const BipartiteGraph& graph);

// Rescales each fact column to sum to 1.
BipartiteGraph normalize(const BipartiteGraph& graph);

// Largest |column sum - 1| over facts with at least one edge.
double max_fact_sum_error(const BipartiteGraph& graph);

// Inner-product projection of a normalized bipartite graph:
// s(a,b) = sum_f w(a,f) * w(b,f), a != b. Runs row-parallel; results are
// identical to serial::project bit for bit (per-row accumulation order is
// fixed by fact index).
ProjectedGraph project(const BipartiteGraph& graph);

namespace serial {
ProjectedGraph project(const BipartiteGraph& graph);
}

// One window's preprocessing chain for a fact kind:
//   gig:            filter_gigs -> build -> normalize
//   venue/label/style: build -> prune_weak -> normalize
// followed by projection.
struct WindowNetwork {
    BipartiteGraph bipartite;  // normalized
    ProjectedGraph projected;
};

WindowNetwork build_window_network(std::span<const PerformanceRecord> performances,
                                   std::span<const ReleaseRecord> releases,
                                   FactKind kind, YearRange window);

}  // namespace fieldnet
