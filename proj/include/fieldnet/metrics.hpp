#pragma once

#include <string>
#include <vector>

#include "fieldnet/graph.hpp"

namespace fieldnet {

enum class NetworkKind { CoGig, CoVenue, CoLabel, CoStyle };

const char* to_string(NetworkKind kind);
FactKind fact_kind_of(NetworkKind kind);

// One musician's position in one window network.
struct PositionVector {
    std::string musician_id;
    NetworkKind network = NetworkKind::CoGig;
    int year = 0;
    double closeness = 0.0;    // mainstream belonging
    int coreness = 0;          // community embeddedness
    double betweenness = 0.0;  // bridging
    double clustering = 0.0;   // constraint
};

namespace metrics {

struct Options {
    // Scale closeness by the reachable share so nodes of small components
    // score near 0. With scaling off, the raw inverse mean distance over the
    // reachable set is returned.
    bool component_scaled_closeness = true;
};

// All four kernels read edge weights as similarities; path-based measures
// use cost 1/s per edge. The OpenMP versions below parallelize over nodes
// or sources and are bitwise-identical to their serial counterparts for any
// thread count.

std::vector<double> closeness(const ProjectedGraph& g, const Options& opts = {});
std::vector<int> coreness(const ProjectedGraph& g);
std::vector<double> betweenness(const ProjectedGraph& g);
std::vector<double> clustering(const ProjectedGraph& g);

// Plain single-threaded loops, kept as the reference the parallel kernels
// are tested and benchmarked against.
namespace serial {
std::vector<double> closeness(const ProjectedGraph& g, const Options& opts = {});
std::vector<int> coreness(const ProjectedGraph& g);
std::vector<double> betweenness(const ProjectedGraph& g);
std::vector<double> clustering(const ProjectedGraph& g);
}  // namespace serial

}  // namespace metrics

std::vector<PositionVector> position_vectors(const ProjectedGraph& g, NetworkKind kind,
                                             int year,
                                             const metrics::Options& opts = {});

}  // namespace fieldnet
