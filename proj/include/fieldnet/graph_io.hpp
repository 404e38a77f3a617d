#pragma once

#include <iosfwd>

#include "fieldnet/graph.hpp"

namespace fieldnet {

// source,target,weight; each undirected edge once (source index < target).
void write_edge_list_csv(std::ostream& out, const ProjectedGraph& g);
void write_edge_list_csv(std::ostream& out, const BipartiteGraph& g);

// GraphML with a `weight` edge attribute; bipartite nodes carry a `part`
// attribute ("musician" or the fact kind).
void write_graphml(std::ostream& out, const ProjectedGraph& g);
void write_graphml(std::ostream& out, const BipartiteGraph& g);

}  // namespace fieldnet
