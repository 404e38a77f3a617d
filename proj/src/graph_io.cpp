#include "fieldnet/graph_io.hpp"

#include <ostream>

#include "fieldnet/csv.hpp"

namespace fieldnet {

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

void graphml_header(std::ostream& out, bool with_part) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n";
    if (with_part)
        out << "  <key id=\"part\" for=\"node\" attr.name=\"part\" attr.type=\"string\"/>\n";
    out << "  <graph edgedefault=\"undirected\">\n";
}

void graphml_footer(std::ostream& out) { out << "  </graph>\n</graphml>\n"; }

}  // namespace

void write_edge_list_csv(std::ostream& out, const ProjectedGraph& g) {
    out << "source,target,weight\n";
    for (std::uint32_t a = 0; a < g.node_count(); ++a)
        for (const auto& [b, w] : g.adj[a])
            if (a < b)
                out << g.nodes[a] << ',' << g.nodes[b] << ',' << csv::format_double(w)
                    << '\n';
}

void write_edge_list_csv(std::ostream& out, const BipartiteGraph& g) {
    out << "source,target,weight\n";
    for (std::size_t f = 0; f < g.fact_edges.size(); ++f)
        for (const auto& [m, w] : g.fact_edges[f])
            out << g.musicians[m] << ',' << g.facts[f] << ',' << csv::format_double(w)
                << '\n';
}

void write_graphml(std::ostream& out, const ProjectedGraph& g) {
    graphml_header(out, false);
    for (const auto& id : g.nodes)
        out << "    <node id=\"" << xml_escape(id) << "\"/>\n";
    for (std::uint32_t a = 0; a < g.node_count(); ++a)
        for (const auto& [b, w] : g.adj[a]) {
            if (a >= b) continue;
            out << "    <edge source=\"" << xml_escape(g.nodes[a]) << "\" target=\""
                << xml_escape(g.nodes[b]) << "\"><data key=\"weight\">"
                << csv::format_double(w) << "</data></edge>\n";
        }
    graphml_footer(out);
}

void write_graphml(std::ostream& out, const BipartiteGraph& g) {
    graphml_header(out, true);
    for (const auto& id : g.musicians)
        out << "    <node id=\"" << xml_escape(id)
            << "\"><data key=\"part\">musician</data></node>\n";
    for (const auto& id : g.facts)
        out << "    <node id=\"" << xml_escape(id) << "\"><data key=\"part\">"
            << to_string(g.kind) << "</data></node>\n";
    for (std::size_t f = 0; f < g.fact_edges.size(); ++f)
        for (const auto& [m, w] : g.fact_edges[f])
            out << "    <edge source=\"" << xml_escape(g.musicians[m])
                << "\" target=\"" << xml_escape(g.facts[f])
                << "\"><data key=\"weight\">" << csv::format_double(w)
                << "</data></edge>\n";
    graphml_footer(out);
}

}  // namespace fieldnet
