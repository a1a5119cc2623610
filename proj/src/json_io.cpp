#include "imm/json_io.hpp"

#include <fstream>
#include <sstream>

namespace imm {

json graph_to_json(const MultiGraph& g) {
    json j;
    j["vertices"] = json::array();
    for (VertexId v : g.vertices()) j["vertices"].push_back(v);
    j["edges"] = json::array();
    for (const auto& [id, ep] : g.edges())
        j["edges"].push_back({{"id", id}, {"u", ep.first}, {"v", ep.second}});
    return j;
}

MultiGraph graph_from_json(const json& j) {
    MultiGraph g;
    if (!j.contains("vertices") || !j.contains("edges"))
        throw Error(ErrorCode::ParseError, "graph json needs vertices and edges");
    for (const auto& v : j.at("vertices")) g.add_vertex(v.get<VertexId>());
    for (const auto& e : j.at("edges"))
        g.add_edge_with_id(e.at("id").get<EdgeId>(), e.at("u").get<VertexId>(),
                           e.at("v").get<VertexId>());
    return g;
}

json script_to_json(const LiftingScript& s) {
    json steps = json::array();
    for (const LiftStep& st : s.steps) {
        switch (st.kind) {
            case LiftStep::DeleteEdge:
                steps.push_back({{"op", "delete-edge"}, {"edge", st.edge}});
                break;
            case LiftStep::DeleteIsolatedVertex:
                steps.push_back({{"op", "delete-vertex"}, {"vertex", st.vertex}});
                break;
            case LiftStep::LiftPair:
                steps.push_back({{"op", "lift"},
                                 {"e", st.lift_e},
                                 {"f", st.lift_f},
                                 {"created", st.created}});
                break;
        }
    }
    return json{{"steps", steps}};
}

LiftingScript script_from_json(const json& j) {
    LiftingScript s;
    for (const auto& st : j.at("steps")) {
        std::string op = st.at("op").get<std::string>();
        LiftStep step;
        if (op == "delete-edge") {
            step.kind = LiftStep::DeleteEdge;
            step.edge = st.at("edge").get<EdgeId>();
        } else if (op == "delete-vertex") {
            step.kind = LiftStep::DeleteIsolatedVertex;
            step.vertex = st.at("vertex").get<VertexId>();
        } else if (op == "lift") {
            step.kind = LiftStep::LiftPair;
            step.lift_e = st.at("e").get<EdgeId>();
            step.lift_f = st.at("f").get<EdgeId>();
            step.created = st.at("created").get<EdgeId>();
        } else {
            throw Error(ErrorCode::ParseError, "unknown script op " + op);
        }
        s.steps.push_back(step);
    }
    return s;
}

json immersion_to_json(const ImmersionCertificate& c) {
    json j;
    j["pattern"] = graph_to_json(c.pattern);
    json terminals = json::object();
    for (const auto& [pv, hv] : c.terminal_map) terminals[std::to_string(pv)] = hv;
    j["terminals"] = terminals;
    json paths = json::object();
    for (const auto& [pe, p] : c.edge_paths) paths[std::to_string(pe)] = p.edges;
    j["paths"] = paths;
    return j;
}

ImmersionCertificate immersion_from_json(const json& j, const MultiGraph& host) {
    ImmersionCertificate c;
    c.pattern = graph_from_json(j.at("pattern"));
    for (const auto& [k, v] : j.at("terminals").items())
        c.terminal_map[std::stoi(k)] = v.get<VertexId>();
    for (const auto& [k, v] : j.at("paths").items()) {
        EdgeId pe = std::stoi(k);
        std::vector<EdgeId> edges = v.get<std::vector<EdgeId>>();
        auto [pa, pb] = c.pattern.endpoints(pe);
        VertexId from = c.terminal_map.at(pa), to = c.terminal_map.at(pb);
        if (edges.empty())
            throw Error(ErrorCode::ParseError, "certificate path is empty");
        c.edge_paths[pe] = simplify_walk(host, edges, from, to);
    }
    return c;
}

json td_to_json(const TreeDecomposition& td) {
    json j;
    j["tree"] = graph_to_json(td.tree);
    json bags = json::object();
    for (const auto& [t, bag] : td.bags) bags[std::to_string(t)] = bag;
    j["bags"] = bags;
    return j;
}

TreeDecomposition td_from_json(const json& j) {
    TreeDecomposition td;
    td.tree = graph_from_json(j.at("tree"));
    for (const auto& [k, v] : j.at("bags").items()) {
        std::set<VertexId> bag;
        for (const auto& x : v) bag.insert(x.get<VertexId>());
        td.bags[std::stoi(k)] = bag;
    }
    return td;
}

json ring_to_json(const RingDecomposition& ring) {
    json segments = json::array();
    for (const auto& seg : ring.segments)
        segments.push_back({{"vertices", seg.vertices}, {"edges", seg.edges}});
    json j;
    j["segments"] = segments;
    j["width"] = ring.width;
    if (!ring.rails.empty()) {
        json rails = json::array();
        for (const Path& p : ring.rails) rails.push_back({{"vertices", p.vertices}, {"edges", p.edges}});
        j["rails"] = rails;
    }
    return j;
}

RingDecomposition ring_from_json(const json& j) {
    RingDecomposition ring;
    for (const auto& seg : j.at("segments")) {
        SubgraphSpec s;
        for (const auto& v : seg.at("vertices")) s.vertices.insert(v.get<VertexId>());
        for (const auto& e : seg.at("edges")) s.edges.insert(e.get<EdgeId>());
        ring.segments.push_back(std::move(s));
    }
    ring.width = j.value("width", 0);
    if (j.contains("rails"))
        for (const auto& p : j.at("rails")) {
            Path path;
            for (const auto& v : p.at("vertices")) path.vertices.push_back(v.get<VertexId>());
            for (const auto& e : p.at("edges")) path.edges.push_back(e.get<EdgeId>());
            ring.rails.push_back(std::move(path));
        }
    return ring;
}

json packing_to_json(const TreePacking& p) {
    json trees = json::array();
    for (const auto& t : p.trees) trees.push_back(t);
    return json{{"trees", trees}, {"spanned", p.spanned}};
}

TreePacking packing_from_json(const json& j) {
    TreePacking p;
    for (const auto& t : j.at("trees")) {
        std::set<EdgeId> tree;
        for (const auto& e : t) tree.insert(e.get<EdgeId>());
        p.trees.push_back(std::move(tree));
    }
    if (j.contains("spanned"))
        for (const auto& v : j.at("spanned")) p.spanned.insert(v.get<VertexId>());
    return p;
}

json minor_to_json(const MinorCertificate& c) {
    json j;
    j["pattern"] = graph_to_json(c.pattern);
    json branch = json::object();
    for (const auto& [pv, bs] : c.branch_sets) branch[std::to_string(pv)] = bs;
    j["branchSets"] = branch;
    json witness = json::object();
    for (const auto& [pe, he] : c.edge_witness) witness[std::to_string(pe)] = he;
    j["edgeWitness"] = witness;
    return j;
}

MinorCertificate minor_from_json(const json& j) {
    MinorCertificate c;
    c.pattern = graph_from_json(j.at("pattern"));
    for (const auto& [k, v] : j.at("branchSets").items()) {
        std::set<VertexId> bs;
        for (const auto& x : v) bs.insert(x.get<VertexId>());
        c.branch_sets[std::stoi(k)] = bs;
    }
    for (const auto& [k, v] : j.at("edgeWitness").items())
        c.edge_witness[std::stoi(k)] = v.get<EdgeId>();
    return c;
}

json make_envelope(const std::string& kind, json payload) {
    return json{{"kind", kind}, {"payload", std::move(payload)}};
}

std::pair<std::string, json> read_envelope(const json& j) {
    if (!j.contains("kind") || !j.contains("payload"))
        throw Error(ErrorCode::ParseError, "not an artifact envelope");
    return {j.at("kind").get<std::string>(), j.at("payload")};
}

void write_envelope_file(const std::string& path, const std::string& kind, const json& payload) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
    out << make_envelope(kind, payload).dump(2) << "\n";
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot read " + path);
    json j;
    in >> j;
    return j;
}

std::string graph_to_dot(const MultiGraph& g) {
    std::ostringstream out;
    out << "graph G {\n  node [shape=circle];\n";
    for (VertexId v : g.vertices()) out << "  " << v << ";\n";
    for (const auto& [id, ep] : g.edges())
        out << "  " << ep.first << " -- " << ep.second << " [label=\"" << id << "\"];\n";
    out << "}\n";
    return out.str();
}

std::string immersion_to_dot(const MultiGraph& host, const ImmersionCertificate& cert) {
    std::set<VertexId> terminals;
    for (const auto& [pv, hv] : cert.terminal_map) terminals.insert(hv);
    std::map<EdgeId, int> path_of;
    int idx = 0;
    for (const auto& [pe, p] : cert.edge_paths) {
        for (EdgeId e : p.edges) path_of[e] = idx;
        ++idx;
    }
    static const char* palette[] = {"red",    "blue",   "forestgreen", "orange",
                                    "purple", "brown",  "deeppink",    "cadetblue",
                                    "gold3",  "navy",   "seagreen",    "firebrick"};
    std::ostringstream out;
    out << "graph G {\n  node [shape=point];\n";
    for (VertexId v : host.vertices()) {
        out << "  " << v;
        if (terminals.count(v)) out << " [shape=circle, style=filled, fillcolor=black, label=\"\"]";
        out << ";\n";
    }
    for (const auto& [id, ep] : host.edges()) {
        out << "  " << ep.first << " -- " << ep.second;
        auto it = path_of.find(id);
        if (it != path_of.end())
            out << " [penwidth=2.5, color=" << palette[it->second % 12] << "]";
        else
            out << " [color=gray70]";
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace imm
