#include "flowroots/cliques.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "flowroots/pfmodel.hpp"

namespace flowroots {

Graph::Graph(int num_nodes, std::vector<std::pair<int, int>> edges) : num_nodes_(num_nodes) {
    if (num_nodes < 0) throw std::invalid_argument("graph node count must be non-negative");
    for (auto& [u, v] : edges) {
        if (u == v) throw std::invalid_argument("self-loop at node " + std::to_string(u));
        if (u < 1 || v < 1 || u > num_nodes || v > num_nodes)
            throw std::invalid_argument("edge " + std::to_string(u) + "-" + std::to_string(v) + " is out of range");
        if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);

    adj_.assign(static_cast<std::size_t>(num_nodes + 1), {});
    for (const auto& [u, v] : edges_) {
        adj_[static_cast<std::size_t>(u)].push_back(v);
        adj_[static_cast<std::size_t>(v)].push_back(u);
    }
    for (auto& a : adj_) std::sort(a.begin(), a.end());
}

bool Graph::adjacent(int u, int v) const {
    const auto& a = neighbors(u);
    return std::binary_search(a.begin(), a.end(), v);
}

bool Graph::connected() const {
    if (num_nodes_ <= 1) return true;
    std::vector<bool> seen(static_cast<std::size_t>(num_nodes_ + 1), false);
    std::vector<int> stack{1};
    seen[1] = true;
    int count = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int w : neighbors(v))
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = true;
                ++count;
                stack.push_back(w);
            }
    }
    return count == num_nodes_;
}

Graph graph_of(const Network& net) {
    std::vector<std::pair<int, int>> edges;
    edges.reserve(net.branches.size());
    for (const auto& br : net.branches) edges.emplace_back(br.from_bus, br.to_bus);
    return Graph(net.num_buses(), std::move(edges));
}

Graph parse_edge_list(std::istream& in) {
    std::vector<std::pair<int, int>> edges;
    int declared = -1, largest = 0;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "nodes") {
            if (!(ls >> declared)) throw std::invalid_argument("line " + std::to_string(lineno) + ": bad nodes line");
            continue;
        }
        int u = 0, v = 0;
        try {
            u = std::stoi(first);
        } catch (const std::exception&) {
            throw std::invalid_argument("line " + std::to_string(lineno) + ": expected 'u v'");
        }
        if (!(ls >> v)) throw std::invalid_argument("line " + std::to_string(lineno) + ": expected 'u v'");
        largest = std::max({largest, u, v});
        edges.emplace_back(u, v);
    }
    return Graph(declared >= 0 ? declared : largest, std::move(edges));
}

Graph complete_graph(int n) {
    std::vector<std::pair<int, int>> edges;
    for (int u = 1; u <= n; ++u)
        for (int v = u + 1; v <= n; ++v) edges.emplace_back(u, v);
    return Graph(n, std::move(edges));
}

namespace {

using NodeSet = std::vector<int>;  // sorted

NodeSet intersect(const NodeSet& a, const NodeSet& b) {
    NodeSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

class BronKerbosch {
public:
    explicit BronKerbosch(const Graph& g) : g_(g) {}

    std::vector<NodeSet> run() {
        NodeSet p(static_cast<std::size_t>(g_.num_nodes()));
        std::iota(p.begin(), p.end(), 1);
        NodeSet r;
        expand(r, p, {});
        return std::move(out_);
    }

private:
    void expand(NodeSet& r, NodeSet p, NodeSet x) {
        if (p.empty()) {
            if (x.empty() && !r.empty()) {
                NodeSet c = r;
                std::sort(c.begin(), c.end());
                out_.push_back(std::move(c));
            }
            return;
        }
        // Pivot on the vertex of P u X with the most neighbours in P.
        int pivot = -1;
        std::size_t best = 0;
        for (const NodeSet* s : {&p, &x})
            for (int u : *s) {
                const std::size_t k = intersect(p, g_.neighbors(u)).size();
                if (pivot < 0 || k > best) {
                    pivot = u;
                    best = k;
                }
            }
        NodeSet candidates;
        std::set_difference(p.begin(), p.end(), g_.neighbors(pivot).begin(), g_.neighbors(pivot).end(),
                            std::back_inserter(candidates));
        for (int v : candidates) {
            r.push_back(v);
            expand(r, intersect(p, g_.neighbors(v)), intersect(x, g_.neighbors(v)));
            r.pop_back();
            p.erase(std::lower_bound(p.begin(), p.end(), v));
            x.insert(std::lower_bound(x.begin(), x.end(), v), v);
        }
    }

    const Graph& g_;
    std::vector<NodeSet> out_;
};

}  // namespace

CliqueStructure maximal_cliques(const Graph& g) {
    CliqueStructure cs;
    if (g.num_nodes() == 0) return cs;
    cs.cliques = BronKerbosch(g).run();
    std::sort(cs.cliques.begin(), cs.cliques.end(), [](const NodeSet& a, const NodeSet& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a < b;
    });
    std::size_t total = 0;
    for (const auto& c : cs.cliques) {
        cs.signature.push_back(static_cast<int>(c.size()));
        total += c.size();
    }
    cs.avg_size = cs.cliques.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(cs.cliques.size());
    return cs;
}

CliqueGraph clique_graph(const CliqueStructure& cs) {
    CliqueGraph cg;
    cg.num_cliques = cs.m();
    for (int a = 0; a < cs.m(); ++a)
        for (int b = a + 1; b < cs.m(); ++b) {
            const auto shared = intersect(cs.cliques[static_cast<std::size_t>(a)], cs.cliques[static_cast<std::size_t>(b)]).size();
            if (shared > 0) cg.edges.push_back({a, b, static_cast<int>(shared)});
        }
    return cg;
}

std::string signature_key(const std::vector<int>& sizes) {
    std::vector<int> s = sizes;
    std::sort(s.begin(), s.end(), std::greater<>());
    std::string key;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) key += 'x';
        key += std::to_string(s[i]);
    }
    return key;
}

std::string signature_key(const CliqueStructure& cs) { return signature_key(cs.signature); }

namespace {

// Hopcroft-Tarjan lowpoint traversal with an edge stack.
class Blocks {
public:
    explicit Blocks(const Graph& g)
        : g_(g), disc_(static_cast<std::size_t>(g.num_nodes() + 1), 0),
          low_(static_cast<std::size_t>(g.num_nodes() + 1), 0),
          is_cut_(static_cast<std::size_t>(g.num_nodes() + 1), false) {
        for (int v = 1; v <= g.num_nodes(); ++v)
            if (disc_[static_cast<std::size_t>(v)] == 0) {
                visit(v, 0);
                if (g.neighbors(v).empty()) blocks_.push_back({v});
            }
        for (auto& b : blocks_) {
            std::sort(b.begin(), b.end());
            b.erase(std::unique(b.begin(), b.end()), b.end());
        }
        std::sort(blocks_.begin(), blocks_.end());
    }

    std::vector<NodeSet> blocks() const { return blocks_; }

    std::vector<int> cut_vertices() const {
        std::vector<int> out;
        for (int v = 1; v <= g_.num_nodes(); ++v)
            if (is_cut_[static_cast<std::size_t>(v)]) out.push_back(v);
        return out;
    }

private:
    void visit(int v, int parent) {
        const auto vi = static_cast<std::size_t>(v);
        disc_[vi] = low_[vi] = ++time_;
        int children = 0;
        for (int w : g_.neighbors(v)) {
            const auto wi = static_cast<std::size_t>(w);
            if (disc_[wi] == 0) {
                ++children;
                stack_.emplace_back(v, w);
                visit(w, v);
                low_[vi] = std::min(low_[vi], low_[wi]);
                if (low_[wi] >= disc_[vi]) {
                    if (parent != 0) is_cut_[vi] = true;
                    NodeSet block;
                    while (true) {
                        const auto [a, b] = stack_.back();
                        stack_.pop_back();
                        block.push_back(a);
                        block.push_back(b);
                        if (a == v && b == w) break;
                    }
                    blocks_.push_back(std::move(block));
                }
            } else if (w != parent && disc_[wi] < disc_[vi]) {
                stack_.emplace_back(v, w);
                low_[vi] = std::min(low_[vi], disc_[wi]);
            }
        }
        if (parent == 0 && children > 1) is_cut_[vi] = true;
    }

    const Graph& g_;
    std::vector<int> disc_, low_;
    std::vector<bool> is_cut_;
    std::vector<std::pair<int, int>> stack_;
    std::vector<NodeSet> blocks_;
    int time_ = 0;
};

bool subset_of(const NodeSet& a, const NodeSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

// Shape of one block given the cliques inside it; `why` explains Other.
BlockShape block_shape(const std::vector<const NodeSet*>& cliques, std::string& why) {
    const std::size_t k = cliques.size();
    if (k == 1) return BlockShape::Clique;

    std::vector<std::size_t> parent(k);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    std::size_t two_edges = 0;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) {
            const auto shared = intersect(*cliques[a], *cliques[b]).size();
            if (shared >= 3) {
                why = "maximal cliques share " + std::to_string(shared) + " buses";
                return BlockShape::Other;
            }
            if (shared == 2) {
                ++two_edges;
                const auto ra = find(a), rb = find(b);
                if (ra == rb) {
                    why = "cycle among maximal cliques sharing two buses";
                    return BlockShape::Other;
                }
                parent[ra] = rb;
            }
        }
    if (two_edges != k - 1) {
        why = "block whose maximal cliques are not linked by shared edges";
        return BlockShape::Other;
    }
    return BlockShape::EdgeSharedTree;
}

}  // namespace

std::vector<std::vector<int>> biconnected_components(const Graph& g) { return Blocks(g).blocks(); }

std::vector<int> articulation_points(const Graph& g) { return Blocks(g).cut_vertices(); }

const char* to_string(TopologyKind k) noexcept {
    switch (k) {
        case TopologyKind::BlockNetwork: return "BlockNetwork";
        case TopologyKind::EdgeSharedTree: return "EdgeSharedTree";
        case TopologyKind::MixedBlockEdgeTree: return "MixedBlockEdgeTree";
        case TopologyKind::Unclassified: return "Unclassified";
    }
    return "Unclassified";
}

TopologyClass classify(const Graph& g) {
    TopologyClass tc;
    tc.structure = maximal_cliques(g);
    const auto& cliques = tc.structure.cliques;

    bool any_clique = false, any_tree = false;
    for (auto& nodes : biconnected_components(g)) {
        BlockInfo info;
        info.nodes = std::move(nodes);
        std::vector<const NodeSet*> members;
        for (std::size_t c = 0; c < cliques.size(); ++c)
            if (cliques[c].size() >= 2 && subset_of(cliques[c], info.nodes)) {
                info.cliques.push_back(static_cast<int>(c));
                info.signature.push_back(static_cast<int>(cliques[c].size()));
                members.push_back(&cliques[c]);
            }
        if (members.empty()) continue;  // isolated node
        std::string why;
        info.shape = block_shape(members, why);
        if (info.shape == BlockShape::Other && tc.reason.empty()) tc.reason = why;
        any_clique |= info.shape == BlockShape::Clique;
        any_tree |= info.shape == BlockShape::EdgeSharedTree;
        tc.blocks.push_back(std::move(info));
    }

    if (!tc.reason.empty())
        tc.kind = TopologyKind::Unclassified;
    else if (any_tree && any_clique)
        tc.kind = TopologyKind::MixedBlockEdgeTree;
    else if (any_tree)
        tc.kind = TopologyKind::EdgeSharedTree;
    else
        tc.kind = TopologyKind::BlockNetwork;
    return tc;
}

}  // namespace flowroots
