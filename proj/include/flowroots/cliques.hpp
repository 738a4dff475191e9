#pragma once

// Maximal cliques, clique graphs and topology classes of network graphs.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace flowroots {

struct Network;

/// Simple undirected graph on nodes 1..num_nodes. Edges are stored as
/// (u, v) with u < v, sorted and without duplicates.
class Graph {
public:
    Graph() = default;
    /// Normalises the edge list; throws std::invalid_argument on self-loops or
    /// out-of-range endpoints.
    Graph(int num_nodes, std::vector<std::pair<int, int>> edges);

    [[nodiscard]] int num_nodes() const noexcept { return num_nodes_; }
    [[nodiscard]] const std::vector<std::pair<int, int>>& edges() const noexcept { return edges_; }
    [[nodiscard]] bool adjacent(int u, int v) const;
    /// Sorted neighbours of node v.
    [[nodiscard]] const std::vector<int>& neighbors(int v) const { return adj_.at(static_cast<std::size_t>(v)); }
    [[nodiscard]] bool connected() const;

private:
    int num_nodes_ = 0;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> adj_;  // index 0 unused
};

/// Projects branches to edges; parallel branches collapse.
[[nodiscard]] Graph graph_of(const Network& net);

/// Reads "u v" pairs, one per line; '#' starts a comment. The node count is
/// the largest id seen unless a "nodes N" line says otherwise.
[[nodiscard]] Graph parse_edge_list(std::istream& in);

[[nodiscard]] Graph complete_graph(int n);

struct CliqueStructure {
    // Each clique sorted ascending; cliques ordered by size descending, then
    // lexicographically.
    std::vector<std::vector<int>> cliques;
    // Clique sizes, descending.
    std::vector<int> signature;
    double avg_size = 0.0;

    [[nodiscard]] int m() const noexcept { return static_cast<int>(cliques.size()); }
};

/// Bron-Kerbosch with Tomita pivoting.
[[nodiscard]] CliqueStructure maximal_cliques(const Graph& g);

struct CliqueEdge {
    int a = 0;  // indices into CliqueStructure::cliques, a < b
    int b = 0;
    int shared = 0;
};

struct CliqueGraph {
    int num_cliques = 0;
    std::vector<CliqueEdge> edges;
};

[[nodiscard]] CliqueGraph clique_graph(const CliqueStructure& cs);

/// Sizes joined by 'x', largest first: "3x3x2x2x2".
[[nodiscard]] std::string signature_key(const CliqueStructure& cs);
[[nodiscard]] std::string signature_key(const std::vector<int>& sizes);

/// Node sets of the biconnected components (blocks), each sorted.
[[nodiscard]] std::vector<std::vector<int>> biconnected_components(const Graph& g);
[[nodiscard]] std::vector<int> articulation_points(const Graph& g);

enum class TopologyKind { BlockNetwork, EdgeSharedTree, MixedBlockEdgeTree, Unclassified };

[[nodiscard]] const char* to_string(TopologyKind k) noexcept;

enum class BlockShape {
    Clique,          // the block is one maximal clique
    EdgeSharedTree,  // its cliques share <= 2 buses and the 2-sharing pairs form a tree
    Other,
};

struct BlockInfo {
    std::vector<int> nodes;
    std::vector<int> cliques;  // indices into CliqueStructure::cliques
    std::vector<int> signature;
    BlockShape shape = BlockShape::Other;
};

struct TopologyClass {
    TopologyKind kind = TopologyKind::Unclassified;
    CliqueStructure structure;
    std::vector<BlockInfo> blocks;
    // Why a graph is Unclassified; empty otherwise.
    std::string reason;
};

/// Splits the graph into blocks and classifies the cliques inside each.
///   BlockNetwork        every block is a single clique
///   EdgeSharedTree      every block is an edge-shared clique tree
///   MixedBlockEdgeTree  both kinds of block occur
///   Unclassified        some block is neither (cliques sharing >= 3 buses,
///                       a cycle among 2-sharing cliques, or anything else)
[[nodiscard]] TopologyClass classify(const Graph& g);

}  // namespace flowroots
