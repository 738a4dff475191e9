#pragma once

// Solution-count bounds. All arithmetic is exact on unsigned 64-bit
// integers; anything that would overflow throws std::overflow_error.
//
//   kappa(n)         C(2n-2, n-1), the bound for any n-bus network
//   kappa1(sizes)    prod kappa(|C_i|), block networks (proven)
//   kappa2(sizes)    kappa1 / 2^(m-1), edge-shared clique trees (conjectured)

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flowroots/cliques.hpp"

namespace flowroots {

[[nodiscard]] std::uint64_t kappa(int n);
[[nodiscard]] std::uint64_t kappa1(const std::vector<int>& clique_sizes);
/// Throws ContractViolation if any clique has fewer than two buses.
[[nodiscard]] std::uint64_t kappa2(const std::vector<int>& clique_sizes);
/// 2^(2n-2)
[[nodiscard]] std::uint64_t bezout_bound(int n);

struct BlockFactor {
    std::string signature_key;
    std::uint64_t factor = 0;
    bool conjectured = false;
};

struct BoundReport {
    int n = 0;
    std::uint64_t bezout = 0;
    std::uint64_t kappa_n = 0;
    std::optional<std::uint64_t> topology_bound;
    TopologyClass topology;
    bool is_conjecture = false;
    std::vector<BlockFactor> per_block_detail;
};

/// Dispatches on the topology class: every block contributes kappa1 (one
/// clique) or kappa2 (edge-shared tree) and the factors multiply.
/// Unclassified graphs get no topology bound.
[[nodiscard]] BoundReport bound_for(const Graph& g);

}  // namespace flowroots
