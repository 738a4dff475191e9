#include "flowroots/bounds.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>

#include "flowroots/polysys.hpp"

namespace flowroots {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
        throw std::overflow_error("solution-count bound does not fit in 64 bits");
    return a * b;
}

}  // namespace

std::uint64_t kappa(int n) {
    if (n < 1) throw ContractViolation("kappa needs n >= 1");
    // C(2k, k) built incrementally; each partial product C(k + i, i) is an
    // integer, and dividing before multiplying keeps it exact.
    const auto k = static_cast<std::uint64_t>(n - 1);
    std::uint64_t c = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        const std::uint64_t num = k + i;
        const std::uint64_t g = std::gcd(c, i);
        c = checked_mul(c / g, num / (i / g));
    }
    return c;
}

std::uint64_t kappa1(const std::vector<int>& clique_sizes) {
    if (clique_sizes.empty()) throw ContractViolation("kappa1 needs a non-empty signature");
    std::uint64_t prod = 1;
    for (int s : clique_sizes) prod = checked_mul(prod, kappa(s));
    return prod;
}

std::uint64_t kappa2(const std::vector<int>& clique_sizes) {
    if (clique_sizes.empty()) throw ContractViolation("kappa2 needs a non-empty signature");
    for (int s : clique_sizes)
        if (s < 2) throw ContractViolation("kappa2 is undefined for cliques with fewer than two buses");
    const std::uint64_t prod = kappa1(clique_sizes);
    const auto shift = clique_sizes.size() - 1;
    if (shift >= 64) throw std::overflow_error("kappa2 divisor does not fit in 64 bits");
    const std::uint64_t div = std::uint64_t{1} << shift;
    if (prod % div != 0) throw std::logic_error("kappa2 product is not divisible by 2^(m-1)");
    return prod / div;
}

std::uint64_t bezout_bound(int n) {
    if (n < 1) throw ContractViolation("bezout_bound needs n >= 1");
    const int e = 2 * n - 2;
    if (e >= 64) throw std::overflow_error("2^(2n-2) does not fit in 64 bits");
    return std::uint64_t{1} << e;
}

BoundReport bound_for(const Graph& g) {
    if (g.num_nodes() < 2) throw ContractViolation("bound_for needs at least two buses");
    if (!g.connected()) throw ContractViolation("bound_for needs a connected graph");
    BoundReport r;
    r.n = g.num_nodes();
    r.bezout = bezout_bound(r.n);
    r.kappa_n = kappa(r.n);
    r.topology = classify(g);
    if (r.topology.kind == TopologyKind::Unclassified) return r;

    std::uint64_t product = 1;
    for (const auto& block : r.topology.blocks) {
        BlockFactor f;
        f.signature_key = signature_key(block.signature);
        f.conjectured = block.shape == BlockShape::EdgeSharedTree;
        f.factor = f.conjectured ? kappa2(block.signature) : kappa1(block.signature);
        r.is_conjecture |= f.conjectured;
        product = checked_mul(product, f.factor);
        r.per_block_detail.push_back(std::move(f));
    }
    r.topology_bound = product;
    return r;
}

}  // namespace flowroots
