#include <doctest.h>

#include "flowroots/bounds.hpp"
#include "flowroots/harness.hpp"
#include "oracles.hpp"

using namespace flowroots;

TEST_CASE("kappa values") {
    CHECK(kappa(2) == 2);
    CHECK(kappa(3) == 6);
    CHECK(kappa(4) == 20);
    for (int n = 2; n <= 30; ++n) CHECK(kappa(n) == oracle::binomial(2 * n - 2, n - 1));
    CHECK(kappa(5) == 70);
    CHECK(kappa(6) == 252);
}

TEST_CASE("kappa recurrence") {
    // C(2n, n) = C(2n-2, n-1) * 2(2n-1) / n
    for (int n = 2; n <= 30; ++n) CHECK(kappa(n + 1) * static_cast<std::uint64_t>(n) == kappa(n) * 2 * (2 * n - 1));
}

TEST_CASE("kappa overflow and domain") {
    CHECK_THROWS_AS((void)kappa(40), std::overflow_error);
    CHECK_THROWS((void)kappa(0));
    CHECK(bezout_bound(3) == 16);
    CHECK(bezout_bound(5) == 256);
}

TEST_CASE("kappa1 examples") {
    CHECK(kappa1({2, 2, 2, 2}) == 16);
    CHECK(kappa1({3, 2}) == 12);
    CHECK(kappa1({3, 3, 3}) == 216);
}

TEST_CASE("kappa2 examples") {
    CHECK(kappa2({3, 3}) == 18);
    CHECK(kappa2({3, 3, 3, 3}) == 162);
    CHECK(kappa2({4, 4, 3}) == 600);
    CHECK_THROWS_AS((void)kappa2({3, 1}), ContractViolation);
}

TEST_CASE("kappa2 times 2^(m-1) is kappa1") {
    Rng rng(13);
    for (int trial = 0; trial < 1000; ++trial) {
        const int m = rng.uniform_int(1, 6);
        std::vector<int> sizes;
        for (int i = 0; i < m; ++i) sizes.push_back(rng.uniform_int(2, 6));
        CHECK(kappa2(sizes) * (std::uint64_t{1} << (m - 1)) == kappa1(sizes));
    }
}

TEST_CASE("bound reports") {
    const auto fig4 = bound_for(paper_fixture("fig4").graph);
    CHECK(fig4.topology_bound == std::optional<std::uint64_t>(144));
    CHECK(fig4.is_conjecture);
    CHECK(fig4.per_block_detail.size() == 4);

    const auto fig5a = bound_for(paper_fixture("fig5a").graph);
    CHECK(!fig5a.topology_bound);
    CHECK(fig5a.kappa_n == 70);
    CHECK(fig5a.topology.kind == TopologyKind::Unclassified);

    const auto fig2c = bound_for(paper_fixture("fig2c").graph);
    CHECK(fig2c.topology_bound == std::optional<std::uint64_t>(216));
    CHECK(!fig2c.is_conjecture);

    for (int n = 2; n <= 7; ++n) {
        const auto r = bound_for(complete_graph(n));
        CHECK(r.topology_bound == std::optional<std::uint64_t>(r.kappa_n));
        CHECK(r.bezout == bezout_bound(n));
    }
}

TEST_CASE("topology bound never exceeds kappa_n") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const auto g = oracle::random_connected_graph(rng.uniform_int(2, 9), rng.uniform(0.2, 0.8), rng);
        const auto r = bound_for(g);
        CHECK(r.kappa_n <= r.bezout);
        if (r.topology_bound) CHECK(*r.topology_bound <= r.kappa_n);
    }
}
