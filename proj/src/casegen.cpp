#include "flowroots/casegen.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace flowroots {

void GenConfig::validate() const {
    const int n = topology ? topology->num_nodes() : n_buses;
    if (n < 2) throw ContractViolation("case generation needs at least two buses");
    for (double s : {sigma_r, sigma_x, sigma_b, sigma_tau, sigma_theta_deg, sigma_pg_mw, sigma_pd_mw, sigma_qd_mvar,
                     sigma_pz, sigma_qz})
        if (!(s >= 0.0)) throw ContractViolation("standard deviations must be non-negative");
    for (double p : {transformer_prob, generator_prob, load_prob})
        if (!(p >= 0.0 && p <= 1.0)) throw ContractViolation("probabilities must lie in [0, 1]");
    if (!(vset_min > 0.0 && vset_min <= vset_max)) throw ContractViolation("bad voltage setpoint range");
    if (!(min_abs_x > 0.0)) throw ContractViolation("min_abs_x must be positive");
    if (!(base_mva > 0.0)) throw ContractViolation("base_mva must be positive");
    if (topology && !topology->connected()) throw ContractViolation("fixed topology must be connected");
}

std::vector<std::pair<int, int>> random_spanning_tree(int n, Rng& rng) {
    if (n < 2) throw ContractViolation("spanning tree needs n >= 2");
    std::vector<bool> visited(static_cast<std::size_t>(n + 1), false);
    std::vector<std::pair<int, int>> edges;
    int current = rng.uniform_int(1, n);
    visited[static_cast<std::size_t>(current)] = true;
    while (static_cast<int>(edges.size()) < n - 1) {
        int next = rng.uniform_int(1, n - 1);
        if (next >= current) ++next;
        if (!visited[static_cast<std::size_t>(next)]) {
            visited[static_cast<std::size_t>(next)] = true;
            edges.emplace_back(std::min(current, next), std::max(current, next));
        }
        current = next;
    }
    return edges;
}

Graph generate_topology(int n, Rng& rng) {
    if (n < 3) throw ContractViolation("generate_topology needs n >= 3");
    const int max_lines = n * (n - 1) / 2;
    const int lo = std::min(n + 1, max_lines);
    const int hi = std::min((n * n + n) / 2, max_lines);
    const int lines = rng.uniform_int(lo, hi);

    auto tree = random_spanning_tree(n, rng);
    std::set<std::pair<int, int>> edges(tree.begin(), tree.end());
    while (static_cast<int>(edges.size()) < lines) {
        const int u = rng.uniform_int(1, n);
        const int v = rng.uniform_int(1, n);
        if (u == v) continue;
        edges.emplace(std::min(u, v), std::max(u, v));
    }
    return Graph(n, {edges.begin(), edges.end()});
}

GeneratedCase generate_case_detailed(const GenConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);

    Graph topo;
    if (cfg.topology)
        topo = *cfg.topology;
    else if (cfg.n_buses == 2)
        topo = Graph(2, {{1, 2}});
    else
        topo = generate_topology(cfg.n_buses, rng);
    const int n = topo.num_nodes();

    GeneratedCase out;
    Network& net = out.network;
    net.name = "case-n" + std::to_string(n) + "-s" + std::to_string(cfg.seed);
    net.seed = cfg.seed;
    net.generator = std::string("flowroots casegen v1; rng ") + kRngAlgorithm;

    for (const auto& [u, v] : topo.edges()) {
        Branch br;
        br.from_bus = u;
        br.to_bus = v;
        br.r = std::max(0.0, rng.normal(cfg.mu_r, cfg.sigma_r));
        do {
            br.x = rng.normal(cfg.mu_x, cfg.sigma_x);
        } while (br.x < cfg.min_abs_x);
        br.b_shunt = rng.normal(cfg.mu_b, cfg.sigma_b);
        if (rng.bernoulli(cfg.transformer_prob)) {
            ++out.transformers;
            do {
                br.tau = rng.normal(cfg.mu_tau, cfg.sigma_tau);
            } while (br.tau <= 0.0);
            br.theta_deg = rng.normal(cfg.mu_theta_deg, cfg.sigma_theta_deg);
        }
        net.branches.push_back(br);
    }

    const double base = cfg.base_mva;
    int slack = 0;
    std::vector<bool> is_load(static_cast<std::size_t>(n + 1), false);
    for (int id = 1; id <= n; ++id) {
        Bus b;
        b.id = id;
        if (rng.bernoulli(cfg.generator_prob)) {
            ++out.generators_drawn;
            b.v_setpoint = rng.uniform(cfg.vset_min, cfg.vset_max);
            const double pg = rng.normal(cfg.mu_pg_mw, cfg.sigma_pg_mw);
            if (slack == 0) {
                slack = id;
                b.kind = BusKind::Slack;
            } else {
                b.kind = BusKind::PV;
                b.p_inject = pg / base;
            }
        } else {
            b.kind = BusKind::PQ;
            if (rng.bernoulli(cfg.load_prob)) {
                ++out.loads;
                is_load[static_cast<std::size_t>(id)] = true;
                b.p_inject = -rng.normal(cfg.mu_pd_mw, cfg.sigma_pd_mw) / base;
                b.q_inject = -rng.normal(cfg.mu_qd_mvar, cfg.sigma_qd_mvar) / base;
                b.shunt_g = rng.normal(cfg.mu_pz, cfg.sigma_pz);
                b.shunt_b = -rng.normal(cfg.mu_qz, cfg.sigma_qz);
            }
        }
        net.buses.push_back(b);
    }
    if (slack == 0) {
        out.forced_slack = true;
        const int id = rng.uniform_int(1, n);
        if (is_load[static_cast<std::size_t>(id)]) --out.loads;
        Bus& b = net.buses[static_cast<std::size_t>(id - 1)];
        b = Bus{b.id, BusKind::Slack, 0.0, 0.0, rng.uniform(cfg.vset_min, cfg.vset_max), 0.0, 0.0};
    }
    validate(net);
    return out;
}

Network generate_case(const GenConfig& cfg) { return generate_case_detailed(cfg).network; }

namespace {

// Bit i of the mask is the i-th pair of (u, v), u < v, in lexicographic order.
std::vector<std::pair<int, int>> all_pairs(int n) {
    std::vector<std::pair<int, int>> pairs;
    for (int u = 1; u <= n; ++u)
        for (int v = u + 1; v <= n; ++v) pairs.emplace_back(u, v);
    return pairs;
}

}  // namespace

std::vector<Graph> enumerate_small_topologies(int n) {
    if (n < 1 || n > 5) throw ContractViolation("enumerate_small_topologies supports 1 <= n <= 5");
    const auto pairs = all_pairs(n);
    const std::size_t np = pairs.size();
    std::vector<int> index(static_cast<std::size_t>((n + 1) * (n + 1)), 0);
    for (std::size_t i = 0; i < np; ++i)
        index[static_cast<std::size_t>(pairs[i].first * (n + 1) + pairs[i].second)] = static_cast<int>(i);
    auto pair_index = [&](int u, int v) {
        if (u > v) std::swap(u, v);
        return index[static_cast<std::size_t>(u * (n + 1) + v)];
    };

    std::vector<std::vector<int>> perms;
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 1);
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));

    std::set<std::uint32_t> seen;
    std::vector<Graph> out;
    for (std::uint32_t mask = 0; mask < (1u << np); ++mask) {
        std::uint32_t canon = mask;
        for (const auto& perm : perms) {
            std::uint32_t img = 0;
            for (std::size_t i = 0; i < np; ++i)
                if (mask >> i & 1u)
                    img |= 1u << pair_index(perm[static_cast<std::size_t>(pairs[i].first - 1)],
                                            perm[static_cast<std::size_t>(pairs[i].second - 1)]);
            canon = std::min(canon, img);
        }
        if (!seen.insert(canon).second) continue;
        std::vector<std::pair<int, int>> edges;
        for (std::size_t i = 0; i < np; ++i)
            if (mask >> i & 1u) edges.push_back(pairs[i]);
        Graph g(n, std::move(edges));
        if (g.connected()) out.push_back(std::move(g));
    }
    return out;
}

}  // namespace flowroots
