#pragma once

// Seeded random test cases.
//
// Draw order for one case, all from a single Rng(seed):
//   1. topology (spanning tree walk, line count, extra lines), unless fixed
//   2. branches in index order: R, X (redrawn while X < min_abs_x), b,
//      transformer flag, then tau and theta for transformers
//   3. buses in id order: generator flag; generators draw vset then Pg;
//      other buses draw the load flag, then Pd, Qd, Pz, Qz for loads
//   4. if no generator was drawn, the forced slack bus index, then its vset

#include <cstdint>
#include <optional>
#include <vector>

#include "flowroots/cliques.hpp"
#include "flowroots/pfmodel.hpp"
#include "flowroots/rng.hpp"

namespace flowroots {

struct GenConfig {
    int n_buses = 5;
    std::uint64_t seed = 0;

    // line parameters, per unit
    double mu_r = 0.03, sigma_r = 0.03;
    double mu_x = 0.10, sigma_x = 0.03;
    double mu_b = 0.005, sigma_b = 0.001;
    double min_abs_x = 1e-4;

    double transformer_prob = 0.08;
    double mu_tau = 1.0, sigma_tau = 0.02;
    double mu_theta_deg = 0.0, sigma_theta_deg = 3.0;

    double generator_prob = 0.30;
    double vset_min = 0.90, vset_max = 1.10;
    double mu_pg_mw = 200.0, sigma_pg_mw = 30.0;

    double load_prob = 0.70;
    double mu_pd_mw = 50.0, sigma_pd_mw = 20.0;
    double mu_qd_mvar = 30.0, sigma_qd_mvar = 20.0;
    // constant-impedance load part, per unit shunt conductance / susceptance
    double mu_pz = 0.1, sigma_pz = 0.03;
    double mu_qz = 0.1, sigma_qz = 0.05;

    double base_mva = 100.0;

    // Use this graph instead of drawing a random topology.
    std::optional<Graph> topology;

    void validate() const;
};

/// First-entrance edges of a random walk on the complete graph K_n, which is
/// uniform over labelled spanning trees.
[[nodiscard]] std::vector<std::pair<int, int>> random_spanning_tree(int n, Rng& rng);

/// Line count uniform on [min(n+1, C(n,2)), C(n,2)], i.e. the nominal range
/// n+1 .. (n^2+n)/2 clamped to simple graphs; spanning tree plus random extra
/// lines.
[[nodiscard]] Graph generate_topology(int n, Rng& rng);

struct GeneratedCase {
    Network network;
    int generators_drawn = 0;  // before the forced-slack correction
    bool forced_slack = false;
    int loads = 0;
    int transformers = 0;
};

[[nodiscard]] GeneratedCase generate_case_detailed(const GenConfig& cfg);
[[nodiscard]] Network generate_case(const GenConfig& cfg);

/// One representative per isomorphism class of connected simple graphs on n
/// labelled nodes (n <= 5), by brute-force canonical forms.
[[nodiscard]] std::vector<Graph> enumerate_small_topologies(int n);

}  // namespace flowroots
