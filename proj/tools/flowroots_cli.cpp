// flowroots command line.
//
// Exit codes: 0 success, 1 usage or I/O error (also a failed verify-paper),
// 2 model error, 3 non-certified solve.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "flowroots/bounds.hpp"
#include "flowroots/casegen.hpp"
#include "flowroots/cliques.hpp"
#include "flowroots/harness.hpp"
#include "flowroots/network_io.hpp"
#include "flowroots/pfmodel.hpp"

namespace fs = std::filesystem;
using namespace flowroots;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitModel = 2;
constexpr int kExitNotCertified = 3;

struct Globals {
    std::uint64_t seed = 1;
    int threads = 1;
    std::string journal;
    std::string config;
};

TrackerConfig load_tracker_config(const Globals& g) {
    TrackerConfig cfg;
    if (!g.config.empty()) {
        std::ifstream in(g.config);
        if (!in) throw std::runtime_error("cannot open config " + g.config);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw std::runtime_error(g.config + ": " + e.what());
        }
        cfg = tracker_config_from_json(j);
    }
    cfg.threads = g.threads;
    cfg.validate();
    return cfg;
}

bool looks_like_json(const fs::path& path) {
    if (path.extension() == ".json") return true;
    std::ifstream in(path);
    char c = 0;
    while (in.get(c))
        if (!std::isspace(static_cast<unsigned char>(c))) return c == '{';
    return false;
}

Graph load_graph(const fs::path& path) {
    if (looks_like_json(path)) return graph_of(load_network(path));
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return parse_edge_list(in);
    } catch (const std::invalid_argument& e) {
        throw ModelError(path.string() + ": " + e.what());
    }
}

std::string format_clique(const std::vector<int>& c) {
    std::string s = "{";
    for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + std::to_string(c[i]);
    return s + "}";
}

std::string format_bound(const BoundReport& rep) {
    if (!rep.topology_bound) return "none";
    return std::to_string(*rep.topology_bound) + (rep.is_conjecture ? " (conjectured max)" : " (proven)");
}

// ---------------------------------------------------------------------------

int cmd_gen(const Globals& g, int buses, int count, const std::string& out_dir, const std::string& topology) {
    fs::create_directories(out_dir);
    GenConfig cfg;
    cfg.n_buses = buses;
    if (topology == "complete") cfg.topology = complete_graph(buses);
    else if (topology != "random") cfg.topology = paper_fixture(topology).graph;
    for (int i = 0; i < count; ++i) {
        cfg.seed = g.seed + static_cast<std::uint64_t>(i);
        const Network net = generate_case(cfg);
        const fs::path path = fs::path(out_dir) / (net.name + ".json");
        save_network(net, path);
        std::cout << path.string() << '\n';
    }
    return kExitOk;
}

int cmd_solve(const Globals& g, const std::string& file, bool as_json) {
    const Network net = load_network(file);
    const TrackerConfig cfg = load_tracker_config(g);
    const CaseAnalysis a = analyze_case(net, cfg);
    const SolutionSet& s = a.solutions;

    if (as_json) {
        json j;
        j["name"] = net.name;
        j["num_paths"] = s.num_paths;
        j["num_finite_complex"] = s.finite.size();
        j["num_real"] = a.real_solutions.size();
        j["num_at_infinity"] = s.num_at_infinity;
        j["num_singular"] = s.num_singular;
        j["num_failed"] = s.num_failed;
        j["certified"] = s.certified();
        j["bezout"] = a.bounds.bezout;
        j["kappa_n"] = a.bounds.kappa_n;
        j["topology_bound"] = a.bounds.topology_bound ? json(*a.bounds.topology_bound) : json(nullptr);
        j["is_conjecture"] = a.bounds.is_conjecture;
        json reals = json::array();
        for (const auto& x : a.real_solutions) {
            json sol;
            const auto v = bus_voltages(net, x);
            json volts = json::array();
            for (Eigen::Index i = 0; i < v.size(); ++i) volts.push_back({v[i].real(), v[i].imag()});
            sol["voltages"] = std::move(volts);
            json power = json::array();
            for (const auto& bp : recover_outputs(net, x))
                power.push_back({{"id", bp.id}, {"kind", to_string(bp.kind)}, {"p", bp.p}, {"q", bp.q}});
            sol["injections"] = std::move(power);
            reals.push_back(std::move(sol));
        }
        j["real_solutions"] = std::move(reals);
        std::cout << j.dump(2) << '\n';
    } else {
        std::printf("network        %s (%d buses)\n", net.name.c_str(), net.num_buses());
        std::printf("paths          %llu\n", static_cast<unsigned long long>(s.num_paths));
        std::printf("finite         %zu\n", s.finite.size());
        std::printf("real           %zu\n", a.real_solutions.size());
        std::printf("at infinity    %d\n", s.num_at_infinity);
        std::printf("singular       %d\n", s.num_singular);
        std::printf("failed         %d\n", s.num_failed);
        std::printf("certified      %s\n", s.certified() ? "yes" : "no");
        std::printf("kappa_n        %llu\n", static_cast<unsigned long long>(a.bounds.kappa_n));
        std::printf("topology bound %s\n", format_bound(a.bounds).c_str());
        int k = 0;
        for (const auto& x : a.real_solutions) {
            std::printf("real solution %d\n", ++k);
            const auto v = bus_voltages(net, x);
            for (Eigen::Index i = 0; i < v.size(); ++i)
                std::printf("  bus %-3d |V| %.6f  angle %9.4f deg\n", net.buses[static_cast<std::size_t>(i)].id,
                            std::abs(v[i]), std::arg(v[i]) * 180.0 / 3.14159265358979323846);
        }
    }
    return s.certified() ? kExitOk : kExitNotCertified;
}

int cmd_cliques(const std::string& file) {
    const Graph g = load_graph(file);
    const TopologyClass tc = classify(g);
    std::printf("nodes      %d\n", g.num_nodes());
    std::printf("edges      %zu\n", g.edges().size());
    std::printf("signature  %s\n", signature_key(tc.structure).c_str());
    std::printf("avg size   %.4f\n", tc.structure.avg_size);
    std::printf("class      %s\n", to_string(tc.kind));
    if (!tc.reason.empty()) std::printf("reason     %s\n", tc.reason.c_str());
    std::printf("cliques\n");
    for (const auto& c : tc.structure.cliques) std::printf("  %s\n", format_clique(c).c_str());
    std::printf("blocks\n");
    for (const auto& b : tc.blocks) {
        const char* shape = b.shape == BlockShape::Clique           ? "clique"
                            : b.shape == BlockShape::EdgeSharedTree ? "edge-shared tree"
                                                                    : "other";
        std::printf("  %s  %s  %s\n", format_clique(b.nodes).c_str(), signature_key(b.signature).c_str(), shape);
    }
    return kExitOk;
}

int cmd_bounds(const std::string& file) {
    const BoundReport rep = bound_for(load_graph(file));
    std::printf("n              %d\n", rep.n);
    std::printf("bezout         %llu\n", static_cast<unsigned long long>(rep.bezout));
    std::printf("kappa_n        %llu\n", static_cast<unsigned long long>(rep.kappa_n));
    std::printf("class          %s\n", to_string(rep.topology.kind));
    std::printf("topology bound %s\n", format_bound(rep).c_str());
    for (const auto& b : rep.per_block_detail)
        std::printf("  block %-12s factor %llu%s\n", b.signature_key.c_str(),
                    static_cast<unsigned long long>(b.factor), b.conjectured ? " (conjectured)" : "");
    return kExitOk;
}

void print_summary(const std::vector<ExperimentRecord>& records) {
    int finite_max = 0, noncert = 0;
    for (const auto& r : records) {
        if (!r.certified()) ++noncert;
        else finite_max = std::max(finite_max, r.num_finite_complex);
    }
    std::printf("%zu cases, %d non-certified, max finite %d\n", records.size(), noncert, finite_max);
}

int cmd_experiment(const Globals& g, int buses, int count, const std::string& topology, bool sweep,
                   bool allow_large, bool no_timing) {
    if (buses >= 6 && !allow_large) {
        std::cerr << "error: 6 or more buses needs --allow-large (4096+ paths per case)\n";
        return kExitUsage;
    }
    ExperimentOptions opts;
    opts.n_buses = buses;
    opts.count = count;
    opts.base_seed = g.seed;
    opts.tracker = load_tracker_config(g);
    opts.tracker.threads = 1;
    opts.threads = g.threads;
    opts.journal = g.journal;
    opts.record_timing = !no_timing;

    std::vector<ExperimentRecord> all;
    if (sweep) {
        const std::size_t k = enumerate_small_topologies(buses).size();
        for (std::size_t i = 0; i < k; ++i) {
            opts.topology = "enum" + std::to_string(i);
            auto recs = run_experiment(opts);
            all.insert(all.end(), recs.begin(), recs.end());
        }
    } else {
        opts.topology = topology;
        all = run_experiment(opts);
    }
    print_summary(all);
    return kExitOk;
}

int cmd_report(const Globals& g, const std::string& csv) {
    if (g.journal.empty()) {
        std::cerr << "error: report needs --journal\n";
        return kExitUsage;
    }
    const AggregateReport rep = aggregate(load_journal(g.journal));
    if (rep.empty) {
        std::printf("empty report: no certified records (%d excluded)\n", rep.excluded_noncertified);
    } else {
        std::printf("%-3s %-12s %-20s %6s %8s %5s %6s %8s %s\n", "n", "signature", "class", "cases", "max_cplx",
                    "real", "kappa", "bound", "attained");
        for (const auto& r : rep.rows) {
            const std::string bound =
                r.applicable_bound ? std::to_string(*r.applicable_bound) + (r.is_conjecture ? "*" : "") : "-";
            std::printf("%-3d %-12s %-20s %6d %8d %5d %6llu %8s %s\n", r.n_buses, r.signature_key.c_str(),
                        r.topology_class.c_str(), r.case_count, r.max_num_finite_complex, r.max_num_real,
                        static_cast<unsigned long long>(r.kappa_n), bound.c_str(), r.bound_attained ? "yes" : "no");
            for (const auto& c : r.counterexamples) std::printf("    exceeds bound: %s\n", c.c_str());
        }
        std::printf("* conjectured max\n");
        std::printf("%d non-certified records excluded\n", rep.excluded_noncertified);
    }
    if (!csv.empty()) export_fig1_csv(rep, csv);
    return kExitOk;
}

int cmd_verify_paper() {
    int failures = 0;
    for (const auto& c : verify_paper_examples()) {
        std::printf("%-4s %-18s expected %-28s got %s\n", c.pass ? "ok" : "FAIL", c.fixture.c_str(),
                    c.expected.c_str(), c.observed.c_str());
        if (!c.pass) ++failures;
    }
    std::printf("%d mismatches\n", failures);
    return failures == 0 ? kExitOk : kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"All solutions of small power flow problems and their clique-structure bounds"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "Base seed");
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--journal", g.journal, "Experiment journal (JSON lines)");
    app.add_option("--config", g.config, "Tracker configuration (JSON)");

    int buses = 3, count = 1;
    std::string out_dir = ".", topology = "random", file, csv;
    bool as_json = false, sweep = false, allow_large = false, no_timing = false;

    auto* gen = app.add_subcommand("gen", "Generate random networks");
    gen->add_option("--buses", buses, "Number of buses")->required()->check(CLI::Range(2, 64));
    gen->add_option("--count", count, "Number of cases")->check(CLI::PositiveNumber);
    gen->add_option("--out", out_dir, "Output directory");
    gen->add_option("--topology", topology, "random, complete or a fixture name");

    auto* solve = app.add_subcommand("solve", "Find all solutions of one network");
    solve->add_option("network", file, "Network JSON")->required();
    solve->add_flag("--json", as_json, "Machine-readable output");

    auto* cliq = app.add_subcommand("cliques", "Maximal cliques and topology class");
    cliq->add_option("input", file, "Network JSON or edge list")->required();

    auto* bounds = app.add_subcommand("bounds", "Solution-count bounds");
    bounds->add_option("input", file, "Network JSON or edge list")->required();

    auto* exp = app.add_subcommand("experiment", "Solve a batch of seeded cases");
    exp->add_option("--buses", buses, "Number of buses")->required()->check(CLI::Range(2, 7));
    exp->add_option("--count", count, "Cases per topology")->check(CLI::PositiveNumber);
    exp->add_option("--topology", topology, "random, complete, enum<k> or a fixture name");
    exp->add_flag("--sweep", sweep, "Run every connected topology on --buses nodes (at most 5)");
    exp->add_flag("--allow-large", allow_large, "Permit 6 and 7 bus cases");
    exp->add_flag("--no-timing", no_timing, "Record runtime_ms as 0 for reproducible journals");

    auto* report = app.add_subcommand("report", "Aggregate a journal");
    report->add_option("--csv", csv, "Write the per-signature table as CSV");

    auto* verify = app.add_subcommand("verify-paper", "Check the built-in reference topologies");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*gen) return cmd_gen(g, buses, count, out_dir, topology);
        if (*solve) return cmd_solve(g, file, as_json);
        if (*cliq) return cmd_cliques(file);
        if (*bounds) return cmd_bounds(file);
        if (*exp) return cmd_experiment(g, buses, count, topology, sweep, allow_large, no_timing);
        if (*report) return cmd_report(g, csv);
        if (*verify) return cmd_verify_paper();
    } catch (const ModelError& e) {
        std::cerr << "model error: " << e.what() << '\n';
        return kExitModel;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
