#include "flowroots/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace flowroots {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Fixtures

namespace {

TopologyFixture make_fixture(std::string name, int n, std::vector<std::pair<int, int>> edges,
                             std::vector<std::vector<int>> cliques, std::string sig, TopologyKind kind,
                             std::optional<std::uint64_t> bound, std::uint64_t kappa_n) {
    return TopologyFixture{std::move(name), Graph(n, std::move(edges)), std::move(cliques), std::move(sig),
                           kind,            bound,                      kappa_n};
}

std::vector<TopologyFixture> build_fixtures() {
    using K = TopologyKind;
    std::vector<TopologyFixture> f;
    f.push_back(make_fixture("fig2a", 5, {{1, 2}, {1, 3}, {1, 4}, {1, 5}}, {{1, 2}, {1, 3}, {1, 4}, {1, 5}},
                             "2x2x2x2", K::BlockNetwork, 16, 70));
    f.push_back(make_fixture("fig2b", 4, {{1, 2}, {1, 3}, {2, 3}, {3, 4}}, {{1, 2, 3}, {3, 4}}, "3x2",
                             K::BlockNetwork, 12, 20));
    f.push_back(make_fixture("fig2c", 7, {{1, 2}, {1, 3}, {2, 3}, {3, 4}, {3, 5}, {4, 5}, {5, 6}, {5, 7}, {6, 7}},
                             {{1, 2, 3}, {3, 4, 5}, {5, 6, 7}}, "3x3x3", K::BlockNetwork, 216, 924));
    f.push_back(make_fixture("fig3a", 4, {{1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 4}}, {{1, 2, 3}, {2, 3, 4}}, "3x3",
                             K::EdgeSharedTree, 18, 20));
    f.push_back(make_fixture("fig3b", 6, {{1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 4}, {3, 5}, {4, 5}, {4, 6}, {2, 6}},
                             {{1, 2, 3}, {2, 3, 4}, {2, 4, 6}, {3, 4, 5}}, "3x3x3x3", K::EdgeSharedTree, 162, 252));
    f.push_back(make_fixture(
        "fig3c", 7,
        {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}, {3, 5}, {3, 6}, {4, 5}, {4, 6}, {5, 6}, {5, 7}, {6, 7}},
        {{1, 2, 3, 4}, {3, 4, 5, 6}, {5, 6, 7}}, "4x4x3", K::EdgeSharedTree, 600, 924));
    f.push_back(make_fixture("fig4", 7, {{1, 2}, {2, 3}, {2, 7}, {3, 4}, {3, 5}, {3, 7}, {5, 6}, {5, 7}},
                             {{2, 3, 7}, {3, 5, 7}, {1, 2}, {3, 4}, {5, 6}}, "3x3x2x2x2", K::MixedBlockEdgeTree, 144,
                             924));
    f.push_back(make_fixture("fig5a", 5, {{1, 2}, {2, 3}, {2, 4}, {2, 5}, {4, 5}, {1, 4}, {3, 5}, {1, 5}, {3, 4}},
                             {{1, 2, 4, 5}, {2, 3, 4, 5}}, "4x4", K::Unclassified, std::nullopt, 70));
    f.push_back(make_fixture("fig5b", 5, {{1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 4}, {3, 5}, {2, 5}},
                             {{1, 2, 3}, {2, 3, 4}, {2, 3, 5}}, "3x3x3", K::Unclassified, std::nullopt, 70));
    f.push_back(make_fixture("fig5c", 5, {{1, 2}, {1, 3}, {2, 3}, {3, 4}, {3, 5}, {4, 5}, {1, 4}, {2, 5}},
                             {{1, 2, 3}, {1, 3, 4}, {2, 3, 5}, {3, 4, 5}}, "3x3x3x3", K::Unclassified, std::nullopt,
                             70));
    return f;
}

}  // namespace

const std::vector<TopologyFixture>& paper_fixtures() {
    static const std::vector<TopologyFixture> fixtures = build_fixtures();
    return fixtures;
}

const TopologyFixture& paper_fixture(const std::string& name) {
    for (const auto& f : paper_fixtures())
        if (f.name == name) return f;
    throw std::invalid_argument("unknown fixture '" + name + "'");
}

// ---------------------------------------------------------------------------
// Single case

CaseAnalysis analyze_case(const Network& net, const TrackerConfig& cfg) {
    PolynomialSystem system = build_pf_system(net);
    SolutionSet sols = solve_all(system, cfg);
    std::vector<RVector> real = filter_real(system, sols, cfg.real_tol);
    BoundReport bounds = bound_for(graph_of(net));
    return CaseAnalysis{std::move(system), std::move(sols), std::move(real), std::move(bounds)};
}

json tracker_config_to_json(const TrackerConfig& cfg) {
    return json{{"initial_step", cfg.initial_step},
                {"min_step", cfg.min_step},
                {"max_step", cfg.max_step},
                {"corrector_tol", cfg.corrector_tol},
                {"corrector_max_iters", cfg.corrector_max_iters},
                {"divergence_norm", cfg.divergence_norm},
                {"endgame_start", cfg.endgame_start},
                {"dedup_tol", cfg.dedup_tol},
                {"real_tol", cfg.real_tol},
                {"seed", cfg.seed},
                {"max_attempts", cfg.max_attempts},
                {"threads", cfg.threads}};
}

TrackerConfig tracker_config_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("solver config must be a JSON object");
    TrackerConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "initial_step") cfg.initial_step = value.get<double>();
        else if (key == "min_step") cfg.min_step = value.get<double>();
        else if (key == "max_step") cfg.max_step = value.get<double>();
        else if (key == "corrector_tol") cfg.corrector_tol = value.get<double>();
        else if (key == "corrector_max_iters") cfg.corrector_max_iters = value.get<int>();
        else if (key == "divergence_norm") cfg.divergence_norm = value.get<double>();
        else if (key == "endgame_start") cfg.endgame_start = value.get<double>();
        else if (key == "dedup_tol") cfg.dedup_tol = value.get<double>();
        else if (key == "real_tol") cfg.real_tol = value.get<double>();
        else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
        else if (key == "max_attempts") cfg.max_attempts = value.get<int>();
        else if (key == "threads") cfg.threads = value.get<int>();
        else throw std::invalid_argument("unknown solver config key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

std::string config_digest(const TrackerConfig& cfg) {
    json j = tracker_config_to_json(cfg);
    j.erase("threads");  // does not change results
    const std::string text = j.dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

// ---------------------------------------------------------------------------
// Records

json record_to_json(const ExperimentRecord& r) {
    json j;
    j["v"] = kJournalSchemaVersion;
    j["case_id"] = r.case_id;
    j["seed"] = r.seed;
    j["n_buses"] = r.n_buses;
    j["topology"] = r.topology;
    j["signature_key"] = r.signature_key;
    j["avg_clique_size"] = r.avg_clique_size;
    j["topology_class"] = r.topology_class;
    j["num_pv"] = r.num_pv;
    j["num_pq"] = r.num_pq;
    j["num_finite_complex"] = r.num_finite_complex;
    j["num_real"] = r.num_real;
    j["num_at_infinity"] = r.num_at_infinity;
    j["num_singular"] = r.num_singular;
    j["num_failed"] = r.num_failed;
    j["attempts"] = r.attempts;
    j["bezout"] = r.bezout;
    j["kappa_n"] = r.kappa_n;
    j["topology_bound"] = r.topology_bound ? json(*r.topology_bound) : json(nullptr);
    j["is_conjecture"] = r.is_conjecture;
    j["bound_respected"] = r.bound_respected ? json(*r.bound_respected) : json(nullptr);
    j["runtime_ms"] = r.runtime_ms;
    j["solver_config_digest"] = r.solver_config_digest;
    return j;
}

ExperimentRecord record_from_json(const json& j) {
    if (!j.is_object()) throw std::runtime_error("journal record must be a JSON object");
    const int v = j.at("v").get<int>();
    if (v != kJournalSchemaVersion) throw std::runtime_error("unsupported journal schema version " + std::to_string(v));
    ExperimentRecord r;
    r.case_id = j.at("case_id").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.n_buses = j.at("n_buses").get<int>();
    r.topology = j.at("topology").get<std::string>();
    r.signature_key = j.at("signature_key").get<std::string>();
    r.avg_clique_size = j.at("avg_clique_size").get<double>();
    r.topology_class = j.at("topology_class").get<std::string>();
    r.num_pv = j.at("num_pv").get<int>();
    r.num_pq = j.at("num_pq").get<int>();
    r.num_finite_complex = j.at("num_finite_complex").get<int>();
    r.num_real = j.at("num_real").get<int>();
    r.num_at_infinity = j.at("num_at_infinity").get<int>();
    r.num_singular = j.at("num_singular").get<int>();
    r.num_failed = j.at("num_failed").get<int>();
    r.attempts = j.at("attempts").get<int>();
    r.bezout = j.at("bezout").get<std::uint64_t>();
    r.kappa_n = j.at("kappa_n").get<std::uint64_t>();
    if (!j.at("topology_bound").is_null()) r.topology_bound = j["topology_bound"].get<std::uint64_t>();
    r.is_conjecture = j.at("is_conjecture").get<bool>();
    if (!j.at("bound_respected").is_null()) r.bound_respected = j["bound_respected"].get<bool>();
    r.runtime_ms = j.at("runtime_ms").get<std::int64_t>();
    r.solver_config_digest = j.at("solver_config_digest").get<std::string>();
    return r;
}

std::vector<ExperimentRecord> load_journal(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open journal " + path.string());
    std::vector<ExperimentRecord> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const bool complete = !in.eof();  // getline hit a newline
        if (line.empty()) continue;
        try {
            out.push_back(record_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            if (!complete) break;  // interrupted append
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

ExperimentRecord make_record(const std::string& case_id, const std::string& topology, const Network& net,
                             const CaseAnalysis& a, const std::string& digest, std::int64_t runtime_ms) {
    ExperimentRecord r;
    r.case_id = case_id;
    r.seed = net.seed.value_or(0);
    r.n_buses = net.num_buses();
    r.topology = topology;
    r.signature_key = signature_key(a.bounds.topology.structure);
    r.avg_clique_size = a.bounds.topology.structure.avg_size;
    r.topology_class = to_string(a.bounds.topology.kind);
    for (const auto& b : net.buses) {
        if (b.kind == BusKind::PV) ++r.num_pv;
        if (b.kind == BusKind::PQ) ++r.num_pq;
    }
    r.num_finite_complex = static_cast<int>(a.solutions.finite.size());
    r.num_real = static_cast<int>(a.real_solutions.size());
    r.num_at_infinity = a.solutions.num_at_infinity;
    r.num_singular = a.solutions.num_singular;
    r.num_failed = a.solutions.num_failed;
    r.attempts = a.solutions.attempts;
    r.bezout = a.bounds.bezout;
    r.kappa_n = a.bounds.kappa_n;
    r.topology_bound = a.bounds.topology_bound;
    r.is_conjecture = a.bounds.is_conjecture;
    if (r.topology_bound) r.bound_respected = static_cast<std::uint64_t>(r.num_finite_complex) <= *r.topology_bound;
    r.runtime_ms = runtime_ms;
    r.solver_config_digest = digest;
    return r;
}

// ---------------------------------------------------------------------------
// Experiment runner

std::string case_id_for(int n_buses, const std::string& topology, std::uint64_t seed) {
    return "n" + std::to_string(n_buses) + "-" + topology + "-s" + std::to_string(seed);
}

namespace {

// Drops a trailing partial line so that new appends start on a fresh line.
void trim_partial_tail(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    if (text.empty() || text.back() == '\n') return;
    const auto pos = text.find_last_of('\n');
    std::filesystem::resize_file(path, pos == std::string::npos ? 0 : pos + 1);
}

}  // namespace

std::vector<ExperimentRecord> run_experiment(const ExperimentOptions& opts) {
    if (opts.count < 0) throw std::invalid_argument("count must be non-negative");
    if (opts.threads < 1) throw std::invalid_argument("threads must be at least 1");
    opts.tracker.validate();

    GenConfig gen = opts.gen;
    int n = opts.n_buses;
    if (opts.topology == "complete") {
        gen.topology = complete_graph(n);
    } else if (opts.topology == "random") {
        gen.topology.reset();
    } else if (opts.topology.rfind("enum", 0) == 0) {
        const auto all = enumerate_small_topologies(n);
        const std::size_t k = std::stoul(opts.topology.substr(4));
        if (k >= all.size())
            throw std::invalid_argument("topology index out of range for " + std::to_string(n) + " buses");
        gen.topology = all[k];
    } else {
        const auto& fx = paper_fixture(opts.topology);
        gen.topology = fx.graph;
        n = fx.graph.num_nodes();
    }
    gen.n_buses = n;
    const std::string digest = config_digest(opts.tracker);

    std::map<std::string, ExperimentRecord> done;
    if (!opts.journal.empty() && std::filesystem::exists(opts.journal)) {
        trim_partial_tail(opts.journal);
        for (auto& r : load_journal(opts.journal)) {
            if (r.solver_config_digest != digest)
                throw std::runtime_error("journal " + opts.journal.string() +
                                         " was written with a different solver configuration");
            done.emplace(r.case_id, std::move(r));
        }
    }

    const auto count = static_cast<std::size_t>(opts.count);
    std::vector<std::string> ids(count);
    std::vector<std::optional<ExperimentRecord>> results(count);
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < count; ++i) {
        ids[i] = case_id_for(n, opts.topology, opts.base_seed + i);
        if (auto it = done.find(ids[i]); it != done.end())
            results[i] = it->second;
        else
            todo.push_back(i);
    }

    std::ofstream journal;
    if (!opts.journal.empty()) {
        journal.open(opts.journal, std::ios::binary | std::ios::app);
        if (!journal) throw std::runtime_error("cannot open journal " + opts.journal.string());
    }

    // Records are appended in seed order: a finished case waits until every
    // earlier pending case is written.
    std::mutex mu;
    std::size_t next_write = 0;
    auto flush_ready = [&] {
        while (next_write < todo.size() && results[todo[next_write]]) {
            if (journal.is_open()) {
                journal << record_to_json(*results[todo[next_write]]).dump() << '\n';
                journal.flush();
            }
            ++next_write;
        }
    };

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= todo.size()) return;
            const std::size_t i = todo[k];
            try {
                GenConfig g = gen;
                g.seed = opts.base_seed + i;
                const Network net = generate_case(g);
                TrackerConfig tc = opts.tracker;
                tc.seed = splitmix64(opts.tracker.seed ^ g.seed);
                tc.threads = 1;
                const auto t0 = std::chrono::steady_clock::now();
                const CaseAnalysis a = analyze_case(net, tc);
                const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                    std::chrono::steady_clock::now() - t0)
                                    .count();
                ExperimentRecord rec =
                    make_record(ids[i], opts.topology, net, a, digest, opts.record_timing ? ms : 0);
                std::lock_guard lock(mu);
                results[i] = std::move(rec);
                flush_ready();
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                next.store(todo.size());
                return;
            }
        }
    };

    const int nthreads = std::min<int>(opts.threads, static_cast<int>(std::max<std::size_t>(todo.size(), 1)));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<ExperimentRecord> out;
    out.reserve(count);
    for (auto& r : results) out.push_back(std::move(*r));
    return out;
}

// ---------------------------------------------------------------------------
// Aggregation

AggregateReport aggregate(const std::vector<ExperimentRecord>& records) {
    AggregateReport rep;
    for (const auto& r : records) {
        if (rep.solver_config_digest.empty())
            rep.solver_config_digest = r.solver_config_digest;
        else if (r.solver_config_digest != rep.solver_config_digest)
            throw std::runtime_error("records come from different solver configurations (" +
                                     rep.solver_config_digest + " vs " + r.solver_config_digest + ")");
    }

    using Key = std::tuple<int, std::string, std::string, std::uint64_t>;
    std::map<Key, AggregateRow> groups;
    for (const auto& r : records) {
        if (!r.certified()) {
            ++rep.excluded_noncertified;
            continue;
        }
        const Key key{r.n_buses, r.signature_key, r.topology_class, r.topology_bound.value_or(0)};
        auto [it, fresh] = groups.try_emplace(key);
        AggregateRow& row = it->second;
        if (fresh) {
            row.signature_key = r.signature_key;
            row.n_buses = r.n_buses;
            row.avg_clique_size = r.avg_clique_size;
            row.topology_class = r.topology_class;
            row.kappa_n = r.kappa_n;
            row.applicable_bound = r.topology_bound;
            row.is_conjecture = r.is_conjecture;
        }
        ++row.case_count;
        row.max_num_finite_complex = std::max(row.max_num_finite_complex, r.num_finite_complex);
        row.max_num_real = std::max(row.max_num_real, r.num_real);
        if (r.topology_bound && static_cast<std::uint64_t>(r.num_finite_complex) > *r.topology_bound)
            row.counterexamples.push_back(r.case_id);
    }
    for (auto& [key, row] : groups) {
        row.bound_attained =
            row.applicable_bound && static_cast<std::uint64_t>(row.max_num_finite_complex) == *row.applicable_bound;
        rep.rows.push_back(std::move(row));
    }
    rep.empty = rep.rows.empty();
    return rep;
}

void export_fig1_csv(const AggregateReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "signature_key,avg_clique_size,max_complex,max_real,n_buses,kappa_n,applicable_bound,bound_attained\n";
    for (const auto& row : report.rows) {
        out << row.signature_key << ',' << std::fixed << std::setprecision(6) << row.avg_clique_size << ','
            << row.max_num_finite_complex << ',' << row.max_num_real << ',' << row.n_buses << ',' << row.kappa_n
            << ',';
        if (row.applicable_bound) out << *row.applicable_bound;
        out << ',' << (row.bound_attained ? "true" : "false") << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Figure checks

namespace {

std::string format_cliques(std::vector<std::vector<int>> cliques) {
    for (auto& c : cliques) std::sort(c.begin(), c.end());
    std::sort(cliques.begin(), cliques.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() > b.size() : a < b;
    });
    std::string s;
    for (const auto& c : cliques) {
        s += '{';
        for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + std::to_string(c[i]);
        s += '}';
    }
    return s;
}

std::string format_bound(std::optional<std::uint64_t> b) { return b ? std::to_string(*b) : "none"; }

}  // namespace

std::vector<FixtureCheck> verify_paper_examples() {
    std::vector<FixtureCheck> out;
    for (const auto& f : paper_fixtures()) {
        const BoundReport rep = bound_for(f.graph);
        auto add = [&](const std::string& what, std::string expected, std::string observed) {
            const bool pass = expected == observed;
            out.push_back({f.name + " " + what, std::move(expected), std::move(observed), pass});
        };
        add("cliques", format_cliques(f.cliques), format_cliques(rep.topology.structure.cliques));
        add("signature", f.signature_key, signature_key(rep.topology.structure));
        add("class", to_string(f.kind), to_string(rep.topology.kind));
        add("bound", format_bound(f.bound), format_bound(rep.topology_bound));
        add("kappa_n", std::to_string(f.kappa_n), std::to_string(rep.kappa_n));
    }
    return out;
}

}  // namespace flowroots
