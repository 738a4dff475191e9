#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "flowroots/harness.hpp"

using namespace flowroots;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("flowroots-test-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

ExperimentRecord fake(const std::string& id, const std::string& sig, int n, int finite,
                      std::optional<std::uint64_t> bound, bool conjecture, int failed = 0) {
    ExperimentRecord r;
    r.case_id = id;
    r.n_buses = n;
    r.signature_key = sig;
    r.topology_class = bound ? (conjecture ? "EdgeSharedTree" : "BlockNetwork") : "Unclassified";
    r.num_finite_complex = finite;
    r.num_failed = failed;
    r.kappa_n = n == 3 ? 6 : n == 4 ? 20 : 70;
    r.topology_bound = bound;
    r.is_conjecture = conjecture;
    r.solver_config_digest = "d";
    return r;
}

ExperimentOptions small_run(const fs::path& journal, int count) {
    ExperimentOptions o;
    o.n_buses = 3;
    o.count = count;
    o.base_seed = 10;
    o.journal = journal;
    o.record_timing = false;
    return o;
}

}  // namespace

TEST_CASE("fixtures") {
    CHECK(paper_fixtures().size() == 10);
    CHECK(paper_fixture("fig3b").bound == std::optional<std::uint64_t>(162));
    CHECK_THROWS_AS((void)paper_fixture("fig9"), std::invalid_argument);
    for (const auto& c : verify_paper_examples()) {
        INFO(c.fixture << ": expected " << c.expected << ", got " << c.observed);
        CHECK(c.pass);
    }
}

TEST_CASE("record JSON round trip") {
    auto r = fake("n4-fig3a-s1", "3x3", 4, 18, 18, true);
    r.bound_respected = true;
    r.num_pv = 1;
    r.num_pq = 2;
    r.avg_clique_size = 3.0;
    const auto j = record_to_json(r);
    CHECK(j["v"] == kJournalSchemaVersion);
    CHECK(record_to_json(record_from_json(j)).dump() == j.dump());
    auto bad = j;
    bad["v"] = 2;
    CHECK_THROWS((void)record_from_json(bad));
}

TEST_CASE("config digest") {
    TrackerConfig a;
    TrackerConfig b = a;
    b.threads = 4;
    CHECK(config_digest(a) == config_digest(b));
    CHECK(config_digest(a).size() == 16);
    b.seed = 2;
    CHECK(config_digest(a) != config_digest(b));

    const auto j = tracker_config_to_json(a);
    CHECK(config_digest(tracker_config_from_json(j)) == config_digest(a));
    CHECK_THROWS((void)tracker_config_from_json(nlohmann::json{{"step", 1}}));
    CHECK_THROWS((void)tracker_config_from_json(nlohmann::json{{"max_attempts", 0}}));
}

TEST_CASE("three-bus batch respects kappa_3") {
    ExperimentOptions o;
    o.n_buses = 3;
    o.count = 20;
    o.base_seed = 500;
    const auto recs = run_experiment(o);
    REQUIRE(recs.size() == 20);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK(recs[i].seed == 500 + i);
        CHECK(recs[i].n_buses == 3);
        CHECK(recs[i].num_pv + recs[i].num_pq == 2);
        if (recs[i].certified()) CHECK(recs[i].num_finite_complex <= 6);
        CHECK(recs[i].num_finite_complex + recs[i].num_at_infinity + recs[i].num_singular + recs[i].num_failed <= 16);
        if (recs[i].topology_bound && recs[i].certified())
            CHECK(recs[i].bound_respected == std::optional<bool>(recs[i].num_finite_complex <= 6));
    }
}

TEST_CASE("journal is deterministic and resumable") {
    TempDir tmp;
    const fs::path a = tmp.path / "a.jsonl", b = tmp.path / "b.jsonl", c = tmp.path / "c.jsonl";

    const auto full = run_experiment(small_run(a, 8));
    const std::string ref = slurp(a);
    CHECK(std::count(ref.begin(), ref.end(), '\n') == 8);

    // identical invocation: nothing new is appended
    const auto again = run_experiment(small_run(a, 8));
    CHECK(slurp(a) == ref);
    for (std::size_t i = 0; i < full.size(); ++i)
        CHECK(record_to_json(again[i]).dump() == record_to_json(full[i]).dump());

    // partial run, then resume with more workers
    (void)run_experiment(small_run(b, 3));
    auto o = small_run(b, 8);
    o.threads = 3;
    (void)run_experiment(o);
    CHECK(slurp(b) == ref);

    // an interrupted append leaves half a line behind
    {
        std::ofstream out(c, std::ios::binary);
        const auto first_two = ref.substr(0, ref.find('\n', ref.find('\n') + 1) + 1);
        out << first_two << R"({"v":1,"case_id":"n3-ran)";
    }
    CHECK(load_journal(c).size() == 2);
    (void)run_experiment(small_run(c, 8));
    CHECK(slurp(c) == ref);
}

TEST_CASE("journal from another solver configuration is rejected") {
    TempDir tmp;
    const fs::path j = tmp.path / "j.jsonl";
    (void)run_experiment(small_run(j, 2));
    auto o = small_run(j, 3);
    o.tracker.seed = 99;
    CHECK_THROWS_AS((void)run_experiment(o), std::runtime_error);
}

TEST_CASE("malformed journal lines are named") {
    TempDir tmp;
    const fs::path j = tmp.path / "bad.jsonl";
    {
        std::ofstream out(j);
        out << "{\"v\":1}\n{}\n";
    }
    CHECK_THROWS_WITH_AS((void)load_journal(j), doctest::Contains("bad.jsonl:1"), std::runtime_error);
    CHECK_THROWS((void)load_journal(tmp.path / "missing.jsonl"));
}

TEST_CASE("aggregate groups and compares") {
    std::vector<ExperimentRecord> recs = {
        fake("a", "3", 3, 6, 6, false),      fake("b", "3", 3, 4, 6, false),
        fake("c", "3x3", 4, 18, 18, true),   fake("d", "3x3", 4, 20, 18, true),
        fake("e", "4x4", 5, 40, std::nullopt, false), fake("f", "3x3", 4, 2, 18, true, 3),
    };
    const auto rep = aggregate(recs);
    CHECK(!rep.empty);
    CHECK(rep.excluded_noncertified == 1);
    REQUIRE(rep.rows.size() == 3);

    const auto& k3 = rep.rows[0];
    CHECK(k3.signature_key == "3");
    CHECK(k3.case_count == 2);
    CHECK(k3.max_num_finite_complex == 6);
    CHECK(k3.bound_attained);
    CHECK(k3.counterexamples.empty());

    const auto& est = rep.rows[1];
    CHECK(est.signature_key == "3x3");
    CHECK(est.topology_class == "EdgeSharedTree");
    CHECK(est.applicable_bound == std::optional<std::uint64_t>(18));
    CHECK(est.counterexamples == std::vector<std::string>{"d"});
    CHECK(!est.bound_attained);

    const auto& un = rep.rows[2];
    CHECK(!un.applicable_bound);
    CHECK(un.max_num_finite_complex == 40);

    // order independent
    std::mt19937 shuffle(5);
    std::shuffle(recs.begin(), recs.end(), shuffle);
    const auto rep2 = aggregate(recs);
    REQUIRE(rep2.rows.size() == rep.rows.size());
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        CHECK(rep2.rows[i].signature_key == rep.rows[i].signature_key);
        CHECK(rep2.rows[i].max_num_finite_complex == rep.rows[i].max_num_finite_complex);
        CHECK(rep2.rows[i].counterexamples == rep.rows[i].counterexamples);
    }
}

TEST_CASE("aggregate status and errors") {
    CHECK(aggregate({}).empty);
    const auto only_bad = aggregate({fake("x", "3", 3, 6, 6, false, 1)});
    CHECK(only_bad.empty);
    CHECK(only_bad.excluded_noncertified == 1);

    auto other = fake("y", "3", 3, 6, 6, false);
    other.solver_config_digest = "e";
    CHECK_THROWS_AS((void)aggregate({fake("x", "3", 3, 6, 6, false), other}), std::runtime_error);
}

TEST_CASE("aggregate over real fixture runs") {
    ExperimentOptions o;
    o.count = 3;
    o.base_seed = 1;
    o.topology = "fig3a";
    auto recs = run_experiment(o);
    o.topology = "complete";
    o.n_buses = 3;
    auto k3 = run_experiment(o);
    recs.insert(recs.end(), k3.begin(), k3.end());
    const auto rep = aggregate(recs);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[0].signature_key == "3");
    CHECK(rep.rows[0].max_num_finite_complex <= 6);
    CHECK(rep.rows[1].signature_key == "3x3");
    CHECK(rep.rows[1].topology_class == "EdgeSharedTree");
    CHECK(rep.rows[1].applicable_bound == std::optional<std::uint64_t>(18));
    for (const auto& row : rep.rows) CHECK(static_cast<std::uint64_t>(row.max_num_finite_complex) <= row.kappa_n);
}

TEST_CASE("CSV export") {
    TempDir tmp;
    const std::string header =
        "signature_key,avg_clique_size,max_complex,max_real,n_buses,kappa_n,applicable_bound,bound_attained\n";
    export_fig1_csv(aggregate({}), tmp.path / "empty.csv");
    CHECK(slurp(tmp.path / "empty.csv") == header);

    auto r = fake("a", "3", 3, 6, 6, false);
    r.avg_clique_size = 3.0;
    r.num_real = 4;
    export_fig1_csv(aggregate({r}), tmp.path / "k3.csv");
    CHECK(slurp(tmp.path / "k3.csv") == header + "3,3.000000,6,4,3,6,6,true\n");

    CHECK_THROWS((void)export_fig1_csv(aggregate({}), tmp.path / "no" / "such" / "dir.csv"));
}

TEST_CASE("case ids and topology modes") {
    CHECK(case_id_for(4, "fig3a", 7) == "n4-fig3a-s7");
    ExperimentOptions o;
    o.n_buses = 4;
    o.topology = "enum5";
    const auto recs = run_experiment(o);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].case_id == "n4-enum5-s1");
    o.topology = "enum99";
    CHECK_THROWS((void)run_experiment(o));
    o.topology = "nonsense";
    CHECK_THROWS((void)run_experiment(o));
}
