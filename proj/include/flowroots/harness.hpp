#pragma once

// Experiment orchestration: generate cases, solve them, compare the counts
// with the bounds, persist one JSON line per case, aggregate per clique
// signature.
//
// Journal lines (schema version 1) look like
//   {"v":1,"case_id":"n4-complete-s7","seed":7,"n_buses":4,...}
// and are appended in case order. A run resumes by skipping case ids already
// present in its journal.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flowroots/bounds.hpp"
#include "flowroots/casegen.hpp"
#include "flowroots/homotopy.hpp"
#include "flowroots/pfmodel.hpp"

namespace flowroots {

inline constexpr int kJournalSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Reference topologies with known cliques, class and bound.

struct TopologyFixture {
    std::string name;  // "fig2a" ... "fig5c"
    Graph graph;
    std::vector<std::vector<int>> cliques;  // expected maximal cliques
    std::string signature_key;
    TopologyKind kind;
    std::optional<std::uint64_t> bound;  // absent for Unclassified
    std::uint64_t kappa_n;
};

[[nodiscard]] const std::vector<TopologyFixture>& paper_fixtures();
/// Throws std::invalid_argument for an unknown name.
[[nodiscard]] const TopologyFixture& paper_fixture(const std::string& name);

// ---------------------------------------------------------------------------
// Single-case analysis.

struct CaseAnalysis {
    PolynomialSystem system;
    SolutionSet solutions;
    std::vector<RVector> real_solutions;
    BoundReport bounds;
};

[[nodiscard]] CaseAnalysis analyze_case(const Network& net, const TrackerConfig& cfg);

/// Stable hex digest (FNV-1a 64) of the settings that affect solutions.
[[nodiscard]] std::string config_digest(const TrackerConfig& cfg);
[[nodiscard]] nlohmann::json tracker_config_to_json(const TrackerConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
[[nodiscard]] TrackerConfig tracker_config_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Records and journal.

struct ExperimentRecord {
    std::string case_id;
    std::uint64_t seed = 0;
    int n_buses = 0;
    std::string topology;  // as in ExperimentOptions::topology
    std::string signature_key;
    double avg_clique_size = 0.0;
    std::string topology_class;
    int num_pv = 0;
    int num_pq = 0;
    int num_finite_complex = 0;
    int num_real = 0;
    int num_at_infinity = 0;
    int num_singular = 0;
    int num_failed = 0;
    int attempts = 0;
    std::uint64_t bezout = 0;
    std::uint64_t kappa_n = 0;
    std::optional<std::uint64_t> topology_bound;
    bool is_conjecture = false;
    std::optional<bool> bound_respected;
    std::int64_t runtime_ms = 0;
    std::string solver_config_digest;

    [[nodiscard]] bool certified() const noexcept { return num_failed == 0; }
};

[[nodiscard]] nlohmann::json record_to_json(const ExperimentRecord& r);
[[nodiscard]] ExperimentRecord record_from_json(const nlohmann::json& j);

/// Reads every complete line. A truncated final line (an interrupted append)
/// is ignored; any other malformed line throws std::runtime_error naming it.
[[nodiscard]] std::vector<ExperimentRecord> load_journal(const std::filesystem::path& path);

[[nodiscard]] ExperimentRecord make_record(const std::string& case_id, const std::string& topology,
                                           const Network& net, const CaseAnalysis& analysis,
                                           const std::string& digest, std::int64_t runtime_ms);

struct ExperimentOptions {
    int n_buses = 3;
    int count = 1;
    std::uint64_t base_seed = 1;
    // "random", "complete", "enum<k>" (k-th graph of enumerate_small_topologies)
    // or a fixture name such as "fig3a"
    std::string topology = "random";
    TrackerConfig tracker;
    GenConfig gen;  // distribution parameters; n_buses, seed, topology are overwritten
    int threads = 1;
    std::filesystem::path journal;  // empty: no persistence
    bool record_timing = true;
};

[[nodiscard]] std::string case_id_for(int n_buses, const std::string& topology, std::uint64_t seed);

/// Runs cases base_seed .. base_seed+count-1 and returns their records in
/// seed order, including ones already present in the journal.
[[nodiscard]] std::vector<ExperimentRecord> run_experiment(const ExperimentOptions& opts);

// ---------------------------------------------------------------------------
// Aggregation.

struct AggregateRow {
    std::string signature_key;
    int n_buses = 0;
    double avg_clique_size = 0.0;
    std::string topology_class;
    int max_num_finite_complex = 0;
    int max_num_real = 0;
    int case_count = 0;
    std::uint64_t kappa_n = 0;
    std::optional<std::uint64_t> applicable_bound;
    bool is_conjecture = false;
    bool bound_attained = false;
    std::vector<std::string> counterexamples;
};

struct AggregateReport {
    bool empty = true;
    int excluded_noncertified = 0;
    std::string solver_config_digest;
    std::vector<AggregateRow> rows;
};

/// Groups certified records by (n_buses, signature, class, bound). Throws
/// std::runtime_error when records carry different solver digests.
[[nodiscard]] AggregateReport aggregate(const std::vector<ExperimentRecord>& records);

/// Columns: signature_key, avg_clique_size, max_complex, max_real, n_buses,
/// kappa_n, applicable_bound, bound_attained.
void export_fig1_csv(const AggregateReport& report, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Figure checks.

struct FixtureCheck {
    std::string fixture;
    std::string expected;
    std::string observed;
    bool pass = false;
};

/// Cliques, class and bound of every fixture against the expected values.
[[nodiscard]] std::vector<FixtureCheck> verify_paper_examples();

}  // namespace flowroots
