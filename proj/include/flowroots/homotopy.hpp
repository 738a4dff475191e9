#pragma once

// Total-degree homotopy continuation.
//
// The homotopy is H(x, t) = gamma (1 - t) g(x) + t f(x) with g_i = c_i (x_i^d_i - 1).
// Internally paths are parametrised by the remaining distance s = 1 - t so
// that the endgame can approach t = 1 geometrically without losing precision.

#include <cstdint>
#include <string>
#include <vector>

#include "flowroots/polysys.hpp"

namespace flowroots {

struct TrackerConfig {
    double initial_step = 0.05;
    double min_step = 1e-7;
    double max_step = 0.1;
    double corrector_tol = 1e-10;
    int corrector_max_iters = 3;
    double divergence_norm = 1e8;
    double endgame_start = 0.9;
    double dedup_tol = 1e-6;
    double real_tol = 1e-6;
    std::uint64_t seed = 1;
    // Re-runs with a fresh gamma while paths fail.
    int max_attempts = 3;
    // Worker threads for path tracking; results do not depend on it.
    int threads = 1;

    /// Throws ContractViolation when a field is out of range.
    void validate() const;
};

enum class PathStatus { Finite, AtInfinity, Singular, Failed };

[[nodiscard]] const char* to_string(PathStatus s) noexcept;

struct PathResult {
    PathStatus status = PathStatus::Failed;
    CVector endpoint;           // last point reached; the solution when Finite
    double final_residual = 0;  // inf-norm of the target at endpoint
    double condition = 0;       // Jacobian condition estimate at endpoint
    int steps_taken = 0;
    int start_index = 0;
};

struct StartSystem {
    PolynomialSystem system;
    std::vector<CVector> solutions;
};

/// g_i = c_i (x_i^d_i - 1) with seeded random nonzero c_i, plus every
/// combination of d_i-th roots of unity (ordered like an odometer, last
/// variable fastest).
[[nodiscard]] StartSystem build_start_system(const PolynomialSystem& target, std::uint64_t seed);

class Homotopy {
public:
    /// Requires matching variable counts and per-equation degrees, |gamma| = 1.
    Homotopy(PolynomialSystem start, PolynomialSystem target, Complex gamma);

    [[nodiscard]] const PolynomialSystem& start() const noexcept { return start_; }
    [[nodiscard]] const PolynomialSystem& target() const noexcept { return target_; }
    [[nodiscard]] Complex gamma() const noexcept { return gamma_; }

private:
    PolynomialSystem start_;
    PolynomialSystem target_;
    Complex gamma_;
};

/// Tracks one path from t = 0 to t = 1. Never throws for numerical trouble;
/// every outcome is encoded in the returned status.
[[nodiscard]] PathResult track_path(const Homotopy& h, const CVector& start_point, const TrackerConfig& cfg,
                                    int start_index = 0);

struct SolutionSet {
    std::vector<CVector> finite;  // deduplicated
    std::uint64_t num_paths = 0;
    int num_finite_paths = 0;  // finite endpoints counted with multiplicity
    int num_at_infinity = 0;
    int num_singular = 0;
    int num_failed = 0;
    std::vector<std::size_t> real_indices;  // into `finite`
    int attempts = 0;
    Complex gamma;
    std::vector<PathResult> paths;

    [[nodiscard]] bool certified() const noexcept { return num_failed == 0; }
    [[nodiscard]] std::size_t num_real() const noexcept { return real_indices.size(); }
};

/// Tracks all total-degree paths, deduplicates and marks real solutions. The
/// result is a function of (target, cfg) only, whatever cfg.threads is.
[[nodiscard]] SolutionSet solve_all(const PolynomialSystem& target, const TrackerConfig& cfg);

/// Real solutions: imaginary parts below real_tol are dropped, then one real
/// Newton step sharpens each point; points whose target residual is not
/// below 1e-8 afterwards are discarded.
[[nodiscard]] std::vector<RVector> filter_real(const PolynomialSystem& target, const SolutionSet& sols,
                                               double real_tol);

/// Largest over smallest singular value.
[[nodiscard]] double condition_number(const CMatrix& m);

}  // namespace flowroots
