#include "flowroots/homotopy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "flowroots/rng.hpp"

namespace flowroots {

namespace {

// Endpoint is singular above this Jacobian condition estimate.
constexpr double kSingularCondition = 1e12;
// Endgame: try to finish on the target once s drops below this, and again
// each time s shrinks by kFinishEvery.
constexpr double kFinishFrom = 1e-6;
constexpr double kFinishEvery = 1e-2;
// Tracking stops at this remaining distance.
constexpr double kFinalS = 1e-14;
constexpr int kFinishNewtonIters = 8;
// Largest relative step in log(s) during the endgame.
constexpr double kMaxRelativeStep = 0.5;
constexpr int kGrowAfter = 4;
constexpr double kGrowFactor = 1.5;
// Norm ratio over one growth window (s shrinking 100x) that marks a
// diverging path; s^(-1/4) growth gives 3.16.
constexpr double kDivergingGrowth = 3.0;
// A step collapse this close to t = 1 at a target Jacobian this badly
// conditioned is read as convergence to a singular endpoint.
constexpr double kStallSingularS = 1e-4;
constexpr double kStallSingularCondition = 1e6;

bool all_finite(const CVector& v) noexcept {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) return false;
    return true;
}

Complex random_unit(Rng& rng) { return std::polar(1.0, rng.uniform(0.0, 2.0 * std::numbers::pi)); }

// Evaluation workspace for one path; owns all mutable state.
class PathTracker {
public:
    PathTracker(const Homotopy& h, const TrackerConfig& cfg)
        : h_(h), cfg_(cfg), n_(static_cast<Eigen::Index>(h.target().num_vars())),
          f_(n_), g_(n_), hv_(n_), jf_(n_, n_), jg_(n_, n_), hx_(n_, n_) {}

    PathResult run(const CVector& start_point, int start_index);

private:
    // H and H_x at remaining distance s.
    bool eval(const CVector& x, double s, bool need_ds) {
        h_.target().evaluate_into(x, f_);
        h_.start().evaluate_into(x, g_);
        h_.target().jacobian_into(x, jf_);
        h_.start().jacobian_into(x, jg_);
        const Complex gs = h_.gamma() * s;
        hv_ = (1.0 - s) * f_ + gs * g_;
        hx_ = (1.0 - s) * jf_ + gs * jg_;
        if (need_ds) hs_ = -f_ + h_.gamma() * g_;
        return all_finite(hv_) && hx_.allFinite();
    }

    // Newton on H(., s) starting at x. Converged iff the update falls below
    // corrector_tol relative to |x| within the iteration budget.
    bool correct(CVector& x, double s, int max_iters) {
        double prev = 0.0;
        for (int k = 0; k < max_iters; ++k) {
            if (!eval(x, s, false)) return false;
            const CVector dx = hx_.partialPivLu().solve(-hv_);
            if (!all_finite(dx)) return false;
            x += dx;
            const double step = inf_norm(dx);
            const double scale = 1.0 + inf_norm(x);
            if (step <= cfg_.corrector_tol * scale) return true;
            if (k == 0 && step > 0.1 * scale) return false;
            if (k > 0 && step > 0.5 * prev) return false;
            prev = step;
        }
        return false;
    }

    // Euler predictor: x(s - ds) ~ x + ds * H_x^{-1} H_s.
    bool predict(const CVector& x, double s, double ds, CVector& out) {
        if (!eval(x, s, true)) return false;
        const CVector dxds = hx_.partialPivLu().solve(-hs_);
        if (!all_finite(dxds)) return false;
        out = x - ds * dxds;
        return true;
    }

    // Newton on the target itself from x. Accepts only a nearby, well
    // conditioned root.
    bool finish(const CVector& x, CVector& root, double& cond) {
        root = x;
        for (int k = 0; k < kFinishNewtonIters; ++k) {
            h_.target().evaluate_into(root, f_);
            h_.target().jacobian_into(root, jf_);
            if (!all_finite(f_) || !jf_.allFinite()) return false;
            const CVector dx = jf_.partialPivLu().solve(-f_);
            if (!all_finite(dx)) return false;
            root += dx;
            if (inf_norm(dx) <= cfg_.corrector_tol * (1.0 + inf_norm(root))) {
                h_.target().evaluate_into(root, f_);
                h_.target().jacobian_into(root, jf_);
                cond = condition_number(jf_);
                return inf_norm(f_) < cfg_.corrector_tol && cond < kSingularCondition &&
                       inf_norm(root - x) <= 1e-4 * (1.0 + inf_norm(x));
            }
        }
        return false;
    }

    double target_residual(const CVector& x) {
        h_.target().evaluate_into(x, f_);
        return all_finite(f_) ? inf_norm(f_) : std::numeric_limits<double>::infinity();
    }

    const Homotopy& h_;
    const TrackerConfig& cfg_;
    Eigen::Index n_;
    CVector f_, g_, hv_, hs_;
    CMatrix jf_, jg_, hx_;
};

PathResult PathTracker::run(const CVector& start_point, int start_index) {
    PathResult res;
    res.start_index = start_index;

    CVector x = start_point;
    double s = 1.0;
    const double endgame_s = 1.0 - cfg_.endgame_start;
    double h = cfg_.initial_step;  // absolute step in t before the endgame
    double rho = 0.0;              // relative step in log(s) inside it
    bool endgame = false;
    int successes = 0;
    double next_finish = kFinishFrom;
    // Norm growth is measured over windows in which s shrinks by kFinishEvery.
    double window_s = 0.0;
    double window_norm = 0.0;
    double growth = 1.0;

    auto done = [&](PathStatus st) {
        res.status = st;
        res.endpoint = x;
        res.final_residual = target_residual(x);
        if (st != PathStatus::Finite && all_finite(x)) {
            h_.target().jacobian_into(x, jf_);
            res.condition = jf_.allFinite() ? condition_number(jf_) : std::numeric_limits<double>::infinity();
        }
        return res;
    };

    while (s > kFinalS) {
        if (!endgame && s <= endgame_s) {
            endgame = true;
            rho = std::min(h / s, kMaxRelativeStep);
            window_s = s;
            window_norm = inf_norm(x);
        }

        double ds = 0.0;
        if (!endgame) {
            if (h < cfg_.min_step) return done(PathStatus::Failed);
            ds = std::min(h, s - kFinalS);
        } else {
            if (rho < cfg_.min_step) {
                if (inf_norm(x) > std::sqrt(cfg_.divergence_norm)) return done(PathStatus::AtInfinity);
                // Stalling right next to an ill-conditioned point of the
                // target: the path runs into a singular (possibly
                // non-isolated) endpoint.
                if (s < kStallSingularS) {
                    h_.target().jacobian_into(x, jf_);
                    if (jf_.allFinite() && condition_number(jf_) > kStallSingularCondition)
                        return done(PathStatus::Singular);
                }
                return done(PathStatus::Failed);
            }
            ds = std::min({cfg_.max_step / 10.0, rho * s, s - kFinalS * 0.5});
        }

        CVector xn;
        bool ok = predict(x, s, ds, xn) && correct(xn, s - ds, cfg_.corrector_max_iters);
        if (ok) {
            x = std::move(xn);
            s -= ds;
            ++res.steps_taken;
            if (inf_norm(x) > cfg_.divergence_norm) return done(PathStatus::AtInfinity);
            if (++successes >= kGrowAfter) {
                successes = 0;
                if (endgame)
                    rho = std::min(rho * kGrowFactor, kMaxRelativeStep);
                else
                    h = std::min(h * kGrowFactor, cfg_.max_step);
            }
            if (s <= next_finish) {
                CVector root;
                double cond = 0.0;
                if (finish(x, root, cond)) {
                    x = root;
                    res.condition = cond;
                    res.status = PathStatus::Finite;
                    res.endpoint = x;
                    res.final_residual = target_residual(x);
                    return res;
                }
                next_finish = s * kFinishEvery;
            }
            if (endgame && s <= window_s * kFinishEvery) {
                const double nrm = inf_norm(x);
                growth = nrm / window_norm;
                window_s = s;
                window_norm = nrm;
                // Paths to infinity grow like s^(-1/w); for w >= 2 the full
                // divergence_norm is out of reach in double precision.
                if (nrm > std::sqrt(cfg_.divergence_norm) && growth > kDivergingGrowth)
                    return done(PathStatus::AtInfinity);
            }
        } else {
            successes = 0;
            if (endgame)
                rho *= 0.5;
            else
                h *= 0.5;
        }
    }

    // Reached the end of the parameter range without a clean root: either the
    // norm is still growing (a path to infinity with a large winding number)
    // or the path converges to a singular endpoint.
    return done(growth > kDivergingGrowth ? PathStatus::AtInfinity : PathStatus::Singular);
}

}  // namespace

void TrackerConfig::validate() const {
    if (!(0.0 < min_step && min_step < initial_step && initial_step <= max_step && max_step < 1.0))
        throw ContractViolation("tracker steps must satisfy 0 < min_step < initial_step <= max_step < 1");
    if (!(corrector_tol > 0.0 && divergence_norm > 0.0 && dedup_tol > 0.0 && real_tol > 0.0))
        throw ContractViolation("tracker tolerances must be positive");
    if (!(endgame_start > 0.0 && endgame_start < 1.0)) throw ContractViolation("endgame_start must lie in (0, 1)");
    if (corrector_max_iters < 1) throw ContractViolation("corrector_max_iters must be at least 1");
    if (max_attempts < 1) throw ContractViolation("max_attempts must be at least 1");
    if (threads < 1) throw ContractViolation("threads must be at least 1");
}

const char* to_string(PathStatus s) noexcept {
    switch (s) {
        case PathStatus::Finite: return "finite";
        case PathStatus::AtInfinity: return "at_infinity";
        case PathStatus::Singular: return "singular";
        case PathStatus::Failed: return "failed";
    }
    return "failed";
}

double condition_number(const CMatrix& m) {
    Eigen::JacobiSVD<CMatrix> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0.0;
    const double smallest = sv[sv.size() - 1];
    if (smallest == 0.0) return std::numeric_limits<double>::infinity();
    return sv[0] / smallest;
}

StartSystem build_start_system(const PolynomialSystem& target, std::uint64_t seed) {
    const std::size_t n = target.num_vars();
    const std::vector<int> deg = target.degrees();
    Rng rng(seed, 0x5747);

    std::vector<Polynomial> polys;
    polys.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Complex c = random_unit(rng) * rng.uniform(0.5, 1.5);
        Monomial lead{c, std::vector<int>(n, 0)};
        lead.exponents[i] = deg[i];
        polys.push_back({lead, Monomial{-c, std::vector<int>(n, 0)}});
    }
    StartSystem out{PolynomialSystem(n, std::move(polys), target.var_names()), {}};

    const std::uint64_t count = target.total_degree();
    out.solutions.reserve(count);
    std::vector<int> digit(n, 0);
    for (std::uint64_t k = 0; k < count; ++k) {
        CVector p(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            p[static_cast<Eigen::Index>(i)] = std::polar(1.0, 2.0 * std::numbers::pi * digit[i] / deg[i]);
        out.solutions.push_back(std::move(p));
        for (std::size_t i = n; i-- > 0;) {
            if (++digit[i] < deg[i]) break;
            digit[i] = 0;
        }
    }
    return out;
}

Homotopy::Homotopy(PolynomialSystem start, PolynomialSystem target, Complex gamma)
    : start_(std::move(start)), target_(std::move(target)), gamma_(gamma) {
    if (start_.num_vars() != target_.num_vars())
        throw ContractViolation("homotopy start and target have different variable counts");
    if (start_.degrees() != target_.degrees())
        throw ContractViolation("homotopy start and target have different equation degrees");
    if (std::abs(std::abs(gamma_) - 1.0) > 1e-12) throw ContractViolation("homotopy gamma must have unit modulus");
}

PathResult track_path(const Homotopy& h, const CVector& start_point, const TrackerConfig& cfg, int start_index) {
    if (static_cast<std::size_t>(start_point.size()) != h.target().num_vars())
        throw ContractViolation("track_path: start point has wrong length");
    PathTracker tracker(h, cfg);
    return tracker.run(start_point, start_index);
}

namespace {

std::vector<PathResult> track_all(const Homotopy& h, const std::vector<CVector>& starts, const TrackerConfig& cfg) {
    std::vector<PathResult> results(starts.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < starts.size(); i = next++)
            results[i] = track_path(h, starts[i], cfg, static_cast<int>(i));
    };
    const auto nthreads = static_cast<std::size_t>(std::max(1, cfg.threads));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < std::min(nthreads, starts.size()); ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return results;
}

// Deduplicates finite endpoints in path order. A second path landing on a
// known nonsingular endpoint means the tracker jumped between paths, so that
// path is demoted to Failed.
void collect(SolutionSet& out, const TrackerConfig& cfg) {
    out.finite.clear();
    out.num_finite_paths = out.num_at_infinity = out.num_singular = out.num_failed = 0;
    for (auto& p : out.paths) {
        if (p.status == PathStatus::Finite) {
            const bool dup = std::any_of(out.finite.begin(), out.finite.end(), [&](const CVector& v) {
                return inf_norm(v - p.endpoint) < cfg.dedup_tol;
            });
            if (dup)
                p.status = PathStatus::Failed;
            else
                out.finite.push_back(p.endpoint);
        }
        switch (p.status) {
            case PathStatus::Finite: ++out.num_finite_paths; break;
            case PathStatus::AtInfinity: ++out.num_at_infinity; break;
            case PathStatus::Singular: ++out.num_singular; break;
            case PathStatus::Failed: ++out.num_failed; break;
        }
    }
    out.real_indices.clear();
    for (std::size_t i = 0; i < out.finite.size(); ++i)
        if (out.finite[i].imag().cwiseAbs().maxCoeff() < cfg.real_tol) out.real_indices.push_back(i);
}

}  // namespace

SolutionSet solve_all(const PolynomialSystem& target, const TrackerConfig& cfg) {
    cfg.validate();
    const StartSystem start = build_start_system(target, cfg.seed);
    Rng gamma_rng(cfg.seed, 0x6A4D);

    SolutionSet out;
    out.num_paths = start.solutions.size();
    for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
        TrackerConfig c = cfg;
        // Later attempts use a fresh gamma and a tighter step cap.
        const double shrink = std::pow(2.0, attempt);
        c.max_step = cfg.max_step / shrink;
        c.initial_step = std::min(cfg.initial_step, c.max_step);
        if (c.initial_step <= c.min_step) c.initial_step = c.max_step;

        out.gamma = random_unit(gamma_rng);
        const Homotopy h(start.system, target, out.gamma);
        out.paths = track_all(h, start.solutions, c);
        out.attempts = attempt + 1;
        collect(out, cfg);
        if (out.certified()) break;
    }
    return out;
}

std::vector<RVector> filter_real(const PolynomialSystem& target, const SolutionSet& sols, double real_tol) {
    std::vector<RVector> out;
    for (const auto& v : sols.finite) {
        if (v.imag().cwiseAbs().maxCoeff() >= real_tol) continue;
        RVector x = v.real();
        const CVector xc = x.cast<Complex>();
        const Eigen::MatrixXd j = target.jacobian(xc).real();
        const RVector f = target.evaluate(xc).real();
        const RVector dx = j.partialPivLu().solve(-f);
        if (dx.allFinite()) x += dx;
        CVector check = x.cast<Complex>();
        CVector r(check.size());
        target.evaluate_into(check, r);
        if (all_finite(r) && inf_norm(r) < 1e-8) out.push_back(std::move(x));
    }
    return out;
}

}  // namespace flowroots
