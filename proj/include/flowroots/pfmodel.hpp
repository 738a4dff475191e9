#pragma once

// Bus/branch network model and its rectangular-coordinate power flow system.
//
// Conventions:
//   - every electrical quantity is per unit on a 100 MVA base
//   - p_inject / q_inject are NET injections (generation minus load), so a
//     load has negative p_inject
//   - constant-impedance load components live in shunt_g / shunt_b; a load
//     drawing Pz + jQz at 1 p.u. has shunt_g = Pz, shunt_b = -Qz
//   - transformer taps sit on the from side; theta is in degrees

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "flowroots/polysys.hpp"

namespace flowroots {

/// Invalid network data (unknown bus, disconnected graph, bad parameters).
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class BusKind { PQ, PV, Slack };

[[nodiscard]] const char* to_string(BusKind kind) noexcept;
[[nodiscard]] BusKind bus_kind_from_string(const std::string& s);

struct Bus {
    int id = 0;
    BusKind kind = BusKind::PQ;
    double p_inject = 0.0;
    double q_inject = 0.0;    // PQ only
    double v_setpoint = 1.0;  // PV and Slack
    double shunt_g = 0.0;
    double shunt_b = 0.0;
};

struct Branch {
    int from_bus = 0;
    int to_bus = 0;
    double r = 0.0;
    double x = 0.0;
    double b_shunt = 0.0;  // total line charging, half at each end
    double tau = 1.0;
    double theta_deg = 0.0;
};

struct Network {
    std::string name;
    std::optional<std::uint64_t> seed;
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    // Free-form provenance, e.g. the random generator algorithm that built it.
    std::string generator;

    [[nodiscard]] int num_buses() const noexcept { return static_cast<int>(buses.size()); }
    [[nodiscard]] const Bus& bus(int id) const { return buses.at(static_cast<std::size_t>(id - 1)); }
    [[nodiscard]] int slack_id() const;
};

/// Throws ModelError when any Network/Bus/Branch invariant fails.
void validate(const Network& net);

struct AdmittanceMatrix {
    Eigen::MatrixXd g;
    Eigen::MatrixXd b;

    [[nodiscard]] Eigen::MatrixXcd complex() const;
};

[[nodiscard]] AdmittanceMatrix build_admittance(const Network& net);

/// Variables are (Vd_i, Vq_i) for each non-slack bus in id order. For each
/// such bus the equations are the active balance followed by either the
/// reactive balance (PQ) or the squared voltage magnitude (PV). The slack
/// voltage is substituted as the constant vset + j0.
[[nodiscard]] PolynomialSystem build_pf_system(const Network& net);

/// Inf-norm of the power flow residual at `candidate` (length 2n-2).
[[nodiscard]] double residual(const Network& net, const CVector& candidate);

/// Full bus voltage phasors (slack included) for a real solution vector.
[[nodiscard]] Eigen::VectorXcd bus_voltages(const Network& net, const RVector& solution);

struct BusPower {
    int id = 0;
    BusKind kind = BusKind::PQ;
    double p = 0.0;
    double q = 0.0;
};

/// Net injections computed from the voltages at a real solution. Slack P/Q and
/// PV-bus Q are the output quantities; the rest reproduce the specified data.
[[nodiscard]] std::vector<BusPower> recover_outputs(const Network& net, const RVector& solution);

}  // namespace flowroots
