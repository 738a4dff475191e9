#include "flowroots/pfmodel.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace flowroots {

const char* to_string(BusKind kind) noexcept {
    switch (kind) {
        case BusKind::PQ: return "PQ";
        case BusKind::PV: return "PV";
        case BusKind::Slack: return "Slack";
    }
    return "PQ";
}

BusKind bus_kind_from_string(const std::string& s) {
    if (s == "PQ") return BusKind::PQ;
    if (s == "PV") return BusKind::PV;
    if (s == "Slack") return BusKind::Slack;
    throw ModelError("unknown bus kind '" + s + "'");
}

int Network::slack_id() const {
    for (const auto& b : buses)
        if (b.kind == BusKind::Slack) return b.id;
    throw ModelError("network has no slack bus");
}

void validate(const Network& net) {
    const int n = net.num_buses();
    if (n < 2) throw ModelError("network needs at least two buses");
    int slacks = 0;
    for (int i = 0; i < n; ++i) {
        const Bus& b = net.buses[static_cast<std::size_t>(i)];
        if (b.id != i + 1) throw ModelError("bus ids must be 1..n in order; found " + std::to_string(b.id));
        if (b.kind == BusKind::Slack) ++slacks;
        if (b.kind != BusKind::PQ && !(b.v_setpoint > 0.0))
            throw ModelError("bus " + std::to_string(b.id) + " needs a positive voltage setpoint");
        for (double v : {b.p_inject, b.q_inject, b.v_setpoint, b.shunt_g, b.shunt_b})
            if (!std::isfinite(v)) throw ModelError("bus " + std::to_string(b.id) + " has a non-finite value");
    }
    if (slacks != 1) throw ModelError("network must have exactly one slack bus, found " + std::to_string(slacks));

    std::vector<int> parent(static_cast<std::size_t>(n + 1));
    for (int i = 0; i <= n; ++i) parent[static_cast<std::size_t>(i)] = i;
    auto find = [&](int v) {
        while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
        return v;
    };
    int components = n;
    for (const auto& br : net.branches) {
        const std::string tag = "branch " + std::to_string(br.from_bus) + "-" + std::to_string(br.to_bus);
        if (br.from_bus < 1 || br.from_bus > n || br.to_bus < 1 || br.to_bus > n)
            throw ModelError(tag + " references an unknown bus");
        if (br.from_bus == br.to_bus) throw ModelError(tag + " is a self-loop");
        if (!(br.r >= 0.0)) throw ModelError(tag + " has negative resistance");
        if (br.x == 0.0 || !std::isfinite(br.x)) throw ModelError(tag + " has zero reactance");
        if (!(br.tau > 0.0)) throw ModelError(tag + " has non-positive tap ratio");
        if (!std::isfinite(br.b_shunt) || !std::isfinite(br.theta_deg) || !std::isfinite(br.r))
            throw ModelError(tag + " has a non-finite value");
        const int a = find(br.from_bus), c = find(br.to_bus);
        if (a != c) {
            parent[static_cast<std::size_t>(a)] = c;
            --components;
        }
    }
    if (components != 1) throw ModelError("network '" + net.name + "' is disconnected");
}

Eigen::MatrixXcd AdmittanceMatrix::complex() const {
    Eigen::MatrixXcd y(g.rows(), g.cols());
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index k = 0; k < g.cols(); ++k) y(i, k) = Complex(g(i, k), b(i, k));
    return y;
}

AdmittanceMatrix build_admittance(const Network& net) {
    const int n = net.num_buses();
    for (const auto& br : net.branches)
        if (br.from_bus < 1 || br.from_bus > n || br.to_bus < 1 || br.to_bus > n)
            throw ModelError("branch " + std::to_string(br.from_bus) + "-" + std::to_string(br.to_bus) +
                             " references an unknown bus");

    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
    const Complex j(0.0, 1.0);
    for (const auto& br : net.branches) {
        const Complex ys = 1.0 / Complex(br.r, br.x);
        const Complex ych = j * (br.b_shunt / 2.0);
        const Complex tap = std::polar(br.tau, br.theta_deg * std::numbers::pi / 180.0);
        const int f = br.from_bus - 1, t = br.to_bus - 1;
        y(f, f) += (ys + ych) / (br.tau * br.tau);
        y(t, t) += ys + ych;
        y(f, t) -= ys / std::conj(tap);
        y(t, f) -= ys / tap;
    }
    for (const auto& b : net.buses) y(b.id - 1, b.id - 1) += Complex(b.shunt_g, b.shunt_b);
    return {y.real(), y.imag()};
}

namespace {

// c + sum coef_v * x_v with at most one variable: a bus voltage component
// is either a variable (non-slack) or a constant (slack).
struct Affine {
    double constant = 0.0;
    int var = -1;
    double coef = 0.0;
};

class QuadraticBuilder {
public:
    explicit QuadraticBuilder(std::size_t num_vars) : num_vars_(num_vars) {}

    // += scale * a * b
    void add_product(double scale, const Affine& a, const Affine& b) {
        if (scale == 0.0) return;
        add({}, scale * a.constant * b.constant);
        if (a.var >= 0) add({a.var}, scale * a.coef * b.constant);
        if (b.var >= 0) add({b.var}, scale * a.constant * b.coef);
        if (a.var >= 0 && b.var >= 0) add({a.var, b.var}, scale * a.coef * b.coef);
    }

    void add_constant(double c) { add({}, c); }

    [[nodiscard]] Polynomial build() const {
        Polynomial p;
        for (const auto& [exps, c] : terms_)
            if (c != 0.0) p.push_back({Complex(c, 0.0), exps});
        return p;
    }

private:
    void add(std::initializer_list<int> vars, double c) {
        if (c == 0.0) return;
        std::vector<int> exps(num_vars_, 0);
        for (int v : vars) ++exps[static_cast<std::size_t>(v)];
        terms_[exps] += c;
    }

    std::size_t num_vars_;
    std::map<std::vector<int>, double> terms_;
};

struct VoltageForms {
    std::vector<Affine> vd, vq;  // indexed by bus - 1
    std::vector<std::string> names;
    std::vector<int> bus_of_var_pair;  // non-slack bus ids in variable order
};

VoltageForms voltage_forms(const Network& net) {
    VoltageForms f;
    const int n = net.num_buses();
    f.vd.resize(static_cast<std::size_t>(n));
    f.vq.resize(static_cast<std::size_t>(n));
    int next = 0;
    for (const auto& b : net.buses) {
        const auto i = static_cast<std::size_t>(b.id - 1);
        if (b.kind == BusKind::Slack) {
            f.vd[i] = {b.v_setpoint, -1, 0.0};
            f.vq[i] = {0.0, -1, 0.0};
        } else {
            f.vd[i] = {0.0, next, 1.0};
            f.vq[i] = {0.0, next + 1, 1.0};
            f.names.push_back("Vd" + std::to_string(b.id));
            f.names.push_back("Vq" + std::to_string(b.id));
            f.bus_of_var_pair.push_back(b.id);
            next += 2;
        }
    }
    return f;
}

// Active and reactive balance polynomials (without the specified injection).
void add_active(QuadraticBuilder& q, const AdmittanceMatrix& y, const VoltageForms& f, int i, int n) {
    const auto ii = static_cast<std::size_t>(i);
    for (int k = 0; k < n; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const double g = y.g(i, k), b = y.b(i, k);
        q.add_product(g, f.vd[ii], f.vd[kk]);
        q.add_product(-b, f.vd[ii], f.vq[kk]);
        q.add_product(b, f.vq[ii], f.vd[kk]);
        q.add_product(g, f.vq[ii], f.vq[kk]);
    }
}

void add_reactive(QuadraticBuilder& q, const AdmittanceMatrix& y, const VoltageForms& f, int i, int n) {
    const auto ii = static_cast<std::size_t>(i);
    for (int k = 0; k < n; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const double g = y.g(i, k), b = y.b(i, k);
        q.add_product(-b, f.vd[ii], f.vd[kk]);
        q.add_product(-g, f.vd[ii], f.vq[kk]);
        q.add_product(g, f.vq[ii], f.vd[kk]);
        q.add_product(-b, f.vq[ii], f.vq[kk]);
    }
}

}  // namespace

PolynomialSystem build_pf_system(const Network& net) {
    validate(net);
    const AdmittanceMatrix y = build_admittance(net);
    const VoltageForms f = voltage_forms(net);
    const int n = net.num_buses();
    const std::size_t nv = f.names.size();

    std::vector<Polynomial> polys;
    polys.reserve(nv);
    for (int id : f.bus_of_var_pair) {
        const Bus& bus = net.bus(id);
        const int i = id - 1;
        QuadraticBuilder p(nv);
        add_active(p, y, f, i, n);
        p.add_constant(-bus.p_inject);
        polys.push_back(p.build());

        QuadraticBuilder second(nv);
        if (bus.kind == BusKind::PQ) {
            add_reactive(second, y, f, i, n);
            second.add_constant(-bus.q_inject);
        } else {
            const auto ii = static_cast<std::size_t>(i);
            second.add_product(1.0, f.vd[ii], f.vd[ii]);
            second.add_product(1.0, f.vq[ii], f.vq[ii]);
            second.add_constant(-bus.v_setpoint * bus.v_setpoint);
        }
        polys.push_back(second.build());
    }
    try {
        return PolynomialSystem(nv, std::move(polys), f.names);
    } catch (const ContractViolation& e) {
        throw ModelError(std::string("power flow system is degenerate: ") + e.what());
    }
}

double residual(const Network& net, const CVector& candidate) {
    const PolynomialSystem sys = build_pf_system(net);
    if (static_cast<std::size_t>(candidate.size()) != sys.num_vars())
        throw ContractViolation("residual: candidate has " + std::to_string(candidate.size()) +
                                " entries, expected " + std::to_string(sys.num_vars()));
    CVector out(candidate.size());
    sys.evaluate_into(candidate, out);
    return inf_norm(out);
}

Eigen::VectorXcd bus_voltages(const Network& net, const RVector& solution) {
    const int n = net.num_buses();
    if (solution.size() != 2 * (n - 1))
        throw ContractViolation("solution has " + std::to_string(solution.size()) + " entries, expected " +
                                std::to_string(2 * (n - 1)));
    Eigen::VectorXcd v(n);
    int next = 0;
    for (const auto& b : net.buses) {
        if (b.kind == BusKind::Slack) {
            v[b.id - 1] = Complex(b.v_setpoint, 0.0);
        } else {
            v[b.id - 1] = Complex(solution[next], solution[next + 1]);
            next += 2;
        }
    }
    return v;
}

std::vector<BusPower> recover_outputs(const Network& net, const RVector& solution) {
    const Eigen::VectorXcd v = bus_voltages(net, solution);
    const Eigen::VectorXcd current = build_admittance(net).complex() * v;
    std::vector<BusPower> out;
    out.reserve(net.buses.size());
    for (const auto& b : net.buses) {
        const Complex s = v[b.id - 1] * std::conj(current[b.id - 1]);
        out.push_back({b.id, b.kind, s.real(), s.imag()});
    }
    return out;
}

}  // namespace flowroots
