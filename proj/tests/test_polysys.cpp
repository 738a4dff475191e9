#include <doctest.h>

#include <limits>

#include "flowroots/pfmodel.hpp"
#include "flowroots/polysys.hpp"
#include "flowroots/rng.hpp"
#include "oracles.hpp"

using namespace flowroots;

namespace {

Monomial mono(Complex c, std::vector<int> e) { return Monomial{c, std::move(e)}; }

PolynomialSystem x2_minus(double c) { return PolynomialSystem(1, {{mono(1.0, {2}), mono(-c, {0})}}); }

CVector vec(std::initializer_list<Complex> v) {
    CVector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (auto z : v) out[i++] = z;
    return out;
}

// Random dense degree-2 system in `n` variables.
PolynomialSystem random_quadratic(int n, Rng& rng) {
    std::vector<Polynomial> polys;
    for (int i = 0; i < n; ++i) {
        Polynomial p;
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b) {
                std::vector<int> e(static_cast<std::size_t>(n), 0);
                ++e[static_cast<std::size_t>(a)];
                ++e[static_cast<std::size_t>(b)];
                p.push_back(mono({rng.normal(0, 1), rng.normal(0, 1)}, e));
            }
        for (int a = 0; a < n; ++a) {
            std::vector<int> e(static_cast<std::size_t>(n), 0);
            e[static_cast<std::size_t>(a)] = 1;
            p.push_back(mono({rng.normal(0, 1), rng.normal(0, 1)}, e));
        }
        p.push_back(mono({rng.normal(0, 1), rng.normal(0, 1)}, std::vector<int>(static_cast<std::size_t>(n), 0)));
        polys.push_back(std::move(p));
    }
    return PolynomialSystem(static_cast<std::size_t>(n), std::move(polys));
}

}  // namespace

TEST_CASE("evaluate on x^2 - 1") {
    const auto sys = x2_minus(1.0);
    CHECK(std::abs(sys.evaluate(vec({1.0}))[0]) == 0.0);
    CHECK(sys.evaluate(vec({2.0}))[0] == Complex(3.0));
}

TEST_CASE("evaluate is linear in the coefficients") {
    Rng rng(3);
    const auto a = random_quadratic(3, rng);
    CVector x(3);
    for (int k = 0; k < 3; ++k) x[k] = {rng.normal(0, 1), rng.normal(0, 1)};
    const Complex alpha(0.7, -1.3);
    std::vector<Polynomial> scaled = a.polynomials();
    for (auto& p : scaled)
        for (auto& m : p) m.coefficient *= alpha;
    const PolynomialSystem b(3, scaled);
    CHECK((b.evaluate(x) - alpha * a.evaluate(x)).norm() < 1e-12);
}

TEST_CASE("evaluate rejects bad input") {
    const auto sys = x2_minus(1.0);
    CHECK_THROWS_AS((void)sys.evaluate(vec({1.0, 2.0})), ContractViolation);
    CHECK_THROWS_AS((void)sys.evaluate(vec({1e200})), NumericOverflow);
}

TEST_CASE("construction checks") {
    CHECK_THROWS_AS(PolynomialSystem(2, {{mono(1.0, {2, 0})}}), ContractViolation);
    CHECK_THROWS_AS(PolynomialSystem(1, {{mono(1.0, {2, 0})}}), ContractViolation);
    CHECK_THROWS_AS(PolynomialSystem(1, {{mono(0.0, {2})}}), ContractViolation);
    CHECK_THROWS_AS(PolynomialSystem(1, {{mono(3.0, {0})}}), ContractViolation);
    CHECK_THROWS_AS(PolynomialSystem(1, {{mono(1.0, {-1})}}), ContractViolation);
    CHECK_THROWS_AS(PolynomialSystem(1, {{mono(std::numeric_limits<double>::quiet_NaN(), {1})}}), ContractViolation);
}

TEST_CASE("jacobian by hand") {
    CHECK(x2_minus(1.0).jacobian(vec({3.0}))(0, 0) == Complex(6.0));
    // {x*y, x + y}
    const PolynomialSystem sys(2, {{mono(1.0, {1, 1})}, {mono(1.0, {1, 0}), mono(1.0, {0, 1})}});
    const CMatrix j = sys.jacobian(vec({1.0, 2.0}));
    CHECK(j(0, 0) == Complex(2.0));
    CHECK(j(0, 1) == Complex(1.0));
    CHECK(j(1, 0) == Complex(1.0));
    CHECK(j(1, 1) == Complex(1.0));
}

TEST_CASE("jacobian matches central differences") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto sys = random_quadratic(4, rng);
        CVector x(4);
        for (int k = 0; k < 4; ++k) x[k] = {rng.normal(0, 1), rng.normal(0, 1)};
        const CMatrix exact = sys.jacobian(x);
        const CMatrix fd = oracle::fd_jacobian(sys, x);
        CHECK((exact - fd).norm() / exact.norm() < 1e-5);
    }
}

TEST_CASE("degrees and total degree") {
    CHECK(x2_minus(1.0).degrees() == std::vector<int>{2});
    // {x*y + x, y^3}
    const PolynomialSystem a(2, {{mono(1.0, {1, 1}), mono(1.0, {1, 0})}, {mono(1.0, {0, 3})}});
    CHECK(a.degrees() == std::vector<int>{2, 3});
    // {x^2 - 1, y^3 - 1}
    const PolynomialSystem b(2, {{mono(1.0, {2, 0}), mono(-1.0, {0, 0})}, {mono(1.0, {0, 3}), mono(-1.0, {0, 0})}});
    CHECK(b.total_degree() == 6);
    CHECK(total_degree(b) == 6);
}

TEST_CASE("degrees ignore variable order and coefficient scale") {
    const PolynomialSystem a(2, {{mono(2.0, {1, 1}), mono(1.0, {1, 0})}, {mono(1.0, {0, 3})}});
    const PolynomialSystem swapped(2, {{mono(2.0, {1, 1}), mono(1.0, {0, 1})}, {mono(-5.0, {3, 0})}});
    CHECK(a.degrees() == swapped.degrees());
}

TEST_CASE("total degree overflow is reported") {
    std::vector<Polynomial> polys;
    for (int i = 0; i < 3; ++i) {
        std::vector<int> e(3, 0);
        e[static_cast<std::size_t>(i)] = 1 << 22;
        polys.push_back({mono(1.0, e), mono(-1.0, {0, 0, 0})});
    }
    const PolynomialSystem sys(3, polys);
    CHECK_THROWS_AS((void)sys.total_degree(), std::overflow_error);
}

TEST_CASE("power flow systems are 2n-2 quadrics") {
    for (int n : {3, 5}) {
        Network net;
        for (int i = 1; i <= n; ++i) net.buses.push_back(Bus{i, i == 1 ? BusKind::Slack : BusKind::PQ, -0.1, -0.05});
        for (int i = 1; i < n; ++i) net.branches.push_back(Branch{i, i + 1, 0.02, 0.1, 0.01});
        net.branches.push_back(Branch{1, n, 0.02, 0.1, 0.01});
        const auto sys = build_pf_system(net);
        CHECK(sys.degrees() == std::vector<int>(static_cast<std::size_t>(2 * n - 2), 2));
        CHECK(sys.total_degree() == (n == 3 ? 16u : 256u));
        CHECK(sys.has_real_coefficients());
    }
}
