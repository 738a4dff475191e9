#include "flowroots/polysys.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace flowroots {

namespace {

bool is_finite(Complex c) noexcept { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

Complex ipow(Complex base, int e) noexcept {
    Complex r = 1.0;
    for (int k = 0; k < e; ++k) r *= base;
    return r;
}

}  // namespace

int Monomial::total_degree() const noexcept {
    int d = 0;
    for (int e : exponents) d += e;
    return d;
}

PolynomialSystem::PolynomialSystem(std::size_t num_vars, std::vector<Polynomial> polynomials,
                                   std::vector<std::string> var_names)
    : num_vars_(num_vars), polys_(std::move(polynomials)), names_(std::move(var_names)) {
    if (num_vars_ == 0) throw ContractViolation("polynomial system needs at least one variable");
    if (polys_.size() != num_vars_)
        throw ContractViolation("polynomial system is not square: " + std::to_string(polys_.size()) +
                                " equations, " + std::to_string(num_vars_) + " variables");
    if (names_.empty()) {
        for (std::size_t j = 0; j < num_vars_; ++j) names_.push_back("x" + std::to_string(j + 1));
    } else if (names_.size() != num_vars_) {
        throw ContractViolation("variable name count does not match variable count");
    }

    for (std::size_t i = 0; i < polys_.size(); ++i) {
        bool nontrivial = false;
        int degree = 0;
        for (const auto& m : polys_[i]) {
            if (m.exponents.size() != num_vars_)
                throw ContractViolation("monomial exponent vector has wrong length in polynomial " +
                                        std::to_string(i));
            if (std::any_of(m.exponents.begin(), m.exponents.end(), [](int e) { return e < 0; }))
                throw ContractViolation("negative exponent in polynomial " + std::to_string(i));
            if (!is_finite(m.coefficient))
                throw ContractViolation("non-finite coefficient in polynomial " + std::to_string(i));
            if (m.coefficient != Complex(0.0)) {
                nontrivial = true;
                degree = std::max(degree, m.total_degree());
            }
        }
        if (!nontrivial) throw ContractViolation("polynomial " + std::to_string(i) + " is identically zero");
        if (degree < 1) throw ContractViolation("polynomial " + std::to_string(i) + " is constant");
    }

    compiled_.reserve(polys_.size());
    jac_.reserve(polys_.size() * num_vars_);
    for (const auto& p : polys_) {
        compiled_.push_back(compile(p));
        for (std::size_t j = 0; j < num_vars_; ++j) {
            Polynomial d;
            for (const auto& m : p) {
                const int e = m.exponents[j];
                if (e == 0 || m.coefficient == Complex(0.0)) continue;
                Monomial dm{m.coefficient * static_cast<double>(e), m.exponents};
                dm.exponents[j] = e - 1;
                d.push_back(std::move(dm));
            }
            jac_.push_back(compile(d));
        }
    }
}

PolynomialSystem::CompiledPoly PolynomialSystem::compile(const Polynomial& p) {
    CompiledPoly out;
    out.reserve(p.size());
    for (const auto& m : p) {
        if (m.coefficient == Complex(0.0)) continue;
        Term t{m.coefficient, {}};
        for (std::size_t v = 0; v < m.exponents.size(); ++v)
            if (m.exponents[v] > 0) t.factors.emplace_back(static_cast<int>(v), m.exponents[v]);
        out.push_back(std::move(t));
    }
    return out;
}

Complex PolynomialSystem::eval_compiled(const CompiledPoly& p, const CVector& x) noexcept {
    Complex sum = 0.0;
    for (const auto& t : p) {
        Complex prod = t.coefficient;
        for (const auto& [v, e] : t.factors) prod *= (e == 1 ? x[v] : ipow(x[v], e));
        sum += prod;
    }
    return sum;
}

void PolynomialSystem::evaluate_into(const CVector& point, CVector& out) const noexcept {
    for (std::size_t i = 0; i < compiled_.size(); ++i)
        out[static_cast<Eigen::Index>(i)] = eval_compiled(compiled_[i], point);
}

void PolynomialSystem::jacobian_into(const CVector& point, CMatrix& out) const noexcept {
    for (std::size_t i = 0; i < num_vars_; ++i)
        for (std::size_t j = 0; j < num_vars_; ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                eval_compiled(jac_[i * num_vars_ + j], point);
}

CVector PolynomialSystem::evaluate(const CVector& point) const {
    if (static_cast<std::size_t>(point.size()) != num_vars_)
        throw ContractViolation("evaluate: point has " + std::to_string(point.size()) + " entries, expected " +
                                std::to_string(num_vars_));
    CVector out(static_cast<Eigen::Index>(num_vars_));
    evaluate_into(point, out);
    for (Eigen::Index i = 0; i < out.size(); ++i)
        if (!is_finite(out[i])) throw NumericOverflow("evaluate: non-finite value in component " + std::to_string(i));
    return out;
}

CMatrix PolynomialSystem::jacobian(const CVector& point) const {
    if (static_cast<std::size_t>(point.size()) != num_vars_)
        throw ContractViolation("jacobian: point has " + std::to_string(point.size()) + " entries, expected " +
                                std::to_string(num_vars_));
    const auto n = static_cast<Eigen::Index>(num_vars_);
    CMatrix out(n, n);
    jacobian_into(point, out);
    return out;
}

std::vector<int> PolynomialSystem::degrees() const {
    std::vector<int> out;
    out.reserve(polys_.size());
    for (const auto& p : polys_) {
        int d = 0;
        for (const auto& m : p)
            if (m.coefficient != Complex(0.0)) d = std::max(d, m.total_degree());
        out.push_back(d);
    }
    return out;
}

std::uint64_t PolynomialSystem::total_degree() const {
    std::uint64_t prod = 1;
    for (int d : degrees()) {
        const auto ud = static_cast<std::uint64_t>(d);
        if (prod > std::numeric_limits<std::uint64_t>::max() / ud)
            throw std::overflow_error("total degree does not fit in 64 bits");
        prod *= ud;
    }
    return prod;
}

bool PolynomialSystem::has_real_coefficients() const noexcept {
    for (const auto& p : polys_)
        for (const auto& m : p)
            if (m.coefficient.imag() != 0.0) return false;
    return true;
}

std::vector<int> degrees(const PolynomialSystem& system) { return system.degrees(); }

std::uint64_t total_degree(const PolynomialSystem& system) { return system.total_degree(); }

double inf_norm(const CVector& v) noexcept {
    double m = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v[i]));
    return m;
}

}  // namespace flowroots
