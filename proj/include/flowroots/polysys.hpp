#pragma once

// Dense multivariate polynomial systems with complex coefficients.
//
// Monomials store a dense exponent vector; the systems handled here have at
// most a dozen variables and degree two, so nothing sparse is needed. The
// Jacobian is differentiated symbolically once at construction and reused.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace flowroots {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Thrown when a caller breaks an operation's preconditions (wrong sizes etc).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Thrown by evaluate() when an intermediate value is not finite.
class NumericOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Monomial {
    Complex coefficient;
    std::vector<int> exponents;

    [[nodiscard]] int total_degree() const noexcept;
};

using Polynomial = std::vector<Monomial>;

class PolynomialSystem {
public:
    PolynomialSystem() = default;

    /// Validates squareness, exponent lengths, finiteness and non-triviality.
    /// Names default to x1..xn when `var_names` is empty.
    PolynomialSystem(std::size_t num_vars, std::vector<Polynomial> polynomials,
                     std::vector<std::string> var_names = {});

    [[nodiscard]] std::size_t num_vars() const noexcept { return num_vars_; }
    [[nodiscard]] const std::vector<Polynomial>& polynomials() const noexcept { return polys_; }
    [[nodiscard]] const std::vector<std::string>& var_names() const noexcept { return names_; }

    /// Throws ContractViolation on a size mismatch, NumericOverflow on a
    /// non-finite result.
    [[nodiscard]] CVector evaluate(const CVector& point) const;

    /// Entry (i, j) is d poly_i / d var_j at `point`.
    [[nodiscard]] CMatrix jacobian(const CVector& point) const;

    /// Per-equation maximum total exponent.
    [[nodiscard]] std::vector<int> degrees() const;

    /// Product of degrees (the Bezout number). Throws std::overflow_error when
    /// it does not fit in 64 bits.
    [[nodiscard]] std::uint64_t total_degree() const;

    /// Unchecked fast paths used by the path tracker. The caller sizes `out`
    /// and checks finiteness.
    void evaluate_into(const CVector& point, CVector& out) const noexcept;
    void jacobian_into(const CVector& point, CMatrix& out) const noexcept;

    /// True when every coefficient has zero imaginary part.
    [[nodiscard]] bool has_real_coefficients() const noexcept;

private:
    struct Term {
        Complex coefficient;
        // (variable, exponent) pairs with exponent > 0
        std::vector<std::pair<int, int>> factors;
    };
    using CompiledPoly = std::vector<Term>;

    static CompiledPoly compile(const Polynomial& p);
    static Complex eval_compiled(const CompiledPoly& p, const CVector& x) noexcept;

    std::size_t num_vars_ = 0;
    std::vector<Polynomial> polys_;
    std::vector<std::string> names_;
    std::vector<CompiledPoly> compiled_;
    // row-major: jac_[i * num_vars_ + j]
    std::vector<CompiledPoly> jac_;
};

[[nodiscard]] std::vector<int> degrees(const PolynomialSystem& system);
[[nodiscard]] std::uint64_t total_degree(const PolynomialSystem& system);

/// Maximum absolute value over the components.
[[nodiscard]] double inf_norm(const CVector& v) noexcept;

}  // namespace flowroots
