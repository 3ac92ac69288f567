// operator.hpp — Dense operator algebra, operator functions and Liouville-space maps
//
// Conventions used everywhere in the library:
//   * single two-level system basis: index 0 = |g>, index 1 = |e>
//   * vectorization is column stacking, so left(A) = I (x) A and right(B) = B^T (x) I

#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <string>
#include <type_traits>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "poissonbath/errors.hpp"

namespace poissonbath {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using LiouvilleVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

namespace detail {

inline std::size_t exact_sqrt(std::size_t n) {
    auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    if (r * r != n) {
        throw DimensionMismatch("Liouville dimension " + std::to_string(n) + " is not a perfect square");
    }
    return r;
}

inline void require_square(const Operator& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw DimensionMismatch(std::string(what) + " must be a non-empty square matrix");
    }
}

inline void require_same_dim(const Operator& a, const Operator& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatch(std::string(what) + ": " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()));
    }
}

} // namespace detail

inline Operator identity(std::size_t dim) { return Operator::Identity(dim, dim); }

inline Operator adjoint(const Operator& m) { return m.adjoint(); }

inline bool is_finite(const Eigen::Ref<const Eigen::MatrixXcd>& m) { return m.allFinite(); }

inline double hermiticity_defect(const Operator& m) { return (m - m.adjoint()).norm(); }

inline bool is_hermitian(const Operator& m, double rel_tol = 1e-10) {
    return m.rows() == m.cols() && hermiticity_defect(m) <= rel_tol * m.norm();
}

inline Operator kron(const Operator& a, const Operator& b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

// ----------------------------------------------------------------------------
// Liouville space
// ----------------------------------------------------------------------------

inline LiouvilleVector vectorize(const Operator& rho) {
    detail::require_square(rho, "vectorize input");
    return Eigen::Map<const LiouvilleVector>(rho.data(), rho.size());
}

inline Operator unvectorize(const LiouvilleVector& v) {
    const auto dim = detail::exact_sqrt(static_cast<std::size_t>(v.size()));
    return Eigen::Map<const Operator>(v.data(), static_cast<Eigen::Index>(dim),
                                      static_cast<Eigen::Index>(dim));
}

// Row vector r with r . vectorize(rho) == Tr[rho].
inline Eigen::RowVectorXcd trace_row(std::size_t dim) {
    return vectorize(identity(dim)).transpose();
}

/// Dense matrix acting on column-stacked operators of a `hilbert_dim`-level space.
class SuperOperator {
public:
    SuperOperator() = default;

    explicit SuperOperator(Eigen::MatrixXcd matrix) : matrix_(std::move(matrix)) {
        if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
            throw DimensionMismatch("superoperator matrix must be non-empty and square");
        }
        hilbert_dim_ = detail::exact_sqrt(static_cast<std::size_t>(matrix_.rows()));
    }

    static SuperOperator zero(std::size_t hilbert_dim) {
        const auto n = static_cast<Eigen::Index>(hilbert_dim * hilbert_dim);
        return SuperOperator(Eigen::MatrixXcd::Zero(n, n));
    }

    static SuperOperator identity(std::size_t hilbert_dim) {
        const auto n = static_cast<Eigen::Index>(hilbert_dim * hilbert_dim);
        return SuperOperator(Eigen::MatrixXcd::Identity(n, n));
    }

    std::size_t hilbert_dim() const noexcept { return hilbert_dim_; }
    std::size_t liouville_dim() const noexcept { return hilbert_dim_ * hilbert_dim_; }
    const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }

    LiouvilleVector apply(const LiouvilleVector& v) const {
        if (static_cast<std::size_t>(v.size()) != liouville_dim()) {
            throw DimensionMismatch("vector length does not match superoperator");
        }
        return matrix_ * v;
    }

    Operator apply(const Operator& rho) const {
        if (static_cast<std::size_t>(rho.rows()) != hilbert_dim_) {
            throw DimensionMismatch("operator dimension does not match superoperator");
        }
        return unvectorize(matrix_ * vectorize(rho));
    }

    SuperOperator& operator+=(const SuperOperator& o) {
        check_same(o);
        matrix_ += o.matrix_;
        return *this;
    }
    SuperOperator& operator-=(const SuperOperator& o) {
        check_same(o);
        matrix_ -= o.matrix_;
        return *this;
    }
    SuperOperator& operator*=(Complex s) {
        matrix_ *= s;
        return *this;
    }

    friend SuperOperator operator+(SuperOperator a, const SuperOperator& b) { return a += b; }
    friend SuperOperator operator-(SuperOperator a, const SuperOperator& b) { return a -= b; }
    friend SuperOperator operator*(Complex s, SuperOperator a) { return a *= s; }
    friend SuperOperator operator*(SuperOperator a, Complex s) { return a *= s; }
    friend SuperOperator operator*(const SuperOperator& a, const SuperOperator& b) {
        a.check_same(b);
        return SuperOperator(a.matrix_ * b.matrix_);
    }

    // Spectral norm (largest singular value) of the Liouville-space matrix.
    double norm() const {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(matrix_);
        return svd.singularValues()(0);
    }

private:
    void check_same(const SuperOperator& o) const {
        if (o.hilbert_dim_ != hilbert_dim_) {
            throw DimensionMismatch("superoperators act on different spaces");
        }
    }

    Eigen::MatrixXcd matrix_;
    std::size_t hilbert_dim_ = 0;
};

/// A rho -> A rho
inline SuperOperator left(const Operator& a) {
    detail::require_square(a, "left multiplier");
    return SuperOperator(kron(identity(a.rows()), a));
}

/// A rho -> rho A
inline SuperOperator right(const Operator& a) {
    detail::require_square(a, "right multiplier");
    return SuperOperator(kron(a.transpose(), identity(a.rows())));
}

inline std::pair<SuperOperator, SuperOperator> left_right_superops(const Operator& a) {
    return {left(a), right(a)};
}

/// rho -> A rho B
inline SuperOperator sandwich(const Operator& a, const Operator& b) {
    detail::require_square(a, "sandwich left");
    detail::require_same_dim(a, b, "sandwich");
    return SuperOperator(kron(b.transpose(), a));
}

/// rho -> -i[H, rho]
inline SuperOperator commutator_generator(const Operator& h) {
    return Complex{0.0, -1.0} * (left(h) - right(h));
}

// ----------------------------------------------------------------------------
// Hermitian eigendecomposition and operator functions
// ----------------------------------------------------------------------------

struct HermitianEig {
    Eigen::VectorXd eigenvalues; // ascending
    Operator eigenvectors;       // unitary, columns are eigenvectors
};

inline HermitianEig hermitian_eig(const Operator& m) {
    detail::require_square(m, "hermitian_eig input");
    if (!m.allFinite()) {
        throw InvalidArgument("hermitian_eig input has non-finite entries");
    }
    if (hermiticity_defect(m) > 1e-10 * m.norm()) {
        throw NonHermitianInput("hermitian_eig: ||M - M^dag|| = " + std::to_string(hermiticity_defect(m)));
    }
    const Operator sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Operator> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw ToleranceNotMet("hermitian_eig: eigensolver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

template <typename F>
concept RealSpectralFunction = std::invocable<F, double> &&
    (std::convertible_to<std::invoke_result_t<F, double>, Complex>);

/// V diag(f(w)) V^dag for Hermitian M = V diag(w) V^dag.
template <RealSpectralFunction F>
Operator operator_function(const HermitianEig& eig, F&& f) {
    const auto n = eig.eigenvalues.size();
    Eigen::VectorXcd fw(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        fw(i) = Complex(f(eig.eigenvalues(i)));
    }
    return eig.eigenvectors * fw.asDiagonal() * eig.eigenvectors.adjoint();
}

template <RealSpectralFunction F>
Operator operator_function(const Operator& m, F&& f) {
    return operator_function(hermitian_eig(m), std::forward<F>(f));
}

// ----------------------------------------------------------------------------
// Matrix exponential
// ----------------------------------------------------------------------------

inline Operator matrix_exponential(const Operator& m) {
    detail::require_square(m, "matrix_exponential input");
    if (!m.allFinite()) {
        throw InvalidArgument("matrix_exponential input has non-finite entries");
    }
    Operator result = m.exp();
    if (!result.allFinite()) {
        throw Overflow("matrix_exponential: result overflowed (||M||_1 = " +
                       std::to_string(m.cwiseAbs().colwise().sum().maxCoeff()) + ")");
    }
    return result;
}

inline SuperOperator matrix_exponential(const SuperOperator& s) {
    return SuperOperator(matrix_exponential(s.matrix()));
}

// ----------------------------------------------------------------------------
// Two-level building blocks
// ----------------------------------------------------------------------------

namespace ops {

inline Operator sigma_minus() { // |g><e|
    Operator m = Operator::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

inline Operator sigma_plus() { // |e><g|
    Operator m = Operator::Zero(2, 2);
    m(1, 0) = 1.0;
    return m;
}

inline Operator sigma_z() { // |e><e| - |g><g|
    Operator m = Operator::Zero(2, 2);
    m(0, 0) = -1.0;
    m(1, 1) = 1.0;
    return m;
}

inline Operator sigma_x() { return sigma_plus() + sigma_minus(); }

inline Operator sigma_y() { return Complex{0.0, -1.0} * (sigma_plus() - sigma_minus()); }

inline Operator projector_g() {
    Operator m = Operator::Zero(2, 2);
    m(0, 0) = 1.0;
    return m;
}

inline Operator projector_e() {
    Operator m = Operator::Zero(2, 2);
    m(1, 1) = 1.0;
    return m;
}

/// Embed a single-site operator at `site` of an `n_sites` chain of two-level systems.
inline Operator embed(const Operator& single, std::size_t site, std::size_t n_sites) {
    Operator out = Operator::Identity(1, 1);
    for (std::size_t i = 0; i < n_sites; ++i) {
        out = kron(out, i == site ? single : identity(2));
    }
    return out;
}

} // namespace ops

} // namespace poissonbath
