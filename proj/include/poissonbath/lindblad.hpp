// lindblad.hpp — GKSL generators, density matrices and steady states

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "poissonbath/errors.hpp"
#include "poissonbath/operator.hpp"

namespace poissonbath {

struct StateTolerance {
    double hermiticity = 1e-10;
    double trace = 1e-10;
    double positivity = 1e-8;
};

/// Hermitian, unit-trace, positive-semidefinite operator.
class DensityMatrix {
public:
    explicit DensityMatrix(Operator op, const StateTolerance& tol = {}) : op_(std::move(op)) {
        detail::require_square(op_, "density matrix");
        if (!op_.allFinite()) {
            throw InvalidArgument("density matrix has non-finite entries");
        }
        const double herm = (op_ - op_.adjoint()).cwiseAbs().maxCoeff();
        if (herm > tol.hermiticity) {
            throw NonHermitianInput("density matrix Hermiticity defect " + std::to_string(herm));
        }
        const Complex tr = op_.trace();
        if (std::abs(tr - 1.0) > tol.trace) {
            throw ToleranceNotMet("density matrix trace " + std::to_string(tr.real()) + " != 1");
        }
        const Operator sym = 0.5 * (op_ + op_.adjoint());
        const double min_eig = Eigen::SelfAdjointEigenSolver<Operator>(sym, Eigen::EigenvaluesOnly)
                                   .eigenvalues()
                                   .minCoeff();
        if (min_eig < -tol.positivity) {
            throw NoPhysicalState("density matrix has eigenvalue " + std::to_string(min_eig));
        }
    }

    static DensityMatrix pure(const Eigen::VectorXcd& psi) {
        const Eigen::VectorXcd n = psi / psi.norm();
        return DensityMatrix(n * n.adjoint());
    }

    static DensityMatrix maximally_mixed(std::size_t dim) {
        return DensityMatrix(identity(dim) / static_cast<double>(dim));
    }

    const Operator& op() const noexcept { return op_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(op_.rows()); }
    Complex operator()(Eigen::Index i, Eigen::Index j) const { return op_(i, j); }
    LiouvilleVector vectorized() const { return vectorize(op_); }

private:
    Operator op_;
};

/// rho -> A rho A^dag - 1/2 {A^dag A, rho}
inline SuperOperator dissipator(const Operator& a) {
    detail::require_square(a, "dissipator jump operator");
    const Operator ada = a.adjoint() * a;
    return sandwich(a, a.adjoint()) - 0.5 * (left(ada) + right(ada));
}

struct Jump {
    double rate = 0.0;
    Operator op;
};

/// -i[H, .] + sum_k rate_k D[A_k]
inline SuperOperator gksl_liouvillian(const Operator& h, const std::vector<Jump>& jumps) {
    detail::require_square(h, "Hamiltonian");
    if (!is_hermitian(h)) {
        throw NonHermitianInput("gksl_liouvillian: Hamiltonian is not Hermitian");
    }
    SuperOperator gen = commutator_generator(h);
    for (const auto& j : jumps) {
        if (!(j.rate >= 0.0)) {
            throw NegativeRate("gksl_liouvillian: rate " + std::to_string(j.rate));
        }
        detail::require_same_dim(h, j.op, "jump operator vs Hamiltonian");
        if (j.rate > 0.0) {
            gen += j.rate * dissipator(j.op);
        }
    }
    return gen;
}

/// Matrix-free form of gksl_liouvillian; O(d^3) per application instead of O(d^4) storage.
class GkslGenerator {
public:
    GkslGenerator(const Operator& h, std::vector<Jump> jumps) : jumps_(std::move(jumps)) {
        detail::require_square(h, "Hamiltonian");
        if (!is_hermitian(h)) {
            throw NonHermitianInput("GkslGenerator: Hamiltonian is not Hermitian");
        }
        heff_ = h;
        for (const auto& j : jumps_) {
            if (!(j.rate >= 0.0)) {
                throw NegativeRate("GkslGenerator: rate " + std::to_string(j.rate));
            }
            detail::require_same_dim(h, j.op, "jump operator vs Hamiltonian");
            heff_ -= Complex{0.0, 0.5 * j.rate} * (j.op.adjoint() * j.op);
        }
    }

    std::size_t hilbert_dim() const noexcept { return static_cast<std::size_t>(heff_.rows()); }

    Operator apply(const Operator& rho) const {
        Operator out = Complex{0.0, -1.0} * (heff_ * rho - rho * heff_.adjoint());
        for (const auto& j : jumps_) {
            if (j.rate > 0.0) out += j.rate * (j.op * rho * j.op.adjoint());
        }
        return out;
    }

    LiouvilleVector apply(const LiouvilleVector& v) const { return vectorize(apply(unvectorize(v))); }

private:
    Operator heff_; // H - (i/2) sum rate A^dag A
    std::vector<Jump> jumps_;
};

inline Complex expectation(const Operator& a, const Operator& rho) {
    detail::require_same_dim(a, rho, "expectation");
    // Tr[A rho] without forming the product
    return (a.transpose().cwiseProduct(rho)).sum();
}

inline Complex expectation(const Operator& a, const DensityMatrix& rho) { return expectation(a, rho.op()); }

struct SteadyStateOptions {
    double kernel_rel_tol = 1e-10;
    StateTolerance state{};
};

/// Number of singular values of the generator below kernel_rel_tol * sigma_max.
inline std::size_t kernel_dimension(const SuperOperator& gen, double rel_tol = 1e-10) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(gen.matrix());
    const auto& s = svd.singularValues();
    const double cut = rel_tol * s(0);
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) <= cut) ++count;
    }
    return count;
}

/// Unique stationary state: solves [gen; trace-row] x = [0; 1] in the least-squares sense.
inline DensityMatrix steady_state(const SuperOperator& gen, const SteadyStateOptions& opt = {}) {
    const auto dim = gen.hilbert_dim();
    const auto n = static_cast<Eigen::Index>(gen.liouville_dim());
    const auto kdim = kernel_dimension(gen, opt.kernel_rel_tol);
    if (kdim != 1) {
        throw DegenerateKernel("generator kernel has dimension " + std::to_string(kdim));
    }
    Eigen::MatrixXcd aug(n + 1, n);
    aug.topRows(n) = gen.matrix();
    aug.row(n) = trace_row(dim);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n + 1);
    rhs(n) = 1.0;
    const LiouvilleVector x = aug.colPivHouseholderQr().solve(rhs);
    Operator rho = unvectorize(x);
    rho = 0.5 * (rho + rho.adjoint());
    rho /= rho.trace();
    try {
        return DensityMatrix(std::move(rho), opt.state);
    } catch (const NoPhysicalState& e) {
        throw NoPhysicalState(std::string("steady_state: kernel vector is not a state (") + e.what() + ")");
    }
}

} // namespace poissonbath
