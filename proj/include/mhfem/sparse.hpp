#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <memory>
#include <stdexcept>
#include <vector>

namespace mhfem {

using Vector = Eigen::VectorXd;

/// Symmetric sparse matrix in compressed-row storage. Thin wrapper around
/// Eigen's CSR container so the assembly and solver code stays independent
/// of the backend.
class SparseMatrix {
public:
    SparseMatrix() = default;

    SparseMatrix(int rows, int cols, const std::vector<Eigen::Triplet<double>>& triplets)
        : m_(rows, cols) {
        m_.setFromTriplets(triplets.begin(), triplets.end());
        m_.makeCompressed();
    }

    int rows() const { return static_cast<int>(m_.rows()); }
    int cols() const { return static_cast<int>(m_.cols()); }
    long long nonzeros() const { return m_.nonZeros(); }

    Vector apply(const Vector& x) const { return m_ * x; }

    double coeff(int i, int j) const { return m_.coeff(i, j); }

    const Eigen::SparseMatrix<double, Eigen::RowMajor>& raw() const { return m_; }

    /// A + alpha * B, matching sparsity by value.
    static SparseMatrix combine(const SparseMatrix& a, double alpha, const SparseMatrix& b) {
        SparseMatrix out;
        out.m_ = a.m_ + alpha * b.m_;
        out.m_.makeCompressed();
        return out;
    }

private:
    Eigen::SparseMatrix<double, Eigen::RowMajor> m_;
};

/// Exact sparse symmetric factorization, reused as the inner solve of the
/// block-diagonal preconditioner. Reports a pivot breakdown when the matrix
/// is not positive definite.
class CholeskyFactor {
public:
    explicit CholeskyFactor(const SparseMatrix& a)
        : solver_(std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>()) {
        Eigen::SparseMatrix<double> col = a.raw();
        solver_->compute(col);
        if (solver_->info() != Eigen::Success) {
            throw std::runtime_error("factorize_spd: pivot breakdown, matrix is not SPD");
        }
        auto d = solver_->vectorD();
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            if (!(d[i] > 0.0)) {
                throw std::runtime_error("factorize_spd: pivot breakdown, matrix is not SPD");
            }
        }
    }

    Vector solve(const Vector& b) const { return solver_->solve(b); }

private:
    std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> solver_;
};

inline CholeskyFactor factorize_spd(const SparseMatrix& a) { return CholeskyFactor(a); }

}  // namespace mhfem
