#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mhfem/sparse.hpp"

namespace mhfem {

/// The symmetric indefinite per-mode operator
///   [ kw*M   K  ] (u_s)   (f_c)
///   [  K   -kw*M] (u_c) = (f_s)
/// acting on the stacked (sine part, cosine part) coefficient vector. This is
/// the mode-k weak form of sigma*du/dt - div(nu*grad u) = f written with the
/// standard Fourier conventions; see the notes in build_mode_system.
struct BlockSystem {
    int k = 1;
    double omega = 1.0;
    const SparseMatrix* M = nullptr;
    const SparseMatrix* K = nullptr;
    Vector rhs;

    int block_dim() const { return M->rows(); }
    int dim() const { return 2 * block_dim(); }

    Vector apply(const Vector& x) const {
        const int n = block_dim();
        const double kw = k * omega;
        Vector ys = kw * M->apply(x.head(n)) + K->apply(x.tail(n));
        Vector yc = K->apply(x.head(n)) - kw * M->apply(x.tail(n));
        Vector y(2 * n);
        y << ys, yc;
        return y;
    }
};

/// Assembles the mode-k block system from the weighted mass/stiffness
/// matrices and the cosine/sine load vectors. The cosine-load equation is the
/// first block row, consistent with the residual definitions
/// R1_c = -kw*sigma*eta_s + div(tau_c) + f_c and R1_s = kw*sigma*eta_c + div(tau_s) + f_s
/// (the exact solution makes both vanish).
inline BlockSystem build_mode_system(int k, double omega, const SparseMatrix& M, const SparseMatrix& K,
                                     const Vector& load_c, const Vector& load_s) {
    if (M.rows() != K.rows() || load_c.size() != M.rows() || load_s.size() != M.rows()) {
        throw std::invalid_argument("build_mode_system: dimension mismatch");
    }
    if (k < 1) throw std::invalid_argument("build_mode_system: k must be >= 1");
    BlockSystem sys;
    sys.k = k;
    sys.omega = omega;
    sys.M = &M;
    sys.K = &K;
    sys.rhs.resize(2 * M.rows());
    sys.rhs << load_c, load_s;
    return sys;
}

/// Block-diagonal preconditioner diag(kw*M + K, kw*M + K) realized by one
/// exact sparse factorization shared by both blocks.
class BlockDiagPreconditioner {
public:
    BlockDiagPreconditioner(int k, double omega, const SparseMatrix& M, const SparseMatrix& K)
        : factor_(SparseMatrix::combine(K, k * omega, M)) {}

    explicit BlockDiagPreconditioner(CholeskyFactor factor) : factor_(std::move(factor)) {}

    Vector solve(const Vector& r) const {
        const int n = static_cast<int>(r.size()) / 2;
        Vector z(r.size());
        z.head(n) = factor_.solve(r.head(n));
        z.tail(n) = factor_.solve(r.tail(n));
        return z;
    }

private:
    CholeskyFactor factor_;
};

struct SolveResult {
    Vector x;
    int iterations = 0;
    bool converged = false;
    std::vector<double> residual_norms;  // preconditioned norms, per iteration
};

/// Preconditioned MINRES with zero initial guess; stops when the
/// preconditioned residual norm drops below rel_tol times its initial value.
inline SolveResult minres_solve(const BlockSystem& system, const BlockDiagPreconditioner& precond,
                                double rel_tol = 1e-6, int max_iterations = 500) {
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
        throw std::invalid_argument("minres_solve: rel_tol must lie in (0,1)");
    }
    const int n = system.dim();
    SolveResult res;
    res.x = Vector::Zero(n);

    Vector v = system.rhs;
    Vector z = precond.solve(v);
    double gamma = std::sqrt(z.dot(v));
    if (!(gamma > 0.0)) {
        res.converged = true;  // zero right-hand side
        return res;
    }
    const double norm0 = gamma;
    res.residual_norms.push_back(norm0);

    Vector v_prev = Vector::Zero(n);
    Vector w = Vector::Zero(n), w_prev = Vector::Zero(n);
    double gamma_prev = 1.0;
    double eta = gamma;
    double s_prev = 0.0, s_cur = 0.0, c_prev = 1.0, c_cur = 1.0;

    for (int it = 1; it <= max_iterations; ++it) {
        z /= gamma;
        const Vector az = system.apply(z);
        const double delta = az.dot(z);
        Vector v_next = az - (delta / gamma) * v - (gamma / gamma_prev) * v_prev;
        Vector z_next = precond.solve(v_next);
        const double gamma_next = std::sqrt(std::max(z_next.dot(v_next), 0.0));

        const double alpha0 = c_cur * delta - c_prev * s_cur * gamma;
        const double alpha1 = std::sqrt(alpha0 * alpha0 + gamma_next * gamma_next);
        const double alpha2 = s_cur * delta + c_prev * c_cur * gamma;
        const double alpha3 = s_prev * gamma;
        c_prev = c_cur;
        s_prev = s_cur;
        c_cur = alpha0 / alpha1;
        s_cur = gamma_next / alpha1;

        Vector w_next = (z - alpha3 * w_prev - alpha2 * w) / alpha1;
        res.x += (c_cur * eta) * w_next;
        eta = -s_cur * eta;

        v_prev = v;
        v = v_next;
        z = z_next;
        gamma_prev = gamma;
        gamma = gamma_next;
        w_prev = w;
        w = w_next;

        res.iterations = it;
        res.residual_norms.push_back(std::abs(eta));
        if (std::abs(eta) <= rel_tol * norm0) {
            res.converged = true;
            return res;
        }
        if (gamma == 0.0) {  // exact invariant subspace hit
            res.converged = true;
            return res;
        }
    }
    return res;  // cap exceeded, converged stays false
}

/// Conjugate gradients for the k = 0 system K u = f, optionally preconditioned.
inline SolveResult pcg_solve(const SparseMatrix& K, const Vector& rhs, double rel_tol = 1e-6,
                             int max_iterations = 500, const CholeskyFactor* precond = nullptr) {
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
        throw std::invalid_argument("pcg_solve: rel_tol must lie in (0,1)");
    }
    SolveResult res;
    res.x = Vector::Zero(K.rows());
    Vector r = rhs;
    const double norm0 = r.norm();
    res.residual_norms.push_back(norm0);
    if (norm0 == 0.0) {
        res.converged = true;
        return res;
    }
    Vector z = precond ? precond->solve(r) : r;
    Vector p = z;
    double rz = r.dot(z);
    for (int it = 1; it <= max_iterations; ++it) {
        const Vector kp = K.apply(p);
        const double alpha = rz / p.dot(kp);
        res.x += alpha * p;
        r -= alpha * kp;
        res.iterations = it;
        res.residual_norms.push_back(r.norm());
        if (r.norm() <= rel_tol * norm0) {
            res.converged = true;
            return res;
        }
        z = precond ? precond->solve(r) : r;
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    return res;
}

}  // namespace mhfem
