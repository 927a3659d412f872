#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mhfem/assembly.hpp"
#include "mhfem/coefficient.hpp"
#include "mhfem/flux.hpp"
#include "mhfem/fourier.hpp"
#include "mhfem/mesh.hpp"
#include "mhfem/quadrature.hpp"

namespace mhfem {

/// Friedrichs constant of the unit square with homogeneous Dirichlet data.
inline constexpr double kFriedrichsUnitSquare = 0.22507907903927651;  // 1/(sqrt(2)*pi)

/// The stability constants entering the majorants. mu2/mu2_tilde are carried
/// for completeness; no computed quantity uses them.
struct ConstantsBundle {
    double C_F = kFriedrichsUnitSquare;
    double mu1 = 0.0;
    double mu2 = 0.0;
    double mu1_tilde = 0.0;
    double mu2_tilde = 0.0;
    double c0_seminorm = 0.0;
    double c0_norm = 0.0;
    std::vector<double> c_k;  // k = 1..N at index k-1

    static ConstantsBundle make(const CoefficientField& sigma, const CoefficientField& nu,
                                double omega, int truncation,
                                double friedrichs = kFriedrichsUnitSquare) {
        ConstantsBundle b;
        b.C_F = friedrichs;
        const double sl = sigma.lower_bound(), su = sigma.upper_bound();
        const double nl = nu.lower_bound(), nu_up = nu.upper_bound();
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        b.mu1 = inv_sqrt2 * std::min(nl / (friedrichs * friedrichs + 1.0), sl);
        b.mu1_tilde = inv_sqrt2 * std::min(nl, sl);
        b.mu2 = b.mu2_tilde = std::max(su, nu_up);
        b.c0_seminorm = nl;
        b.c0_norm = nl / (friedrichs * friedrichs + 1.0);
        b.c_k.resize(truncation);
        for (int k = 1; k <= truncation; ++k) {
            b.c_k[k - 1] = inv_sqrt2 * std::min(nl, k * omega * sl);
        }
        return b;
    }

    double mode_constant_seminorm(int k) const { return k == 0 ? c0_seminorm : c_k[k - 1]; }
    double mode_constant_norm(int k) const { return k == 0 ? c0_norm : c_k[k - 1]; }
};

/// Evaluate a P1 interior-DOF field at a barycentric point of triangle t.
inline double p1_value(const Mesh& mesh, const DirichletMap& dmap, const Vector& u, int t,
                       const std::array<double, 3>& lambda) {
    const auto& tri = mesh.triangles()[t];
    double v = 0.0;
    for (int i = 0; i < 3; ++i) {
        const int dof = dmap.dof_of_node(tri[i]);
        if (dof >= 0) v += lambda[i] * u[dof];
    }
    return v;
}

/// Constant gradient of a P1 interior-DOF field on each element.
inline std::vector<Vec2> element_gradients(const Mesh& mesh, const DirichletMap& dmap,
                                           const Vector& u) {
    std::vector<Vec2> g(mesh.triangle_count(), Vec2{0.0, 0.0});
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles()[t];
        const auto& bg = mesh.basis_gradients(t);
        for (int i = 0; i < 3; ++i) {
            const int dof = dmap.dof_of_node(tri[i]);
            if (dof >= 0) g[t] = g[t] + u[dof] * bg[i];
        }
    }
    return g;
}

using SpatialFn = std::function<double(Vec2)>;
using SpatialGrad = std::function<Vec2(Vec2)>;

/// ||R1_k||: for k >= 1 the combined norm of
///   R1_c = -kw*sigma*eta_s + div(tau_c) + f_c and
///   R1_s =  kw*sigma*eta_c + div(tau_s) + f_s;
/// for k = 0 the norm of div(tau_c) + f_c alone.
inline double residual1_mode(int k, double omega, const CoefficientField& sigma, const Mesh& mesh,
                             const DirichletMap& dmap, const CoefficientPair& eta,
                             const RT0FluxField& tau_c, const RT0FluxField* tau_s,
                             const SpatialFn& f_c, const SpatialFn& f_s,
                             const QuadratureRule& rule) {
    if (static_cast<int>(tau_c.abc.size()) != mesh.triangle_count()) {
        throw std::invalid_argument("residual1_mode: flux/mesh mismatch");
    }
    const double kw = k * omega;
    double total = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const double div_c = tau_c.divergence(t);
        const double div_s = (k >= 1) ? tau_s->divergence(t) : 0.0;
        double local = 0.0;
        for (const auto& qp : rule.points) {
            const Vec2 x = physical_point(mesh, t, qp.lambda);
            if (k == 0) {
                const double rc = div_c + f_c(x);
                local += qp.weight * rc * rc;
            } else {
                const double sg = sigma(x);
                const double rc = -kw * sg * p1_value(mesh, dmap, eta.s, t, qp.lambda) + div_c + f_c(x);
                const double rs = kw * sg * p1_value(mesh, dmap, eta.c, t, qp.lambda) + div_s + f_s(x);
                local += qp.weight * (rc * rc + rs * rs);
            }
        }
        total += mesh.area(t) * local;
    }
    return std::sqrt(total);
}

/// ||R2_k||: combined norm of tau_c - nu*grad(eta_c) and tau_s - nu*grad(eta_s)
/// (the sine part is skipped for k = 0).
inline double residual2_mode(const Mesh& mesh, const std::vector<Vec2>& grad_eta_c,
                             const std::vector<Vec2>* grad_eta_s, const RT0FluxField& tau_c,
                             const RT0FluxField* tau_s, const CoefficientField& nu,
                             const QuadratureRule& rule) {
    if (static_cast<int>(grad_eta_c.size()) != mesh.triangle_count()) {
        throw std::invalid_argument("residual2_mode: field/mesh mismatch");
    }
    double total = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        double local = 0.0;
        for (const auto& qp : rule.points) {
            const Vec2 x = physical_point(mesh, t, qp.lambda);
            const double nv = nu(x);
            const Vec2 dc = tau_c.evaluate(t, x) - nv * grad_eta_c[t];
            local += qp.weight * dot(dc, dc);
            if (grad_eta_s != nullptr) {
                const Vec2 ds = tau_s->evaluate(t, x) - nv * (*grad_eta_s)[t];
                local += qp.weight * dot(ds, ds);
            }
        }
        total += mesh.area(t) * local;
    }
    return std::sqrt(total);
}

/// Per-mode seminorm majorant (1/c_k)(C_F ||R1_k|| + ||R2_k||); for k = 0 the
/// constant is the lower viscosity bound.
inline double majorant_seminorm_mode(int k, double r1, double r2, const ConstantsBundle& constants) {
    return (constants.C_F * r1 + r2) / constants.mode_constant_seminorm(k);
}

/// Per-mode norm majorant (1/c_k) sqrt(||R1_k||^2 + ||R2_k||^2).
inline double majorant_norm_mode(int k, double r1, double r2, const ConstantsBundle& constants) {
    return std::sqrt(r1 * r1 + r2 * r2) / constants.mode_constant_norm(k);
}

enum class ErrorKind { seminorm, norm };

/// Global majorant over all modes: weights T for mode 0 and T/2 for k >= 1,
/// with the source tail E_N added inside ||R1||^2.
inline double majorant_global(const std::vector<double>& r1_sq, const std::vector<double>& r2_sq,
                              double e_n, double period, const ConstantsBundle& constants,
                              ErrorKind which) {
    if (r1_sq.size() != r2_sq.size() || r1_sq.empty()) {
        throw std::invalid_argument("majorant_global: per-mode lists must align and include k=0");
    }
    double R1 = period * r1_sq[0];
    double R2 = period * r2_sq[0];
    for (std::size_t k = 1; k < r1_sq.size(); ++k) {
        R1 += 0.5 * period * r1_sq[k];
        R2 += 0.5 * period * r2_sq[k];
    }
    R1 += e_n;
    if (which == ErrorKind::seminorm) {
        return (constants.C_F * std::sqrt(R1) + std::sqrt(R2)) / constants.mu1_tilde;
    }
    return std::sqrt(R1 + R2) / constants.mu1;
}

/// Exact spatial pair describing one mode of a manufactured solution.
struct ExactModePair {
    SpatialFn value_c;
    SpatialFn value_s;  // empty for k = 0
    SpatialGrad grad_c;
    SpatialGrad grad_s;  // empty for k = 0
};

/// H1-seminorm (or full H1-norm) of the mode coefficient error, combining
/// cosine and sine parts in quadrature.
inline double exact_error_mode(const Mesh& mesh, const DirichletMap& dmap,
                               const CoefficientPair& eta, const std::vector<Vec2>& grad_eta_c,
                               const std::vector<Vec2>* grad_eta_s, const ExactModePair& exact,
                               const QuadratureRule& rule, ErrorKind which) {
    double total = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        double local = 0.0;
        for (const auto& qp : rule.points) {
            const Vec2 x = physical_point(mesh, t, qp.lambda);
            const Vec2 gc = exact.grad_c(x) - grad_eta_c[t];
            local += qp.weight * dot(gc, gc);
            if (grad_eta_s != nullptr) {
                const Vec2 gs = exact.grad_s(x) - (*grad_eta_s)[t];
                local += qp.weight * dot(gs, gs);
            }
            if (which == ErrorKind::norm) {
                const double vc = exact.value_c(x) - p1_value(mesh, dmap, eta.c, t, qp.lambda);
                local += qp.weight * vc * vc;
                if (grad_eta_s != nullptr) {
                    const double vs = exact.value_s(x) - p1_value(mesh, dmap, eta.s, t, qp.lambda);
                    local += qp.weight * vs * vs;
                }
            }
        }
        total += mesh.area(t) * local;
    }
    return std::sqrt(total);
}

/// L2 norm of the mode coefficient error (both parts); feeds the k*omega
/// terms of the space-time seminorm.
inline double exact_error_l2_mode(const Mesh& mesh, const DirichletMap& dmap,
                                  const CoefficientPair& eta, const ExactModePair& exact,
                                  const QuadratureRule& rule, bool has_sine) {
    double total = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        double local = 0.0;
        for (const auto& qp : rule.points) {
            const Vec2 x = physical_point(mesh, t, qp.lambda);
            const double vc = exact.value_c(x) - p1_value(mesh, dmap, eta.c, t, qp.lambda);
            local += qp.weight * vc * vc;
            if (has_sine) {
                const double vs = exact.value_s(x) - p1_value(mesh, dmap, eta.s, t, qp.lambda);
                local += qp.weight * vs * vs;
            }
        }
        total += mesh.area(t) * local;
    }
    return std::sqrt(total);
}

inline double efficiency_index(double majorant, double exact_error) {
    if (!(exact_error > 0.0)) {
        throw std::domain_error("efficiency_index: exact error must be positive");
    }
    return majorant / exact_error;
}

/// One reporting row; global rows use mode = -1.
struct ReportRow {
    int level = 0;
    int mode = 0;
    double r1 = 0.0;
    double r2 = 0.0;
    double majorant_semi = 0.0;
    double majorant_norm = 0.0;
    std::optional<double> exact_error;
    std::optional<double> eff_index;
    std::optional<double> e_n;
    int iterations = 0;
    double solve_seconds = 0.0;
};

struct MajorantReport {
    std::vector<ReportRow> rows;
};

}  // namespace mhfem
