#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mhfem/coefficient.hpp"
#include "mhfem/mesh.hpp"

namespace mhfem {

/// Lowest-order Raviart-Thomas field: per element tau(x) = (a, b) + c x,
/// with normal components matching one signed flux per edge (oriented by the
/// edge's stored normal), hence H(div)-conforming.
struct RT0FluxField {
    std::vector<double> edge_fluxes;
    std::vector<std::array<double, 3>> abc;  // per element (a, b, c)

    Vec2 evaluate(int element, Vec2 x) const {
        const auto& e = abc[element];
        return {e[0] + e[2] * x.x, e[1] + e[2] * x.y};
    }

    double divergence(int element) const { return 2.0 * abc[element][2]; }
};

/// lambda = 1/2 averaging of nu * grad(eta) normal components on interior
/// edges; boundary edges take the one-sided flux of their only element.
inline std::vector<double> average_normal_fluxes(const Mesh& mesh, const std::vector<Vec2>& grad_field,
                                                 const CoefficientField& nu) {
    std::vector<double> fluxes(mesh.edge_count());
    for (int e = 0; e < mesh.edge_count(); ++e) {
        const Edge& edge = mesh.edges()[e];
        const double nu_mid = nu(edge.midpoint);
        const Vec2 gl = nu_mid * grad_field[edge.left];
        if (edge.right >= 0) {
            const Vec2 gr = nu_mid * grad_field[edge.right];
            fluxes[e] = 0.5 * dot(gl + gr, edge.normal);
        } else {
            fluxes[e] = dot(gl, edge.normal);
        }
    }
    return fluxes;
}

/// Per-element RT0 extension of given edge normal fluxes: solves the local
/// 3x3 system matching the three edge degrees of freedom.
inline RT0FluxField rt0_from_edge_fluxes(const Mesh& mesh, std::vector<double> edge_fluxes) {
    if (static_cast<int>(edge_fluxes.size()) != mesh.edge_count()) {
        throw std::invalid_argument("rt0_from_edge_fluxes: one flux per edge required");
    }
    RT0FluxField field;
    field.abc.resize(mesh.triangle_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        double m[3][3];
        double rhs[3];
        const auto& eids = mesh.triangle_edges(t);
        for (int row = 0; row < 3; ++row) {
            const Edge& edge = mesh.edges()[eids[row]];
            m[row][0] = edge.normal.x;
            m[row][1] = edge.normal.y;
            m[row][2] = dot(edge.midpoint, edge.normal);
            rhs[row] = edge_fluxes[eids[row]];
        }
        // Gaussian elimination with partial pivoting on the 3x3 system
        int perm[3] = {0, 1, 2};
        for (int col = 0; col < 2; ++col) {
            int piv = col;
            for (int r = col + 1; r < 3; ++r) {
                if (std::abs(m[perm[r]][col]) > std::abs(m[perm[piv]][col])) piv = r;
            }
            std::swap(perm[col], perm[piv]);
            const double diag = m[perm[col]][col];
            if (std::abs(diag) < 1e-14) {
                throw std::runtime_error("rt0_from_edge_fluxes: degenerate triangle");
            }
            for (int r = col + 1; r < 3; ++r) {
                const double factor = m[perm[r]][col] / diag;
                for (int cc = col; cc < 3; ++cc) m[perm[r]][cc] -= factor * m[perm[col]][cc];
                rhs[perm[r]] -= factor * rhs[perm[col]];
            }
        }
        if (std::abs(m[perm[2]][2]) < 1e-14) {
            throw std::runtime_error("rt0_from_edge_fluxes: degenerate triangle");
        }
        double sol[3];
        sol[2] = rhs[perm[2]] / m[perm[2]][2];
        sol[1] = (rhs[perm[1]] - m[perm[1]][2] * sol[2]) / m[perm[1]][1];
        sol[0] = (rhs[perm[0]] - m[perm[0]][1] * sol[1] - m[perm[0]][2] * sol[2]) / m[perm[0]][0];
        field.abc[t] = {sol[0], sol[1], sol[2]};
    }
    field.edge_fluxes = std::move(edge_fluxes);
    return field;
}

inline double rt0_divergence(const RT0FluxField& field, int element) {
    return field.divergence(element);
}

inline Vec2 rt0_evaluate(const RT0FluxField& field, int element, Vec2 point) {
    return field.evaluate(element, point);
}

/// Full reconstruction: average the normal fluxes of nu * grad(eta), then extend.
inline RT0FluxField reconstruct_flux(const Mesh& mesh, const std::vector<Vec2>& grad_field,
                                     const CoefficientField& nu) {
    return rt0_from_edge_fluxes(mesh, average_normal_fluxes(mesh, grad_field, nu));
}

}  // namespace mhfem
