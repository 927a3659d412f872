#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "mhfem/coefficient.hpp"
#include "mhfem/mesh.hpp"
#include "mhfem/quadrature.hpp"
#include "mhfem/sparse.hpp"

namespace mhfem {

/// Bijection between interior mesh nodes and global degrees of freedom;
/// boundary nodes are eliminated (homogeneous Dirichlet data).
class DirichletMap {
public:
    explicit DirichletMap(const Mesh& mesh) {
        const auto& flags = mesh.boundary_node_flags();
        node_to_dof_.assign(mesh.node_count(), -1);
        for (int i = 0; i < mesh.node_count(); ++i) {
            if (!flags[i]) {
                node_to_dof_[i] = static_cast<int>(dof_to_node_.size());
                dof_to_node_.push_back(i);
            }
        }
    }

    /// Identity map over all nodes; used when assembling without elimination.
    static DirichletMap including_boundary(const Mesh& mesh) {
        DirichletMap map(mesh);
        map.node_to_dof_.resize(mesh.node_count());
        map.dof_to_node_.resize(mesh.node_count());
        for (int i = 0; i < mesh.node_count(); ++i) {
            map.node_to_dof_[i] = i;
            map.dof_to_node_[i] = i;
        }
        return map;
    }

    int dof_count() const { return static_cast<int>(dof_to_node_.size()); }
    int dof_of_node(int node) const { return node_to_dof_[node]; }
    int node_of_dof(int dof) const { return dof_to_node_[dof]; }

private:
    std::vector<int> node_to_dof_;
    std::vector<int> dof_to_node_;
};

/// Exact P1 element stiffness for a triangle with vertices p0, p1, p2 and a
/// constant weight.
inline std::array<std::array<double, 3>, 3> p1_stiffness_element(Vec2 p0, Vec2 p1, Vec2 p2,
                                                                 double weight) {
    const Vec2 e1 = p1 - p0;
    const Vec2 e2 = p2 - p0;
    const double det = e1.x * e2.y - e1.y * e2.x;
    const double area = 0.5 * det;
    const Vec2 g1{e2.y / det, -e2.x / det};
    const Vec2 g2{-e1.y / det, e1.x / det};
    const std::array<Vec2, 3> g{Vec2{-g1.x - g2.x, -g1.y - g2.y}, g1, g2};
    std::array<std::array<double, 3>, 3> ke{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) ke[i][j] = weight * area * dot(g[i], g[j]);
    }
    return ke;
}

/// Exact P1 element mass matrix (weight * area / 12) * [[2,1,1],[1,2,1],[1,1,2]].
inline std::array<std::array<double, 3>, 3> p1_mass_element(double area, double weight) {
    std::array<std::array<double, 3>, 3> ke{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) ke[i][j] = weight * area / 12.0 * (i == j ? 2.0 : 1.0);
    }
    return ke;
}

namespace detail {

template <typename ElementMatrix>
SparseMatrix scatter_symmetric(const Mesh& mesh, const DirichletMap& dmap, ElementMatrix&& element) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(mesh.triangle_count()) * 9);
    std::array<std::array<double, 3>, 3> ke{};
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        element(t, ke);
        const auto& tri = mesh.triangles()[t];
        for (int i = 0; i < 3; ++i) {
            const int gi = dmap.dof_of_node(tri[i]);
            if (gi < 0) continue;
            for (int j = 0; j < 3; ++j) {
                const int gj = dmap.dof_of_node(tri[j]);
                if (gj < 0) continue;
                trips.emplace_back(gi, gj, ke[i][j]);
            }
        }
    }
    return SparseMatrix(dmap.dof_count(), dmap.dof_count(), trips);
}

}  // namespace detail

/// Weighted stiffness matrix on interior DOFs. Constant coefficients are
/// integrated exactly; variable ones by the given rule (degree >= 2 required).
inline SparseMatrix assemble_stiffness(const Mesh& mesh, const CoefficientField& nu,
                                       const DirichletMap& dmap,
                                       const QuadratureRule& rule = QuadratureRule::seven_point()) {
    if (!nu.is_constant() && rule.exactness_degree < 2) {
        throw std::invalid_argument("assemble_stiffness: variable coefficient needs degree >= 2 rule");
    }
    return detail::scatter_symmetric(mesh, dmap, [&](int t, std::array<std::array<double, 3>, 3>& ke) {
        const auto& g = mesh.basis_gradients(t);
        const double area = mesh.area(t);
        double weight = 0.0;
        if (nu.is_constant()) {
            weight = nu.constant_value();
        } else {
            for (const auto& qp : rule.points) {
                weight += qp.weight * nu(physical_point(mesh, t, qp.lambda));
            }
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                ke[i][j] = weight * area * dot(g[i], g[j]);
            }
        }
    });
}

/// Weighted mass matrix on interior DOFs.
inline SparseMatrix assemble_mass(const Mesh& mesh, const CoefficientField& sigma,
                                  const DirichletMap& dmap,
                                  const QuadratureRule& rule = QuadratureRule::seven_point()) {
    if (!sigma.is_constant() && rule.exactness_degree < 2) {
        throw std::invalid_argument("assemble_mass: variable coefficient needs degree >= 2 rule");
    }
    return detail::scatter_symmetric(mesh, dmap, [&](int t, std::array<std::array<double, 3>, 3>& ke) {
        const double area = mesh.area(t);
        if (sigma.is_constant()) {
            const double s = sigma.constant_value() * area / 12.0;
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) ke[i][j] = s * (i == j ? 2.0 : 1.0);
            }
        } else {
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) ke[i][j] = 0.0;
            }
            for (const auto& qp : rule.points) {
                const double sq = sigma(physical_point(mesh, t, qp.lambda)) * qp.weight * area;
                for (int i = 0; i < 3; ++i) {
                    for (int j = 0; j < 3; ++j) {
                        ke[i][j] += sq * qp.lambda[i] * qp.lambda[j];
                    }
                }
            }
        }
    });
}

/// Load vector of (s, phi_j) over interior DOFs, element-by-element by the rule.
inline Vector assemble_load(const Mesh& mesh, const std::function<double(Vec2)>& s,
                            const QuadratureRule& rule, const DirichletMap& dmap) {
    Vector b = Vector::Zero(dmap.dof_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles()[t];
        const double area = mesh.area(t);
        for (const auto& qp : rule.points) {
            const double sval = s(physical_point(mesh, t, qp.lambda)) * qp.weight * area;
            for (int i = 0; i < 3; ++i) {
                const int gi = dmap.dof_of_node(tri[i]);
                if (gi >= 0) b[gi] += sval * qp.lambda[i];
            }
        }
    }
    return b;
}

/// sqrt( sum_T sum_q w_q |T| integrand(x_q)^2 )
inline double l2_norm_on_mesh(const std::function<double(Vec2)>& integrand, const Mesh& mesh,
                              const QuadratureRule& rule) {
    const double sq = integrate(mesh, rule, [&](int, Vec2 x, const std::array<double, 3>&) {
        const double v = integrand(x);
        return v * v;
    });
    return std::sqrt(sq);
}

}  // namespace mhfem
