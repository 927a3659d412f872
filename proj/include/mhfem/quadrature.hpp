#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mhfem/mesh.hpp"

namespace mhfem {

/// Symmetric quadrature rule on the reference triangle, given in barycentric
/// coordinates with weights relative to the triangle area (they sum to one).
struct QuadratureRule {
    struct Point {
        std::array<double, 3> lambda;
        double weight;
    };
    std::vector<Point> points;
    int exactness_degree = 0;

    static QuadratureRule centroid() {
        return {{{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 1.0}}, 1};
    }

    static QuadratureRule three_point() {
        // midpoint rule, degree 2
        return {{{{0.5, 0.5, 0.0}, 1.0 / 3.0},
                 {{0.0, 0.5, 0.5}, 1.0 / 3.0},
                 {{0.5, 0.0, 0.5}, 1.0 / 3.0}},
                2};
    }

    static QuadratureRule seven_point() {
        const double s = std::sqrt(15.0);
        const double a = (6.0 - s) / 21.0, b = (9.0 + 2.0 * s) / 21.0;
        const double c = (6.0 + s) / 21.0, d = (9.0 - 2.0 * s) / 21.0;
        const double wa = (155.0 - s) / 1200.0;
        const double wc = (155.0 + s) / 1200.0;
        return {{{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 9.0 / 40.0},
                 {{a, a, b}, wa},
                 {{a, b, a}, wa},
                 {{b, a, a}, wa},
                 {{c, c, d}, wc},
                 {{c, d, c}, wc},
                 {{d, c, c}, wc}},
                5};
    }

    static QuadratureRule of_degree(int degree) {
        if (degree <= 1) return centroid();
        if (degree <= 2) return three_point();
        if (degree <= 5) return seven_point();
        throw std::invalid_argument("QuadratureRule: no rule of degree > 5 built in");
    }
};

/// Physical location of a barycentric point inside triangle t.
inline Vec2 physical_point(const Mesh& mesh, int t, const std::array<double, 3>& lambda) {
    const auto& tri = mesh.triangles()[t];
    const auto& nodes = mesh.nodes();
    return lambda[0] * nodes[tri[0]] + lambda[1] * nodes[tri[1]] + lambda[2] * nodes[tri[2]];
}

/// Integrate fn over the whole mesh with the given rule.
template <typename Fn>
double integrate(const Mesh& mesh, const QuadratureRule& rule, Fn&& fn) {
    double total = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        double local = 0.0;
        for (const auto& qp : rule.points) {
            local += qp.weight * fn(t, physical_point(mesh, t, qp.lambda), qp.lambda);
        }
        total += mesh.area(t) * local;
    }
    return total;
}

}  // namespace mhfem
