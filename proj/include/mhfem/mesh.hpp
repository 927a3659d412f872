#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace mhfem {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

/// One edge of the triangulation. The stored normal is the unit vector
/// perpendicular to (a -> b), pointing out of the left triangle (and hence
/// from left to right for interior edges). `right` is -1 on the boundary.
struct Edge {
    int a = -1;
    int b = -1;
    int left = -1;
    int right = -1;
    Vec2 normal;
    double length = 0.0;
    Vec2 midpoint;
};

/// Uniform triangulation of the unit square: n x n cells, each split by the
/// diagonal from the cell's lower-left to its upper-right corner. Node
/// ordering is lexicographic by (row, column), triangles are counterclockwise.
class Mesh {
public:
    explicit Mesh(int cells_per_side) : n_(cells_per_side) {
        if (cells_per_side < 1) {
            throw std::invalid_argument("Mesh: cells_per_side must be >= 1");
        }
        build();
    }

    int cells_per_side() const { return n_; }
    double mesh_size() const { return 1.0 / n_; }

    const std::vector<Vec2>& nodes() const { return nodes_; }
    const std::vector<std::array<int, 3>>& triangles() const { return tris_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<bool>& boundary_node_flags() const { return on_boundary_; }

    int node_count() const { return static_cast<int>(nodes_.size()); }
    int triangle_count() const { return static_cast<int>(tris_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    double area(int t) const { return areas_[t]; }
    /// Gradients of the three nodal basis functions on triangle t.
    const std::array<Vec2, 3>& basis_gradients(int t) const { return grads_[t]; }
    /// The (up to three) edge indices around triangle t, in no particular order.
    const std::array<int, 3>& triangle_edges(int t) const { return tri_edges_[t]; }

    Vec2 centroid(int t) const {
        const auto& tri = tris_[t];
        return (1.0 / 3.0) * (nodes_[tri[0]] + nodes_[tri[1]] + nodes_[tri[2]]);
    }

private:
    void build() {
        const int n = n_;
        const double h = 1.0 / n;
        nodes_.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
        for (int iy = 0; iy <= n; ++iy) {
            for (int ix = 0; ix <= n; ++ix) {
                nodes_.push_back({ix * h, iy * h});
            }
        }
        tris_.reserve(static_cast<std::size_t>(2) * n * n);
        for (int iy = 0; iy < n; ++iy) {
            for (int ix = 0; ix < n; ++ix) {
                const int ll = iy * (n + 1) + ix;
                const int lr = ll + 1;
                const int ul = ll + n + 1;
                const int ur = ul + 1;
                tris_.push_back({ll, lr, ur});
                tris_.push_back({ll, ur, ul});
            }
        }

        areas_.resize(tris_.size());
        grads_.resize(tris_.size());
        for (std::size_t t = 0; t < tris_.size(); ++t) {
            const Vec2 p0 = nodes_[tris_[t][0]];
            const Vec2 p1 = nodes_[tris_[t][1]];
            const Vec2 p2 = nodes_[tris_[t][2]];
            const Vec2 e1 = p1 - p0;
            const Vec2 e2 = p2 - p0;
            const double det = e1.x * e2.y - e1.y * e2.x;
            areas_[t] = 0.5 * det;
            // grad(lambda_1) = J^{-T} (1,0), grad(lambda_2) = J^{-T} (0,1)
            const Vec2 g1{e2.y / det, -e2.x / det};
            const Vec2 g2{-e1.y / det, e1.x / det};
            grads_[t] = {Vec2{-g1.x - g2.x, -g1.y - g2.y}, g1, g2};
        }

        // Edges keyed by sorted node pair; the first triangle that lists the
        // edge in CCW order becomes its left triangle.
        std::unordered_map<long long, int> index_of;
        index_of.reserve(tris_.size() * 2);
        tri_edges_.assign(tris_.size(), {-1, -1, -1});
        std::vector<int> fill_count(tris_.size(), 0);
        const auto key = [this](int a, int b) {
            const long long lo = a < b ? a : b;
            const long long hi = a < b ? b : a;
            return lo * static_cast<long long>(node_count()) + hi;
        };
        for (std::size_t t = 0; t < tris_.size(); ++t) {
            for (int e = 0; e < 3; ++e) {
                const int a = tris_[t][e];
                const int b = tris_[t][(e + 1) % 3];
                const auto it = index_of.find(key(a, b));
                if (it == index_of.end()) {
                    Edge edge;
                    edge.a = a;
                    edge.b = b;
                    edge.left = static_cast<int>(t);
                    const Vec2 tv = nodes_[b] - nodes_[a];
                    edge.length = norm(tv);
                    edge.normal = {tv.y / edge.length, -tv.x / edge.length};
                    edge.midpoint = 0.5 * (nodes_[a] + nodes_[b]);
                    index_of.emplace(key(a, b), static_cast<int>(edges_.size()));
                    tri_edges_[t][fill_count[t]++] = static_cast<int>(edges_.size());
                    edges_.push_back(edge);
                } else {
                    edges_[it->second].right = static_cast<int>(t);
                    tri_edges_[t][fill_count[t]++] = it->second;
                }
            }
        }

        on_boundary_.assign(nodes_.size(), false);
        for (const Edge& e : edges_) {
            if (e.right < 0) {
                on_boundary_[e.a] = true;
                on_boundary_[e.b] = true;
            }
        }
    }

    int n_;
    std::vector<Vec2> nodes_;
    std::vector<std::array<int, 3>> tris_;
    std::vector<Edge> edges_;
    std::vector<bool> on_boundary_;
    std::vector<double> areas_;
    std::vector<std::array<Vec2, 3>> grads_;
    std::vector<std::array<int, 3>> tri_edges_;
};

inline Mesh build_uniform_mesh(int cells_per_side) { return Mesh(cells_per_side); }

/// 3-refinement: build-equivalent to a mesh with three times the cells per
/// side. Every coarse node coordinate reappears on the fine mesh.
inline Mesh refine3(const Mesh& mesh) { return Mesh(3 * mesh.cells_per_side()); }

inline std::vector<int> boundary_nodes(const Mesh& mesh) {
    std::vector<int> out;
    const auto& flags = mesh.boundary_node_flags();
    for (int i = 0; i < mesh.node_count(); ++i) {
        if (flags[i]) out.push_back(i);
    }
    return out;
}

}  // namespace mhfem
