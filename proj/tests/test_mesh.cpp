#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "mhfem/mesh.hpp"

using namespace mhfem;

TEST_CASE("uniform mesh counts follow Euler's formula") {
    // n=1 counted by hand; larger ones via V + T - 1
    struct Row {
        int n, nodes, tris, edges;
    };
    for (const Row& row : {Row{1, 4, 2, 5}, Row{3, 16, 18, 33}, Row{9, 100, 162, 261}}) {
        const Mesh m(row.n);
        CHECK(m.node_count() == row.nodes);
        CHECK(m.triangle_count() == row.tris);
        CHECK(m.edge_count() == row.edges);
        CHECK(m.edge_count() == m.node_count() + m.triangle_count() - 1);
    }
}

TEST_CASE("mesh rejects n = 0") {
    CHECK_THROWS_AS(Mesh(0), std::invalid_argument);
}

TEST_CASE("triangles are counterclockwise with area 1/(2n^2)") {
    for (int n : {1, 3, 7}) {
        const Mesh m(n);
        const double expected = 1.0 / (2.0 * n * n);
        double total = 0.0;
        for (int t = 0; t < m.triangle_count(); ++t) {
            CHECK(m.area(t) == Catch::Approx(expected).epsilon(1e-13));
            total += m.area(t);
        }
        CHECK(total == Catch::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("interior edges have two triangles, boundary edges one") {
    const Mesh m(4);
    int boundary = 0;
    for (const Edge& e : m.edges()) {
        CHECK(e.left >= 0);
        if (e.right < 0) ++boundary;
    }
    CHECK(boundary == 4 * 4);  // 4n boundary edges
}

TEST_CASE("edge normals are unit and point from left to right triangle") {
    const Mesh m(5);
    for (const Edge& e : m.edges()) {
        CHECK(norm(e.normal) == Catch::Approx(1.0).epsilon(1e-14));
        const Vec2 tangent = m.nodes()[e.b] - m.nodes()[e.a];
        CHECK(std::abs(dot(tangent, e.normal)) < 1e-14);
        if (e.right >= 0) {
            const Vec2 span = m.centroid(e.right) - m.centroid(e.left);
            CHECK(dot(span, e.normal) > 0.0);
        }
    }
}

TEST_CASE("boundary nodes are exactly the 4n perimeter nodes") {
    CHECK(boundary_nodes(Mesh(1)).size() == 4);
    CHECK(boundary_nodes(Mesh(3)).size() == 12);
    CHECK(boundary_nodes(Mesh(9)).size() == 36);
    const Mesh m(6);
    for (int idx : boundary_nodes(m)) {
        const Vec2 p = m.nodes()[idx];
        const bool on_edge = p.x == 0.0 || p.y == 0.0 || p.x == 1.0 || p.y == 1.0;
        CHECK(on_edge);
    }
}

TEST_CASE("refine3 triples the resolution and keeps coarse nodes") {
    const Mesh coarse(3);
    const Mesh fine = refine3(coarse);
    CHECK(fine.cells_per_side() == 9);
    CHECK(fine.triangle_count() == 162);

    std::set<std::pair<long long, long long>> fine_nodes;
    const auto key = [](Vec2 p) {
        return std::pair<long long, long long>{std::llround(p.x * 1e12), std::llround(p.y * 1e12)};
    };
    for (const Vec2& p : fine.nodes()) fine_nodes.insert(key(p));
    for (const Vec2& p : coarse.nodes()) CHECK(fine_nodes.count(key(p)) == 1);

    CHECK(refine3(fine).cells_per_side() == 27);
}

TEST_CASE("refine3 twice matches build_uniform_mesh(9n) node set") {
    const Mesh twice = refine3(refine3(Mesh(2)));
    const Mesh direct = build_uniform_mesh(18);
    REQUIRE(twice.node_count() == direct.node_count());
    for (int i = 0; i < twice.node_count(); ++i) {
        CHECK(twice.nodes()[i].x == Catch::Approx(direct.nodes()[i].x).margin(1e-14));
        CHECK(twice.nodes()[i].y == Catch::Approx(direct.nodes()[i].y).margin(1e-14));
    }
}

TEST_CASE("triangle_edges lists each edge exactly once per adjacent triangle") {
    const Mesh m(3);
    std::vector<int> seen(m.edge_count(), 0);
    for (int t = 0; t < m.triangle_count(); ++t) {
        for (int e : m.triangle_edges(t)) {
            REQUIRE(e >= 0);
            ++seen[e];
        }
    }
    for (int e = 0; e < m.edge_count(); ++e) {
        CHECK(seen[e] == (m.edges()[e].right >= 0 ? 2 : 1));
    }
}
