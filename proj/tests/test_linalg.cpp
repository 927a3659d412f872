#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <random>

#include "mhfem/assembly.hpp"
#include "mhfem/linalg.hpp"
#include "mhfem/mesh.hpp"

using namespace mhfem;

namespace {

SparseMatrix scalar_matrix(double v) {
    return SparseMatrix(1, 1, {Eigen::Triplet<double>(0, 0, v)});
}

SparseMatrix diagonal_matrix(const std::vector<double>& d) {
    std::vector<Eigen::Triplet<double>> trips;
    for (int i = 0; i < static_cast<int>(d.size()); ++i) trips.emplace_back(i, i, d[i]);
    return SparseMatrix(static_cast<int>(d.size()), static_cast<int>(d.size()), trips);
}

}  // namespace

TEST_CASE("1x1 mode system solves to the Cramer oracle") {
    // M=[2], K=[3], k=omega=1, loads (f_c, f_s) = (1, 0).
    // Physical equations: kw*M*u_s + K*u_c = f_c and K*u_s - kw*M*u_c = f_s,
    // i.e. 2*u_s + 3*u_c = 1, 3*u_s - 2*u_c = 0. Cramer: u_s = 2/13, u_c = 3/13.
    const SparseMatrix M = scalar_matrix(2.0);
    const SparseMatrix K = scalar_matrix(3.0);
    Vector fc(1), fs(1);
    fc << 1.0;
    fs << 0.0;
    const BlockSystem sys = build_mode_system(1, 1.0, M, K, fc, fs);
    const BlockDiagPreconditioner precond(1, 1.0, M, K);
    const SolveResult r = minres_solve(sys, precond, 1e-12);
    REQUIRE(r.converged);
    CHECK(r.iterations <= 2);  // exact Krylov termination in dimension 2
    CHECK(r.x[0] == Catch::Approx(2.0 / 13.0).epsilon(1e-10));
    CHECK(r.x[1] == Catch::Approx(3.0 / 13.0).epsilon(1e-10));
}

TEST_CASE("zero loads give the zero solution without iterating") {
    const SparseMatrix M = scalar_matrix(2.0);
    const SparseMatrix K = scalar_matrix(3.0);
    Vector z(1);
    z << 0.0;
    const BlockSystem sys = build_mode_system(1, 1.0, M, K, z, z);
    const BlockDiagPreconditioner precond(1, 1.0, M, K);
    const SolveResult r = minres_solve(sys, precond, 1e-8);
    CHECK(r.converged);
    CHECK(r.iterations == 0);
    CHECK(r.x.norm() == 0.0);
}

TEST_CASE("block operator is symmetric and indefinite") {
    const Mesh mesh(4);
    const DirichletMap dmap(mesh);
    const SparseMatrix K = assemble_stiffness(mesh, CoefficientField::constant(1.0), dmap);
    const SparseMatrix M = assemble_mass(mesh, CoefficientField::constant(1.0), dmap);
    const Vector zero = Vector::Zero(dmap.dof_count());
    const BlockSystem sys = build_mode_system(2, 1.5, M, K, zero, zero);

    std::mt19937 rng(7);
    std::normal_distribution<double> gauss;
    bool saw_positive = false, saw_negative = false;
    for (int trial = 0; trial < 40; ++trial) {
        Vector x(sys.dim()), y(sys.dim());
        for (int i = 0; i < x.size(); ++i) {
            x[i] = gauss(rng);
            y[i] = gauss(rng);
        }
        const double axy = sys.apply(x).dot(y);
        const double xay = x.dot(sys.apply(y));
        CHECK(std::abs(axy - xay) <= 1e-12 * std::max(std::abs(axy), 1.0));
        const double quad = sys.apply(x).dot(x);
        (quad > 0 ? saw_positive : saw_negative) = true;
    }
    CHECK(saw_positive);
    CHECK(saw_negative);
}

TEST_CASE("build_mode_system rejects mismatched dimensions and k = 0") {
    const SparseMatrix M = diagonal_matrix({1.0, 2.0});
    const SparseMatrix K = scalar_matrix(3.0);
    Vector b2(2), b1(1);
    b2 << 1.0, 2.0;
    b1 << 1.0;
    CHECK_THROWS_AS(build_mode_system(1, 1.0, M, K, b2, b2), std::invalid_argument);
    CHECK_THROWS_AS(build_mode_system(0, 1.0, K, K, b1, b1), std::invalid_argument);
}

TEST_CASE("MINRES matches a dense solve on a mode system") {
    const Mesh mesh(5);
    const DirichletMap dmap(mesh);
    const SparseMatrix K = assemble_stiffness(mesh, CoefficientField::constant(1.0), dmap);
    const SparseMatrix M = assemble_mass(mesh, CoefficientField::constant(1.0), dmap);
    const int n = dmap.dof_count();
    Vector fc(n), fs(n);
    std::mt19937 rng(3);
    std::normal_distribution<double> gauss;
    for (int i = 0; i < n; ++i) {
        fc[i] = gauss(rng);
        fs[i] = gauss(rng);
    }
    const BlockSystem sys = build_mode_system(1, 1.0, M, K, fc, fs);
    const BlockDiagPreconditioner precond(1, 1.0, M, K);
    const SolveResult r = minres_solve(sys, precond, 1e-10);
    REQUIRE(r.converged);

    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int j = 0; j < 2 * n; ++j) {
        Vector e = Vector::Zero(2 * n);
        e[j] = 1.0;
        dense.col(j) = sys.apply(e);
    }
    const Vector exact = dense.fullPivLu().solve(sys.rhs);
    CHECK((r.x - exact).norm() / exact.norm() < 1e-8);

    // true residual of the returned iterate
    CHECK((sys.rhs - sys.apply(r.x)).norm() / sys.rhs.norm() < 1e-8);
}

TEST_CASE("MINRES true residual meets the tolerance on the level-81 harmonic problem") {
    const Mesh mesh(81);
    const DirichletMap dmap(mesh);
    const SparseMatrix K = assemble_stiffness(mesh, CoefficientField::constant(1.0), dmap);
    const SparseMatrix M = assemble_mass(mesh, CoefficientField::constant(1.0), dmap);
    const QuadratureRule rule = QuadratureRule::seven_point();
    const Vector fc = assemble_load(
        mesh, [](Vec2 p) { return 2.0 * (p.x * (1.0 - p.x) + p.y * (1.0 - p.y)); }, rule, dmap);
    const Vector fs = assemble_load(
        mesh, [](Vec2 p) { return p.x * (1.0 - p.x) * p.y * (p.y - 1.0); }, rule, dmap);
    const BlockSystem sys = build_mode_system(1, 1.0, M, K, fc, fs);
    const BlockDiagPreconditioner precond(1, 1.0, M, K);
    const SolveResult r = minres_solve(sys, precond, 1e-6);
    REQUIRE(r.converged);
    CHECK((sys.rhs - sys.apply(r.x)).norm() / sys.rhs.norm() <= 1e-5);
}

TEST_CASE("MINRES preconditioned residual norms decrease monotonically") {
    const Mesh mesh(6);
    const DirichletMap dmap(mesh);
    const SparseMatrix K = assemble_stiffness(mesh, CoefficientField::constant(1.0), dmap);
    const SparseMatrix M = assemble_mass(mesh, CoefficientField::constant(1.0), dmap);
    Vector fc = Vector::Ones(dmap.dof_count());
    Vector fs = Vector::Zero(dmap.dof_count());
    const BlockSystem sys = build_mode_system(3, 1.0, M, K, fc, fs);
    const BlockDiagPreconditioner precond(3, 1.0, M, K);
    const SolveResult r = minres_solve(sys, precond, 1e-10);
    REQUIRE(r.converged);
    for (std::size_t i = 1; i < r.residual_norms.size(); ++i) {
        CHECK(r.residual_norms[i] <= r.residual_norms[i - 1] * (1.0 + 1e-12));
    }
}

TEST_CASE("MINRES reports non-convergence when capped") {
    const Mesh mesh(8);
    const DirichletMap dmap(mesh);
    const SparseMatrix K = assemble_stiffness(mesh, CoefficientField::constant(1.0), dmap);
    const SparseMatrix M = assemble_mass(mesh, CoefficientField::constant(1.0), dmap);
    Vector fc = Vector::Ones(dmap.dof_count());
    Vector fs = Vector::Ones(dmap.dof_count());
    const BlockSystem sys = build_mode_system(1, 1.0, M, K, fc, fs);
    // identity preconditioner built from a diagonal matrix keeps convergence slow
    std::vector<double> ones(2 * dmap.dof_count() / 2, 1.0);
    const BlockDiagPreconditioner weak(CholeskyFactor(diagonal_matrix(
        std::vector<double>(static_cast<std::size_t>(dmap.dof_count()), 1.0))));
    const SolveResult r = minres_solve(sys, weak, 1e-14, 2);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 2);
}

TEST_CASE("pcg solves the identity in one iteration") {
    const SparseMatrix I = diagonal_matrix({1.0, 1.0, 1.0});
    Vector b(3);
    b << 1.0, -2.0, 0.5;
    const SolveResult r = pcg_solve(I, b, 1e-12);
    CHECK(r.converged);
    CHECK(r.iterations == 1);
    CHECK((r.x - b).norm() < 1e-14);
}

TEST_CASE("pcg with zero rhs returns zero in zero iterations") {
    const SparseMatrix I = diagonal_matrix({2.0, 3.0});
    const SolveResult r = pcg_solve(I, Vector::Zero(2), 1e-10);
    CHECK(r.converged);
    CHECK(r.iterations == 0);
    CHECK(r.x.norm() == 0.0);
}

TEST_CASE("pcg Poisson solve matches the dense oracle at n=3") {
    const Mesh mesh(3);
    const DirichletMap dmap(mesh);
    const SparseMatrix K = assemble_stiffness(mesh, CoefficientField::constant(1.0), dmap);
    const Vector b =
        assemble_load(mesh, [](Vec2) { return 1.0; }, QuadratureRule::seven_point(), dmap);
    const SolveResult r = pcg_solve(K, b, 1e-12);
    REQUIRE(r.converged);
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(K.rows(), K.rows());
    for (int i = 0; i < K.rows(); ++i) {
        for (int j = 0; j < K.rows(); ++j) dense(i, j) = K.coeff(i, j);
    }
    const Vector exact = dense.fullPivLu().solve(b);
    CHECK((r.x - exact).norm() < 1e-8);
}

TEST_CASE("factorize_spd inner solves are machine accurate") {
    SECTION("diagonal matrix solves by elementwise division") {
        const SparseMatrix D = diagonal_matrix({2.0, 4.0, 8.0});
        const CholeskyFactor f(D);
        Vector b(3);
        b << 2.0, 4.0, 8.0;
        const Vector x = f.solve(b);
        for (int i = 0; i < 3; ++i) CHECK(x[i] == Catch::Approx(1.0).epsilon(1e-14));
    }
    SECTION("applying to A*ones returns ones") {
        const Mesh mesh(4);
        const DirichletMap dmap(mesh);
        const SparseMatrix K = assemble_stiffness(mesh, CoefficientField::constant(1.0), dmap);
        const CholeskyFactor f(K);
        const Vector ones = Vector::Ones(K.rows());
        CHECK((f.solve(K.apply(ones)) - ones).norm() < 1e-12);
    }
    SECTION("kw*M + K solve matches the dense oracle at n=9") {
        const Mesh mesh(9);
        const DirichletMap dmap(mesh);
        const SparseMatrix K = assemble_stiffness(mesh, CoefficientField::constant(1.0), dmap);
        const SparseMatrix M = assemble_mass(mesh, CoefficientField::constant(1.0), dmap);
        const SparseMatrix P = SparseMatrix::combine(K, 1.0, M);
        const CholeskyFactor f(P);
        Vector b(P.rows());
        std::mt19937 rng(11);
        std::normal_distribution<double> gauss;
        for (int i = 0; i < b.size(); ++i) b[i] = gauss(rng);
        Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(P.rows(), P.rows());
        for (int i = 0; i < P.rows(); ++i) {
            for (int j = 0; j < P.rows(); ++j) dense(i, j) = P.coeff(i, j);
        }
        const Vector exact = dense.fullPivLu().solve(b);
        CHECK((f.solve(b) - exact).norm() / exact.norm() < 1e-10);
    }
    SECTION("indefinite matrix reports pivot breakdown") {
        CHECK_THROWS_AS(CholeskyFactor(diagonal_matrix({1.0, -1.0})), std::runtime_error);
    }
}
