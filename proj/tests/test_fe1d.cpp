#include "c1dyn/fe1d.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace c1dyn;

namespace {
const BarProperties kUnitProps{};  // L = A = rho0 = E = 1
}

TEST_CASE("Consistent mass of a single linear element") {
    const Matrix m = assemble_mass(BarMesh(1.0, 1, ElementKind::LinearLagrange), kUnitProps);
    REQUIRE(m.rows() == 2);
    CHECK(m(0, 0) == Catch::Approx(2.0 / 6.0));
    CHECK(m(0, 1) == Catch::Approx(1.0 / 6.0));
    CHECK(m(1, 0) == Catch::Approx(1.0 / 6.0));
    CHECK(m(1, 1) == Catch::Approx(2.0 / 6.0));
}

TEST_CASE("Mass assembly of two linear elements") {
    const Matrix m = assemble_mass(BarMesh(1.0, 2, ElementKind::LinearLagrange), kUnitProps);
    REQUIRE(m.rows() == 3);
    // each element has length 1/2, so the one-element stencil is halved
    CHECK(m(0, 0) == Catch::Approx(2.0 / 12.0));
    CHECK(m(1, 1) == Catch::Approx(4.0 / 12.0));
    CHECK(m(2, 2) == Catch::Approx(2.0 / 12.0));
    CHECK(m(0, 1) == Catch::Approx(1.0 / 12.0));
    CHECK(m(0, 2) == Catch::Approx(0.0).margin(1e-16));
}

TEST_CASE("Mass matrices are positive definite") {
    std::mt19937 rng(11);
    std::normal_distribution<double> dist;
    for (ElementKind kind : {ElementKind::LinearLagrange, ElementKind::CubicHermite}) {
        const Matrix m = assemble_mass(BarMesh(1.0, 4, kind), kUnitProps);
        for (int trial = 0; trial < 20; ++trial) {
            Vector x(m.rows());
            for (int i = 0; i < x.size(); ++i) x[i] = dist(rng);
            if (x.norm() == 0.0) continue;
            CHECK(x.dot(m * x) > 0.0);
        }
    }
}

TEST_CASE("Stiffness of a single linear element") {
    const Matrix k = assemble_linear_stiffness(BarMesh(1.0, 1, ElementKind::LinearLagrange),
                                               kUnitProps);
    CHECK(k(0, 0) == Catch::Approx(1.0));
    CHECK(k(0, 1) == Catch::Approx(-1.0));
    CHECK(k(1, 0) == Catch::Approx(-1.0));
    CHECK(k(1, 1) == Catch::Approx(1.0));
}

TEST_CASE("Rigid translation produces no elastic force") {
    for (ElementKind kind : {ElementKind::LinearLagrange, ElementKind::CubicHermite}) {
        const BarMesh mesh(1.0, 5, kind);
        const Matrix k = assemble_linear_stiffness(mesh, kUnitProps);
        Vector rigid = Vector::Zero(mesh.dof_count());
        for (int i = 0; i < mesh.node_count(); ++i) rigid[mesh.value_dof(i)] = 1.0;
        CHECK((k * rigid).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
}

TEST_CASE("Analytic first mode of the bar") {
    auto at_end = analytic_first_mode(kUnitProps, 0.25, 0.0, 0.0);
    CHECK(at_end.u == Catch::Approx(0.25));
    CHECK(at_end.v == Catch::Approx(0.0).margin(1e-16));
    auto mid = analytic_first_mode(kUnitProps, 0.25, 0.0, 0.5);
    CHECK(mid.u == Catch::Approx(0.0).margin(1e-16));
    CHECK(kUnitProps.first_mode_frequency() == Catch::Approx(M_PI));
    CHECK(kUnitProps.first_mode_period() == Catch::Approx(2.0));
    CHECK(kUnitProps.wave_speed() == Catch::Approx(1.0));
}

TEST_CASE("Discrete first eigenfrequency of six linear elements") {
    const BarMesh mesh(1.0, 6, ElementKind::LinearLagrange);
    const double w = discrete_mode_frequency(mesh, kUnitProps, 0);
    const double w_an = kUnitProps.first_mode_frequency();
    CHECK(w > w_an);
    CHECK(std::abs(w - w_an) / w_an == Catch::Approx(0.0115).margin(0.001));
}

TEST_CASE("Discrete eigenfrequency converges monotonically from above") {
    const double w_an = kUnitProps.first_mode_frequency();
    double prev = 1e30;
    for (int nel : {4, 8, 16, 32}) {
        const double w = discrete_mode_frequency(BarMesh(1.0, nel, ElementKind::LinearLagrange),
                                                 kUnitProps, 0);
        CHECK(w > w_an);
        CHECK(w < prev);
        prev = w;
    }
}

TEST_CASE("Skipping the rigid mode yields a positive frequency") {
    const double w = discrete_mode_frequency(BarMesh(1.0, 3, ElementKind::LinearLagrange),
                                             kUnitProps, 0);
    CHECK(w > 0.0);
}

TEST_CASE("Neo-Hooke force vanishes in the reference configuration") {
    for (ElementKind kind : {ElementKind::LinearLagrange, ElementKind::CubicHermite}) {
        const BarMesh mesh(1.0, 4, kind);
        const auto out = internal_force_neo_hooke(mesh, kUnitProps, mesh.reference_positions());
        CHECK(out.force.lpNorm<Eigen::Infinity>() <= 1e-14);
    }
}

TEST_CASE("Neo-Hooke end forces under uniform stretch") {
    // lambda = 2 on a single element: end forces are -/+ A (E/2)(2 - 1/2).
    const BarMesh mesh(1.0, 1, ElementKind::LinearLagrange);
    Vector x(2);
    x << 0.0, 2.0;
    const auto out = internal_force_neo_hooke(mesh, kUnitProps, x);
    CHECK(out.force[0] == Catch::Approx(-0.75));
    CHECK(out.force[1] == Catch::Approx(0.75));
}

TEST_CASE("Element inversion is reported") {
    const BarMesh mesh(1.0, 1, ElementKind::LinearLagrange);
    Vector x(2);
    x << 0.0, -0.5;  // lambda = -0.5
    CHECK_THROWS_AS(internal_force_neo_hooke(mesh, kUnitProps, x), ElementInversionError);
    try {
        internal_force_neo_hooke(mesh, kUnitProps, x);
    } catch (const ElementInversionError& err) {
        CHECK(err.element() == 0);
        CHECK(err.stretch() < 0.0);
    }
}

TEST_CASE("Neo-Hooke linearizes to the linear-elastic force at small strain") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (ElementKind kind : {ElementKind::LinearLagrange, ElementKind::CubicHermite}) {
        const BarMesh mesh(1.0, 4, kind);
        const Matrix k = assemble_linear_stiffness(mesh, kUnitProps);
        Vector u(mesh.dof_count());
        for (int i = 0; i < u.size(); ++i) u[i] = 1e-6 * dist(rng);
        const Vector x = mesh.reference_positions() + u;
        const Vector f_nl = internal_force_neo_hooke(mesh, kUnitProps, x).force;
        const Vector f_lin = k * u;
        CHECK((f_nl - f_lin).norm() <= 1e-5 * f_lin.norm());
    }
}

TEST_CASE("Internal forces of the free-free bar are self-equilibrated") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(-0.05, 0.05);
    for (ElementKind kind : {ElementKind::LinearLagrange, ElementKind::CubicHermite}) {
        const BarMesh mesh(1.0, 6, kind);
        Vector u(mesh.dof_count());
        for (int i = 0; i < u.size(); ++i) u[i] = dist(rng);
        const Vector x = mesh.reference_positions() + u;
        // total force conjugate to a rigid translation (value DOFs)
        const Matrix k = assemble_linear_stiffness(mesh, kUnitProps);
        const Vector f_lin = k * u;
        const Vector f_neo = internal_force_neo_hooke(mesh, kUnitProps, x).force;
        double sum_lin = 0.0, sum_neo = 0.0;
        for (int i = 0; i < mesh.node_count(); ++i) {
            sum_lin += f_lin[mesh.value_dof(i)];
            sum_neo += f_neo[mesh.value_dof(i)];
        }
        CHECK(std::abs(sum_lin) <= 1e-12);
        CHECK(std::abs(sum_neo) <= 1e-12);
    }
}

TEST_CASE("Directional derivative of the strain energy matches the force") {
    const BarMesh mesh(1.0, 3, ElementKind::CubicHermite);
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> dist(-0.05, 0.05);
    Vector x = mesh.reference_positions();
    for (int i = 0; i < x.size(); ++i) x[i] += dist(rng);
    Vector dir(x.size());
    for (int i = 0; i < x.size(); ++i) dir[i] = dist(rng);
    dir.normalize();
    const double h = 1e-6;
    const double w_plus = neo_hooke_potential(mesh, kUnitProps, x + h * dir);
    const double w_minus = neo_hooke_potential(mesh, kUnitProps, x - h * dir);
    const double fd = (w_plus - w_minus) / (2.0 * h);
    const double analytic = internal_force_neo_hooke(mesh, kUnitProps, x).force.dot(dir);
    CHECK(fd == Catch::Approx(analytic).epsilon(1e-6));
}

TEST_CASE("Hermite mesh reproduces cubic displacement fields") {
    // nodal values and slopes sampled from u(X) = 1 + X - 2 X^2 + 0.5 X^3
    auto u = [](double X) { return 1.0 + X - 2.0 * X * X + 0.5 * X * X * X; };
    auto du = [](double X) { return 1.0 - 4.0 * X + 1.5 * X * X; };
    const BarMesh mesh(1.0, 3, ElementKind::CubicHermite);
    Vector dofs(mesh.dof_count());
    for (int i = 0; i < mesh.node_count(); ++i) {
        dofs[2 * i] = u(mesh.node_position(i));
        dofs[2 * i + 1] = du(mesh.node_position(i));
    }
    const HermiteBasis basis(mesh.element_length());
    for (int e = 0; e < mesh.element_count(); ++e) {
        for (double tau : {-0.7, -0.2, 0.3, 0.9}) {
            const auto s = basis.value(tau);
            const double interp = s.r1 * dofs[2 * e] + s.h1 * dofs[2 * e + 1] +
                                  s.r2 * dofs[2 * e + 2] + s.h2 * dofs[2 * e + 3];
            const double X = mesh.node_position(e) + 0.5 * mesh.element_length() * (tau + 1.0);
            CHECK(std::abs(interp - u(X)) <= 1e-12);
        }
    }
}

TEST_CASE("Characteristic length halves for Hermite elements") {
    CHECK(BarMesh(1.0, 4, ElementKind::LinearLagrange).characteristic_length() ==
          Catch::Approx(0.25));
    CHECK(BarMesh(1.0, 4, ElementKind::CubicHermite).characteristic_length() ==
          Catch::Approx(0.125));
}
