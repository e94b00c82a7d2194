#pragma once

// Test-only helpers: independent oracles and synthetic models used to check
// the library implementations against first principles.

#include "c1dyn/core.hpp"
#include "c1dyn/momenta.hpp"
#include "c1dyn/shapefn.hpp"

#include <random>

namespace c1dyn::testing {

/// Dense linear system with arbitrary (SPD) mass and (symmetric) stiffness.
class DenseModel : public SystemModel {
public:
    DenseModel(Matrix mass, Matrix stiffness, Vector reference)
        : mass_(std::move(mass)), stiffness_(std::move(stiffness)), ref_(std::move(reference)) {}

    const Matrix& mass_matrix() const override { return mass_; }
    const Matrix& linear_stiffness() const override { return stiffness_; }
    const Vector& reference_positions() const override { return ref_; }

private:
    Matrix mass_, stiffness_;
    Vector ref_;
};

inline DenseModel random_linear_model(std::mt19937& rng, int n) {
    std::normal_distribution<double> dist;
    Matrix a(n, n), b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            a(i, j) = dist(rng);
            b(i, j) = dist(rng);
        }
    Matrix mass = a.transpose() * a + static_cast<double>(n) * Matrix::Identity(n, n);
    Matrix stiffness = 0.5 * (b + b.transpose());
    Vector ref(n);
    for (int i = 0; i < n; ++i) ref[i] = dist(rng);
    return DenseModel(std::move(mass), std::move(stiffness), std::move(ref));
}

inline IntervalCoefficients random_coefficients(std::mt19937& rng, int n, double dt) {
    std::normal_distribution<double> dist;
    Vector xn(n), xnp1(n), vn(n), vnp1(n);
    for (int i = 0; i < n; ++i) {
        xn[i] = dist(rng);
        xnp1[i] = dist(rng);
        vn[i] = dist(rng);
        vnp1[i] = dist(rng);
    }
    return IntervalCoefficients(xn, xnp1, vn, vnp1, dt);
}

/**
 * Momenta straight from their defining integrals,
 *   p- = -int [R1dot m xdot - R1 f(x)] dt,   p+ = +int [R2dot m xdot - R2 f(x)] dt,
 *   q- = -int [H1dot m xdot - H1 f(x)] dt,   q+ = +int [H2dot m xdot - H2 f(x)] dt,
 * evaluated by Gauss quadrature of the given order.  Independent of the
 * closed-form stencils used by compute_momenta.
 */
inline MomentaSet momenta_by_quadrature(const SystemModel& model, const IntervalCoefficients& c,
                                        int quadrature_points) {
    const auto quad = QuadratureRule::gauss_legendre(quadrature_points);
    const HermiteBasis basis(c.dt);
    const double jac = basis.jacobian();
    const int n = static_cast<int>(c.x_n.size());
    MomentaSet m{Vector::Zero(n), Vector::Zero(n), Vector::Zero(n), Vector::Zero(n)};
    for (int g = 0; g < quad.size(); ++g) {
        const double tau = quad.points[g];
        const double w = quad.weights[g] * jac;
        const auto s = basis.value(tau);
        const auto d = basis.time_derivative(tau);
        const Vector xdot = c.interpolate_xdot(basis, tau);
        const Vector mom = model.mass_matrix() * xdot;
        const Vector f = model.total_force(c.interpolate_x(basis, tau));
        m.p_minus -= w * (d.r1 * mom - s.r1 * f);
        m.p_plus += w * (d.r2 * mom - s.r2 * f);
        m.q_minus -= w * (d.h1 * mom - s.h1 * f);
        m.q_plus += w * (d.h2 * mom - s.h2 * f);
    }
    return m;
}

/// Interval action S = int [ 0.5 xdot^T m xdot - Pi(x) ] dt by quadrature.
inline double interval_action(const SystemModel& model, const IntervalCoefficients& c,
                              int quadrature_points) {
    const auto quad = QuadratureRule::gauss_legendre(quadrature_points);
    const HermiteBasis basis(c.dt);
    const double jac = basis.jacobian();
    double action = 0.0;
    for (int g = 0; g < quad.size(); ++g) {
        const double tau = quad.points[g];
        const Vector xdot = c.interpolate_xdot(basis, tau);
        const Vector x = c.interpolate_x(basis, tau);
        const Vector u = x - model.reference_positions();
        const double kinetic = 0.5 * xdot.dot(model.mass_matrix() * xdot);
        const double potential =
            0.5 * u.dot(model.linear_stiffness() * u) + model.nonlinear_potential(x);
        action += quad.weights[g] * jac * (kinetic - potential);
    }
    return action;
}

}  // namespace c1dyn::testing
