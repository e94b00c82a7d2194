#pragma once

#include "c1dyn/core.hpp"
#include "c1dyn/shapefn.hpp"

namespace c1dyn {

/// Hermite coefficient quadruple describing the trajectory over one interval
/// [t_n, t_n + dt]:  x(t) = R1 x_n + R2 x_np1 + H1 v_n + H2 v_np1.
struct IntervalCoefficients {
    Vector x_n, x_np1, v_n, v_np1;
    double dt = 0.0;

    IntervalCoefficients() = default;
    IntervalCoefficients(Vector xn, Vector xnp1, Vector vn, Vector vnp1, double dt_)
        : x_n(std::move(xn)), x_np1(std::move(xnp1)),
          v_n(std::move(vn)), v_np1(std::move(vnp1)), dt(dt_) {
        if (x_n.size() != x_np1.size() || x_n.size() != v_n.size() ||
            x_n.size() != v_np1.size())
            throw std::invalid_argument("IntervalCoefficients: inconsistent dimensions");
        if (!(dt > 0.0)) throw std::invalid_argument("IntervalCoefficients: dt must be positive");
    }

    Vector interpolate_x(const HermiteBasis& basis, double tau) const {
        const HermiteValues s = basis.value(tau);
        return s.r1 * x_n + s.r2 * x_np1 + s.h1 * v_n + s.h2 * v_np1;
    }

    Vector interpolate_xdot(const HermiteBasis& basis, double tau) const {
        const HermiteValues s = basis.time_derivative(tau);
        return s.r1 * x_n + s.r2 * x_np1 + s.h1 * v_n + s.h2 * v_np1;
    }

    Vector interpolate_xddot(const HermiteBasis& basis, double tau) const {
        const HermiteValues s = basis.time_second_derivative(tau);
        return s.r1 * x_n + s.r2 * x_np1 + s.h1 * v_n + s.h2 * v_np1;
    }
};

/// Derivatives of the interval action with respect to the endpoint
/// displacements (p) and velocities (q); q carries units momentum * time.
struct MomentaSet {
    Vector p_minus, p_plus, q_minus, q_plus;
};

struct MomentaTangents {
    Matrix dp_minus_dx, dp_minus_dv;
    Matrix dp_plus_dx, dp_plus_dv;
    Matrix dq_minus_dx, dq_minus_dv;
    Matrix dq_plus_dx, dq_plus_dv;
};

namespace detail {

/// Mass and linear-stiffness contributions have closed forms; only the
/// nonlinear force remainder is integrated numerically, evaluating the model
/// on the Hermite-interpolated trajectory at the quadrature points.
inline void accumulate_interval(const SystemModel& model, const IntervalCoefficients& c,
                                const QuadratureRule& quad, MomentaSet* momenta,
                                MomentaTangents* tangents) {
    const Matrix& m = model.mass_matrix();
    const Matrix& k = model.linear_stiffness();
    const Vector& ref = model.reference_positions();
    const double dt = c.dt;
    const double dt2 = dt * dt;

    const Vector u_n = c.x_n - ref;
    const Vector u_np1 = c.x_np1 - ref;

    if (momenta) {
        const Vector mass_p = m * (12.0 * u_np1 - 12.0 * u_n - dt * c.v_np1 - dt * c.v_n) / (10.0 * dt);
        momenta->p_minus = mass_p + (dt / 420.0) *
            (k * (54.0 * u_np1 + 156.0 * u_n - 13.0 * dt * c.v_np1 + 22.0 * dt * c.v_n));
        momenta->p_plus = mass_p + (dt / 420.0) *
            (k * (-156.0 * u_np1 - 54.0 * u_n + 22.0 * dt * c.v_np1 - 13.0 * dt * c.v_n));
        momenta->q_minus = m * (3.0 * u_np1 - 3.0 * u_n + dt * c.v_np1 - 4.0 * dt * c.v_n) / 30.0 +
            (dt2 / 420.0) * (k * (13.0 * u_np1 + 22.0 * u_n - 3.0 * dt * c.v_np1 + 4.0 * dt * c.v_n));
        momenta->q_plus = m * (-3.0 * u_np1 + 3.0 * u_n + 4.0 * dt * c.v_np1 - dt * c.v_n) / 30.0 +
            (dt2 / 420.0) * (k * (22.0 * u_np1 + 13.0 * u_n - 4.0 * dt * c.v_np1 + 3.0 * dt * c.v_n));
    }
    if (tangents) {
        tangents->dp_minus_dx = (6.0 / (5.0 * dt)) * m + (9.0 * dt / 70.0) * k;
        tangents->dp_plus_dx = (6.0 / (5.0 * dt)) * m - (13.0 * dt / 35.0) * k;
        tangents->dq_minus_dx = 0.1 * m + (13.0 * dt2 / 420.0) * k;
        tangents->dq_plus_dx = -0.1 * m + (11.0 * dt2 / 210.0) * k;
        tangents->dp_minus_dv = -0.1 * m - (13.0 * dt2 / 420.0) * k;
        tangents->dp_plus_dv = -0.1 * m + (11.0 * dt2 / 210.0) * k;
        tangents->dq_minus_dv = (dt / 30.0) * m - (dt2 * dt / 140.0) * k;
        tangents->dq_plus_dv = (2.0 * dt / 15.0) * m - (dt2 * dt / 105.0) * k;
    }

    if (!model.has_nonlinear_force()) return;

    const HermiteBasis basis(dt);
    const double jac = basis.jacobian();
    for (int g = 0; g < quad.size(); ++g) {
        const double tau = quad.points[g];
        const double w = quad.weights[g] * jac;
        const HermiteValues s = basis.value(tau);
        const Vector xt = c.interpolate_x(basis, tau);
        if (momenta) {
            const Vector f = model.nonlinear_force(xt);
            momenta->p_minus += (w * s.r1) * f;
            momenta->p_plus -= (w * s.r2) * f;
            momenta->q_minus += (w * s.h1) * f;
            momenta->q_plus -= (w * s.h2) * f;
        }
        if (tangents) {
            const Matrix kt = model.nonlinear_tangent(xt);
            tangents->dp_minus_dx += (w * s.r1 * s.r2) * kt;
            tangents->dp_minus_dv += (w * s.r1 * s.h2) * kt;
            tangents->dp_plus_dx -= (w * s.r2 * s.r2) * kt;
            tangents->dp_plus_dv -= (w * s.r2 * s.h2) * kt;
            tangents->dq_minus_dx += (w * s.h1 * s.r2) * kt;
            tangents->dq_minus_dv += (w * s.h1 * s.h2) * kt;
            tangents->dq_plus_dx -= (w * s.h2 * s.r2) * kt;
            tangents->dq_plus_dv -= (w * s.h2 * s.h2) * kt;
        }
    }
}

}  // namespace detail

inline MomentaSet compute_momenta(const SystemModel& model, const IntervalCoefficients& c,
                                  const QuadratureRule& quad) {
    MomentaSet momenta;
    detail::accumulate_interval(model, c, quad, &momenta, nullptr);
    return momenta;
}

/// Derivatives of the four momenta with respect to (x_np1, v_np1), needed
/// for the Newton linearization of the one-step schemes.
inline MomentaTangents momenta_tangents(const SystemModel& model, const IntervalCoefficients& c,
                                        const QuadratureRule& quad) {
    MomentaTangents tangents;
    detail::accumulate_interval(model, c, quad, nullptr, &tangents);
    return tangents;
}

/// Integral of [m xddot + f(x)] over the interval.  For a converged
/// momentum-matching (p2) step this vanishes to solver tolerance, since the
/// two weighted residuals it splits into are enforced individually.
inline Vector momentum_balance_residual(const SystemModel& model, const IntervalCoefficients& c,
                                        const QuadratureRule& quad) {
    const HermiteBasis basis(c.dt);
    const double jac = basis.jacobian();
    Vector r = Vector::Zero(c.x_n.size());
    for (int g = 0; g < quad.size(); ++g) {
        const double tau = quad.points[g];
        const double w = quad.weights[g] * jac;
        const Vector xt = c.interpolate_x(basis, tau);
        const Vector at = c.interpolate_xddot(basis, tau);
        r += w * (model.mass_matrix() * at + model.total_force(xt));
    }
    return r;
}

}  // namespace c1dyn
