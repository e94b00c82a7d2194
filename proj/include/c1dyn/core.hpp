#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace c1dyn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Thrown when a deformation state produces a non-positive stretch inside
/// an element (the material law is undefined there).
class ElementInversionError : public std::runtime_error {
public:
    ElementInversionError(int element, double stretch)
        : std::runtime_error("element " + std::to_string(element) +
                             " inverted (stretch = " + std::to_string(stretch) + ")"),
          element_(element), stretch_(stretch) {}

    int element() const { return element_; }
    double stretch() const { return stretch_; }

private:
    int element_;
    double stretch_;
};

/// Uniform partition of [t0, t_end] into `steps` intervals.
struct TimeGrid {
    double t0 = 0.0;
    double t_end = 1.0;
    int steps = 1;

    TimeGrid() = default;
    TimeGrid(double t0_, double t_end_, int steps_) : t0(t0_), t_end(t_end_), steps(steps_) {
        if (!(t_end > t0)) throw std::invalid_argument("TimeGrid: t_end must exceed t0");
        if (steps < 1) throw std::invalid_argument("TimeGrid: need at least one step");
    }

    double dt() const { return (t_end - t0) / steps; }
    double time_at(int n) const { return t0 + n * dt(); }
};

/// Nodal deformation and velocity at one discrete time.
struct State {
    double t = 0.0;
    Vector x;  // current nodal positions (displacement u = x - X)
    Vector v;

    State() = default;
    State(double t_, Vector x_, Vector v_) : t(t_), x(std::move(x_)), v(std::move(v_)) {
        if (x.size() != v.size())
            throw std::invalid_argument("State: x and v must have equal length");
    }

    Eigen::Index size() const { return x.size(); }
};

struct EnergyBreakdown {
    double kinetic = 0.0;
    double potential = 0.0;
    double total = 0.0;
};

/**
 * Mechanical system with the internal force split into a linear part k*u and
 * a remainder f_nl(x) (which also absorbs any constant external load).  The
 * total force driving the dynamics is f(x) = k*(x - X) + f_nl(x).
 *
 * A purely linear model leaves f_nl at the zero default; a fully nonlinear
 * model may return a zero stiffness matrix instead.  Implementations are
 * immutable after construction and safe to share across threads.
 */
class SystemModel {
public:
    virtual ~SystemModel() = default;

    virtual const Matrix& mass_matrix() const = 0;
    virtual const Matrix& linear_stiffness() const = 0;
    virtual const Vector& reference_positions() const = 0;

    /// True if nonlinear_force can be nonzero; lets integrators skip the
    /// time-quadrature loop for linear systems.
    virtual bool has_nonlinear_force() const { return false; }

    virtual Vector nonlinear_force(const Vector& x) const {
        return Vector::Zero(x.size());
    }

    virtual Matrix nonlinear_tangent(const Vector& x) const {
        return Matrix::Zero(x.size(), x.size());
    }

    /// Potential whose gradient is nonlinear_force (zero for linear models).
    virtual double nonlinear_potential(const Vector&) const { return 0.0; }

    int dof_count() const { return static_cast<int>(mass_matrix().rows()); }

    /// f(x) = k u + f_nl(x)
    Vector total_force(const Vector& x) const {
        Vector f = linear_stiffness() * (x - reference_positions());
        if (has_nonlinear_force()) f += nonlinear_force(x);
        return f;
    }

    EnergyBreakdown energy(const Vector& x, const Vector& v) const {
        if (x.size() != dof_count() || v.size() != dof_count())
            throw std::invalid_argument("SystemModel::energy: dimension mismatch");
        EnergyBreakdown e;
        e.kinetic = 0.5 * v.dot(mass_matrix() * v);
        const Vector u = x - reference_positions();
        e.potential = 0.5 * u.dot(linear_stiffness() * u) + nonlinear_potential(x);
        e.total = e.kinetic + e.potential;
        return e;
    }
};

inline EnergyBreakdown total_energy(const SystemModel& model, const State& s) {
    return model.energy(s.x, s.v);
}

/// Single-DOF spring pendulum with mass m and stiffness k.
class OscillatorModel : public SystemModel {
public:
    OscillatorModel(double mass, double stiffness) : m_(mass), k_(stiffness) {
        if (!(mass > 0.0) || !(stiffness > 0.0))
            throw std::invalid_argument("OscillatorModel: mass and stiffness must be positive");
        mass_mat_ = Matrix::Constant(1, 1, mass);
        stiff_mat_ = Matrix::Constant(1, 1, stiffness);
        ref_ = Vector::Zero(1);
    }

    const Matrix& mass_matrix() const override { return mass_mat_; }
    const Matrix& linear_stiffness() const override { return stiff_mat_; }
    const Vector& reference_positions() const override { return ref_; }

    double mass() const { return m_; }
    double stiffness() const { return k_; }
    double omega() const { return std::sqrt(k_ / m_); }
    double period() const { return 2.0 * M_PI / omega(); }
    double initial_energy(double u0) const { return 0.5 * k_ * u0 * u0; }

private:
    double m_, k_;
    Matrix mass_mat_, stiff_mat_;
    Vector ref_;
};

struct PointSolution {
    double u = 0.0;
    double v = 0.0;
};

/// Exact solution u(t) = u0 cos(w t), v(t) = -w u0 sin(w t).
inline PointSolution oscillator_analytic(const OscillatorModel& model, double u0, double t) {
    const double w = model.omega();
    return {u0 * std::cos(w * t), -w * u0 * std::sin(w * t)};
}

}  // namespace c1dyn
