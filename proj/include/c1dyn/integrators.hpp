#pragma once

#include "c1dyn/core.hpp"
#include "c1dyn/momenta.hpp"
#include "c1dyn/shapefn.hpp"

#include <Eigen/LU>

#include <optional>
#include <string>
#include <vector>

namespace c1dyn {

enum class Scheme { P2, Q2, PpQm, PpQp, PmQm, PmQp, Newmark, L1 };

inline const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::P2: return "p2";
        case Scheme::Q2: return "q2";
        case Scheme::PpQm: return "p+q-";
        case Scheme::PpQp: return "p+q+";
        case Scheme::PmQm: return "p-q-";
        case Scheme::PmQp: return "p-q+";
        case Scheme::Newmark: return "newmark";
        case Scheme::L1: return "l1";
    }
    return "?";
}

inline Scheme parse_scheme(const std::string& name) {
    if (name == "p2") return Scheme::P2;
    if (name == "q2") return Scheme::Q2;
    if (name == "p+q-" || name == "ppqm") return Scheme::PpQm;
    if (name == "p+q+" || name == "ppqp") return Scheme::PpQp;
    if (name == "p-q-" || name == "pmqm") return Scheme::PmQm;
    if (name == "p-q+" || name == "pmqp") return Scheme::PmQp;
    if (name == "newmark") return Scheme::Newmark;
    if (name == "l1") return Scheme::L1;
    throw std::invalid_argument("unknown scheme: " + name);
}

inline bool is_hermite_scheme(Scheme s) {
    return s != Scheme::Newmark && s != Scheme::L1;
}

enum class Predictor { PreviousState, ConstantVelocityExtrapolation };

struct NewtonSettings {
    double tol_rel = 1e-10;
    double tol_abs = 1e-14;
    int max_iter = 25;
    Predictor predictor = Predictor::ConstantVelocityExtrapolation;
};

struct StepDiagnostics {
    int newton_iters = 0;
    double residual_norm = 0.0;
    bool converged = false;
};

struct IntegratorOptions {
    NewtonSettings newton;
    int quadrature_points = 5;  // time quadrature for nonlinear force integrals
    double newmark_beta = 0.25;
    double newmark_gamma = 0.5;
};

struct StepResult {
    State state;
    StepDiagnostics diagnostics;
};

namespace detail {

/// Which of the four interval equations a scheme enforces.  p-type equations
/// read p - m v_node = 0, q-type equations read q = 0.
enum class IntervalEquation { PMinus, PPlus, QMinus, QPlus };

struct SchemeEquations {
    IntervalEquation first, second;
};

inline SchemeEquations scheme_equations(Scheme s) {
    switch (s) {
        case Scheme::P2: return {IntervalEquation::PMinus, IntervalEquation::PPlus};
        case Scheme::Q2: return {IntervalEquation::QMinus, IntervalEquation::QPlus};
        case Scheme::PpQm: return {IntervalEquation::PPlus, IntervalEquation::QMinus};
        case Scheme::PpQp: return {IntervalEquation::PPlus, IntervalEquation::QPlus};
        case Scheme::PmQm: return {IntervalEquation::PMinus, IntervalEquation::QMinus};
        case Scheme::PmQp: return {IntervalEquation::PMinus, IntervalEquation::QPlus};
        default: throw std::invalid_argument("scheme_equations: not a one-step Hermite scheme");
    }
}

struct EquationView {
    Vector residual;
    const Matrix* jac_x;
    const Matrix* jac_v;
    bool subtract_mass_block;  // p+ equation carries -m v_np1
    double scale;              // converts the residual to momentum units
};

inline EquationView equation_view(IntervalEquation eq, const MomentaSet& momenta,
                                  const MomentaTangents& tangents, const Matrix& m,
                                  const Vector& v_n, const Vector& v_np1, double dt) {
    switch (eq) {
        case IntervalEquation::PMinus:
            return {momenta.p_minus - m * v_n, &tangents.dp_minus_dx, &tangents.dp_minus_dv,
                    false, 1.0};
        case IntervalEquation::PPlus:
            return {momenta.p_plus - m * v_np1, &tangents.dp_plus_dx, &tangents.dp_plus_dv,
                    true, 1.0};
        case IntervalEquation::QMinus:
            return {momenta.q_minus, &tangents.dq_minus_dx, &tangents.dq_minus_dv, false,
                    1.0 / dt};
        case IntervalEquation::QPlus:
            return {momenta.q_plus, &tangents.dq_plus_dx, &tangents.dq_plus_dv, false,
                    1.0 / dt};
    }
    throw std::logic_error("equation_view: unreachable");
}

/// Reference magnitude for the relative Newton tolerance, in momentum units.
/// The force term keeps the scale meaningful when the state starts at rest
/// or passes through the equilibrium configuration.
inline double momentum_scale(const SystemModel& model, const State& s, double dt) {
    return (model.mass_matrix() * s.v).norm() + dt * model.total_force(s.x).norm();
}

}  // namespace detail

/**
 * One step of any of the six Hermite one-step schemes: the two selected
 * interval equations are solved as a stacked 2n system for (x_np1, v_np1)
 * by Newton's method.  Linear systems converge in a single iteration.
 */
inline StepResult hermite_step(Scheme scheme, const SystemModel& model, const State& s_n,
                               double dt, const IntegratorOptions& opts = {}) {
    const auto eqs = detail::scheme_equations(scheme);
    const int n = model.dof_count();
    const Matrix& m = model.mass_matrix();
    const QuadratureRule quad = QuadratureRule::gauss_legendre(opts.quadrature_points);

    IntervalCoefficients c;
    c.x_n = s_n.x;
    c.v_n = s_n.v;
    c.dt = dt;
    if (opts.newton.predictor == Predictor::ConstantVelocityExtrapolation)
        c.x_np1 = s_n.x + dt * s_n.v;
    else
        c.x_np1 = s_n.x;
    c.v_np1 = s_n.v;

    const double ref = detail::momentum_scale(model, s_n, dt);
    const double tol = opts.newton.tol_rel * ref + opts.newton.tol_abs;

    StepDiagnostics diag;
    Matrix jacobian(2 * n, 2 * n);
    Vector rhs(2 * n);
    for (int it = 0; it <= opts.newton.max_iter; ++it) {
        MomentaSet momenta;
        MomentaTangents tangents;
        detail::accumulate_interval(model, c, quad, &momenta, &tangents);

        const auto g1 = detail::equation_view(eqs.first, momenta, tangents, m, c.v_n, c.v_np1, dt);
        const auto g2 = detail::equation_view(eqs.second, momenta, tangents, m, c.v_n, c.v_np1, dt);

        diag.newton_iters = it;
        diag.residual_norm = std::hypot(g1.scale * g1.residual.norm(),
                                        g2.scale * g2.residual.norm());
        if (diag.residual_norm <= tol) {
            diag.converged = true;
            break;
        }
        if (it == opts.newton.max_iter) break;

        jacobian.topLeftCorner(n, n) = *g1.jac_x;
        jacobian.topRightCorner(n, n) = *g1.jac_v;
        if (g1.subtract_mass_block) jacobian.topRightCorner(n, n) -= m;
        jacobian.bottomLeftCorner(n, n) = *g2.jac_x;
        jacobian.bottomRightCorner(n, n) = *g2.jac_v;
        if (g2.subtract_mass_block) jacobian.bottomRightCorner(n, n) -= m;
        rhs.head(n) = -g1.residual;
        rhs.tail(n) = -g2.residual;

        const Vector delta = jacobian.partialPivLu().solve(rhs);
        c.x_np1 += delta.head(n);
        c.v_np1 += delta.tail(n);
    }

    return {State(s_n.t + dt, std::move(c.x_np1), std::move(c.v_np1)), diag};
}

/// Implicit Newmark step (displacement form); the acceleration at t_n is
/// recovered from the equation of motion, so the stepper is stateless.
inline StepResult newmark_step(const SystemModel& model, const State& s_n, double dt,
                               double beta = 0.25, double gamma = 0.5,
                               const NewtonSettings& newton = {}) {
    const Matrix& m = model.mass_matrix();
    const Vector f_n = model.total_force(s_n.x);
    const Vector a_n = m.partialPivLu().solve(-f_n);

    Vector x = s_n.x + dt * s_n.v + 0.5 * dt * dt * a_n;
    const double inv_bdt2 = 1.0 / (beta * dt * dt);
    const double acc_coeff = 1.0 / (2.0 * beta) - 1.0;

    const double ref = f_n.norm() + (m * a_n).norm() + (m * s_n.v).norm() / dt;
    const double tol = newton.tol_rel * ref + newton.tol_abs;

    StepDiagnostics diag;
    Vector a(x.size());
    for (int it = 0; it <= newton.max_iter; ++it) {
        a = inv_bdt2 * (x - s_n.x - dt * s_n.v) - acc_coeff * a_n;
        const Vector r = m * a + model.total_force(x);
        diag.newton_iters = it;
        diag.residual_norm = r.norm();
        if (diag.residual_norm <= tol) {
            diag.converged = true;
            break;
        }
        if (it == newton.max_iter) break;
        Matrix jac = inv_bdt2 * m + model.linear_stiffness();
        if (model.has_nonlinear_force()) jac += model.nonlinear_tangent(x);
        x += jac.partialPivLu().solve(-r);
    }

    Vector v = s_n.v + dt * ((1.0 - gamma) * a_n + gamma * a);
    return {State(s_n.t + dt, std::move(x), std::move(v)), diag};
}

/**
 * One step of the piecewise-linear variational integrator.  The new
 * displacement solves m(x_np1 - x_n)/dt + int R1 f dt = m v_n (the discrete
 * Euler-Lagrange/boundary equation of the interval); the new velocity is the
 * post-step discrete Legendre momentum mapped back through the mass matrix.
 */
inline StepResult l1_step(const SystemModel& model, const State& s_n, double dt,
                          const IntegratorOptions& opts = {}) {
    const Matrix& m = model.mass_matrix();
    const int n = model.dof_count();
    const QuadratureRule quad = QuadratureRule::gauss_legendre(opts.quadrature_points);
    const LagrangeBasis basis(dt);
    const double jac_t = basis.jacobian();

    Vector x = s_n.x + dt * s_n.v;
    const Vector mv = m * s_n.v;
    const double ref = detail::momentum_scale(model, s_n, dt);
    const double tol = opts.newton.tol_rel * ref + opts.newton.tol_abs;

    StepDiagnostics diag;
    Vector f1(n), f2(n);
    Matrix kt(n, n);
    for (int it = 0; it <= opts.newton.max_iter; ++it) {
        f1.setZero();
        f2.setZero();
        kt.setZero();
        for (int g = 0; g < quad.size(); ++g) {
            const LagrangeValues s = basis.value(quad.points[g]);
            const double w = quad.weights[g] * jac_t;
            const Vector xt = s.r1 * s_n.x + s.r2 * x;
            const Vector f = model.total_force(xt);
            f1 += (w * s.r1) * f;
            f2 += (w * s.r2) * f;
            Matrix tangent = model.linear_stiffness();
            if (model.has_nonlinear_force()) tangent += model.nonlinear_tangent(xt);
            kt += (w * s.r1 * s.r2) * tangent;
        }
        const Vector r = m * (x - s_n.x) / dt + f1 - mv;
        diag.newton_iters = it;
        diag.residual_norm = r.norm();
        if (diag.residual_norm <= tol) {
            diag.converged = true;
            break;
        }
        if (it == opts.newton.max_iter) break;
        const Matrix jac = m / dt + kt;
        x += jac.partialPivLu().solve(-r);
    }

    Vector v = s_n.v;
    if (diag.converged) {
        const Vector p_plus = m * (x - s_n.x) / dt - f2;
        v = m.partialPivLu().solve(p_plus);
    }
    return {State(s_n.t + dt, std::move(x), std::move(v)), diag};
}

/// Dispatch a single step of any scheme.
inline StepResult step(Scheme scheme, const SystemModel& model, const State& s_n, double dt,
                       const IntegratorOptions& opts = {}) {
    if (scheme == Scheme::Newmark)
        return newmark_step(model, s_n, dt, opts.newmark_beta, opts.newmark_gamma, opts.newton);
    if (scheme == Scheme::L1) return l1_step(model, s_n, dt, opts);
    return hermite_step(scheme, model, s_n, dt, opts);
}

enum class RunStatus { Completed, NewtonDivergence, ElementInversion, EnergyUnstable };

inline const char* run_status_name(RunStatus s) {
    switch (s) {
        case RunStatus::Completed: return "completed";
        case RunStatus::NewtonDivergence: return "newton_divergence";
        case RunStatus::ElementInversion: return "element_inversion";
        case RunStatus::EnergyUnstable: return "energy_unstable";
    }
    return "?";
}

/// Time series of states with per-step energies and solver diagnostics.
/// Entry 0 is the initial state (with zeroed diagnostics).
struct Trajectory {
    std::vector<State> states;
    std::vector<EnergyBreakdown> energies;
    std::vector<StepDiagnostics> diagnostics;
    RunStatus status = RunStatus::Completed;
    std::string message;

    int step_count() const { return static_cast<int>(states.size()) - 1; }
    bool completed() const { return status == RunStatus::Completed; }

    double max_energy_error() const {
        if (energies.empty()) return 0.0;
        const double e0 = energies.front().total;
        double emax = 0.0;
        for (const auto& e : energies)
            emax = std::max(emax, std::abs(e.total - e0) / std::abs(e0));
        return emax;
    }
};

struct SimulateOptions {
    IntegratorOptions integrator;
    /// Abort (flagging the run unstable) when E exceeds this multiple of the
    /// initial energy; 0 disables the check.
    double energy_abort_factor = 0.0;
};

/// Run N sequential steps on the given grid.  On Newton divergence, element
/// inversion, or energy blow-up the partial trajectory is returned with the
/// corresponding status flag.
inline Trajectory simulate(Scheme scheme, const SystemModel& model, const State& s_0,
                           const TimeGrid& grid, const SimulateOptions& opts = {}) {
    Trajectory traj;
    traj.states.reserve(grid.steps + 1);
    traj.energies.reserve(grid.steps + 1);
    traj.diagnostics.reserve(grid.steps + 1);

    traj.states.push_back(s_0);
    traj.energies.push_back(total_energy(model, s_0));
    traj.diagnostics.push_back({});
    const double e0 = traj.energies.front().total;
    const double dt = grid.dt();

    for (int nstep = 0; nstep < grid.steps; ++nstep) {
        StepResult result;
        try {
            result = step(scheme, model, traj.states.back(), dt, opts.integrator);
        } catch (const ElementInversionError& err) {
            traj.status = RunStatus::ElementInversion;
            traj.message = err.what();
            return traj;
        }
        if (!result.diagnostics.converged) {
            traj.status = RunStatus::NewtonDivergence;
            traj.message = "Newton solver did not converge at step " + std::to_string(nstep + 1);
            return traj;
        }
        traj.states.push_back(std::move(result.state));
        traj.energies.push_back(total_energy(model, traj.states.back()));
        traj.diagnostics.push_back(result.diagnostics);
        if (opts.energy_abort_factor > 0.0 &&
            traj.energies.back().total > opts.energy_abort_factor * std::abs(e0)) {
            traj.status = RunStatus::EnergyUnstable;
            traj.message = "energy exceeded " + std::to_string(opts.energy_abort_factor) +
                           " x E0 at step " + std::to_string(nstep + 1);
            return traj;
        }
    }
    return traj;
}

}  // namespace c1dyn
