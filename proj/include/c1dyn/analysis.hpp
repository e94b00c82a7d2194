#pragma once

#include "c1dyn/core.hpp"
#include "c1dyn/fe1d.hpp"
#include "c1dyn/integrators.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <vector>

namespace c1dyn {

/// 2x2 map advancing the oscillator state [v; w u] by one step of a Hermite
/// scheme at normalized step gamma = w dt.
struct AmplificationMatrix {
    Eigen::Matrix2d a;
    double gamma = 0.0;
    Scheme scheme = Scheme::P2;

    double det() const { return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0); }
    double trace() const { return a(0, 0) + a(1, 1); }
};

inline AmplificationMatrix amplification(Scheme scheme, double gamma) {
    if (gamma < 0.0) throw std::invalid_argument("amplification: gamma must be >= 0");
    if (!is_hermite_scheme(scheme))
        throw std::invalid_argument("amplification: closed form exists only for the Hermite schemes");
    const double g = gamma, g2 = g * g, g3 = g2 * g, g4 = g2 * g2, g5 = g4 * g;
    double den = 0.0;
    Eigen::Matrix2d m;
    switch (scheme) {
        case Scheme::P2:
            den = 8 * g4 + 132 * g2 + 2016;
            m << 26 * g4 - 876 * g2 + 2016, 204 * g3 - 2016 * g,
                 3 * g5 - 204 * g3 + 2016 * g, 26 * g4 - 876 * g2 + 2016;
            break;
        case Scheme::Q2:
            den = 2 * g4 + 18 * g2 + 420;
            m << 7 * g4 - 192 * g2 + 420, 45 * g3 - 420 * g,
                 g5 - 52 * g3 + 420 * g, 7 * g4 - 192 * g2 + 420;
            break;
        case Scheme::PpQm:
            den = 26 * g4 + 198 * g2 + 3780;
            m << 65 * g4 - 1692 * g2 + 3780, 390 * g3 - 3780 * g,
                 7 * g5 - 432 * g3 + 3780 * g, 46 * g4 - 1692 * g2 + 3780;
            break;
        case Scheme::PpQp:
            den = 10 * g4 + 24 * g2 + 630;
            m << 13 * g4 - 291 * g2 + 630, 60 * g3 - 630 * g,
                 g5 - 81 * g3 + 630 * g, 5 * g4 - 291 * g2 + 630;
            break;
        case Scheme::PmQm:
            den = g4 + 48 * g2 + 1260;
            m << 10 * g4 - 582 * g2 + 1260, 120 * g3 - 1260 * g,
                 2 * g5 - 162 * g3 + 1260 * g, 26 * g4 - 582 * g2 + 1260;
            break;
        case Scheme::PmQp:
            den = 10 * g4 + 198 * g2 + 3780;
            m << 46 * g4 - 1692 * g2 + 3780, 390 * g3 - 3780 * g,
                 7 * g5 - 432 * g3 + 3780 * g, 65 * g4 - 1692 * g2 + 3780;
            break;
        default:
            break;
    }
    return {m / den, gamma, scheme};
}

/// Largest eigenvalue magnitude of a 2x2 real matrix (closed form).
inline double spectral_radius(const Eigen::Matrix2d& a) {
    const double tr = a(0, 0) + a(1, 1);
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double disc = tr * tr - 4.0 * det;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        return std::max(std::abs(0.5 * (tr + s)), std::abs(0.5 * (tr - s)));
    }
    return std::sqrt(det);  // complex pair
}

inline double spectral_radius(const AmplificationMatrix& a) { return spectral_radius(a.a); }

/// Stable range [0, gamma_stab] of a scheme; `crossings` lists every point of
/// [0, gamma_max] where rho(A) - (1 + tol) changes sign, so re-stabilization
/// windows at larger steps remain visible.
struct StabilityResult {
    double gamma_stab = 0.0;
    bool unstable = false;  // no usable stable interval at all
    std::vector<double> crossings;
};

inline StabilityResult stability_threshold(Scheme scheme, double gamma_max = 12.0,
                                           double resolution = 1e-4) {
    const double limit = 1.0 + 1e-12;
    StabilityResult result;
    bool prev_stable = true;
    double first_cross = -1.0;
    const int n = static_cast<int>(gamma_max / resolution);
    for (int i = 1; i <= n; ++i) {
        const double g = i * resolution;
        const bool stable = spectral_radius(amplification(scheme, g)) <= limit;
        if (stable != prev_stable) {
            // bisect the bracketing grid interval
            double lo = (i - 1) * resolution, hi = g;
            for (int it = 0; it < 40; ++it) {
                const double mid = 0.5 * (lo + hi);
                const bool mid_stable = spectral_radius(amplification(scheme, mid)) <= limit;
                if (mid_stable == prev_stable) lo = mid; else hi = mid;
            }
            result.crossings.push_back(0.5 * (lo + hi));
            if (first_cross < 0.0) first_cross = result.crossings.back();
            prev_stable = stable;
        }
    }
    if (first_cross < 0.0) {
        result.gamma_stab = gamma_max;  // stable on the whole scanned range
    } else if (first_cross < 1e-2) {
        result.unstable = true;  // rho exceeds the limit for arbitrarily small steps
        result.gamma_stab = 0.0;
    } else {
        result.gamma_stab = first_cross;
    }
    return result;
}

struct SymplecticityReport {
    std::vector<double> gammas;
    std::vector<double> det_errors;  // |det A - 1|
    double max_error = 0.0;
};

inline SymplecticityReport symplecticity_check(Scheme scheme, const std::vector<double>& gammas) {
    SymplecticityReport report;
    report.gammas = gammas;
    report.det_errors.reserve(gammas.size());
    for (const double g : gammas) {
        const double err = std::abs(amplification(scheme, g).det() - 1.0);
        report.det_errors.push_back(err);
        report.max_error = std::max(report.max_error, err);
    }
    return report;
}

/// Reference solution sampled at the trajectory's value nodes; `energies`
/// optionally supplies a per-step reference total energy (otherwise errors
/// in the energy are measured against the initial energy).
struct ReferenceSolution {
    std::function<void(double t, Vector& u, Vector& v)> eval;
    std::vector<double> energies;
};

/// Relative errors at the discrete steps and nodes.  Aggregates are the max
/// over steps/nodes and the Frobenius-style norm normalized by
/// sqrt((N+1) * n_no).
struct ErrorSeries {
    std::vector<double> e_u, e_v, e_E;  // per step (max over nodes for u, v)
    double e_u_max = 0.0, e_v_max = 0.0, e_E_max = 0.0;
    double e_u_sigma = 0.0, e_v_sigma = 0.0, e_E_sigma = 0.0;
};

/**
 * Errors of a trajectory against a reference solution.  `value_dofs` selects
 * the displacement-value DOFs (for Hermite meshes the slope DOFs do not enter
 * the norms); `reference_x` supplies the matching reference positions so that
 * displacements are u = x - X.  u errors are normalized by |u0|, v errors by
 * |omega u0|, energy errors by E0.
 */
inline ErrorSeries error_norms(const Trajectory& traj, const ReferenceSolution& ref, double u0,
                               double omega, const std::vector<int>& value_dofs,
                               const Vector& reference_x) {
    ErrorSeries s;
    const int n_steps = static_cast<int>(traj.states.size());
    const int n_no = static_cast<int>(value_dofs.size());
    if (n_steps == 0 || n_no == 0) return s;
    const double e0 = traj.energies.front().total;

    Vector u_ref(n_no), v_ref(n_no);
    double sum_u = 0.0, sum_v = 0.0, sum_e = 0.0;
    for (int i = 0; i < n_steps; ++i) {
        const State& st = traj.states[i];
        ref.eval(st.t, u_ref, v_ref);
        double step_u = 0.0, step_v = 0.0;
        for (int j = 0; j < n_no; ++j) {
            const int d = value_dofs[j];
            const double eu = std::abs((st.x[d] - reference_x[d]) - u_ref[j]) / std::abs(u0);
            const double ev = std::abs(st.v[d] - v_ref[j]) / std::abs(omega * u0);
            step_u = std::max(step_u, eu);
            step_v = std::max(step_v, ev);
            sum_u += eu * eu;
            sum_v += ev * ev;
        }
        const double e_target = ref.energies.empty() ? e0 : ref.energies[i];
        const double ee = std::abs(traj.energies[i].total - e_target) / std::abs(e0);
        s.e_u.push_back(step_u);
        s.e_v.push_back(step_v);
        s.e_E.push_back(ee);
        s.e_u_max = std::max(s.e_u_max, step_u);
        s.e_v_max = std::max(s.e_v_max, step_v);
        s.e_E_max = std::max(s.e_E_max, ee);
        sum_e += ee * ee;
    }
    const double denom = static_cast<double>(n_steps) * n_no;
    s.e_u_sigma = std::sqrt(sum_u / denom);
    s.e_v_sigma = std::sqrt(sum_v / denom);
    s.e_E_sigma = std::sqrt(sum_e / n_steps);
    return s;
}

/// Least-squares slope of log(error) vs log(dt).  Points below `floor`
/// (machine-precision saturation) are excluded; fewer than two usable points
/// yield no estimate.
inline std::optional<double> convergence_order(const std::vector<double>& errors,
                                               const std::vector<double>& dts,
                                               double floor = 0.0) {
    if (errors.size() != dts.size())
        throw std::invalid_argument("convergence_order: series length mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!(errors[i] > floor) || !std::isfinite(errors[i])) continue;
        lx.push_back(std::log(dts[i]));
        ly.push_back(std::log(errors[i]));
    }
    const std::size_t n = lx.size();
    if (n < 2) return std::nullopt;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Error floor for convergence fits: a multiple of machine epsilon times the
/// number of steps, mirroring the saturation line of long accumulations.
inline double convergence_floor(int n_steps) {
    return 100.0 * std::numeric_limits<double>::epsilon() * n_steps;
}

inline double cfl_number(const BarProperties& props, double dt, double characteristic_length) {
    return props.wave_speed() * dt / characteristic_length;
}

struct CflEstimateOptions {
    double bracket_lo = 0.5;   // must be stable
    double bracket_hi = 1.05;  // must be unstable
    double tolerance = 0.004;
    double horizon_oscillations = 200.0;
    double u0 = 0.1;
    double energy_growth_factor = 2.0;
};

/// True if the first-mode vibration blows up (E > factor * E0) within the
/// horizon at the given CFL number.
inline bool cfl_run_unstable(Scheme scheme, const BarModel& model, double cfl,
                             const CflEstimateOptions& opts = {}) {
    const BarProperties& props = model.properties();
    const double dt = cfl * model.mesh().characteristic_length() / props.wave_speed();
    const double horizon = opts.horizon_oscillations * props.first_mode_period();
    const int steps = static_cast<int>(std::ceil(horizon / dt));
    SimulateOptions sim;
    sim.energy_abort_factor = opts.energy_growth_factor;
    sim.integrator.quadrature_points = 2;  // linear model: k-part is analytic anyway
    const Trajectory traj =
        simulate(scheme, model, model.first_mode_state(opts.u0), TimeGrid(0.0, steps * dt, steps), sim);
    return !traj.completed();
}

/**
 * Empirical maximum stable CFL number by bisection on [bracket_lo,
 * bracket_hi].  The bracket endpoints are verified (the stability region of
 * the Hermite schemes is not a single interval, so the bracket choice is
 * part of the experiment definition).
 */
inline double max_stable_cfl(Scheme scheme, const BarModel& model,
                             const CflEstimateOptions& opts = {}) {
    double lo = opts.bracket_lo, hi = opts.bracket_hi;
    if (cfl_run_unstable(scheme, model, lo, opts))
        throw std::runtime_error("max_stable_cfl: lower bracket is already unstable");
    if (!cfl_run_unstable(scheme, model, hi, opts))
        throw std::runtime_error("max_stable_cfl: upper bracket is still stable");
    while (hi - lo > opts.tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (cfl_run_unstable(scheme, model, mid, opts)) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace c1dyn
