#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace c1dyn {

struct HermiteValues {
    double r1, r2, h1, h2;
};

struct LagrangeValues {
    double r1, r2;
};

namespace detail {
inline void check_master(double tau) {
    if (tau < -1.0 || tau > 1.0)
        throw std::domain_error("shape function argument outside [-1, 1]");
}
}  // namespace detail

/**
 * Cubic Hermite basis on the master interval tau in [-1, 1].
 *
 * The slope functions H1, H2 carry the Jacobian J = dt/2 of the map onto
 * [t_n, t_n + dt], so the coefficients multiplying them are nodal velocities.
 * Time derivatives divide the master derivatives by J.
 */
class HermiteBasis {
public:
    explicit HermiteBasis(double dt) : jac_(0.5 * dt) {
        if (!(jac_ > 0.0)) throw std::invalid_argument("HermiteBasis: dt must be positive");
    }

    double jacobian() const { return jac_; }

    HermiteValues value(double tau) const {
        detail::check_master(tau);
        const double om = 1.0 - tau, op = 1.0 + tau;
        return {0.25 * (2.0 + tau) * om * om,
                0.25 * (2.0 - tau) * op * op,
                0.25 * jac_ * op * om * om,
                0.25 * jac_ * (tau - 1.0) * op * op};
    }

    HermiteValues time_derivative(double tau) const {
        detail::check_master(tau);
        const double om = 1.0 - tau, op = 1.0 + tau;
        return {-0.75 * om * op / jac_,
                0.75 * om * op / jac_,
                -0.25 * om * (1.0 + 3.0 * tau),
                0.25 * op * (3.0 * tau - 1.0)};
    }

    HermiteValues time_second_derivative(double tau) const {
        detail::check_master(tau);
        return {1.5 * tau / (jac_ * jac_),
                -1.5 * tau / (jac_ * jac_),
                0.5 * (3.0 * tau - 1.0) / jac_,
                0.5 * (3.0 * tau + 1.0) / jac_};
    }

private:
    double jac_;
};

/// Linear Lagrange basis on tau in [-1, 1].
class LagrangeBasis {
public:
    explicit LagrangeBasis(double dt) : jac_(0.5 * dt) {
        if (!(jac_ > 0.0)) throw std::invalid_argument("LagrangeBasis: dt must be positive");
    }

    double jacobian() const { return jac_; }

    LagrangeValues value(double tau) const {
        detail::check_master(tau);
        return {0.5 * (1.0 - tau), 0.5 * (1.0 + tau)};
    }

    LagrangeValues time_derivative(double tau) const {
        detail::check_master(tau);
        return {-0.5 / jac_, 0.5 / jac_};
    }

private:
    double jac_;
};

/// Gauss-Legendre rule on [-1, 1]; weights sum to 2, exact for degree 2n-1.
struct QuadratureRule {
    std::vector<double> points;
    std::vector<double> weights;

    int size() const { return static_cast<int>(points.size()); }

    static QuadratureRule gauss_legendre(int n);
};

inline QuadratureRule QuadratureRule::gauss_legendre(int n) {
    if (n < 1 || n > 16)
        throw std::invalid_argument("gauss_legendre: supported orders are 1..16");
    QuadratureRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Newton iteration on P_n, starting from the Chebyshev estimate.
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        rule.points[i] = -z;
        rule.points[n - 1 - i] = z;
        rule.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    if (n % 2 == 1) rule.points[n / 2] = 0.0;
    return rule;
}

}  // namespace c1dyn
