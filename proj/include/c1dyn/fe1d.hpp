#pragma once

#include "c1dyn/core.hpp"
#include "c1dyn/shapefn.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>

namespace c1dyn {

struct BarProperties {
    double length = 1.0;
    double area = 1.0;
    double density = 1.0;
    double youngs_modulus = 1.0;

    void validate() const {
        if (!(length > 0.0 && area > 0.0 && density > 0.0 && youngs_modulus > 0.0))
            throw std::invalid_argument("BarProperties: all parameters must be positive");
    }

    double wave_speed() const { return std::sqrt(youngs_modulus / density); }
    /// First natural frequency of the continuous free-free bar.
    double first_mode_frequency() const {
        return M_PI * std::sqrt(youngs_modulus / (density * length * length));
    }
    double first_mode_period() const { return 2.0 * M_PI / first_mode_frequency(); }
    /// Energy of the first mode at amplitude u0.
    double first_mode_energy(double u0) const {
        return youngs_modulus * area / (4.0 * length) * (M_PI * u0) * (M_PI * u0);
    }
};

enum class ElementKind { LinearLagrange, CubicHermite };
enum class MaterialKind { LinearElastic, NeoHooke };

/// Uniform mesh of the bar [0, L].  Hermite elements carry (value, slope)
/// pairs per node; slope DOFs interpolate dx/dX.
class BarMesh {
public:
    BarMesh(double length, int element_count, ElementKind kind)
        : length_(length), n_el_(element_count), kind_(kind) {
        if (!(length > 0.0)) throw std::invalid_argument("BarMesh: length must be positive");
        if (element_count < 1) throw std::invalid_argument("BarMesh: need at least one element");
    }

    double length() const { return length_; }
    int element_count() const { return n_el_; }
    ElementKind kind() const { return kind_; }
    int node_count() const { return n_el_ + 1; }
    int dofs_per_node() const { return kind_ == ElementKind::CubicHermite ? 2 : 1; }
    int dof_count() const { return node_count() * dofs_per_node(); }
    double element_length() const { return length_ / n_el_; }

    /// Mesh length scale entering the CFL number: the full element for
    /// linear interpolation, half of it for Hermite (two unknowns per node).
    double characteristic_length() const {
        return kind_ == ElementKind::CubicHermite ? 0.5 * element_length() : element_length();
    }

    double node_position(int node) const { return length_ * node / n_el_; }

    int element_dof(int element, int local) const {
        return dofs_per_node() * element + local;
    }

    /// Global index of the displacement-value DOF at a node.
    int value_dof(int node) const { return dofs_per_node() * node; }

    Vector reference_positions() const {
        Vector ref(dof_count());
        if (kind_ == ElementKind::LinearLagrange) {
            for (int i = 0; i < node_count(); ++i) ref[i] = node_position(i);
        } else {
            for (int i = 0; i < node_count(); ++i) {
                ref[2 * i] = node_position(i);
                ref[2 * i + 1] = 1.0;  // d x / d X of the undeformed bar
            }
        }
        return ref;
    }

private:
    double length_;
    int n_el_;
    ElementKind kind_;
};

namespace detail {

inline int spatial_quadrature_order(ElementKind kind) {
    return kind == ElementKind::CubicHermite ? 4 : 2;
}

/// Strain operator B = dN/dX at master point tau for one element.
inline void strain_operator(const BarMesh& mesh, double tau, std::array<double, 4>& b, int& n) {
    if (mesh.kind() == ElementKind::LinearLagrange) {
        const double le = mesh.element_length();
        b = {-1.0 / le, 1.0 / le, 0.0, 0.0};
        n = 2;
    } else {
        const HermiteBasis basis(mesh.element_length());
        const HermiteValues s = basis.time_derivative(tau);
        b = {s.r1, s.h1, s.r2, s.h2};
        n = 4;
    }
}

}  // namespace detail

/// Consistent mass matrix, assembled from the analytic elemental integrals
/// of rho0 A N^T N.
inline Matrix assemble_mass(const BarMesh& mesh, const BarProperties& props) {
    props.validate();
    const double le = mesh.element_length();
    const double c = props.density * props.area * le;
    Matrix m = Matrix::Zero(mesh.dof_count(), mesh.dof_count());
    if (mesh.kind() == ElementKind::LinearLagrange) {
        Eigen::Matrix2d me;
        me << 2, 1, 1, 2;
        me *= c / 6.0;
        for (int e = 0; e < mesh.element_count(); ++e)
            m.block<2, 2>(e, e) += me;
    } else {
        Eigen::Matrix4d me;
        me << 156, 22 * le, 54, -13 * le,
              22 * le, 4 * le * le, 13 * le, -3 * le * le,
              54, 13 * le, 156, -22 * le,
              -13 * le, -3 * le * le, -22 * le, 4 * le * le;
        me *= c / 420.0;
        for (int e = 0; e < mesh.element_count(); ++e)
            m.block<4, 4>(2 * e, 2 * e) += me;
    }
    return m;
}

/// Stiffness E A int B^T B dX of the linear-elastic bar; positive
/// semidefinite with the rigid translation as the single zero mode.
inline Matrix assemble_linear_stiffness(const BarMesh& mesh, const BarProperties& props) {
    props.validate();
    const QuadratureRule quad =
        QuadratureRule::gauss_legendre(detail::spatial_quadrature_order(mesh.kind()));
    const double jac = 0.5 * mesh.element_length();
    const double ea = props.youngs_modulus * props.area;
    Matrix k = Matrix::Zero(mesh.dof_count(), mesh.dof_count());
    std::array<double, 4> b{};
    int nloc = 0;
    for (int e = 0; e < mesh.element_count(); ++e) {
        for (int g = 0; g < quad.size(); ++g) {
            detail::strain_operator(mesh, quad.points[g], b, nloc);
            const double w = ea * quad.weights[g] * jac;
            for (int i = 0; i < nloc; ++i)
                for (int j = 0; j < nloc; ++j)
                    k(mesh.element_dof(e, i), mesh.element_dof(e, j)) += w * b[i] * b[j];
        }
    }
    return k;
}

struct ForceAndTangent {
    Vector force;
    Matrix tangent;
};

/// Internal force and tangent of the Neo-Hooke bar, first Piola stress
/// P = (E/2)(lambda - 1/lambda).  Throws ElementInversionError if the
/// stretch is non-positive at a quadrature point.
inline ForceAndTangent internal_force_neo_hooke(const BarMesh& mesh, const BarProperties& props,
                                                const Vector& x) {
    props.validate();
    if (x.size() != mesh.dof_count())
        throw std::invalid_argument("internal_force_neo_hooke: state dimension mismatch");
    const QuadratureRule quad =
        QuadratureRule::gauss_legendre(detail::spatial_quadrature_order(mesh.kind()));
    const double jac = 0.5 * mesh.element_length();
    const double e_half = 0.5 * props.youngs_modulus;
    ForceAndTangent out{Vector::Zero(x.size()), Matrix::Zero(x.size(), x.size())};
    std::array<double, 4> b{};
    int nloc = 0;
    for (int e = 0; e < mesh.element_count(); ++e) {
        for (int g = 0; g < quad.size(); ++g) {
            detail::strain_operator(mesh, quad.points[g], b, nloc);
            double lambda = 0.0;
            for (int i = 0; i < nloc; ++i) lambda += b[i] * x[mesh.element_dof(e, i)];
            if (!(lambda > 0.0)) throw ElementInversionError(e, lambda);
            const double w = props.area * quad.weights[g] * jac;
            const double piola = e_half * (lambda - 1.0 / lambda);
            const double dpiola = e_half * (1.0 + 1.0 / (lambda * lambda));
            for (int i = 0; i < nloc; ++i) {
                out.force[mesh.element_dof(e, i)] += w * b[i] * piola;
                for (int j = 0; j < nloc; ++j)
                    out.tangent(mesh.element_dof(e, i), mesh.element_dof(e, j)) +=
                        w * dpiola * b[i] * b[j];
            }
        }
    }
    return out;
}

/// Strain energy A int W(lambda) dX with W = (E/4)(lambda^2 - 1 - 2 ln lambda).
inline double neo_hooke_potential(const BarMesh& mesh, const BarProperties& props,
                                  const Vector& x) {
    const QuadratureRule quad =
        QuadratureRule::gauss_legendre(detail::spatial_quadrature_order(mesh.kind()));
    const double jac = 0.5 * mesh.element_length();
    double energy = 0.0;
    std::array<double, 4> b{};
    int nloc = 0;
    for (int e = 0; e < mesh.element_count(); ++e) {
        for (int g = 0; g < quad.size(); ++g) {
            detail::strain_operator(mesh, quad.points[g], b, nloc);
            double lambda = 0.0;
            for (int i = 0; i < nloc; ++i) lambda += b[i] * x[mesh.element_dof(e, i)];
            if (!(lambda > 0.0)) throw ElementInversionError(e, lambda);
            energy += props.area * quad.weights[g] * jac * 0.25 * props.youngs_modulus *
                      (lambda * lambda - 1.0 - 2.0 * std::log(lambda));
        }
    }
    return energy;
}

/// First-mode solution of the free-free bar,
/// u(X, t) = u0 cos(pi X / L) cos(w_an t).
inline PointSolution analytic_first_mode(const BarProperties& props, double u0, double t,
                                         double X) {
    const double w = props.first_mode_frequency();
    const double shape = std::cos(M_PI * X / props.length);
    return {u0 * shape * std::cos(w * t), -u0 * shape * w * std::sin(w * t)};
}

/// Frequency of the (mode_index)-th elastic eigenmode of the discrete
/// free-free bar (the rigid-body mode is skipped).  Linear elasticity only.
inline double discrete_mode_frequency(const BarMesh& mesh, const BarProperties& props,
                                      int mode_index = 0) {
    const Matrix k = assemble_linear_stiffness(mesh, props);
    const Matrix m = assemble_mass(mesh, props);
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(k, m);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("discrete_mode_frequency: eigensolver failed");
    const int idx = mode_index + 1;  // index 0 is the rigid translation
    if (idx >= mesh.dof_count())
        throw std::invalid_argument("discrete_mode_frequency: mode index out of range");
    const double mu = solver.eigenvalues()[idx];
    const Vector phi = solver.eigenvectors().col(idx);
    const Vector kphi = k * phi;
    const double residual = (kphi - mu * (m * phi)).norm();
    if (residual > 1e-10 * kphi.norm())
        throw std::runtime_error("discrete_mode_frequency: eigenpair residual too large");
    return std::sqrt(mu);
}

/**
 * Spatially discretized bar as a dynamical system.  Linear elasticity puts
 * the whole internal force into the stiffness matrix; the Neo-Hooke law uses
 * the fully nonlinear split (zero stiffness matrix).
 */
class BarModel : public SystemModel {
public:
    BarModel(BarMesh mesh, BarProperties props, MaterialKind material)
        : mesh_(std::move(mesh)), props_(props), material_(material) {
        props_.validate();
        mass_ = assemble_mass(mesh_, props_);
        if (material_ == MaterialKind::LinearElastic)
            stiffness_ = assemble_linear_stiffness(mesh_, props_);
        else
            stiffness_ = Matrix::Zero(mesh_.dof_count(), mesh_.dof_count());
        ref_ = mesh_.reference_positions();
    }

    const BarMesh& mesh() const { return mesh_; }
    const BarProperties& properties() const { return props_; }
    MaterialKind material() const { return material_; }

    const Matrix& mass_matrix() const override { return mass_; }
    const Matrix& linear_stiffness() const override { return stiffness_; }
    const Vector& reference_positions() const override { return ref_; }

    bool has_nonlinear_force() const override { return material_ == MaterialKind::NeoHooke; }

    Vector nonlinear_force(const Vector& x) const override {
        if (material_ != MaterialKind::NeoHooke) return Vector::Zero(x.size());
        return internal_force_neo_hooke(mesh_, props_, x).force;
    }

    Matrix nonlinear_tangent(const Vector& x) const override {
        if (material_ != MaterialKind::NeoHooke) return Matrix::Zero(x.size(), x.size());
        return internal_force_neo_hooke(mesh_, props_, x).tangent;
    }

    double nonlinear_potential(const Vector& x) const override {
        if (material_ != MaterialKind::NeoHooke) return 0.0;
        return neo_hooke_potential(mesh_, props_, x);
    }

    /// Nodal state sampling the analytic first mode (Hermite slope DOFs are
    /// set from the analytic spatial derivative).
    State first_mode_state(double u0, double t = 0.0) const {
        const double w = props_.first_mode_frequency();
        const double pi_l = M_PI / props_.length;
        Vector x(mesh_.dof_count()), v(mesh_.dof_count());
        for (int i = 0; i < mesh_.node_count(); ++i) {
            const double X = mesh_.node_position(i);
            const PointSolution sol = analytic_first_mode(props_, u0, t, X);
            if (mesh_.kind() == ElementKind::LinearLagrange) {
                x[i] = X + sol.u;
                v[i] = sol.v;
            } else {
                const double du_dx = -u0 * pi_l * std::sin(pi_l * X) * std::cos(w * t);
                const double dv_dx = u0 * pi_l * std::sin(pi_l * X) * w * std::sin(w * t);
                x[2 * i] = X + sol.u;
                x[2 * i + 1] = 1.0 + du_dx;
                v[2 * i] = sol.v;
                v[2 * i + 1] = dv_dx;
            }
        }
        return State(t, std::move(x), std::move(v));
    }

private:
    BarMesh mesh_;
    BarProperties props_;
    MaterialKind material_;
    Matrix mass_, stiffness_;
    Vector ref_;
};

}  // namespace c1dyn
