#pragma once

#include "galpha/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

namespace galpha {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using SparseMatrix = Eigen::SparseMatrix<Scalar>;

/// Time derivatives of the load vector, F^(m)(t) for m = 0 ... max_order.
template <typename Scalar = double>
struct Forcing {
    using Fn = std::function<Vector<Scalar>(int order, Scalar t)>;

    Fn eval;          // empty means F == 0 to every order
    int max_order = std::numeric_limits<int>::max();

    bool is_zero() const noexcept { return !eval; }
};

/// Uniform partition of (0, 1); interior nodes carry the unknowns.
template <typename Scalar = double>
struct UniformMesh1d {
    int elements = 0;

    Scalar h() const { return Scalar(1) / Scalar(elements); }
    /// Coordinate of interior dof i (zero-based), i.e. node i + 1.
    Scalar dof_coordinate(Eigen::Index i) const { return Scalar(i + 1) * h(); }
    Eigen::Index dofs() const { return elements - 1; }
};

/// M dU/dt + K U = F(t) with M SPD and K symmetric PSD.
template <typename Scalar = double>
struct SemiDiscreteSystem {
    SparseMatrix<Scalar> M;
    SparseMatrix<Scalar> K;
    Forcing<Scalar> forcing;
    std::optional<UniformMesh1d<Scalar>> mesh;

    Eigen::Index dofs() const { return M.rows(); }
    int forcing_max_order() const noexcept { return forcing.max_order; }

    /// Throws ConfigError if derivative `order` of the forcing is not provided.
    void require_forcing_order(int order) const {
        if (order > forcing.max_order) {
            throw ConfigError("forcing derivative of order " + std::to_string(order) +
                              " is required but the problem provides only up to m_max = " +
                              std::to_string(forcing.max_order));
        }
    }

    Vector<Scalar> load(int order, Scalar t) const {
        require_forcing_order(order);
        if (forcing.is_zero()) return Vector<Scalar>::Zero(dofs());
        return forcing.eval(order, t);
    }
};

/// One spatial degree of freedom: M = [1], K = [lambda], F == 0.
template <typename Scalar = double>
SemiDiscreteSystem<Scalar> scalar_mode(Scalar lambda) {
    if (!(lambda >= Scalar(0))) {
        throw RangeError("scalar mode: lambda must be non-negative");
    }
    SemiDiscreteSystem<Scalar> sys;
    sys.M.resize(1, 1);
    sys.K.resize(1, 1);
    sys.M.insert(0, 0) = Scalar(1);
    sys.K.insert(0, 0) = lambda;
    sys.M.makeCompressed();
    sys.K.makeCompressed();
    return sys;
}

/// Linear finite elements for u_t - kappa u_xx = f on (0, 1) with homogeneous
/// Dirichlet conditions. Unknowns are the elements - 1 interior nodal values.
template <typename Scalar = double>
SemiDiscreteSystem<Scalar> heat_fem_1d(int elements, Scalar kappa) {
    if (elements < 2) {
        throw ConfigError("heat_fem_1d: need at least 2 elements (got " + std::to_string(elements) + ")");
    }
    if (!(kappa > Scalar(0))) {
        throw RangeError("heat_fem_1d: kappa must be positive");
    }
    UniformMesh1d<Scalar> mesh{elements};
    const Scalar h = mesh.h();
    const Eigen::Index n = mesh.dofs();

    // Element matrices on [x_e, x_{e+1}] for local nodes (0, 1).
    const Scalar me[2][2] = {{Scalar(2) * h / Scalar(6), h / Scalar(6)},
                             {h / Scalar(6), Scalar(2) * h / Scalar(6)}};
    const Scalar ke[2][2] = {{kappa / h, -kappa / h}, {-kappa / h, kappa / h}};

    std::vector<Eigen::Triplet<Scalar>> mt, kt;
    mt.reserve(static_cast<std::size_t>(4 * elements));
    kt.reserve(static_cast<std::size_t>(4 * elements));
    for (int e = 0; e < elements; ++e) {
        // Global node g maps to dof g - 1; boundary nodes 0 and `elements` are dropped.
        const Eigen::Index dof[2] = {e - 1, e};
        for (int a = 0; a < 2; ++a) {
            if (dof[a] < 0 || dof[a] >= n) continue;
            for (int b = 0; b < 2; ++b) {
                if (dof[b] < 0 || dof[b] >= n) continue;
                mt.emplace_back(dof[a], dof[b], me[a][b]);
                kt.emplace_back(dof[a], dof[b], ke[a][b]);
            }
        }
    }
    SemiDiscreteSystem<Scalar> sys;
    sys.M.resize(n, n);
    sys.K.resize(n, n);
    sys.M.setFromTriplets(mt.begin(), mt.end());
    sys.K.setFromTriplets(kt.begin(), kt.end());
    sys.mesh = mesh;
    return sys;
}

/// Manufactured solution u(x, t) = sin(pi x) g(t) with g(t) = Re(sum_r a_r exp(s_r t)).
///
/// The induced source is f = sin(pi x) (g' + kappa pi^2 g), so every time derivative
/// of u and f is available in closed form.
template <typename Scalar = double>
struct ManufacturedCase {
    using Complex = std::complex<Scalar>;
    struct Mode {
        Complex amplitude;
        Complex rate;
    };

    std::string id;
    Scalar kappa = Scalar(1);
    std::vector<Mode> modes;
    int max_forcing_order = 6;

    static constexpr Scalar pi = std::numbers::pi_v<Scalar>;

    /// d^m g / dt^m
    Scalar time_profile(int m, Scalar t) const {
        Complex sum(0);
        for (const auto& mode : modes) sum += mode.amplitude * std::pow(mode.rate, m) * std::exp(mode.rate * t);
        return sum.real();
    }

    /// d^m / dt^m of the source's time factor g' + kappa pi^2 g.
    Scalar source_profile(int m, Scalar t) const {
        return time_profile(m + 1, t) + kappa * pi * pi * time_profile(m, t);
    }

    Scalar u(Scalar x, Scalar t) const { return std::sin(pi * x) * time_profile(0, t); }
    Scalar u_t(Scalar x, Scalar t) const { return std::sin(pi * x) * time_profile(1, t); }
    Scalar u_xx(Scalar x, Scalar t) const { return -pi * pi * std::sin(pi * x) * time_profile(0, t); }
    Scalar f(Scalar x, Scalar t) const { return std::sin(pi * x) * source_profile(0, t); }
    /// Dirichlet data; the cases vanish on the boundary.
    Scalar boundary_value(Scalar, Scalar) const { return Scalar(0); }
};

/// Known case ids: "sine-decay" (g = exp(-t)) and "sine-oscillating" (g = cos t).
template <typename Scalar = double>
ManufacturedCase<Scalar> manufactured_heat(const std::string& id, Scalar kappa = Scalar(1)) {
    using Complex = std::complex<Scalar>;
    if (!(kappa > Scalar(0))) {
        throw RangeError("manufactured_heat: kappa must be positive");
    }
    ManufacturedCase<Scalar> c;
    c.id = id;
    c.kappa = kappa;
    if (id == "sine-decay") {
        c.modes = {{Complex(1), Complex(-1)}};
    } else if (id == "sine-oscillating") {
        c.modes = {{Complex(1), Complex(0, 1)}};
    } else {
        throw ConfigError("unknown manufactured case '" + id +
                          "' (known: sine-decay, sine-oscillating)");
    }
    return c;
}

/// Exact load vector entries int_0^1 sin(pi x) phi_i(x) dx for hat functions phi_i.
template <typename Scalar>
Vector<Scalar> sine_load_profile(const UniformMesh1d<Scalar>& mesh) {
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar h = mesh.h();
    const Scalar w = Scalar(2) * (Scalar(1) - std::cos(pi * h)) / (pi * pi * h);
    Vector<Scalar> b(mesh.dofs());
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = w * std::sin(pi * mesh.dof_coordinate(i));
    return b;
}

/// FEM system for a manufactured case, with F^(m)(t) = b * d^m/dt^m (g' + kappa pi^2 g).
template <typename Scalar = double>
SemiDiscreteSystem<Scalar> manufactured_heat_system(int elements, const ManufacturedCase<Scalar>& mc) {
    auto sys = heat_fem_1d<Scalar>(elements, mc.kappa);
    Vector<Scalar> b = sine_load_profile(*sys.mesh);
    sys.forcing.max_order = mc.max_forcing_order;
    sys.forcing.eval = [b, mc](int order, Scalar t) -> Vector<Scalar> {
        return b * mc.source_profile(order, t);
    };
    return sys;
}

/// Nodal interpolant of the exact solution at time t.
template <typename Scalar>
Vector<Scalar> interpolate(const ManufacturedCase<Scalar>& mc, const UniformMesh1d<Scalar>& mesh, Scalar t) {
    Vector<Scalar> u(mesh.dofs());
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = mc.u(mesh.dof_coordinate(i), t);
    return u;
}

/// Mass-weighted error sqrt((U_h - u_I)^T M (U_h - u_I)) against the nodal interpolant.
template <typename Scalar>
Scalar l2_error(const SemiDiscreteSystem<Scalar>& sys,
                const std::type_identity_t<Vector<Scalar>>& U_h,
                const ManufacturedCase<Scalar>& mc, Scalar t) {
    if (!sys.mesh) throw ConfigError("l2_error: system has no mesh");
    if (U_h.size() != sys.dofs()) {
        throw ConfigError("l2_error: vector has " + std::to_string(U_h.size()) +
                          " entries, system has " + std::to_string(sys.dofs()));
    }
    const Vector<Scalar> e = U_h - interpolate(mc, *sys.mesh, t);
    return std::sqrt(std::max(Scalar(0), e.dot(sys.M * e)));
}

/// M-norm of a vector.
template <typename Scalar>
Scalar mass_norm(const SemiDiscreteSystem<Scalar>& sys, const Vector<Scalar>& v) {
    return std::sqrt(std::max(Scalar(0), v.dot(sys.M * v)));
}

template <typename Scalar>
bool is_spd(const SparseMatrix<Scalar>& A) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense(A);
    if (!dense.isApprox(dense.transpose())) return false;
    Eigen::LLT<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> llt(dense);
    return llt.info() == Eigen::Success;
}

template <typename Scalar>
bool is_psd(const SparseMatrix<Scalar>& A, Scalar tol = Scalar(1e-10)) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense(A);
    if (!dense.isApprox(dense.transpose())) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> es(dense, Eigen::EigenvaluesOnly);
    const Scalar scale = std::max(Scalar(1), es.eigenvalues().cwiseAbs().maxCoeff());
    return es.eigenvalues().minCoeff() >= -tol * scale;
}

/// Generalized eigenvalues lambda of K v = lambda M v, ascending.
template <typename Scalar>
Vector<Scalar> generalized_eigenvalues(const SemiDiscreteSystem<Scalar>& sys) {
    using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Eigen::GeneralizedSelfAdjointEigenSolver<Dense> es(Dense(sys.K), Dense(sys.M), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

/// Exact solution of the semi-discrete system of a manufactured case at time T,
/// starting from U0: modal decomposition of (K, M) plus the closed-form Duhamel
/// integral of each exponential forcing mode. Used as the time-exact reference
/// when isolating temporal error from spatial error.
template <typename Scalar>
Vector<Scalar> semidiscrete_solution(const SemiDiscreteSystem<Scalar>& sys, const ManufacturedCase<Scalar>& mc,
                                     const std::type_identity_t<Vector<Scalar>>& U0, Scalar T) {
    using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Complex = std::complex<Scalar>;
    if (!sys.mesh) throw ConfigError("semidiscrete_solution: system has no mesh");
    Eigen::GeneralizedSelfAdjointEigenSolver<Dense> es(Dense(sys.K), Dense(sys.M));
    const Dense& V = es.eigenvectors();  // V^T M V = I
    const Vector<Scalar>& lam = es.eigenvalues();
    const Vector<Scalar> b = sine_load_profile(*sys.mesh);
    const Vector<Scalar> c0 = V.transpose() * (sys.M * U0);
    const Vector<Scalar> beta = V.transpose() * b;
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;

    Vector<Scalar> c(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        const Scalar decay = std::exp(-lam[i] * T);
        Complex particular(0);
        for (const auto& mode : mc.modes) {
            // source factor of this mode: amplitude * (rate + kappa pi^2) * exp(rate t)
            const Complex a = mode.amplitude * (mode.rate + mc.kappa * pi * pi);
            const Complex z = mode.rate + lam[i];
            if (std::abs(z) * T < Scalar(1e-8)) {
                particular += a * T * decay;
            } else {
                particular += a * (std::exp(mode.rate * T) - decay) / z;
            }
        }
        c[i] = decay * c0[i] + beta[i] * particular.real();
    }
    return V * c;
}

} // namespace galpha
