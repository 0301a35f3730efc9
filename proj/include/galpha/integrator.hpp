#pragma once

#include "galpha/errors.hpp"
#include "galpha/params.hpp"
#include "galpha/problems.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace galpha {

/// Scaled derivative stack of a semi-discrete solution.
///
/// Column m of `blocks()` holds tau^m U^(m) for m = 0 ... 2k-1, so column 0 is U itself,
/// column 1 is tau V, column 2 is tau^2 A and so on. Stage j (one-based) owns the
/// (even, odd) column pair (2j-2, 2j-1).
template <typename Scalar = double>
class StateVector {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    StateVector() = default;
    StateVector(int k, Eigen::Index dofs, Scalar tau)
        : k_(k), tau_(tau), blocks_(Matrix::Zero(dofs, 2 * k)) {}

    int stages() const noexcept { return k_; }
    Eigen::Index dofs() const noexcept { return blocks_.rows(); }
    Scalar tau() const noexcept { return tau_; }

    Matrix& blocks() noexcept { return blocks_; }
    const Matrix& blocks() const noexcept { return blocks_; }

    /// tau^m U^(m)
    auto scaled(int m) { return blocks_.col(m); }
    auto scaled(int m) const { return blocks_.col(m); }

    /// U^(m), unscaled.
    Vector<Scalar> derivative(int m) const { return blocks_.col(m) / std::pow(tau_, m); }

    Vector<Scalar> solution() const { return blocks_.col(0); }

private:
    int k_ = 0;
    Scalar tau_ = Scalar(0);
    Matrix blocks_;
};

/// Factorizations of the stage matrices S_j for one (system, params, tau) tuple.
///
/// S_j = alpha_j M + gamma_j tau K for j < k and S_k = alpha_k M + alpha_f gamma_k tau K.
template <typename Scalar = double>
class StepWorkspace {
public:
    using Factor = Eigen::SimplicialLDLT<SparseMatrix<Scalar>>;

    bool matches(const SemiDiscreteSystem<Scalar>& sys, const MethodParams<Scalar>& params, Scalar tau) const {
        return system_ == &sys && params_ == params && tau_ == tau && !factors_.empty();
    }

    /// Refactorizes unless the workspace already matches the tuple.
    void prepare(const SemiDiscreteSystem<Scalar>& sys, const MethodParams<Scalar>& params, Scalar tau) {
        if (matches(sys, params, tau)) return;
        const auto report = validate_stability(params);
        if (!report.ok()) {
            std::string msg = "method parameters fail the stability bounds:";
            for (const auto& v : report.violations) msg += " [" + v + "]";
            throw ConfigError(msg);
        }
        if (!(tau > Scalar(0))) throw RangeError("time step tau must be positive");

        factors_.clear();
        for (int j = 0; j < params.k; ++j) {
            const bool last = (j == params.k - 1);
            const Scalar kcoef = (last ? params.alpha_f * params.gamma[j] : params.gamma[j]) * tau;
            SparseMatrix<Scalar> S = params.alpha[j] * sys.M + kcoef * sys.K;
            auto factor = std::make_unique<Factor>(S);
            if (factor->info() != Eigen::Success || (factor->vectorD().array() == Scalar(0)).any()) {
                throw LinearSolveError("stage matrix S_" + std::to_string(j + 1) + " is singular");
            }
            factors_.push_back(std::move(factor));
            ++factorizations_;
        }
        system_ = &sys;
        params_ = params;
        tau_ = tau;
    }

    const Factor& factor(int stage) const { return *factors_.at(static_cast<std::size_t>(stage)); }

    /// Total number of stage-matrix factorizations performed by this workspace.
    int factorizations() const noexcept { return factorizations_; }

    void invalidate() { factors_.clear(); system_ = nullptr; }

private:
    const SemiDiscreteSystem<Scalar>* system_ = nullptr;
    MethodParams<Scalar> params_;
    Scalar tau_ = Scalar(0);
    std::vector<std::unique_ptr<Factor>> factors_;
    int factorizations_ = 0;
};

/// Consistent initial data: U^(m)(t0) = M^{-1} (F^(m-1)(t0) - K U^(m-1)(t0)), m = 1 ... 2k-1.
template <typename Scalar>
StateVector<Scalar> init_state(const SemiDiscreteSystem<Scalar>& sys,
                               const std::type_identity_t<Vector<Scalar>>& U0, int k, Scalar tau,
                               Scalar t0 = Scalar(0)) {
    if (k < 1) throw ConfigError("init_state: stage count k must be at least 1");
    if (!(tau > Scalar(0))) throw RangeError("init_state: time step tau must be positive");
    if (U0.size() != sys.dofs()) {
        throw ConfigError("init_state: initial vector has " + std::to_string(U0.size()) +
                          " entries, system has " + std::to_string(sys.dofs()));
    }
    sys.require_forcing_order(2 * k - 2);

    Eigen::SimplicialLDLT<SparseMatrix<Scalar>> mass(sys.M);
    if (mass.info() != Eigen::Success || (mass.vectorD().array() == Scalar(0)).any()) {
        throw LinearSolveError("init_state: mass matrix is singular");
    }

    StateVector<Scalar> state(k, sys.dofs(), tau);
    Vector<Scalar> d = U0;
    state.scaled(0) = d;
    Scalar scale(1);
    for (int m = 1; m < 2 * k; ++m) {
        Vector<Scalar> rhs = -(sys.K * d);
        if (!sys.forcing.is_zero()) rhs += sys.load(m - 1, t0);
        d = mass.solve(rhs);
        scale *= tau;
        state.scaled(m) = scale * d;
    }
    return state;
}

namespace detail {

/// sum_{m >= 0} x_{first + m} / m!  over the available scaled columns (the scaled Taylor sum).
template <typename Scalar>
Vector<Scalar> taylor_sum(const StateVector<Scalar>& s, int first) {
    Vector<Scalar> out = s.scaled(first);
    Scalar inv_fact(1);
    for (int m = 1; first + m < 2 * s.stages(); ++m) {
        inv_fact /= Scalar(m);
        out += inv_fact * s.scaled(first + m);
    }
    return out;
}

} // namespace detail

/// Advances the state one step from t_n to t_n + tau.
///
/// Stage j < k solves S_j q_j = tau^(2j-1) F^(2j-2)(t_{n+1}) - M T_odd - tau K T_even for the
/// scaled correction q_j, where T_* are the Taylor sums of the stage's pair; then
/// U^(2j-2) <- T_even + gamma_j q_j and U^(2j-1) <- T_odd + q_j. The last stage solves for the
/// jump of U^(2k-1), evaluating the forcing at t_n + alpha_f tau. The stages only read time-n
/// data, so they are independent; they run from k down to 1.
template <typename Scalar>
StateVector<Scalar> step(const StateVector<Scalar>& state, const SemiDiscreteSystem<Scalar>& sys,
                         const MethodParams<Scalar>& params, Scalar t_n, StepWorkspace<Scalar>& ws) {
    const int k = params.k;
    if (state.stages() != k) {
        throw ConfigError("step: state has " + std::to_string(state.stages()) + " stages, params have " +
                          std::to_string(k));
    }
    if (state.dofs() != sys.dofs()) throw ConfigError("step: state and system sizes differ");
    sys.require_forcing_order(2 * k - 2);
    const Scalar tau = state.tau();
    ws.prepare(sys, params, tau);

    StateVector<Scalar> next(k, state.dofs(), tau);
    const bool forced = !sys.forcing.is_zero();

    {  // last stage: pair (2k-2, 2k-1)
        const int j = k - 1;
        const int e = 2 * k - 2, o = 2 * k - 1;
        Vector<Scalar> rhs = -(sys.M * state.scaled(o)) -
                             tau * (sys.K * (state.scaled(e) + params.alpha_f * state.scaled(o)));
        if (forced) rhs += std::pow(tau, o) * sys.load(e, t_n + params.alpha_f * tau);
        const Vector<Scalar> jump = ws.factor(j).solve(rhs);
        next.scaled(e) = state.scaled(e) + state.scaled(o) + params.gamma[j] * jump;
        next.scaled(o) = state.scaled(o) + jump;
    }
    for (int j = k - 2; j >= 0; --j) {
        const int e = 2 * j, o = 2 * j + 1;
        const Vector<Scalar> t_even = detail::taylor_sum(state, e);
        const Vector<Scalar> t_odd = detail::taylor_sum(state, o);
        Vector<Scalar> rhs = -(sys.M * t_odd) - tau * (sys.K * t_even);
        if (forced) rhs += std::pow(tau, o) * sys.load(e, t_n + tau);
        const Vector<Scalar> q = ws.factor(j).solve(rhs);
        next.scaled(e) = t_even + params.gamma[j] * q;
        next.scaled(o) = t_odd + q;
    }
    return next;
}

template <typename Scalar = double>
struct Trajectory {
    std::vector<Scalar> times;
    std::vector<StateVector<Scalar>> states;
    int factorizations = 0;

    const StateVector<Scalar>& final_state() const { return states.back(); }
};

/// Runs n_steps steps, calling `observe(n, t_n, state_n)` for n = 0 ... n_steps.
/// Returns the number of stage factorizations performed (k for a valid run).
template <typename Scalar>
int march(const SemiDiscreteSystem<Scalar>& sys, const std::type_identity_t<Vector<Scalar>>& U0,
          const MethodParams<Scalar>& params,
          Scalar tau, int n_steps, const std::function<void(int, Scalar, const StateVector<Scalar>&)>& observe,
          Scalar t0 = Scalar(0)) {
    if (n_steps < 0) throw ConfigError("integrate: n_steps must be non-negative");
    StepWorkspace<Scalar> ws;
    if (n_steps > 0) ws.prepare(sys, params, tau);
    StateVector<Scalar> state = init_state(sys, U0, params.k, tau, t0);
    observe(0, t0, state);
    for (int n = 0; n < n_steps; ++n) {
        const Scalar t_n = t0 + Scalar(n) * tau;
        state = step(state, sys, params, t_n, ws);
        observe(n + 1, t0 + Scalar(n + 1) * tau, state);
    }
    return ws.factorizations();
}

template <typename Scalar>
Trajectory<Scalar> integrate(const SemiDiscreteSystem<Scalar>& sys, const std::type_identity_t<Vector<Scalar>>& U0,
                             const MethodParams<Scalar>& params, Scalar tau, int n_steps, Scalar t0 = Scalar(0)) {
    Trajectory<Scalar> traj;
    traj.times.reserve(static_cast<std::size_t>(n_steps) + 1);
    traj.states.reserve(static_cast<std::size_t>(n_steps) + 1);
    traj.factorizations = march<Scalar>(
        sys, U0, params, tau, n_steps,
        [&](int, Scalar t, const StateVector<Scalar>& s) {
            traj.times.push_back(t);
            traj.states.push_back(s);
        },
        t0);
    return traj;
}

/// Final solution only, without storing the trajectory.
template <typename Scalar>
Vector<Scalar> solve_to(const SemiDiscreteSystem<Scalar>& sys, const std::type_identity_t<Vector<Scalar>>& U0,
                        const MethodParams<Scalar>& params, Scalar T, int n_steps) {
    if (n_steps < 1) throw ConfigError("solve_to: need at least one step");
    Vector<Scalar> out;
    march<Scalar>(sys, U0, params, T / Scalar(n_steps), n_steps,
                  [&](int n, Scalar, const StateVector<Scalar>& s) {
                      if (n == n_steps) out = s.solution();
                  });
    return out;
}

} // namespace galpha
