#include "cli/commands.hpp"

#include "galpha/galpha.hpp"

#include <cmath>
#include <cstdio>
#include <optional>

namespace galpha::cli {

namespace {

std::string fixed(double x, const char* fmt = "%.4g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, x);
    return buf;
}

/// Fitted slope, or empty when fewer than two points clear the roundoff floor.
CsvTable::Row& slope_cell(CsvTable::Row& row, const SlopeFit& fit) {
    return fit.points >= 2 ? row.real(fit.slope) : row.empty();
}

std::string describe(const SlopeFit& fit) {
    return fit.points >= 2 ? fixed(fit.slope) : "unavailable (fewer than 2 points above the roundoff floor)";
}

template <typename S>
MethodParams<S> params_for(const RunConfig& cfg, int k) {
    if (cfg.rho.size() == 1) return params_from_rho<S>(k, cfg.rho[0]);
    if (static_cast<int>(cfg.rho.size()) != k) {
        throw ConfigError("config key 'rho': has " + std::to_string(cfg.rho.size()) + " entries but k = " +
                          std::to_string(k));
    }
    return params_from_rho<S>(RhoSpectrum(cfg.rho));
}

template <typename S>
struct Problem {
    SemiDiscreteSystem<S> sys;
    std::optional<ManufacturedCase<S>> mc;
    Vector<S> U0;

    /// Exact (continuum) value at dof i and time t.
    S exact(const ProblemSpec& spec, Eigen::Index i, S t) const {
        if (mc) return mc->u(sys.mesh->dof_coordinate(i), t);
        return S(spec.u0) * std::exp(-S(spec.lambda) * t);
    }
};

template <typename S>
Problem<S> build_problem(const ProblemSpec& spec) {
    Problem<S> p;
    if (spec.type == "heat") {
        p.mc = manufactured_heat<S>(spec.manufactured, S(spec.kappa));
        p.sys = manufactured_heat_system<S>(spec.elements, *p.mc);
        p.U0 = interpolate(*p.mc, *p.sys.mesh, S(0));
    } else {
        p.sys = scalar_mode<S>(S(spec.lambda));
        p.U0 = Vector<S>::Constant(1, S(spec.u0));
    }
    if (spec.max_forcing_order) p.sys.forcing.max_order = std::min(p.sys.forcing.max_order, *spec.max_forcing_order);
    return p;
}

template <typename S>
void require_finite(const Vector<S>& v, const std::string& where) {
    if (!v.allFinite()) throw NumericalError(where + ": solution became non-finite");
}

/// Steps for a uniform grid of step tau on [0, T]; tau must divide T.
long long steps_for(double T, double tau, const std::string& key) {
    const long long n = std::llround(T / tau);
    if (n < 1 || std::abs(double(n) * tau - T) > 1e-9 * T) {
        throw ConfigError("config key '" + key + "': step " + format_real(tau) + " does not divide T = " +
                          format_real(T));
    }
    return n;
}

std::vector<double> sweep_taus(const Sweep& s) {
    std::vector<double> taus;
    for (int i = 0; i <= s.halvings; ++i) taus.push_back(s.tau0 / std::pow(2.0, i));
    return taus;
}

template <typename S>
CommandOutput converge_impl(const RunConfig& cfg) {
    const int k = cfg.stages();
    const auto params = params_for<S>(cfg, k);
    const auto prob = build_problem<S>(cfg.problem);
    const double T = cfg.final_time();
    const bool heat = prob.mc.has_value();
    const bool semidiscrete = heat && cfg.reference == "semidiscrete";

    std::optional<Vector<S>> reference;
    S ref_magnitude;
    if (semidiscrete) {
        reference = semidiscrete_solution(prob.sys, *prob.mc, prob.U0, S(T));
        ref_magnitude = mass_norm(prob.sys, *reference);
    } else if (heat) {
        ref_magnitude = mass_norm(prob.sys, interpolate(*prob.mc, *prob.sys.mesh, S(T)));
    } else {
        ref_magnitude = std::abs(prob.exact(cfg.problem, 0, S(T)));
    }

    CommandOutput out{CsvTable({"tau", "error", "observed_order"}), {}, {}};
    std::vector<double> taus = sweep_taus(cfg.sweep), errors;
    for (double tau : taus) {
        const long long n = steps_for(T, tau, "sweep.tau0");
        const Vector<S> U = solve_to(prob.sys, prob.U0, params, S(T), static_cast<int>(n));
        require_finite(U, "converge");
        S err;
        if (semidiscrete) err = mass_norm(prob.sys, Vector<S>(U - *reference));
        else if (heat) err = l2_error(prob.sys, U, *prob.mc, S(T));
        else err = std::abs(U(0) - prob.exact(cfg.problem, 0, S(T)));
        errors.push_back(static_cast<double>(err));
    }
    const auto orders = observed_orders(errors);
    for (std::size_t i = 0; i < taus.size(); ++i) {
        auto& row = out.table.add_row();
        row.real(taus[i]).real(errors[i]);
        if (i == 0) row.empty();
        else row.real(orders[i]);
    }
    const double floor = static_cast<double>(roundoff_floor(ref_magnitude));
    const auto fit = fit_loglog(taus, errors, floor);
    slope_cell(out.table.add_footer().text("fitted_slope"), fit).integer(fit.points);
    out.table.add_footer().text("theoretical_order").integer(theoretical_order(k)).empty();
    out.notes.push_back("k = " + std::to_string(k) + ": fitted slope " + describe(fit) + " over " +
                        std::to_string(fit.points) + " points (theoretical order " +
                        std::to_string(theoretical_order(k)) + ")");
    if (heat) {
        const Vector<S> semi = semidiscrete_solution(prob.sys, *prob.mc, prob.U0, S(T));
        const double spatial = static_cast<double>(l2_error(prob.sys, semi, *prob.mc, S(T)));
        out.table.add_footer().text("spatial_floor").real(spatial).empty();
        out.notes.push_back("spatial error floor (semi-discrete vs exact, L2): " + fixed(spatial) +
                            (semidiscrete ? "; temporal errors measured against the semi-discrete solution"
                                          : "; errors measured against the exact solution"));
    }
    out.figure = LinePlot{"Temporal convergence, k = " + std::to_string(k), "tau", "error", true, true,
                          {Series{"error", taus, errors}}};
    return out;
}

template <typename S>
CommandOutput order_check_impl(const RunConfig& cfg) {
    std::vector<int> ks = cfg.ks;
    if (ks.empty()) ks.push_back(cfg.stages());

    CommandOutput out{CsvTable({"k", "quantity", "tau", "value", "pass"}), {}, {}};
    LinePlot plot{"Cayley recurrence residual", "tau", "|residual|", true, true, {}};
    const long double lambda = cfg.recurrence_lambda;
    const auto rec_taus = sweep_taus(cfg.recurrence);
    const auto glob_taus = sweep_taus(cfg.global);
    const auto scalar = scalar_mode<S>(S(1));
    const Vector<S> U0 = Vector<S>::Ones(1);
    const S exact = std::exp(S(-1));

    for (int k : ks) {
        auto params = params_for<S>(cfg, k);
        auto params_ld = params_for<long double>(cfg, k);
        if (cfg.perturb_gamma && cfg.perturb_gamma->stage <= k) {
            const auto j = static_cast<std::size_t>(cfg.perturb_gamma->stage - 1);
            params.gamma[j] += S(cfg.perturb_gamma->delta);
            params_ld.gamma[j] += static_cast<long double>(cfg.perturb_gamma->delta);
        }
        const auto report = verify_order_conditions(params, S(1e-12));
        for (const auto& c : report.conditions) {
            out.table.add_row()
                .integer(k)
                .text("order_condition_" + std::to_string(c.stage))
                .empty()
                .real(c.residual)
                .integer(c.pass ? 1 : 0);
        }
        const auto stability = validate_stability(params);
        out.table.add_row().integer(k).text("stability_bounds").empty().empty().integer(stability.ok() ? 1 : 0);

        // recurrence residuals in long double
        std::vector<double> residuals;
        for (double tau : rec_taus) {
            const long double r = recurrence_residual(params_ld, lambda, static_cast<long double>(tau));
            residuals.push_back(static_cast<double>(std::abs(r)));
            out.table.add_row().integer(k).text("recurrence_residual").real(tau).real(static_cast<double>(r)).empty();
        }
        const double rec_floor = static_cast<double>(roundoff_floor(10.0L));
        const auto rec_fit = fit_loglog(rec_taus, residuals, rec_floor);
        slope_cell(out.table.add_row().integer(k).text("recurrence_slope").empty(), rec_fit).empty();

        std::vector<double> errors;
        if (stability.ok()) {
            for (double tau : glob_taus) {
                const long long n = steps_for(1.0, tau, "global_sweep.tau0");
                const Vector<S> U = solve_to(scalar, U0, params, S(1), static_cast<int>(n));
                require_finite(U, "order-check");
                const S err = std::abs(U(0) - exact);
                errors.push_back(static_cast<double>(err));
                out.table.add_row().integer(k).text("global_error").real(tau).real(err).empty();
            }
        }
        const auto glob_fit = fit_loglog(glob_taus, errors, static_cast<double>(roundoff_floor(exact)));
        slope_cell(out.table.add_row().integer(k).text("global_order").empty(), glob_fit).empty();
        out.table.add_row().integer(k).text("theoretical_order").empty().integer(theoretical_order(k)).empty();

        out.notes.push_back("k = " + std::to_string(k) + ": order conditions " +
                            (report.all_pass() ? "pass" : "FAIL") + ", recurrence slope " + describe(rec_fit) +
                            ", measured global order " + describe(glob_fit) + " (theoretical " +
                            std::to_string(theoretical_order(k)) + ")");
        plot.series.push_back(Series{"k = " + std::to_string(k), rec_taus, residuals});
    }
    out.figure = std::move(plot);
    return out;
}

template <typename S>
CommandOutput solve_impl(const RunConfig& cfg) {
    const int k = cfg.stages();
    const auto params = params_for<S>(cfg, k);
    const auto prob = build_problem<S>(cfg.problem);
    prob.sys.require_forcing_order(2 * k - 2);

    double tau = 0, T = 0;
    long long steps = 0;
    if (cfg.steps && cfg.T) {
        steps = *cfg.steps;
        T = *cfg.T;
        if (steps < 1) throw ConfigError("config key 'steps': must be at least 1 when 'T' is given");
        tau = T / double(steps);
        if (cfg.tau && std::abs(*cfg.tau - tau) > 1e-12 * tau) {
            throw ConfigError("config keys 'tau', 'steps' and 'T' are inconsistent");
        }
    } else if (cfg.tau && cfg.steps) {
        tau = *cfg.tau;
        steps = *cfg.steps;
        T = tau * double(steps);
    } else {
        tau = *cfg.tau;
        T = *cfg.T;
        steps = steps_for(T, tau, "tau");
    }

    std::vector<Eigen::Index> dofs;
    for (int d : cfg.dofs) {
        if (d < 0 || d >= prob.sys.dofs()) {
            throw ConfigError("config key 'dofs': index " + std::to_string(d) + " out of range [0, " +
                              std::to_string(prob.sys.dofs()) + ")");
        }
        dofs.push_back(d);
    }
    if (dofs.empty()) {
        for (Eigen::Index i = 0; i < prob.sys.dofs(); ++i) dofs.push_back(i);
    }

    const bool heat = prob.mc.has_value();
    CommandOutput out{CsvTable({"t", "dof", "x", "u", "u_exact", "error"}), {}, {}};
    Series numeric{"numerical", {}, {}}, exact{"exact", {}, {}};
    Vector<S> last;
    double max_error = 0;
    march<S>(prob.sys, prob.U0, params, S(tau), static_cast<int>(steps),
             [&](int n, S t, const StateVector<S>& state) {
                 const Vector<S> U = state.solution();
                 require_finite(U, "solve at step " + std::to_string(n));
                 if (n % cfg.every != 0 && n != steps) return;
                 for (Eigen::Index i : dofs) {
                     const S ue = prob.exact(cfg.problem, i, t);
                     auto& row = out.table.add_row();
                     row.real(t).integer(i);
                     if (heat) row.real(prob.sys.mesh->dof_coordinate(i));
                     else row.empty();
                     row.real(U(i)).real(ue).real(U(i) - ue);
                     max_error = std::max(max_error, static_cast<double>(std::abs(U(i) - ue)));
                 }
                 if (!heat) {
                     numeric.x.push_back(static_cast<double>(t));
                     numeric.y.push_back(static_cast<double>(U(0)));
                     exact.x.push_back(static_cast<double>(t));
                     exact.y.push_back(static_cast<double>(prob.exact(cfg.problem, 0, t)));
                 }
                 last = U;
             });
    if (heat) {
        for (Eigen::Index i = 0; i < prob.sys.dofs(); ++i) {
            const double x = static_cast<double>(prob.sys.mesh->dof_coordinate(i));
            numeric.x.push_back(x);
            numeric.y.push_back(static_cast<double>(last(i)));
            exact.x.push_back(x);
            exact.y.push_back(static_cast<double>(prob.exact(cfg.problem, i, S(T))));
        }
    }
    out.notes.push_back("solved " + std::to_string(steps) + " steps of tau = " + fixed(tau) + " to T = " +
                        fixed(T) + "; max |u - u_exact| over output rows " + fixed(max_error));
    out.figure = LinePlot{heat ? "Solution at T" : "Solution", heat ? "x" : "t", "u", false, false,
                          {numeric, exact}};
    return out;
}

} // namespace

CommandOutput cmd_spectrum(const RunConfig& cfg) {
    const auto params = params_for<double>(cfg, cfg.stages());
    const std::vector<double> grid =
        cfg.theta.empty() ? log_grid(cfg.theta_min, cfg.theta_max, cfg.theta_points) : cfg.theta;
    const auto rows = sweep_spectral_radius(params, grid);

    std::vector<std::string> header = {"theta", "rho_G"};
    for (int i = 1; i <= 2 * params.k; ++i) header.push_back("abs_lambda_" + std::to_string(i));
    CommandOutput out{CsvTable(header), {}, {}};

    LinePlot plot{"Spectral radius, k = " + std::to_string(params.k), "theta", "magnitude", true, false, {}};
    plot.series.push_back(Series{"rho(G)", {}, {}});
    for (int i = 1; i <= 2 * params.k; ++i) plot.series.push_back(Series{"|lambda_" + std::to_string(i) + "|", {}, {}});
    for (const auto& r : rows) {
        auto& row = out.table.add_row();
        row.real(r.theta).real(r.rho);
        plot.series[0].x.push_back(r.theta);
        plot.series[0].y.push_back(r.rho);
        for (std::size_t i = 0; i < r.abs_lambda.size(); ++i) {
            row.real(r.abs_lambda[i]);
            plot.series[i + 1].x.push_back(r.theta);
            plot.series[i + 1].y.push_back(r.abs_lambda[i]);
        }
    }
    out.notes.push_back("rho(G) from " + fixed(rows.front().rho, "%.6g") + " at theta = " +
                        fixed(rows.front().theta) + " to " + fixed(rows.back().rho, "%.6g") + " at theta = " +
                        fixed(rows.back().theta));
    out.figure = std::move(plot);
    return out;
}

CommandOutput cmd_stability_map(const RunConfig& cfg) {
    const auto params = params_for<double>(cfg, cfg.stages());
    const auto map = stability_region(params, cfg.re_range, cfg.im_range, cfg.resolution);

    CommandOutput out{CsvTable({"re", "im", "rho_G", "pole"}), {}, {}};
    Heatmap heat{"Spectral radius over complex theta, k = " + std::to_string(params.k),
                 "Re theta",
                 "Im theta",
                 map.nre,
                 map.nim,
                 cfg.re_range[0],
                 cfg.re_range[1],
                 cfg.im_range[0],
                 cfg.im_range[1],
                 1.0,
                 {}};
    for (const auto& n : map.nodes) {
        out.table.add_row().real(n.re).real(n.im).real(n.rho).integer(n.pole ? 1 : 0);
        heat.values.push_back(n.rho);
    }
    out.table.add_footer().text("max_rho_re_nonneg").real(map.max_rho_right_half).empty().empty();
    out.table.add_footer().text("a_stable").integer(map.a_stable() ? 1 : 0).empty().empty();
    out.table.add_footer().text("poles").integer(map.poles).empty().empty();
    out.notes.push_back("max rho(G) over nodes with Re theta >= 0: " + format_real(map.max_rho_right_half) +
                        (map.a_stable() ? " (A-stable on this grid)" : " (exceeds 1 + 1e-9)") +
                        "; pole nodes: " + std::to_string(map.poles));
    out.figure = std::move(heat);
    return out;
}

CommandOutput cmd_converge(const RunConfig& cfg) {
    return cfg.precision == "long-double" ? converge_impl<long double>(cfg) : converge_impl<double>(cfg);
}

CommandOutput cmd_order_check(const RunConfig& cfg) {
    return cfg.precision == "long-double" ? order_check_impl<long double>(cfg) : order_check_impl<double>(cfg);
}

CommandOutput cmd_solve(const RunConfig& cfg) {
    return cfg.precision == "long-double" ? solve_impl<long double>(cfg) : solve_impl<double>(cfg);
}

CommandOutput run_command(const RunConfig& cfg) {
    if (cfg.command == "spectrum") return cmd_spectrum(cfg);
    if (cfg.command == "stability-map") return cmd_stability_map(cfg);
    if (cfg.command == "converge") return cmd_converge(cfg);
    if (cfg.command == "order-check") return cmd_order_check(cfg);
    if (cfg.command == "solve") return cmd_solve(cfg);
    throw ConfigError("unknown command '" + cfg.command + "'");
}

} // namespace galpha::cli
