// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any criterion fails.

#include "galpha/galpha.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace galpha;
using C = std::complex<double>;
using LD = long double;
using Rational = boost::multiprecision::cpp_rational;
constexpr double pi = std::numbers::pi;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

MethodParams<double> random_params(std::mt19937_64& rng, int kmax = 4) {
    std::uniform_int_distribution<int> K(1, kmax);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> r(static_cast<std::size_t>(K(rng)));
    for (auto& v : r) v = U(rng);
    return params_from_rho(RhoSpectrum(r));
}

double multiset_distance(std::vector<C> a, std::vector<C> b) {
    if (a.size() != b.size()) return 1e300;
    double worst = 0.0;
    for (const C& x : a) {
        auto it = std::min_element(b.begin(), b.end(),
                                   [&](const C& u, const C& v) { return std::abs(u - x) < std::abs(v - x); });
        worst = std::max(worst, std::abs(*it - x));
        b.erase(it);
    }
    return worst;
}

// 1. Global order on u' = -u, u(0) = 1, T = 1.
Verdict temporal_order() {
    const std::array<double, 4> target = {2.0, 3.0, 5.0, 6.0}, tol = {0.1, 0.15, 0.3, 0.3};
    const auto sys = scalar_mode<LD>(1);
    const LD exact = std::exp(LD(-1));
    bool pass = true;
    std::ostringstream d;
    for (int k = 1; k <= 4; ++k) {
        const int n0 = k <= 2 ? 4 : 6, halvings = k <= 2 ? 5 : 4;
        std::vector<LD> taus, errs;
        for (int i = 0; i <= halvings; ++i) {
            const int n = n0 << i;
            const auto U = solve_to(sys, Vector<LD>::Ones(1), params_from_rho<LD>(k, 0.5), LD(1), n);
            taus.push_back(LD(1) / n);
            errs.push_back(std::abs(U(0) - exact));
        }
        const auto fit = fit_loglog(taus, errs, roundoff_floor(exact));
        const bool ok = std::abs(fit.slope - target[k - 1]) <= tol[k - 1];
        pass = pass && ok;
        d << (k > 1 ? ", " : "") << "k=" << k << " slope " << fmt("%.3f", fit.slope) << " (target "
          << target[k - 1] << "+-" << tol[k - 1] << (ok ? ")" : ", out of band)");
    }
    return {pass, d.str()};
}

// 2. Slope of the Cayley recurrence residual on exp(-t).
Verdict recurrence_slope() {
    const std::array<double, 3> target = {3.0, 4.0, 6.0}, tol = {0.2, 0.2, 0.3};
    bool pass = true;
    std::ostringstream d;
    for (int k = 1; k <= 3; ++k) {
        const auto p = params_from_rho<LD>(k, 0.5);
        std::vector<LD> taus, res;
        for (int i = 0; i < 16; ++i) {
            const LD tau = LD(0.1) * std::pow(LD(2), LD(-0.5) * i);
            taus.push_back(tau);
            res.push_back(std::abs(recurrence_residual(p, LD(1), tau)));
        }
        const auto fit = fit_loglog(taus, res, roundoff_floor(LD(10)));
        const bool ok = std::abs(fit.slope - target[k - 1]) <= tol[k - 1];
        pass = pass && ok;
        d << (k > 1 ? ", " : "") << "k=" << k << " slope " << fmt("%.3f", fit.slope) << " over " << fit.points
          << " points (target " << target[k - 1] << "+-" << tol[k - 1] << (ok ? ")" : ", out of band)");
    }
    return {pass, d.str()};
}

// 3. rho(G(1e8)) against rho_inf, uniform stages.
Verdict dissipation_control() {
    bool pass = true;
    std::ostringstream d;
    for (double rho : {0.0, 0.2, 0.5, 0.8, 1.0}) {
        double worst = 0;
        for (int k = 1; k <= 4; ++k) worst = std::max(worst, std::abs(spectral_radius(params_from_rho(k, rho), 1e8) - rho));
        const bool ok = worst <= 1e-5;
        pass = pass && ok;
        d << (rho > 0 ? ", " : "") << "rho_inf=" << rho << " max dev " << fmt("%.2e", worst) << (ok ? "" : " (> 1e-5)");
    }
    return {pass, d.str()};
}

// 4. A-stability on random right-half-plane samples.
Verdict a_stability() {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const auto p = random_params(rng);
        const double r = std::pow(10.0, -6.0 + 12.0 * U(rng));
        const double phi = pi * (U(rng) - 0.5);
        worst = std::max(worst, spectral_radius(p, std::polar(r, phi)));
    }
    return {worst <= 1 + 1e-9, "max rho(G) " + fmt("%.17g", worst) + " over 10000 samples (bound 1 + 1e-9)"};
}

// 5. L-stability at |theta| = 1e8.
Verdict l_stability() {
    double worst = 0;
    for (int k = 1; k <= 4; ++k) {
        const auto p = params_from_rho(k, 0.0);
        for (double deg : {-80.0, -40.0, 0.0, 40.0, 80.0}) {
            worst = std::max(worst, spectral_radius(p, std::polar(1e8, deg * pi / 180)));
        }
    }
    return {worst <= 1e-5, "max rho(G) " + fmt("%.3e", worst) + " over k<=4 and 5 rays (bound 1e-5; sqrt(0.5e-8) = " +
                               fmt("%.3e", std::sqrt(0.5e-8)) + ")"};
}

// 6. Stepper trajectory against G^n applied to the initial state, relative to the trajectory scale.
Verdict stepper_oracle() {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0, worst_pointwise = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = random_params(rng);
        const double theta = std::pow(10.0, -3.0 + 6.0 * U(rng));
        const auto sys = scalar_mode(theta);
        const auto G = amplification_matrix(p, theta).dense;
        auto state = init_state(sys, Eigen::VectorXd::Ones(1), p.k, 1.0);
        Eigen::VectorXcd x = state.blocks().row(0).transpose().cast<C>();
        double scale = x.cwiseAbs().maxCoeff(), deviation = 0;
        StepWorkspace<double> ws;
        for (int n = 1; n <= 10; ++n) {
            state = step(state, sys, p, double(n - 1), ws);
            x = G * x;
            const Eigen::VectorXcd got = state.blocks().row(0).transpose().cast<C>();
            const double err = (got - x).cwiseAbs().maxCoeff();
            scale = std::max(scale, x.cwiseAbs().maxCoeff());
            deviation = std::max(deviation, err);
            worst_pointwise = std::max(worst_pointwise, err / x.cwiseAbs().maxCoeff());
        }
        worst = std::max(worst, deviation / scale);
    }
    return {worst <= 1e-12, "max |x_n - G^n x_0| / max |G^n x_0| " + fmt("%.2e", worst) +
                                " over 50 tuples x 10 steps (per-step relative, informational: " +
                                fmt("%.2e", worst_pointwise) + ")"};
}

// 7. k = 1, rho_inf = 1 is the trapezoidal rule.
Verdict trapezoid() {
    const auto p = params_from_rho(1, 1.0);
    double worst = 0;
    for (double lambda : {0.1, 1.0, 10.0, 1e3}) {
        const double tau = 0.05;
        const auto sys = scalar_mode(lambda);
        const double ratio = (1 - lambda * tau / 2) / (1 + lambda * tau / 2);
        double expected = 1;
        march<double>(sys, Eigen::VectorXd::Ones(1), p, tau, 40, [&](int n, double, const StateVector<double>& s) {
            if (n == 0) return;
            expected *= ratio;
            worst = std::max(worst, std::abs(s.solution()(0) - expected));
        });
    }
    return {worst <= 1e-12, "max per-step deviation " + fmt("%.2e", worst) + " (lambda in {0.1, 1, 10, 1e3}, tau 0.05)"};
}

// 8. Cayley-Hamilton on random matrices and exact Bell closed forms.
Rational rpow(const Rational& x, int n) {
    Rational r(1);
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

Rational bell_closed_form(const std::vector<Rational>& x) {
    const auto p = [&](int i) -> const Rational& { return x[std::size_t(i - 1)]; };
    const Rational& x1 = x[0];
    switch (x.size()) {
    case 2: return x1 * x1 + p(2);
    case 3: return x1 * x1 * x1 + 3 * x1 * p(2) + p(3);
    case 4: return rpow(x1, 4) + 6 * x1 * x1 * p(2) + 4 * x1 * p(3) + 3 * p(2) * p(2) + p(4);
    case 5:
        return rpow(x1, 5) + 10 * rpow(x1, 3) * p(2) + 15 * x1 * p(2) * p(2) + 10 * x1 * x1 * p(3) + 10 * p(2) * p(3) +
               5 * x1 * p(4) + p(5);
    default:
        return rpow(x1, 6) + 15 * rpow(x1, 4) * p(2) + 20 * rpow(x1, 3) * p(3) + 45 * x1 * x1 * p(2) * p(2) +
               15 * rpow(p(2), 3) + 60 * x1 * p(2) * p(3) + 15 * x1 * x1 * p(4) + 10 * p(3) * p(3) + 15 * p(2) * p(4) +
               6 * x1 * p(5) + p(6);
    }
}

Verdict cayley_hamilton() {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> N(0.0, 1.0);
    std::uniform_int_distribution<int> dim(1, 8);
    double worst = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = dim(rng);
        Eigen::MatrixXcd G(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) G(i, j) = C(N(rng), N(rng));
        const double bound = 1e-9 * std::pow(1 + G.norm(), n);
        worst = std::max(worst, evaluate_charpoly(charpoly_coeffs(G), G).norm() / bound);
    }

    std::uniform_int_distribution<int> num(-20, 20), den(1, 9);
    int mismatches = 0;
    for (int trial = 0; trial < 100; ++trial) {
        for (int l = 2; l <= 6; ++l) {
            std::vector<Rational> x(static_cast<std::size_t>(l));
            for (auto& v : x) v = Rational(num(rng), den(rng));
            if (bell_complete(x) != bell_closed_form(x)) ++mismatches;
        }
    }
    return {worst <= 1 && mismatches == 0, "max ||p(G)|| / (1e-9 (1+||G||)^n) = " + fmt("%.2e", worst) +
                                               " over 200 matrices; Bell B2..B6 mismatches " +
                                               std::to_string(mismatches) + " of 500 exact rational trials"};
}

// 9. Dense spectrum against the union of the 2x2 block spectra.
Verdict block_spectrum() {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = random_params(rng);
        const C theta(std::pow(10.0, -1 + 3 * U(rng)), 10 * (2 * U(rng) - 1));
        Eigen::ComplexEigenSolver<ComplexMatrix<double>> es(amplification_matrix(p, theta).dense, false);
        const auto& ev = es.eigenvalues();
        worst = std::max(worst, multiset_distance({ev.data(), ev.data() + ev.size()}, eigenvalues(p, theta)));
    }
    return {worst <= 1e-10, "max eigenvalue distance " + fmt("%.2e", worst) + " over 100 tuples"};
}

// 10. Manufactured heat problem, k = 2, 256 elements.
Verdict heat_end_to_end() {
    const auto mc = manufactured_heat<double>("sine-decay");
    const auto sys = manufactured_heat_system(256, mc);
    const Eigen::VectorXd U0 = interpolate(mc, *sys.mesh, 0.0);
    const Eigen::VectorXd ref = semidiscrete_solution(sys, mc, U0, 1.0);
    const auto p = params_from_rho(2, 0.5);
    std::vector<double> taus, errs;
    for (int i = 0; i <= 5; ++i) {
        const int n = 4 << i;
        const Eigen::VectorXd U = solve_to(sys, U0, p, 1.0, n);
        taus.push_back(1.0 / n);
        errs.push_back(mass_norm(sys, Eigen::VectorXd(U - ref)));
    }
    const auto fit = fit_loglog(taus, errs, roundoff_floor(mass_norm(sys, ref)));
    const double spatial = l2_error(sys, ref, mc, 1.0);
    return {std::abs(fit.slope - 3.0) <= 0.2,
            "temporal slope " + fmt("%.3f", fit.slope) + " over " + std::to_string(fit.points) +
                " points (target 3.0+-0.2); finest temporal error " + fmt("%.2e", errs.back()) +
                "; spatial error floor (semi-discrete vs exact, L2) " + fmt("%.2e", spatial)};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"temporal order, scalar decay", temporal_order},
        {"Cayley recurrence residual slope", recurrence_slope},
        {"high-frequency dissipation control", dissipation_control},
        {"A-stability", a_stability},
        {"L-stability", l_stability},
        {"stepper matches G^n", stepper_oracle},
        {"trapezoidal reduction", trapezoid},
        {"Cayley-Hamilton and Bell closed forms", cayley_hamilton},
        {"block-spectrum factorization", block_spectrum},
        {"heat equation end-to-end", heat_end_to_end},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %zu: %s | %s [%.2f s]\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    v.detail.c_str(), secs);
        if (!v.pass) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
