#include "galpha/cayley.hpp"
#include "galpha/convergence.hpp"

#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <Eigen/Eigenvalues>

#include <random>

using namespace galpha;
using Rational = boost::multiprecision::cpp_rational;
using C = std::complex<double>;
using CMat = Eigen::MatrixXcd;

namespace {

Rational random_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-20, 20), den(1, 9);
    return Rational(num(rng), den(rng));
}

Rational binomial(int n, int r) {
    Rational b(1);
    for (int i = 1; i <= r; ++i) b = b * Rational(n - r + i) / Rational(i);
    return b;
}

// B_{n+1} = sum_i binom(n, i) x_{i+1} B_{n-i}: the partial-Bell-sum recurrence.
Rational bell_recurrence(const std::vector<Rational>& x) {
    std::vector<Rational> B(x.size() + 1);
    B[0] = 1;
    for (std::size_t n = 0; n < x.size(); ++n) {
        Rational acc(0);
        for (std::size_t i = 0; i <= n; ++i) acc += binomial(int(n), int(i)) * x[i] * B[n - i];
        B[n + 1] = acc;
    }
    return B.back();
}

Rational pow(const Rational& x, int n) {
    Rational r(1);
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

Rational closed_form(const std::vector<Rational>& x) {
    const auto& x1 = x[0];
    const auto p = [&](int i) -> const Rational& { return x[std::size_t(i - 1)]; };
    switch (x.size()) {
    case 2: return x1 * x1 + p(2);
    case 3: return x1 * x1 * x1 + 3 * x1 * p(2) + p(3);
    case 4: return pow(x1, 4) + 6 * x1 * x1 * p(2) + 4 * x1 * p(3) + 3 * p(2) * p(2) + p(4);
    case 5:
        return pow(x1, 5) + 10 * pow(x1, 3) * p(2) + 15 * x1 * p(2) * p(2) + 10 * x1 * x1 * p(3) + 10 * p(2) * p(3) +
               5 * x1 * p(4) + p(5);
    case 6:
        return pow(x1, 6) + 15 * pow(x1, 4) * p(2) + 20 * pow(x1, 3) * p(3) + 45 * x1 * x1 * p(2) * p(2) +
               15 * pow(p(2), 3) + 60 * x1 * p(2) * p(3) + 15 * x1 * x1 * p(4) + 10 * p(3) * p(3) + 15 * p(2) * p(4) +
               6 * x1 * p(5) + p(6);
    default: throw std::logic_error("no closed form");
    }
}

CMat random_complex(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> N(0.0, 1.0);
    CMat G(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = C(N(rng), N(rng));
    return G;
}

// Monic polynomial coefficients (index = power) of prod (x - r_i).
std::vector<C> poly_from_roots(const std::vector<C>& roots) {
    std::vector<C> p = {C(1)};
    for (const C& r : roots) {
        std::vector<C> q(p.size() + 1, C(0));
        for (std::size_t i = 0; i < p.size(); ++i) {
            q[i + 1] += p[i];
            q[i] -= r * p[i];
        }
        p = q;
    }
    return p;
}

} // namespace

TEST(PowerSums, Examples) {
    const auto I = power_sums(Eigen::Matrix3d::Identity(), 4);
    for (int l = 1; l <= 4; ++l) EXPECT_EQ(I(l), 3.0);
    const Eigen::Matrix2d D = Eigen::Vector2d(2, 3).asDiagonal();
    const auto s = power_sums(D, 3);
    EXPECT_EQ(s(1), 5.0);
    EXPECT_EQ(s(2), 13.0);
    EXPECT_EQ(s(3), 35.0);
    EXPECT_THROW(power_sums(D, 0), ConfigError);
}

TEST(Bell, SmallValues) {
    EXPECT_EQ(bell_complete(std::vector<double>{}), 1.0);
    EXPECT_EQ(bell_complete(std::vector<double>{1, 1}), 2.0);
    EXPECT_EQ(bell_complete(std::vector<double>{1, 1, 1, 1}), 15.0);
    EXPECT_EQ(bell_complete(std::vector<double>{1, 0, 0, 0, 0, 0}), 1.0);
    // Bell numbers 1, 2, 5, 15, 52, 203, 877, 4140
    const std::vector<Rational> bell = {1, 2, 5, 15, 52, 203, 877, 4140};
    for (std::size_t l = 1; l <= 8; ++l) EXPECT_EQ(bell_complete(std::vector<Rational>(l, Rational(1))), bell[l - 1]);
}

TEST(Bell, DeterminantMatchesClosedFormsExactly) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        for (std::size_t l = 2; l <= 6; ++l) {
            std::vector<Rational> x(l);
            for (auto& v : x) v = random_rational(rng);
            EXPECT_EQ(bell_complete(x), closed_form(x)) << "l = " << l;
        }
    }
}

TEST(Bell, DeterminantMatchesPartialBellSumsExactly) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        for (std::size_t l = 1; l <= 8; ++l) {
            std::vector<Rational> x(l);
            for (auto& v : x) v = random_rational(rng);
            EXPECT_EQ(bell_complete(x), bell_recurrence(x)) << "l = " << l;
        }
    }
}

TEST(CharPoly, Examples) {
    const Eigen::Matrix2d D = Eigen::Vector2d(2, 3).asDiagonal();
    const auto p = charpoly_coeffs(D);
    ASSERT_EQ(p.n, 2);
    EXPECT_NEAR(p.c[0], 6.0, 1e-14);
    EXPECT_NEAR(p.c[1], -5.0, 1e-14);

    for (int n = 1; n <= 8; ++n) {
        const auto q = charpoly_coeffs(Eigen::MatrixXd::Identity(n, n));
        for (int i = 0; i < n; ++i) {
            const double expected = ((n - i) % 2 ? -1.0 : 1.0) * binomial(n, i).convert_to<double>();
            EXPECT_NEAR(q.c[std::size_t(i)], expected, 1e-9 * std::abs(expected));
        }
    }
    EXPECT_THROW(charpoly_coeffs(Eigen::MatrixXd::Identity(13, 13)), ConfigError);
    EXPECT_THROW(charpoly_coeffs(Eigen::MatrixXd::Zero(2, 3)), ConfigError);
}

TEST(CharPoly, FourByFourPatternForTwoStages) {
    const auto params = params_from_rho(RhoSpectrum({0.8, 0.2}));
    for (C theta : {C(0.3), C(2.0, 1.0), C(40.0, -7.0)}) {
        const CMat G = amplification_matrix(params, theta).dense;
        const auto p = charpoly_coeffs(G);
        const C t1 = G.trace(), t2 = (G * G).trace(), t3 = (G * G * G).trace();
        EXPECT_LT(std::abs(p.c[3] + t1), 1e-12);
        EXPECT_LT(std::abs(p.c[2] - 0.5 * (t1 * t1 - t2)), 1e-12);
        EXPECT_LT(std::abs(p.c[1] + (t1 * t1 * t1 - 3.0 * t2 * t1 + 2.0 * t3) / 6.0), 1e-12);
        EXPECT_LT(std::abs(p.c[0] - G.determinant()), 1e-12);
    }
}

TEST(CharPoly, CayleyHamiltonOnRandomMatrices) {
    std::mt19937_64 rng(1234);
    const int sizes[] = {2, 3, 4, 6, 8};
    for (int trial = 0; trial < 200; ++trial) {
        const int n = sizes[trial % 5];
        const CMat G = random_complex(rng, n);
        const auto p = charpoly_coeffs(G);
        const double normG = G.cwiseAbs().colwise().sum().maxCoeff();
        const double residual = evaluate_charpoly(p, G).cwiseAbs().colwise().sum().maxCoeff();
        EXPECT_LE(residual, 1e-9 * std::pow(1 + normG, n));
    }
}

TEST(CharPoly, MatchesEigenvalueExpansion) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 7;
        const CMat G = random_complex(rng, n) / std::sqrt(double(n));
        Eigen::ComplexEigenSolver<CMat> es(G, false);
        const std::vector<C> roots(es.eigenvalues().data(), es.eigenvalues().data() + n);
        const auto expected = poly_from_roots(roots);
        const auto p = charpoly_coeffs(G);
        for (int i = 0; i < n; ++i) EXPECT_LT(std::abs(p.c[std::size_t(i)] - expected[std::size_t(i)]), 1e-8);
    }
}

TEST(CharPoly, NewtonIdentities) {
    std::mt19937_64 rng(8);
    for (int n : {2, 3, 5, 8}) {
        const CMat G = random_complex(rng, n) / std::sqrt(double(n));
        const auto p = charpoly_coeffs(G);
        const auto s = power_sums(G, n);
        for (int l = 1; l <= n; ++l) {
            C acc = s(l) + double(l) * p.c[std::size_t(n - l)];
            for (int i = 1; i < l; ++i) acc += p.c[std::size_t(n - i)] * s(l - i);
            EXPECT_LT(std::abs(acc), 1e-10) << "n = " << n << ", l = " << l;
        }
    }
}

TEST(Recurrence, EqualsProductOfBlockResiduals) {
    for (int k = 1; k <= 3; ++k) {
        const auto params = params_from_rho(k, 0.4);
        for (double tau : {0.5, 0.2, 0.05}) {
            const double lambda = 1.0;
            const C z = std::exp(-lambda * tau);
            C product(1);
            for (int j = 0; j < k; ++j) {
                const auto B = closed_form_block(params, j, C(tau * lambda));
                product *= z * z - B.trace() * z + B.determinant();
            }
            const double r = recurrence_residual(params, lambda, tau);
            EXPECT_NEAR(r, product.real(), 1e-12 * (1 + std::abs(product)));
        }
    }
}

TEST(Recurrence, SingleStageRichardsonRatio) {
    const auto params = params_from_rho<long double>(1, 0.5);
    for (long double tau : {1e-2L, 5e-3L, 2e-3L}) {
        const long double ratio = recurrence_residual(params, 1.0L, tau) / recurrence_residual(params, 1.0L, tau / 2);
        EXPECT_NEAR(double(ratio), 8.0, 0.4);
    }
}

TEST(Recurrence, SlopeIsThreePerStage) {
    // one tau^3 factor per block; last three points above the long double floor, sqrt(2) steps
    for (int k = 1; k <= 3; ++k) {
        const auto params = params_from_rho<long double>(k, 0.3);
        std::vector<long double> taus, res;
        for (int i = 0; i < 12; ++i) {
            const long double tau = 0.1L * std::pow(2.0L, -0.5L * i);
            const long double r = std::abs(recurrence_residual(params, 1.0L, tau));
            if (r < roundoff_floor(10.0L)) break;
            taus.push_back(tau);
            res.push_back(r);
        }
        ASSERT_GE(taus.size(), 4u) << "k = " << k;
        const std::size_t n = taus.size();
        const std::vector<long double> tail_t(taus.end() - 3, taus.end()), tail_r(res.end() - 3, res.end());
        EXPECT_NEAR(fit_loglog(tail_t, tail_r).slope, 3.0 * k, 0.1 * k) << "k = " << k << ", " << n << " points";
    }
}

TEST(OrderConditions, PassForParameterizedFamily) {
    for (int k = 1; k <= 5; ++k) {
        for (double rho : {0.0, 0.3, 1.0}) {
            const auto report = verify_order_conditions(params_from_rho(k, rho));
            ASSERT_EQ(report.conditions.size(), std::size_t(k));
            EXPECT_TRUE(report.all_pass());
            for (const auto& c : report.conditions) EXPECT_LT(std::abs(c.residual), 1e-15);
        }
    }
}

TEST(OrderConditions, PerturbationIsDetected) {
    auto params = params_from_rho(2, 0.5);
    params.gamma[0] += 1e-3;
    const auto report = verify_order_conditions(params);
    EXPECT_FALSE(report.all_pass());
    EXPECT_FALSE(report.conditions[0].pass);
    EXPECT_NEAR(report.conditions[0].residual, 1e-3, 1e-15);
    EXPECT_TRUE(report.conditions[1].pass);
}

TEST(OrderConditions, PerturbationDegradesPerturbedBlock) {
    // The perturbed block residual picks up an O(tau^2) term; below tau ~ delta its slope drops from 3 to 2.
    auto base = params_from_rho<long double>(2, 0.5);
    auto bad = base;
    bad.gamma[0] += 1e-3L;
    auto block_residual = [](const MethodParams<long double>& p, long double tau) {
        const std::complex<long double> z = std::exp(-tau);
        const auto B = closed_form_block(p, 0, std::complex<long double>(tau));
        return std::abs(z * z - B.trace() * z + B.determinant());
    };
    std::vector<double> taus, good_res, bad_res;
    for (int i = 0; i < 5; ++i) {
        const long double tau = 1e-4L / std::pow(2.0L, i);
        taus.push_back(double(tau));
        good_res.push_back(double(block_residual(base, tau)));
        bad_res.push_back(double(block_residual(bad, tau)));
    }
    EXPECT_NEAR(fit_loglog(taus, good_res, 0.0).slope, 3.0, 0.1);
    EXPECT_NEAR(fit_loglog(taus, bad_res, 0.0).slope, 2.0, 0.1);
}
