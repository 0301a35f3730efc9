#pragma once

#include "galpha/errors.hpp"
#include "galpha/params.hpp"
#include "galpha/spectral.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

namespace galpha {

/// s_l = tr(G^l), l = 1 ... l_max (stored zero-based: s[l-1]).
template <typename T>
struct PowerSums {
    std::vector<T> s;

    const T& operator()(int l) const { return s.at(static_cast<std::size_t>(l - 1)); }
};

template <typename Derived>
PowerSums<typename Derived::Scalar> power_sums(const Eigen::MatrixBase<Derived>& G, int l_max) {
    using T = typename Derived::Scalar;
    if (l_max < 1) throw ConfigError("power_sums: l_max must be at least 1");
    if (G.rows() != G.cols()) throw ConfigError("power_sums: matrix must be square");
    PowerSums<T> out;
    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> P = G;
    out.s.push_back(P.trace());
    for (int l = 2; l <= l_max; ++l) {
        P = P * G;
        out.s.push_back(P.trace());
    }
    return out;
}

/// Complete exponential Bell polynomial B_l(x_1, ..., x_l) with l = x.size(); B_0 = 1.
///
/// Evaluates the determinant of the upper Hessenberg matrix
///   H(r, c) = x_{c-r+1} / (c-r)!   for c >= r,
///   H(r+1, r) = -(r+1),
/// by the exact Hessenberg expansion (no pivoting, no division beyond the 1/m! entries),
/// so rational inputs give exact results.
template <typename T>
T bell_complete(std::span<const T> x) {
    const int l = static_cast<int>(x.size());
    if (l == 0) return T(1);

    auto entry = [&](int r, int c) -> T {
        // c >= r
        T v = x[static_cast<std::size_t>(c - r)];
        for (int m = 2; m <= c - r; ++m) v = v / T(m);
        return v;
    };
    // det_[m] = determinant of the leading m x m block.
    std::vector<T> det(static_cast<std::size_t>(l) + 1, T(0));
    det[0] = T(1);
    for (int m = 1; m <= l; ++m) {
        T acc(0);
        T sub_product(1);  // prod_{r=i}^{m-2} H(r+1, r), built from i = m-1 downward
        for (int i = m - 1; i >= 0; --i) {
            if (i < m - 1) sub_product = sub_product * T(-(i + 1));
            T term = entry(i, m - 1) * sub_product * det[static_cast<std::size_t>(i)];
            if ((m - 1 - i) % 2 == 1) term = -term;
            acc = acc + term;
        }
        det[static_cast<std::size_t>(m)] = acc;
    }
    return det[static_cast<std::size_t>(l)];
}

template <typename T>
T bell_complete(const std::vector<T>& x) {
    return bell_complete(std::span<const T>(x.data(), x.size()));
}

/// p(x) = x^n + c_{n-1} x^{n-1} + ... + c_0 = det(x I - G); c stored as c[0] ... c[n-1].
template <typename T>
struct CharPolyCoeffs {
    int n = 0;
    std::vector<T> c;

    /// Coefficients with the leading 1 appended: index i multiplies x^i.
    std::vector<T> monic() const {
        auto out = c;
        out.push_back(T(1));
        return out;
    }
};

inline constexpr int kMaxCharPolyDimension = 12;

/// Characteristic polynomial coefficients from power sums via
/// c_{n-l} = (-1)^l / l! B_l(s_1, -s_2, 2! s_3, ..., (-1)^{l-1} (l-1)! s_l).
template <typename Derived>
CharPolyCoeffs<typename Derived::Scalar> charpoly_coeffs(const Eigen::MatrixBase<Derived>& G) {
    using T = typename Derived::Scalar;
    const int n = static_cast<int>(G.rows());
    if (G.rows() != G.cols()) throw ConfigError("charpoly_coeffs: matrix must be square");
    if (n < 1 || n > kMaxCharPolyDimension) {
        throw ConfigError("charpoly_coeffs: unsupported dimension " + std::to_string(n) + " (supported 1.." +
                          std::to_string(kMaxCharPolyDimension) + ")");
    }
    const auto s = power_sums(G, n);
    std::vector<T> x;
    x.reserve(static_cast<std::size_t>(n));
    CharPolyCoeffs<T> out;
    out.n = n;
    out.c.assign(static_cast<std::size_t>(n), T(0));
    T fact_lm1(1);  // (l-1)!
    T fact_l(1);    // l!
    for (int l = 1; l <= n; ++l) {
        if (l > 1) fact_lm1 = fact_lm1 * T(l - 1);
        fact_l = fact_l * T(l);
        T xl = fact_lm1 * s(l);
        if (l % 2 == 0) xl = -xl;
        x.push_back(xl);
        T cl = bell_complete(std::span<const T>(x.data(), x.size())) / fact_l;
        if (l % 2 == 1) cl = -cl;
        out.c[static_cast<std::size_t>(n - l)] = cl;
    }
    return out;
}

/// p(G) by Horner's rule; the zero matrix up to rounding by Cayley-Hamilton.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> evaluate_charpoly(
    const CharPolyCoeffs<typename Derived::Scalar>& p, const Eigen::MatrixBase<Derived>& G) {
    using M = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const auto n = G.rows();
    M acc = M::Identity(n, n);
    for (int i = p.n - 1; i >= 0; --i) {
        acc = acc * G + p.c[static_cast<std::size_t>(i)] * M::Identity(n, n);
    }
    return acc;
}

/// Residual of the (2k+1)-term recurrence U^{n+1} + c_{2k-1} U^n + ... + c_0 U^{n-2k+1} = 0
/// implied by Cayley-Hamilton for G(tau lambda), evaluated on samples of the exact
/// solution exp(-lambda t) at t = 0, tau, ..., 2k tau.
template <typename Scalar>
Scalar recurrence_residual(const MethodParams<Scalar>& p, Scalar lambda, Scalar tau) {
    const auto G = amplification_matrix(p, std::complex<Scalar>(tau * lambda));
    const auto cp = charpoly_coeffs(G.dense);
    const auto coeffs = cp.monic();
    std::complex<Scalar> sum(0);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        sum += coeffs[i] * std::exp(-lambda * tau * Scalar(static_cast<long>(i)));
    }
    return sum.real();
}

template <typename Scalar = double>
struct OrderCondition {
    int stage;            // one-based
    std::string label;
    Scalar residual;      // gamma_j - (alpha_j - 1/2) or gamma_k - (1/2 - alpha_f + alpha_k)
    bool pass;
};

template <typename Scalar = double>
struct OrderConditionReport {
    std::vector<OrderCondition<Scalar>> conditions;

    bool all_pass() const {
        for (const auto& c : conditions) {
            if (!c.pass) return false;
        }
        return true;
    }
};

/// Checks gamma_j = alpha_j - 1/2 (j < k) and gamma_k = 1/2 - alpha_f + alpha_k.
template <typename Scalar>
OrderConditionReport<Scalar> verify_order_conditions(const MethodParams<Scalar>& p, Scalar tol = Scalar(1e-12)) {
    OrderConditionReport<Scalar> report;
    const Scalar half = Scalar(1) / Scalar(2);
    for (int j = 0; j < p.k; ++j) {
        const bool last = (j == p.k - 1);
        const Scalar target = last ? half - p.alpha_f + p.alpha[j] : p.alpha[j] - half;
        const Scalar r = p.gamma[j] - target;
        const std::string label = last ? "gamma_" + std::to_string(j + 1) + " = 1/2 - alpha_f + alpha_" +
                                             std::to_string(j + 1)
                                       : "gamma_" + std::to_string(j + 1) + " = alpha_" + std::to_string(j + 1) +
                                             " - 1/2";
        report.conditions.push_back({j + 1, label, r, std::abs(r) <= tol});
    }
    return report;
}

} // namespace galpha
