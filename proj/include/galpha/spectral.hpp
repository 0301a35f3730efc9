#pragma once

#include "galpha/errors.hpp"
#include "galpha/params.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

namespace galpha {

template <typename Scalar>
using Block2 = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

/// Amplification matrix G(theta) of a scalar mode, theta = tau * lambda.
///
/// `blocks` are the closed-form 2x2 diagonal blocks G_1 ... G_k; `dense` is the full 2k x 2k
/// matrix L^{-1} R assembled from the step equations, including the coupling blocks.
template <typename Scalar = double>
struct AmplificationMatrix {
    int k = 0;
    std::complex<Scalar> theta;
    std::vector<Block2<Scalar>> blocks;
    ComplexMatrix<Scalar> dense;

    /// Coupling block between stage rows i and stage columns j (zero-based, i < j).
    auto coupling(int i, int j) const { return dense.template block<2, 2>(2 * i, 2 * j); }
};

namespace detail {

template <typename Scalar>
std::complex<Scalar> stage_denominator(const MethodParams<Scalar>& p, int j, std::complex<Scalar> theta) {
    const bool last = (j == p.k - 1);
    const std::complex<Scalar> slope = last ? p.alpha_f * p.gamma[j] * theta : p.gamma[j] * theta;
    const std::complex<Scalar> den = p.alpha[j] + slope;
    const Scalar scale = std::abs(p.alpha[j]) + std::abs(slope);
    if (std::abs(den) <= Scalar(8) * std::numeric_limits<Scalar>::epsilon() * scale) {
        throw PoleError("amplification matrix pole: stage " + std::to_string(j + 1) +
                            " denominator vanishes at this theta",
                        j + 1);
    }
    return den;
}

} // namespace detail

/// Closed-form diagonal block of stage j (zero-based).
template <typename Scalar>
Block2<Scalar> closed_form_block(const MethodParams<Scalar>& p, int j, std::complex<Scalar> theta) {
    using C = std::complex<Scalar>;
    const C den = detail::stage_denominator(p, j, theta);
    const Scalar a = p.alpha[j], g = p.gamma[j], one(1);
    Block2<Scalar> b;
    if (j == p.k - 1) {
        const Scalar af = p.alpha_f;
        b << a + (af - one) * g * theta, C(a - g),
             -theta, a + af * (g - one) * theta - one;
    } else {
        b << C(a), C(a - g),
             -theta, a + (g - one) * theta - one;
    }
    return b / den;
}

/// Matrices of the single-dof step equations L x_{n+1} = R x_n (F == 0), with K = theta, M = 1
/// and the scaled state x = [U, tau U', ..., tau^{2k-1} U^{(2k-1)}].
template <typename Scalar>
std::pair<ComplexMatrix<Scalar>, ComplexMatrix<Scalar>> step_equation_matrices(const MethodParams<Scalar>& p,
                                                                                std::complex<Scalar> theta) {
    using C = std::complex<Scalar>;
    const int n = 2 * p.k;
    ComplexMatrix<Scalar> L = ComplexMatrix<Scalar>::Zero(n, n);
    ComplexMatrix<Scalar> R = ComplexMatrix<Scalar>::Zero(n, n);
    const Scalar one(1);

    // Row vector of the scaled Taylor sum starting at column `first`.
    auto taylor_row = [&](int first) {
        Eigen::Matrix<C, 1, Eigen::Dynamic> row = Eigen::Matrix<C, 1, Eigen::Dynamic>::Zero(n);
        Scalar inv_fact(1);
        for (int m = 0; first + m < n; ++m) {
            if (m > 0) inv_fact /= Scalar(m);
            row(first + m) = inv_fact;
        }
        return row;
    };

    for (int j = 0; j < p.k; ++j) {
        const int e = 2 * j, o = 2 * j + 1;
        const Scalar a = p.alpha[j], g = p.gamma[j];
        if (j < p.k - 1) {
            // even update:  x_e' - g x_o' = T_e - g T_o
            // stage eq.:    theta x_e' + a x_o' = (a - 1) T_o
            L(e, e) = one;
            L(e, o) = -g;
            L(o, e) = theta;
            L(o, o) = a;
            R.row(e) = taylor_row(e) - g * taylor_row(o);
            R.row(o) = (a - one) * taylor_row(o);
        } else {
            // even update:  x_e' - g x_o' = x_e + (1 - g) x_o
            // stage eq.:    af theta x_e' + a x_o' = -(1 - af) theta x_e + (a - 1) x_o
            const Scalar af = p.alpha_f;
            L(e, e) = one;
            L(e, o) = -g;
            L(o, e) = af * theta;
            L(o, o) = a;
            R(e, e) = one;
            R(e, o) = one - g;
            R(o, e) = -(one - af) * theta;
            R(o, o) = a - one;
        }
    }
    return {L, R};
}

template <typename Scalar>
AmplificationMatrix<Scalar> amplification_matrix(const MethodParams<Scalar>& p, std::complex<Scalar> theta) {
    AmplificationMatrix<Scalar> G;
    G.k = p.k;
    G.theta = theta;
    G.blocks.reserve(static_cast<std::size_t>(p.k));
    for (int j = 0; j < p.k; ++j) G.blocks.push_back(closed_form_block(p, j, theta));
    const auto [L, R] = step_equation_matrices(p, theta);
    G.dense = L.partialPivLu().solve(R);
    return G;
}

template <typename Scalar>
AmplificationMatrix<Scalar> amplification_matrix(const MethodParams<Scalar>& p, Scalar theta) {
    return amplification_matrix(p, std::complex<Scalar>(theta));
}

/// Roots of det(B - x I) = x^2 - tr x + det, ordered by ascending magnitude.
/// The discriminant is formed from (b00 - b11)^2 / 4 + b01 b10; the larger root is taken from the
/// cancellation-free branch and the smaller from det / larger.
template <typename Scalar>
std::array<std::complex<Scalar>, 2> block_eigenvalues(const Block2<Scalar>& b) {
    using C = std::complex<Scalar>;
    const C half_tr = (b(0, 0) + b(1, 1)) / Scalar(2);
    const C half_diff = (b(0, 0) - b(1, 1)) / Scalar(2);
    const C det = b(0, 0) * b(1, 1) - b(0, 1) * b(1, 0);
    const C disc = std::sqrt(half_diff * half_diff + b(0, 1) * b(1, 0));
    C big = (std::real(std::conj(half_tr) * disc) >= Scalar(0)) ? half_tr + disc : half_tr - disc;
    C small = (big == C(0)) ? C(0) : det / big;
    if (std::abs(small) > std::abs(big)) std::swap(small, big);
    return {small, big};
}

/// Eigenvalues of G(theta) as the union of the block spectra, stage by stage.
template <typename Scalar>
std::vector<std::complex<Scalar>> eigenvalues(const MethodParams<Scalar>& p, std::complex<Scalar> theta) {
    std::vector<std::complex<Scalar>> out;
    out.reserve(static_cast<std::size_t>(2 * p.k));
    for (int j = 0; j < p.k; ++j) {
        const auto ev = block_eigenvalues(closed_form_block(p, j, theta));
        out.push_back(ev[0]);
        out.push_back(ev[1]);
    }
    return out;
}

template <typename Scalar>
Scalar spectral_radius(const MethodParams<Scalar>& p, std::complex<Scalar> theta) {
    Scalar rho(0);
    for (const auto& ev : eigenvalues(p, theta)) rho = std::max(rho, std::abs(ev));
    return rho;
}

template <typename Scalar>
Scalar spectral_radius(const MethodParams<Scalar>& p, Scalar theta) {
    return spectral_radius(p, std::complex<Scalar>(theta));
}

/// theta -> infinity limits: 0 and (gamma_j - 1)/gamma_j for j < k, then
/// (alpha_f - 1)/alpha_f and (gamma_k - 1)/gamma_k for the last stage.
template <typename Scalar>
std::vector<std::complex<Scalar>> asymptotic_eigenvalues(const MethodParams<Scalar>& p) {
    std::vector<std::complex<Scalar>> out;
    for (int j = 0; j < p.k; ++j) {
        if (p.gamma[j] == Scalar(0)) {
            throw NumericalError("asymptotic eigenvalues: gamma_" + std::to_string(j + 1) + " is zero");
        }
        const Scalar lim = (p.gamma[j] - Scalar(1)) / p.gamma[j];
        if (j < p.k - 1) {
            out.emplace_back(Scalar(0));
        } else {
            out.emplace_back((p.alpha_f - Scalar(1)) / p.alpha_f);
        }
        out.emplace_back(lim);
    }
    return out;
}

/// `points` logarithmically spaced values in [lo, hi].
template <typename Scalar = double>
std::vector<Scalar> log_grid(Scalar lo, Scalar hi, int points) {
    if (points < 1 || !(lo > Scalar(0)) || !(hi >= lo)) {
        throw ConfigError("log grid: need points >= 1 and 0 < lo <= hi");
    }
    std::vector<Scalar> grid(static_cast<std::size_t>(points));
    if (points == 1) {
        grid[0] = lo;
        return grid;
    }
    const Scalar a = std::log10(lo), b = std::log10(hi);
    for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] = std::pow(Scalar(10), a + (b - a) * Scalar(i) / Scalar(points - 1));
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

template <typename Scalar = double>
struct SpectralSweepRow {
    Scalar theta;
    Scalar rho;
    std::vector<Scalar> abs_lambda;  // |lambda_1| ... |lambda_2k|
};

/// Spectral radius and per-eigenvalue magnitudes along a positive real grid.
template <typename Scalar>
std::vector<SpectralSweepRow<Scalar>> sweep_spectral_radius(const MethodParams<Scalar>& p,
                                                             const std::vector<Scalar>& grid) {
    if (grid.empty()) throw ConfigError("spectral sweep: theta grid is empty");
    std::vector<SpectralSweepRow<Scalar>> rows;
    rows.reserve(grid.size());
    for (const Scalar theta : grid) {
        if (!(theta > Scalar(0))) throw ConfigError("spectral sweep: theta values must be positive");
        SpectralSweepRow<Scalar> row{theta, Scalar(0), {}};
        for (const auto& ev : eigenvalues(p, std::complex<Scalar>(theta))) {
            row.abs_lambda.push_back(std::abs(ev));
            row.rho = std::max(row.rho, std::abs(ev));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

template <typename Scalar = double>
struct StabilityNode {
    Scalar re;
    Scalar im;
    Scalar rho;   // NaN at a pole
    bool pole;
};

template <typename Scalar = double>
struct StabilityMap {
    int nre = 0;
    int nim = 0;
    std::vector<StabilityNode<Scalar>> nodes;  // row-major: im outer, re inner
    Scalar max_rho_right_half = Scalar(0);     // over nodes with Re theta >= 0
    int poles = 0;

    /// ρ(G) <= 1 + tol on every node with Re theta >= 0.
    bool a_stable(Scalar tol = Scalar(1e-9)) const { return max_rho_right_half <= Scalar(1) + tol; }
};

namespace detail {

template <typename Scalar>
std::vector<Scalar> linear_axis(Scalar lo, Scalar hi, int n, const char* name) {
    if (n < 1 || (n == 1 && lo != hi) || !(hi >= lo)) {
        throw ConfigError(std::string("stability map: ") + name +
                          " axis needs resolution >= 2 (or 1 with a degenerate range) and lo <= hi");
    }
    std::vector<Scalar> axis(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        axis[static_cast<std::size_t>(i)] = (n == 1) ? lo : lo + (hi - lo) * Scalar(i) / Scalar(n - 1);
    }
    return axis;
}

} // namespace detail

/// Spectral radius over a rectangular grid of complex theta.
template <typename Scalar>
StabilityMap<Scalar> stability_region(const MethodParams<Scalar>& p, std::array<Scalar, 2> re_range,
                                      std::array<Scalar, 2> im_range, std::array<int, 2> resolution) {
    const auto re_axis = detail::linear_axis(re_range[0], re_range[1], resolution[0], "real");
    const auto im_axis = detail::linear_axis(im_range[0], im_range[1], resolution[1], "imaginary");
    StabilityMap<Scalar> map;
    map.nre = resolution[0];
    map.nim = resolution[1];
    map.nodes.reserve(re_axis.size() * im_axis.size());
    for (const Scalar im : im_axis) {
        for (const Scalar re : re_axis) {
            StabilityNode<Scalar> node{re, im, std::numeric_limits<Scalar>::quiet_NaN(), false};
            try {
                node.rho = spectral_radius(p, std::complex<Scalar>(re, im));
            } catch (const PoleError&) {
                node.pole = true;
                ++map.poles;
            }
            if (!node.pole && re >= Scalar(0)) {
                map.max_rho_right_half = std::max(map.max_rho_right_half, node.rho);
            }
            map.nodes.push_back(node);
        }
    }
    return map;
}

} // namespace galpha
