#pragma once

#include "galpha/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace galpha {

/// Per-stage high-frequency dissipation controls rho_inf_1 ... rho_inf_k, each in [0, 1].
class RhoSpectrum {
public:
    explicit RhoSpectrum(std::vector<double> values) : values_(std::move(values)) {
        if (values_.empty()) {
            throw ConfigError("rho spectrum: stage count k must be at least 1");
        }
        for (std::size_t j = 0; j < values_.size(); ++j) {
            const double r = values_[j];
            if (!(r >= 0.0 && r <= 1.0)) {
                std::ostringstream msg;
                msg << "rho spectrum: rho_inf[" << j + 1 << "] = " << r << " is outside [0, 1]";
                throw RangeError(msg.str(), static_cast<int>(j));
            }
        }
    }

    /// One-parameter family: the same rho_inf on every stage.
    static RhoSpectrum uniform(int k, double rho) {
        if (k < 1) {
            throw ConfigError("rho spectrum: stage count k must be at least 1");
        }
        return RhoSpectrum(std::vector<double>(static_cast<std::size_t>(k), rho));
    }

    int stages() const noexcept { return static_cast<int>(values_.size()); }
    double operator[](int j) const { return values_.at(static_cast<std::size_t>(j)); }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    std::vector<double> values_;
};

/// Coefficients of the k-stage scheme. Stage indices are zero-based in storage;
/// alpha[k-1] and gamma[k-1] belong to the last (alpha_f-shifted) stage.
template <typename Scalar = double>
struct MethodParams {
    int k = 1;
    std::vector<Scalar> alpha;
    Scalar alpha_f = Scalar(1);
    std::vector<Scalar> gamma;

    int last() const noexcept { return k - 1; }

    template <typename Other>
    MethodParams<Other> cast() const {
        MethodParams<Other> out;
        out.k = k;
        out.alpha_f = static_cast<Other>(alpha_f);
        for (const auto& a : alpha) out.alpha.push_back(static_cast<Other>(a));
        for (const auto& g : gamma) out.gamma.push_back(static_cast<Other>(g));
        return out;
    }

    bool operator==(const MethodParams&) const = default;
};

/// Derives (alpha_j, alpha_f, gamma_j) from the dissipation controls.
///
/// Stages j < k use alpha_j = (3 + rho_j) / (2 (1 + rho_j)); the last stage uses
/// alpha_k = (3 - rho_k) / (2 (1 + rho_k)) and alpha_f = 1 / (1 + rho_k). The gammas
/// follow the order conditions, which makes gamma_j = 1 / (1 + rho_j) on every stage.
/// For k = 1 the single stage is the last one and the scheme is classical generalized-alpha.
template <typename Scalar = double>
MethodParams<Scalar> params_from_rho(const RhoSpectrum& rho) {
    MethodParams<Scalar> p;
    p.k = rho.stages();
    p.alpha.resize(static_cast<std::size_t>(p.k));
    p.gamma.resize(static_cast<std::size_t>(p.k));
    const Scalar one(1), two(2), three(3), half = Scalar(1) / Scalar(2);
    for (int j = 0; j + 1 < p.k; ++j) {
        const Scalar r = static_cast<Scalar>(rho[j]);
        p.alpha[j] = (three + r) / (two * (one + r));
        p.gamma[j] = p.alpha[j] - half;
    }
    const Scalar r = static_cast<Scalar>(rho[p.k - 1]);
    p.alpha[p.k - 1] = (three - r) / (two * (one + r));
    p.alpha_f = one / (one + r);
    p.gamma[p.k - 1] = half - p.alpha_f + p.alpha[p.k - 1];
    return p;
}

template <typename Scalar = double>
MethodParams<Scalar> params_from_rho(int k, double rho) {
    return params_from_rho<Scalar>(RhoSpectrum::uniform(k, rho));
}

struct StabilityReport {
    std::vector<std::string> violations;

    bool ok() const noexcept { return violations.empty(); }
    explicit operator bool() const noexcept { return ok(); }
};

/// Checks the unconditional-stability bounds alpha_j >= 1 (j < k),
/// alpha_k >= alpha_f >= 1/2 and gamma_j > 0. Every violated inequality is listed.
template <typename Scalar>
StabilityReport validate_stability(const MethodParams<Scalar>& p) {
    StabilityReport report;
    // Rounding slack for parameters produced from rho near 1, where alpha_k - alpha_f -> 0.
    const Scalar slack = Scalar(16) * std::numeric_limits<Scalar>::epsilon();
    auto fail = [&](const std::string& inequality, Scalar value) {
        std::ostringstream msg;
        msg << inequality << " violated (value " << static_cast<double>(value) << ")";
        report.violations.push_back(msg.str());
    };

    if (p.k < 1 || p.alpha.size() != static_cast<std::size_t>(p.k) ||
        p.gamma.size() != static_cast<std::size_t>(p.k)) {
        report.violations.push_back("malformed parameters: alpha and gamma must have k entries");
        return report;
    }
    for (int j = 0; j + 1 < p.k; ++j) {
        if (p.alpha[j] < Scalar(1) - slack) {
            fail("alpha_" + std::to_string(j + 1) + " >= 1", p.alpha[j]);
        }
    }
    if (p.alpha[p.k - 1] < p.alpha_f - slack) {
        fail("alpha_" + std::to_string(p.k) + " >= alpha_f", p.alpha[p.k - 1] - p.alpha_f);
    }
    if (p.alpha_f < Scalar(1) / Scalar(2) - slack) {
        fail("alpha_f >= 1/2", p.alpha_f);
    }
    for (int j = 0; j < p.k; ++j) {
        if (!(p.gamma[j] > Scalar(0))) {
            fail("gamma_" + std::to_string(j + 1) + " > 0", p.gamma[j]);
        }
    }
    return report;
}

/// Global order of accuracy: 3k/2 for even k, (3k + 1)/2 for odd k.
constexpr int theoretical_order(int k) noexcept {
    return (k % 2 == 0) ? 3 * k / 2 : (3 * k + 1) / 2;
}

} // namespace galpha
