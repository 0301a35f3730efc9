#pragma once

#include "galpha/errors.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace galpha {

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    int points = 0;  // points kept after the floor filter
};

/// Least-squares fit of log|y| = slope * log x + intercept. Points with |y| <= floor are dropped.
template <typename Scalar>
SlopeFit fit_loglog(const std::vector<Scalar>& x, const std::vector<Scalar>& y, Scalar floor = Scalar(0)) {
    if (x.size() != y.size()) throw ConfigError("fit_loglog: x and y sizes differ");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Scalar ay = std::abs(y[i]);
        if (!(ay > floor) || !(x[i] > Scalar(0)) || !std::isfinite(static_cast<double>(ay))) continue;
        const double lx = std::log(static_cast<double>(x[i]));
        const double ly = std::log(static_cast<double>(ay));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    SlopeFit fit;
    fit.points = n;
    if (n < 2) {
        fit.slope = std::numeric_limits<double>::quiet_NaN();
        fit.intercept = std::numeric_limits<double>::quiet_NaN();
        return fit;
    }
    const double den = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / den;
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

/// Roundoff floor 100 * eps * |U| below which residuals and errors are not trusted.
template <typename Scalar>
Scalar roundoff_floor(Scalar magnitude) {
    return Scalar(100) * std::numeric_limits<Scalar>::epsilon() * std::abs(magnitude);
}

/// observed[i] = log2(err[i-1] / err[i]) for a sequence whose step halves each entry; observed[0] is NaN.
template <typename Scalar>
std::vector<double> observed_orders(const std::vector<Scalar>& err) {
    std::vector<double> out(err.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 1; i < err.size(); ++i) {
        out[i] = std::log2(static_cast<double>(err[i - 1]) / static_cast<double>(err[i]));
    }
    return out;
}

} // namespace galpha
