#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fraczeta {

/// Base class for all library errors.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// A numeric argument is outside the operation's domain.
class domain_error : public error {
public:
    using error::error;
};

/// Input data violates a structural invariant.
class data_error : public error {
public:
    using error::error;
};

/// Not enough data points to produce an estimate.
class insufficient_data_error : public error {
public:
    using error::error;
};

/// Evaluation requested inside a divergent region.
class divergence_error : public error {
public:
    using error::error;
};

/// A configured resource budget would be exceeded.
class resource_error : public error {
public:
    using error::error;
};

/// Operation not supported for the given configuration.
class unsupported_error : public error {
public:
    using error::error;
};

/// Geometric grid x_k = minValue * step^k, step = 10^(1/pointsPerDecade).
struct GeometricGrid {
    double minValue = 1.0;
    double maxValue = 1e6;
    int pointsPerDecade = 16;

    std::vector<double> values() const {
        if (!(minValue > 0.0) || !(maxValue > minValue) || pointsPerDecade < 1)
            throw domain_error("GeometricGrid: need 0 < min < max and pointsPerDecade >= 1");
        const double step = std::pow(10.0, 1.0 / pointsPerDecade);
        std::vector<double> out;
        for (double x = minValue; x <= maxValue * (1.0 + 1e-12); x *= step)
            out.push_back(x);
        return out;
    }

    double decades() const { return std::log10(maxValue / minValue); }
};

/// Least-squares slope of y against x.
inline double regressionSlope(const std::vector<double>& x, const std::vector<double>& y,
                              std::size_t begin, std::size_t end) {
    const auto n = static_cast<double>(end - begin);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = begin; i < end; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw insufficient_data_error("regressionSlope: degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

struct WindowedSlopes {
    std::vector<double> slopes;   // one per trailing window
    double maxSlope = 0.0;
    double minSlope = 0.0;
    std::size_t windowPoints = 0;
};

/// Regression slopes over sliding windows restricted to the trailing part of
/// (x, y). The window spans `windowSpan` units of x (x is expected to be on a
/// log scale, so one decade is log(10) when x = log of the raw value), and
/// windows are confined to the last `tailFraction` of the x-range. Used to
/// approximate limsup/liminf growth exponents from finite data.
inline WindowedSlopes windowedSlopes(const std::vector<double>& x, const std::vector<double>& y,
                                     double windowSpan, double tailFraction = 0.5) {
    if (x.size() != y.size() || x.size() < 3)
        throw insufficient_data_error("windowedSlopes: need at least 3 points");
    const double xLast = x.back();
    const double xFirst = x.front();
    const double tailStart = xLast - tailFraction * (xLast - xFirst);

    // window length in points, derived from average spacing
    const double spacing = (xLast - xFirst) / static_cast<double>(x.size() - 1);
    std::size_t wpts = std::max<std::size_t>(3, static_cast<std::size_t>(std::llround(windowSpan / spacing)) + 1);
    wpts = std::min(wpts, x.size());

    WindowedSlopes out;
    out.windowPoints = wpts;
    for (std::size_t b = 0; b + wpts <= x.size(); ++b) {
        if (x[b] < tailStart - 1e-12) continue;
        out.slopes.push_back(regressionSlope(x, y, b, b + wpts));
    }
    if (out.slopes.empty())  // fall back to the single trailing window
        out.slopes.push_back(regressionSlope(x, y, x.size() - wpts, x.size()));
    out.maxSlope = *std::max_element(out.slopes.begin(), out.slopes.end());
    out.minSlope = *std::min_element(out.slopes.begin(), out.slopes.end());
    return out;
}

inline double clamp01m(double v, double m) { return std::clamp(v, 0.0, m); }

}  // namespace fraczeta
