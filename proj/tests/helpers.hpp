#pragma once

// Shared randomized-input generators and numeric oracles for the test suites.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "fraczeta/analytic.hpp"
#include "fraczeta/ifs.hpp"
#include "fraczeta/pointcloud.hpp"
#include "fraczeta/strings.hpp"
#include "fraczeta/zeta.hpp"

namespace testutil {

using fraczeta::Complex;
using fraczeta::FractalString;
using fraczeta::GeometricTail;
using fraczeta::IfsSpec;
using fraczeta::PointCloud;
using fraczeta::ScaleEntry;

/// Random fractal string with an exact geometric tail (optionally with a
/// prefix and block period > 1). Deterministic in the RNG state.
inline FractalString randomTailedString(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ratio(0.1, 0.7);
    std::uniform_int_distribution<int> growthDist(1, 5);
    std::uniform_int_distribution<int> onsetDist(1, 3);
    std::uniform_int_distribution<int> periodDist(1, 3);
    std::uniform_int_distribution<int> multDist(1, 9);

    const double r = ratio(rng);
    const auto g = static_cast<double>(growthDist(rng));
    const auto onset = static_cast<std::size_t>(onsetDist(rng));
    const auto period = static_cast<std::size_t>(periodDist(rng));

    // block scales: b_i = b_0 * r^{i/(p+1)} keeps r*b_0 < b_{p-1}
    const double b0 = 1.0;
    std::vector<ScaleEntry> entries;
    for (std::size_t j = onset - 1; j >= 1; --j)  // strictly larger prefix scales
        entries.push_back({b0 * std::pow(1.9, static_cast<double>(j)),
                           static_cast<double>(multDist(rng))});
    for (std::size_t i = 0; i < period; ++i)
        entries.push_back({b0 * std::pow(r, static_cast<double>(i) / static_cast<double>(period + 1)),
                           static_cast<double>(multDist(rng))});
    return FractalString(std::move(entries), GeometricTail{r, g, onset, period});
}

/// Two-map 1-D IFS with a random ratio; attractor is a Cantor-like set of
/// dimension log 2 / log(1/r).
inline IfsSpec randomCantorLikeIfs(std::mt19937_64& rng, double rLo = 0.25, double rHi = 0.4) {
    std::uniform_real_distribution<double> ratio(rLo, rHi);
    const double r = ratio(rng);
    IfsSpec spec;
    spec.ambientDim = 1;
    spec.maps = {{r, {0.0}}, {r, {1.0 - r}}};
    spec.openSetDeclared = true;
    return spec;
}

/// Random 1-D cloud of n points in [0, 1].
inline PointCloud randomCloud1d(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> pts(n);
    for (auto& p : pts) p = u(rng);
    return PointCloud(1, std::move(pts));
}

/// Numerical contour integral (1/2πi) ∮ f around `center` on a circle of
/// radius `rho` with `nodes` trapezoid nodes; equals the residue at a simple
/// pole enclosed by the circle.
template <typename F>
Complex contourResidue(F&& f, Complex center, double rho = 0.01, int nodes = 256) {
    Complex acc = 0.0;
    for (int k = 0; k < nodes; ++k) {
        const double theta = 2.0 * M_PI * k / nodes;
        const Complex z = center + rho * std::exp(Complex(0.0, theta));
        acc += f(z) * rho * std::exp(Complex(0.0, theta));
    }
    return acc / static_cast<double>(nodes);
}

}  // namespace testutil
