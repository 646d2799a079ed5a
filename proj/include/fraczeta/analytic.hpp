#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "fraczeta/boxcount.hpp"
#include "fraczeta/common.hpp"
#include "fraczeta/ifs.hpp"
#include "fraczeta/pointcloud.hpp"
#include "fraczeta/strings.hpp"

// Closed-form counting functions, tube volumes, strings, and point clouds for
// the three reference sets (ternary Cantor set, the planar four-map set F of
// dimension 1, and the harmonic a-string {1/j}). These let string extraction,
// zeta identities, and dimension pipelines be tested independently of
// sampling fidelity.

namespace fraczeta::analytic {

inline constexpr double kCantorDim = 0.63092975357145743710;  // log 2 / log 3

// ---- Cantor set -----------------------------------------------------------

/// Minimal number of sets of diameter 1/x covering the Cantor set:
/// N(x) = 2^n on (3^(n-1), 3^n], N(x) = 1 for x <= 1.
inline double cantorCounting(double x) {
    if (!(x > 0.0)) throw domain_error("cantorCounting: x must be positive");
    if (x <= 1.0) return 1.0;
    const double n = std::ceil(std::log(x) / std::log(3.0) - 1e-12);
    return std::pow(2.0, n);
}

/// Exact n-th jump (1-based) of the Cantor counting curve: x_n = 3^(n-1),
/// with level M_n = 2^(n-1) holding up to x_n.
inline CountingJump cantorJump(std::size_t n) {
    return {std::pow(3.0, static_cast<double>(n - 1)), std::pow(2.0, static_cast<double>(n - 1))};
}

/// Box-counting fractal string of the Cantor set: {1: 2} then 3^-(n-1) with
/// multiplicity 2^(n-1).
inline FractalString cantorBoxCountingString() {
    return FractalString({{1.0, 2.0}, {1.0 / 3.0, 2.0}}, GeometricTail{1.0 / 3.0, 2.0, 2, 1});
}

/// Endpoints of the level-`depth` construction intervals (both ends), an
/// exact subset of the Cantor set within Hausdorff distance 3^-depth / 2.
inline PointCloud cantorEndpoints(unsigned depth) {
    const PointCloud left = generateAttractor(cantorIfs(), depth);
    const double len = std::pow(3.0, -static_cast<double>(depth));
    std::vector<double> pts;
    pts.reserve(2 * left.size());
    for (double a : left.coords()) {
        pts.push_back(a);
        pts.push_back(a + len);
    }
    CloudMeta meta;
    meta.source = "cantor-endpoints";
    meta.depth = static_cast<int>(depth);
    meta.resolution = len / 2.0;
    return PointCloud(1, std::move(pts), std::move(meta));
}

/// Exact epsilon-neighborhood volume of the (infinite) Cantor set.
inline double cantorTubeVolume(double eps) {
    if (!(eps > 0.0)) throw domain_error("cantorTubeVolume: eps must be positive");
    if (2.0 * eps >= 1.0 / 3.0) {
        // all gaps filled
        return 1.0 + 2.0 * eps;
    }
    const double K = std::floor(std::log(1.0 / (2.0 * eps)) / std::log(3.0) + 1e-12);
    return 2.0 * eps * std::pow(2.0, K) + std::pow(2.0 / 3.0, K);
}

// ---- set F (four-map planar IFS, dimension 1) ------------------------------

/// n-th jump of the box-counting curve of F: writing n = 3k + j with
/// j in {1,2,3}, the jump is at 4^k * x_j with level j * 4^k, where
/// x_1 = sqrt(2), x_2 = 8/sqrt(17), x_3 = 2.
inline CountingJump setFJump(std::size_t n) {
    static const double xj[3] = {std::sqrt(2.0), 8.0 / std::sqrt(17.0), 2.0};
    const std::size_t k = (n - 1) / 3;
    const std::size_t j = (n - 1) % 3;  // 0-based
    const double scale = std::pow(4.0, static_cast<double>(k));
    return {scale * xj[j], static_cast<double>(j + 1) * scale};
}

/// Box-counting function of F (maximal packing variant of the worked case).
inline double setFCounting(double x) {
    if (!(x > 0.0)) throw domain_error("setFCounting: x must be positive");
    if (x <= setFJump(1).x) return 1.0;
    for (std::size_t n = 2; ; ++n) {
        if (x <= setFJump(n).x * (1.0 + 1e-15)) return setFJump(n).level;
    }
}

/// Box-counting fractal string of F: sqrt(2)/2 twice, then the three
/// geometric families sqrt(17)/(8*4^k), 1/(2*4^k), sqrt(2)/(2*4^(k+1)) with
/// multiplicities 4^k, 4^k, 4^(k+1).
inline FractalString setFBoxCountingString() {
    const double s2 = std::sqrt(2.0), s17 = std::sqrt(17.0);
    std::vector<ScaleEntry> entries = {
        {s2 / 2.0, 2.0},        // head
        {s17 / 8.0, 1.0},       // tail block
        {0.5, 1.0},
        {s2 / 8.0, 4.0},
    };
    return FractalString(std::move(entries), GeometricTail{0.25, 4.0, 2, 3});
}

/// Tessellation string of F with unit-square tiles and lambda = 1/4:
/// scales 4^-n with multiplicities 9 * 4^n.
inline FractalString setFTessellationString() {
    return FractalString({{0.25, 36.0}}, GeometricTail{0.25, 4.0, 1, 1});
}

// ---- a-string {1/j} ---------------------------------------------------------

/// Cloud {1/j : j <= J} together with 0; Hausdorff distance to the full
/// a-string is 1/(J+1).
inline PointCloud aStringCloud(std::size_t J) {
    std::vector<double> pts;
    pts.reserve(J + 1);
    pts.push_back(0.0);
    for (std::size_t j = J; j >= 1; --j) pts.push_back(1.0 / static_cast<double>(j));
    CloudMeta meta;
    meta.source = "a-string";
    meta.resolution = 1.0 / static_cast<double>(J + 1);
    return PointCloud(1, std::move(pts), std::move(meta));
}

/// Gap-length string of the a-string: l_j = 1/(j(j+1)), each multiplicity 1.
inline FractalString aStringGapString(std::size_t J) {
    std::vector<ScaleEntry> entries;
    entries.reserve(J);
    for (std::size_t j = 1; j <= J; ++j)
        entries.push_back({1.0 / (static_cast<double>(j) * static_cast<double>(j + 1)), 1.0});
    return FractalString(std::move(entries));
}

/// Exact epsilon-neighborhood volume of the infinite a-string.
inline double aStringTubeVolume(double eps) {
    if (!(eps > 0.0)) throw domain_error("aStringTubeVolume: eps must be positive");
    // largest j with 1/(j(j+1)) >= 2 eps
    const double q = 1.0 / (2.0 * eps);
    const double jStar = std::floor(0.5 * (std::sqrt(1.0 + 4.0 * q) - 1.0) + 1e-12);
    const double js = std::max(0.0, jStar);
    return 2.0 * eps + 2.0 * eps * js + 1.0 / (js + 1.0);
}

namespace detail {

/// sum_{j > n} j^{-a} by Euler-Maclaurin (real a > 1).
inline double zetaTail(double a, double n) {
    const double na = std::pow(n, -a);
    double acc = std::pow(n, 1.0 - a) / (a - 1.0);  // integral from n
    acc -= 0.5 * na;                                 // minus f(n)/2 (we want j > n)
    acc += a * na / n / 12.0;
    acc -= a * (a + 1.0) * (a + 2.0) * na / (n * n * n) / 720.0;
    return acc;
}

}  // namespace detail

/// S(s) = sum_{j>=1} (j(j+1))^{-s} for real s > 1/2, via direct summation up
/// to n0 and a binomial-in-1/j expansion with Euler-Maclaurin zeta tails.
inline double aStringGapDirichlet(double s) {
    if (!(s > 0.5)) throw divergence_error("aStringGapDirichlet: converges only for s > 1/2");
    const int n0 = 200;
    double acc = 0.0;
    for (int j = 1; j <= n0; ++j)
        acc += std::pow(static_cast<double>(j) * (j + 1.0), -s);
    // (j(j+1))^{-s} = j^{-2s} (1+1/j)^{-s} = sum_k C(-s,k) j^{-2s-k}
    double coeff = 1.0;  // C(-s, 0)
    for (int k = 0; k <= 24; ++k) {
        if (k > 0) coeff *= -(s + k - 1.0) / static_cast<double>(k);
        const double term = coeff * detail::zetaTail(2.0 * s + k, static_cast<double>(n0));
        acc += term;
        if (std::abs(term) < 1e-16 * std::abs(acc)) break;
    }
    return acc;
}

/// Distance zeta function of the full (infinite) a-string at real s > 1/2,
/// for a neighborhood width eps <= half the largest gap.
inline double aStringDistanceZeta(double s, double eps) {
    const double largestGap = 0.5;  // gap between 1/2 and 1
    if (!(eps > 0.0) || eps > largestGap / 2.0)
        throw domain_error("aStringDistanceZeta: need 0 < eps <= 1/4");
    // gaps longer than 2 eps saturate at eps; handle the finitely many
    // saturated gaps directly and the rest through the Dirichlet sum
    double acc = 2.0 * std::pow(eps, s) / s;  // the two outer ends
    std::size_t j = 1;
    double gap = 0.5;
    while (gap >= 2.0 * eps) {
        acc += 2.0 * std::pow(eps, s) / s;  // truncated contribution of a long gap
        ++j;
        gap = 1.0 / (static_cast<double>(j) * static_cast<double>(j + 1));
    }
    // remaining gaps are shorter than 2 eps: full closed-form integrals
    double fullSum = aStringGapDirichlet(s);
    for (std::size_t i = 1; i < j; ++i)
        fullSum -= std::pow(static_cast<double>(i) * (i + 1.0), -s);
    acc += (2.0 / s) * std::pow(2.0, -s) * fullSum;
    return acc;
}

}  // namespace fraczeta::analytic
