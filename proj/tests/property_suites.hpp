#pragma once

// The six randomized property suites. Each runs >= 100 cases and is shared
// between the per-module unit tests and the acceptance gate.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "fraczeta/boxcount.hpp"
#include "fraczeta/distzeta.hpp"
#include "fraczeta/strings.hpp"
#include "fraczeta/zeta.hpp"
#include "helpers.hpp"

namespace testutil {

struct SuiteResult {
    std::size_t cases = 0;
    std::size_t failures = 0;
    std::string firstFailure;
    bool pass() const { return cases > 0 && failures == 0; }
};

namespace detail {

inline void record(SuiteResult& r, bool ok, const std::string& msg) {
    ++r.cases;
    if (!ok) {
        ++r.failures;
        if (r.firstFailure.empty()) r.firstFailure = msg;
    }
}

}  // namespace detail

/// Suite 1: counting functions are nondecreasing and agree with brute-force
/// flattened sums at inter-jump abscissae.
inline SuiteResult countingMonotonicitySuite(std::size_t cases = 100, std::uint64_t seed = 101) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> pick(1, 40);
    SuiteResult res;
    for (std::size_t c = 0; c < cases; ++c) {
        const auto s = randomTailedString(rng);
        bool ok = true;
        const double xLo = 0.5 / s.entry(1).scale;
        const double xHi = 1.0 / s.entry(30).scale;
        for (int t = 0; t < 10; ++t) {
            double x = xLo * std::pow(xHi / xLo, u(rng));
            double y = xLo * std::pow(xHi / xLo, u(rng));
            if (x > y) std::swap(x, y);
            if (s.countingFunction(x) > s.countingFunction(y) * (1.0 + 1e-12)) ok = false;
        }
        const int n = pick(rng);
        const double x = std::sqrt((1.0 / s.entry(n).scale) * (1.0 / s.entry(n + 1).scale));
        double brute = 0.0;
        for (int j = 1; j <= n + 20; ++j)
            if (s.entry(j).scale >= (1.0 / x) * (1.0 - 1e-13)) brute += s.entry(j).mult;
        const double fast = s.countingFunction(x);
        if (std::abs(fast - brute) > 1e-9 * std::max(1.0, brute)) ok = false;
        detail::record(res, ok, "counting monotonicity case " + std::to_string(c));
    }
    return res;
}

/// Suite 2: the abscissa of convergence is invariant under changing finitely
/// many leading entries (exact for tailed strings, within 0.03 for finite
/// truncated estimates).
inline SuiteResult prefixInvarianceSuite(std::size_t cases = 100, std::uint64_t seed = 102) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> extra(0, 3);
    std::uniform_int_distribution<int> multDist(1, 9);
    std::uniform_real_distribution<double> alphaDist(0.3, 0.8);
    SuiteResult res;
    for (std::size_t c = 0; c < cases; ++c) {
        bool ok = true;
        const auto s1 = randomTailedString(rng);
        const auto& t = *s1.tail();
        const double blockTop = s1.storedScales()[t.onset - 1].scale;
        const int q = extra(rng);
        std::vector<fraczeta::ScaleEntry> entries;
        for (int j = q; j >= 1; --j)
            entries.push_back({blockTop * std::pow(2.1, static_cast<double>(j)),
                               static_cast<double>(multDist(rng))});
        for (std::size_t i = t.onset - 1; i < s1.storedScales().size(); ++i)
            entries.push_back(s1.storedScales()[i]);
        const fraczeta::FractalString s2(
            std::move(entries),
            fraczeta::GeometricTail{t.ratio, t.growth, static_cast<std::size_t>(q) + 1, t.period});
        if (std::abs(s1.abscissaOfConvergence() - s2.abscissaOfConvergence()) > 1e-12) ok = false;

        // finite strings: truncated windowed estimates move by <= 0.03
        const double alpha = alphaDist(rng);
        std::vector<fraczeta::ScaleEntry> base;
        for (int j = 1; j <= 2000; ++j)
            base.push_back({std::pow(static_cast<double>(j), -1.0 / alpha), 1.0});
        std::vector<fraczeta::ScaleEntry> mod = {{8.0, 2.0}, {4.0, 1.0}, {2.0, 3.0}};
        mod.insert(mod.end(), base.begin(), base.end());
        const fraczeta::FractalString f1(std::move(base));
        const fraczeta::FractalString f2(std::move(mod));
        if (std::abs(f1.abscissaOfConvergence() - f2.abscissaOfConvergence()) > 0.03) ok = false;
        detail::record(res, ok, "prefix invariance case " + std::to_string(c));
    }
    return res;
}

/// Suite 3: box-dimension estimates agree within 0.03 between scale bases
/// lambda = 2 and lambda = 3 on random Cantor-like attractor clouds.
inline SuiteResult lambdaInvarianceSuite(std::size_t cases = 100, std::uint64_t seed = 103) {
    std::mt19937_64 rng(seed);
    SuiteResult res;
    for (std::size_t c = 0; c < cases; ++c) {
        const auto spec = randomCantorLikeIfs(rng);
        const auto cloud = fraczeta::generateAttractor(spec, 14);
        const auto e2 = fraczeta::dimensionEstimate(cloud, 2.0, {2, 17});
        const auto e3 = fraczeta::dimensionEstimate(cloud, 3.0, {2, 10});
        const bool ok = std::abs(e2.upper - e3.upper) <= 0.03;
        detail::record(res, ok,
                       "lambda invariance case " + std::to_string(c) + ": |" +
                           std::to_string(e2.upper) + " - " + std::to_string(e3.upper) + "| > 0.03");
    }
    return res;
}

/// Suite 4: nested mesh counts are nondecreasing in the scale, and the upper
/// dimension estimate is stable (<= 0.03) under adding five near-duplicate
/// points.
inline SuiteResult upperEstimateStabilitySuite(std::size_t cases = 100, std::uint64_t seed = 104) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SuiteResult res;
    for (std::size_t c = 0; c < cases; ++c) {
        bool ok = true;
        const fraczeta::PointCloud cloud =
            (c % 2 == 0) ? fraczeta::generateAttractor(randomCantorLikeIfs(rng), 12)
                         : randomCloud1d(rng, 1000);
        std::size_t prev = 0;
        for (int k = 0; k <= 12; ++k) {
            const std::size_t n = fraczeta::meshCount(cloud, std::pow(2.0, k));
            if (n < prev) ok = false;
            prev = n;
        }
        std::vector<double> coords = cloud.coords();
        for (int j = 0; j < 5; ++j) {
            const auto i = static_cast<std::size_t>(u(rng) * static_cast<double>(cloud.size()));
            coords.push_back(cloud.point(std::min(i, cloud.size() - 1))[0] + (u(rng) - 0.5) * 2e-7);
        }
        const fraczeta::PointCloud cloud2(1, std::move(coords), cloud.meta());
        const fraczeta::KRange kr{1, 12};
        const auto e1 = fraczeta::dimensionEstimate(cloud, 2.0, kr);
        const auto e2 = fraczeta::dimensionEstimate(cloud2, 2.0, kr);
        if (std::abs(e1.upper - e2.upper) > 0.03) ok = false;
        detail::record(res, ok, "upper-estimate stability case " + std::to_string(c));
    }
    return res;
}

/// Suite 5: conjugate symmetry of every zeta evaluation path.
inline SuiteResult conjugateSymmetrySuite(std::size_t cases = 100, std::uint64_t seed = 105) {
    using fraczeta::Complex;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SuiteResult res;
    for (std::size_t c = 0; c < cases; ++c) {
        bool ok = true;
        const auto s = randomTailedString(rng);
        const double sigma = s.abscissaOfConvergence();

        const Complex z(sigma + 0.2 + 2.0 * u(rng), -30.0 + 60.0 * u(rng));
        const Complex v = fraczeta::evalDirichlet(s, z).value;
        const Complex vc = fraczeta::evalDirichlet(s, std::conj(z)).value;
        if (std::abs(vc - std::conj(v)) > 1e-13 * (1.0 + std::abs(v))) ok = false;

        const auto form = fraczeta::latticeClosedForm(s);
        for (int attempt = 0; attempt < 50; ++attempt) {
            const Complex w(-3.0 + 6.0 * u(rng), -30.0 + 60.0 * u(rng));
            const Complex denom =
                1.0 - form.polarTerms[0].b * std::exp(w * std::log(form.r));
            if (std::abs(denom) < 0.05) continue;
            const Complex f = form.evaluate(w);
            const Complex fc = form.evaluate(std::conj(w));
            if (std::abs(fc - std::conj(f)) > 1e-12 * (1.0 + std::abs(f))) ok = false;
            break;
        }

        const auto cloud = randomCloud1d(rng, 50);
        const double eps = 0.05 + 0.45 * u(rng);
        const Complex zz(0.1 + 1.9 * u(rng), -10.0 + 20.0 * u(rng));
        const Complex a = fraczeta::distanceZeta(cloud, eps, zz).value;
        const Complex b = fraczeta::distanceZeta(cloud, eps, std::conj(zz)).value;
        if (b != std::conj(a)) ok = false;  // exact path, exact symmetry

        const double epsS = s.largestScale() * (0.5 + 0.5 * u(rng));
        const Complex zs(sigma + 0.2 + u(rng), -10.0 + 20.0 * u(rng));
        const Complex g = fraczeta::distanceZetaStringForm(s, epsS, zs);
        const Complex gc = fraczeta::distanceZetaStringForm(s, epsS, std::conj(zs));
        if (std::abs(gc - std::conj(g)) > 1e-13 * (1.0 + std::abs(g))) ok = false;

        detail::record(res, ok, "conjugate symmetry case " + std::to_string(c));
    }
    return res;
}

/// Suite 6: residues (via extrapolation of the string-form distance zeta) and
/// divergence verdicts are invariant (<= 1e-6) under doubling eps.
inline SuiteResult epsInvarianceSuite(std::size_t cases = 100, std::uint64_t seed = 106) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SuiteResult res;
    for (std::size_t c = 0; c < cases; ++c) {
        bool ok = true;
        fraczeta::FractalString s = randomTailedString(rng);
        double d = s.abscissaOfConvergence();
        for (int attempt = 0; attempt < 200 && !(d > 0.05 && d < 0.95); ++attempt) {
            s = randomTailedString(rng);
            d = s.abscissaOfConvergence();
        }
        if (!(d > 0.05 && d < 0.95)) {
            detail::record(res, false, "eps invariance: no usable string");
            continue;
        }
        const double eps0 = s.largestScale() * (0.5 + 0.5 * u(rng));
        auto fn = [&](double eps) {
            return std::function<double(double)>([&s, eps](double sv) {
                return fraczeta::distanceZetaStringForm(s, eps, fraczeta::Complex(sv, 0.0)).real();
            });
        };
        const auto r1 = fraczeta::residueExtrapolation(fn(eps0), d);
        const auto r2 = fraczeta::residueExtrapolation(fn(2.0 * eps0), d);
        if (std::abs(r1.value - r2.value) > 1e-6 * std::max(1.0, std::abs(r1.value))) ok = false;

        const auto cloud = fraczeta::generateAttractor(randomCantorLikeIfs(rng), 10);
        const double sv = 0.2 + 0.7 * u(rng);
        const double eps = 0.01 + 0.1 * u(rng);
        const auto w1 = fraczeta::distanceZeta(cloud, eps, fraczeta::Complex(sv, 0.0));
        const auto w2 = fraczeta::distanceZeta(cloud, 2.0 * eps, fraczeta::Complex(sv, 0.0));
        if (w1.divergenceWarning != w2.divergenceWarning) ok = false;

        detail::record(res, ok, "eps invariance case " + std::to_string(c));
    }
    return res;
}

}  // namespace testutil
