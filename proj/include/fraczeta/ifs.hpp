#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "fraczeta/common.hpp"
#include "fraczeta/pointcloud.hpp"

namespace fraczeta {

/// A contracting homothety x -> ratio * x + translation.
struct SimilarityMap {
    double ratio = 0.0;
    std::vector<double> translation;
};

/// A finite iterated function system of homotheties in R^m.
struct IfsSpec {
    std::size_t ambientDim = 1;
    std::vector<SimilarityMap> maps;
    bool openSetDeclared = false;

    void validate() const {
        if (ambientDim == 0) throw data_error("IfsSpec: ambient dimension must be positive");
        if (maps.size() < 2) throw data_error("IfsSpec: need at least 2 maps");
        for (const auto& m : maps) {
            if (!(m.ratio > 0.0 && m.ratio < 1.0)) throw data_error("IfsSpec: ratios must lie in (0,1)");
            if (m.translation.size() != ambientDim)
                throw data_error("IfsSpec: translation dimension mismatch");
            for (double t : m.translation)
                if (!std::isfinite(t)) throw data_error("IfsSpec: translations must be finite");
        }
    }

    double maxRatio() const {
        double r = 0.0;
        for (const auto& m : maps) r = std::max(r, m.ratio);
        return r;
    }

    /// Bound on the attractor diameter: every point of the attractor lies in
    /// the ball of radius max||b_j|| / (1 - r_max) around the origin.
    double diameterBound() const {
        double bmax = 0.0;
        for (const auto& m : maps) {
            double n2 = 0.0;
            for (double t : m.translation) n2 += t * t;
            bmax = std::max(bmax, std::sqrt(n2));
        }
        return 2.0 * bmax / (1.0 - maxRatio());
    }
};

/// Lattice/nonlattice classification of the scaling ratios.
struct LatticeInfo {
    bool isLattice = false;
    double r = 0.0;                   // base ratio, r_j = r^{k_j}
    std::vector<int64_t> exponents;   // k_j per map (aligned with IfsSpec::maps), gcd 1
    double oscillatoryPeriod = 0.0;   // T = log(1/r)
};

/// Unique real root of sum_j ratio_j^sigma = 1 (the similarity dimension).
/// The left side is strictly decreasing from N >= 2 at sigma = 0 to 0, so the
/// root exists and bisection converges unconditionally. |residual| <= 1e-12.
inline double moranSolve(const IfsSpec& spec) {
    spec.validate();
    auto f = [&](double s) {
        double acc = 0.0;
        for (const auto& m : spec.maps) acc += std::pow(m.ratio, s);
        return acc - 1.0;
    };
    double lo = 0.0, hi = 1.0;
    while (f(hi) > 0.0) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace detail {

/// Best rational approximation p/q of v with q <= maxDenominator, by
/// continued-fraction convergents.
inline std::pair<int64_t, int64_t> rationalApprox(double v, int64_t maxDenominator) {
    int64_t p0 = 1, q0 = 0;  // convergent h_{-1}/k_{-1}
    int64_t p1 = static_cast<int64_t>(std::floor(v)), q1 = 1;
    double frac = v - std::floor(v);
    for (int it = 0; it < 64; ++it) {
        if (frac < 1e-15) break;
        frac = 1.0 / frac;
        const double aF = std::floor(frac);
        if (aF > 9e17) break;
        const auto a = static_cast<int64_t>(aF);
        frac -= aF;
        const int64_t p2 = a * p1 + p0;
        const int64_t q2 = a * q1 + q0;
        if (q2 > maxDenominator) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    }
    return {p1, q1};
}

}  // namespace detail

/// Decide whether the distinct scaling ratios are all integer powers of a
/// common base r < 1 (lattice case). Integer relations between log-ratios are
/// searched by continued-fraction approximation with denominators up to 1e6.
/// A relation is accepted only when the approximation error is at machine
/// scale; the best convergent of a generic irrational ratio with denominator
/// <= 1e6 still misses by several orders of magnitude more than that.
inline LatticeInfo classifyLattice(const IfsSpec& spec, double tol = 1e-9) {
    spec.validate();
    if (!(tol > 0.0 && tol <= 1e-6)) throw domain_error("classifyLattice: tol must lie in (0, 1e-6]");

    // distinct ratios
    std::vector<double> distinct;
    for (const auto& m : spec.maps) {
        bool seen = false;
        for (double t : distinct)
            if (std::abs(t - m.ratio) <= 1e-12 * t) { seen = true; break; }
        if (!seen) distinct.push_back(m.ratio);
    }

    std::vector<double> logs(distinct.size());
    for (std::size_t j = 0; j < distinct.size(); ++j) logs[j] = std::log(1.0 / distinct[j]);
    const double base = *std::min_element(logs.begin(), logs.end());

    constexpr int64_t kDenominatorCap = 1'000'000;
    std::vector<int64_t> num(distinct.size()), den(distinct.size());
    int64_t lcm = 1;
    for (std::size_t j = 0; j < distinct.size(); ++j) {
        const double q = logs[j] / base;  // >= 1
        auto [p, d] = detail::rationalApprox(q, kDenominatorCap);
        if (p <= 0 || d <= 0 || std::abs(q - static_cast<double>(p) / static_cast<double>(d)) >
                                    1e-13 * std::max(1.0, q))
            return {};  // no machine-precision integer relation: nonlattice
        num[j] = p; den[j] = d;
        lcm = std::lcm(lcm, d);
        if (lcm > kDenominatorCap) return {};
    }

    std::vector<int64_t> k(distinct.size());
    for (std::size_t j = 0; j < distinct.size(); ++j) k[j] = num[j] * (lcm / den[j]);
    int64_t g = 0;
    for (int64_t kj : k) g = std::gcd(g, kj);
    for (auto& kj : k) kj /= g;

    // least-squares fit of log(1/r) over the declared exponents
    double skl = 0.0, skk = 0.0;
    for (std::size_t j = 0; j < distinct.size(); ++j) {
        skl += static_cast<double>(k[j]) * logs[j];
        skk += static_cast<double>(k[j]) * static_cast<double>(k[j]);
    }
    const double logInvR = skl / skk;
    const double r = std::exp(-logInvR);
    for (std::size_t j = 0; j < distinct.size(); ++j)
        if (std::abs(std::pow(r, static_cast<double>(k[j])) - distinct[j]) > tol * distinct[j])
            return {};

    LatticeInfo info;
    info.isLattice = true;
    info.r = r;
    info.oscillatoryPeriod = logInvR;
    info.exponents.resize(spec.maps.size());
    for (std::size_t i = 0; i < spec.maps.size(); ++i) {
        for (std::size_t j = 0; j < distinct.size(); ++j)
            if (std::abs(distinct[j] - spec.maps[i].ratio) <= 1e-12 * distinct[j])
                info.exponents[i] = k[j];
    }
    return info;
}

/// All N^depth images of the seed point (the fixed point of the first map)
/// under depth-fold compositions, in lexicographic order of the map-index
/// sequence. Every output point is within diameterBound * r_max^depth of the
/// attractor; that bound is recorded as the cloud resolution.
inline PointCloud generateAttractor(const IfsSpec& spec, unsigned depth,
                                    std::size_t pointBudget = 10'000'000) {
    spec.validate();
    if (depth < 1) throw domain_error("generateAttractor: depth must be >= 1");
    const std::size_t n = spec.maps.size();
    double total = 1.0;
    for (unsigned d = 0; d < depth; ++d) {
        total *= static_cast<double>(n);
        if (total > static_cast<double>(pointBudget)) {
            const auto suggested = static_cast<unsigned>(std::log(static_cast<double>(pointBudget)) /
                                                         std::log(static_cast<double>(n)));
            throw resource_error("generateAttractor: point budget exceeded; try depth <= " +
                                 std::to_string(suggested));
        }
    }
    const std::size_t m = spec.ambientDim;
    std::vector<double> seed(m);
    for (std::size_t d = 0; d < m; ++d)
        seed[d] = spec.maps[0].translation[d] / (1.0 - spec.maps[0].ratio);

    std::vector<double> current = seed;        // points at the current level, row-major
    std::vector<double> next;
    for (unsigned level = 0; level < depth; ++level) {
        next.clear();
        next.reserve(current.size() * n);
        // outer map index varies slowest: lexicographic in the composition sequence
        for (std::size_t j = 0; j < n; ++j) {
            const auto& map = spec.maps[j];
            for (std::size_t i = 0; i + m <= current.size(); i += m)
                for (std::size_t d = 0; d < m; ++d)
                    next.push_back(map.ratio * current[i + d] + map.translation[d]);
        }
        current.swap(next);
    }
    CloudMeta meta;
    meta.source = "ifs-attractor";
    meta.depth = static_cast<int>(depth);
    meta.resolution = spec.diameterBound() * std::pow(spec.maxRatio(), static_cast<double>(depth));
    return PointCloud(m, std::move(current), std::move(meta));
}

/// Random-orbit sampler: uniform map choice with a 100-step burn-in.
/// Sampled points lie essentially on the attractor, but coverage of the whole
/// attractor is statistical, not guaranteed; resolution records the burn-in
/// contraction bound only.
inline PointCloud chaosGame(const IfsSpec& spec, std::size_t count, std::uint64_t seed) {
    spec.validate();
    if (count == 0) throw domain_error("chaosGame: count must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, spec.maps.size() - 1);
    const std::size_t m = spec.ambientDim;
    std::vector<double> p(m, 0.0);
    auto step = [&] {
        const auto& map = spec.maps[pick(rng)];
        for (std::size_t d = 0; d < m; ++d) p[d] = map.ratio * p[d] + map.translation[d];
    };
    for (int burn = 0; burn < 100; ++burn) step();
    std::vector<double> coords;
    coords.reserve(count * m);
    for (std::size_t i = 0; i < count; ++i) {
        step();
        coords.insert(coords.end(), p.begin(), p.end());
    }
    CloudMeta meta;
    meta.source = "ifs-chaos-game";
    meta.resolution = spec.diameterBound() * std::pow(spec.maxRatio(), 100.0);
    return PointCloud(m, std::move(coords), std::move(meta));
}

/// The Cantor IFS {x/3, x/3 + 2/3} on the line.
inline IfsSpec cantorIfs() {
    IfsSpec s;
    s.ambientDim = 1;
    s.maps = {{1.0 / 3.0, {0.0}}, {1.0 / 3.0, {2.0 / 3.0}}};
    s.openSetDeclared = true;
    return s;
}

/// The planar four-map IFS with ratio 1/4 whose attractor is a totally
/// disconnected set of box dimension 1 in the unit square.
inline IfsSpec setFIfs() {
    IfsSpec s;
    s.ambientDim = 2;
    s.maps = {{0.25, {0.0, 0.0}},
              {0.25, {0.75, 0.0}},
              {0.25, {0.75, 0.75}},
              {0.25, {0.0, 0.75}}};
    s.openSetDeclared = true;
    return s;
}

}  // namespace fraczeta
