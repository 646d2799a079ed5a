#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "fraczeta/common.hpp"
#include "fraczeta/pointcloud.hpp"
#include "fraczeta/strings.hpp"

namespace fraczeta {

enum class BoxCountVariant { meshCount, packing, diamCover, ballCover, cubeCover };

/// Box count at one scale. `count` is exact for meshCount, a greedy maximal
/// packing (a lower bound within the standard doubling factor of the maximum
/// packing) for packing, and the constructive upper bound for the cover
/// variants, which additionally carry the comparison bracket [lower, upper].
struct BoxCountResult {
    double count = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool exact = false;
};

namespace detail {

inline std::vector<std::int64_t> quantize(std::span<const double> p, double x) {
    std::vector<std::int64_t> key(p.size());
    for (std::size_t d = 0; d < p.size(); ++d) {
        const double q = p[d] * x;
        // snap coordinates that sit a rounding error below a cell boundary,
        // so points on exact boundaries (e.g. interval endpoints at multiples
        // of the cell side) are not split into a spurious extra cell
        key[d] = static_cast<std::int64_t>(std::floor(q + 1e-9 * (std::abs(q) + 1.0)));
    }
    return key;
}

}  // namespace detail

/// Number of grid cells of side 1/x (grid anchored at the origin, cells
/// half-open [k/x, (k+1)/x)) containing at least one point. Exact.
inline std::size_t meshCount(const PointCloud& cloud, double x) {
    if (!(x > 0.0)) throw domain_error("meshCount: x must be positive");
    std::set<std::vector<std::int64_t>> cells;
    for (std::size_t i = 0; i < cloud.size(); ++i)
        cells.insert(detail::quantize(cloud.point(i), x));
    return cells.size();
}

/// Greedy maximal packing with balls of radius 1/x: points in canonical
/// (input) order, accepted when at least 2/x from every accepted point.
/// A lower bound for the maximum packing number, sufficient for
/// log-asymptotics. Accelerated by hashing accepted points on a 2/x grid.
inline std::size_t packingCount(const PointCloud& cloud, double x) {
    if (!(x > 0.0)) throw domain_error("packingCount: x must be positive");
    const double minDist = 2.0 / x;
    const double minDist2 = minDist * minDist;
    const std::size_t m = cloud.dim();
    std::map<std::vector<std::int64_t>, std::vector<std::size_t>> grid;
    std::size_t accepted = 0;

    std::vector<std::int64_t> nb(m);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto p = cloud.point(i);
        const auto cell = detail::quantize(p, 1.0 / minDist);
        bool ok = true;
        // neighbors within +-1 cell per axis cover all points closer than 2/x
        std::vector<int> offs(m, -1);
        while (ok) {
            for (std::size_t d = 0; d < m; ++d) nb[d] = cell[d] + offs[d];
            if (auto it = grid.find(nb); it != grid.end()) {
                for (std::size_t j : it->second) {
                    const auto q = cloud.point(j);
                    double d2 = 0.0;
                    for (std::size_t d = 0; d < m; ++d) d2 += (p[d] - q[d]) * (p[d] - q[d]);
                    if (d2 < minDist2 * (1.0 - 1e-12)) { ok = false; break; }
                }
            }
            // odometer over {-1,0,1}^m
            std::size_t d = 0;
            while (d < m && ++offs[d] > 1) offs[d++] = -1;
            if (d == m) break;
        }
        if (ok) {
            grid[cell].push_back(i);
            ++accepted;
        }
    }
    return accepted;
}

/// Box count under the requested variant; see BoxCountResult for semantics.
/// Cover-variant brackets use standard mesh comparison constants.
inline BoxCountResult boxCount(const PointCloud& cloud, double x, BoxCountVariant variant) {
    if (!(x > 0.0)) throw domain_error("boxCount: x must be positive");
    const double m = static_cast<double>(cloud.dim());
    BoxCountResult r;
    switch (variant) {
        case BoxCountVariant::meshCount:
            r.count = r.lower = r.upper = static_cast<double>(meshCount(cloud, x));
            r.exact = true;
            return r;
        case BoxCountVariant::packing:
            r.count = r.lower = static_cast<double>(packingCount(cloud, x));
            r.upper = r.count * std::pow(2.0, m);  // doubling bound vs maximum packing
            return r;
        case BoxCountVariant::cubeCover: {
            const double mesh = static_cast<double>(meshCount(cloud, x));
            r.lower = std::ceil(mesh / std::pow(2.0, m));
            r.upper = r.count = mesh;
            return r;
        }
        case BoxCountVariant::diamCover: {
            const double mesh = static_cast<double>(meshCount(cloud, x));
            r.lower = std::ceil(mesh / std::pow(2.0, m));
            r.upper = r.count = static_cast<double>(meshCount(cloud, x * std::sqrt(m)));
            return r;
        }
        case BoxCountVariant::ballCover: {
            const double mesh = static_cast<double>(meshCount(cloud, x));
            r.lower = std::ceil(mesh / std::pow(3.0, m));
            r.upper = r.count = static_cast<double>(meshCount(cloud, x * std::sqrt(m) / 2.0));
            return r;
        }
    }
    throw domain_error("boxCount: unknown variant");
}

/// Exact minimum number of closed balls of radius 1/x covering the cloud,
/// by branch and bound over candidate balls (centers determined by single
/// points, pairs, and in the plane triples). Small instances only.
inline std::size_t exactBallCover(const PointCloud& cloud, double x) {
    if (cloud.size() > 24) throw resource_error("exactBallCover: at most 24 points");
    if (cloud.dim() > 2) throw unsupported_error("exactBallCover: ambient dimension must be <= 2");
    const double rho = 1.0 / x;
    const std::size_t n = cloud.size();
    const std::size_t mdim = cloud.dim();

    auto coverMask = [&](const std::vector<double>& c) {
        std::uint32_t mask = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double d2 = 0.0;
            for (std::size_t d = 0; d < mdim; ++d) d2 += (cloud.point(i)[d] - c[d]) * (cloud.point(i)[d] - c[d]);
            if (d2 <= rho * rho * (1.0 + 1e-12)) mask |= 1u << i;
        }
        return mask;
    };

    std::vector<std::uint32_t> candidates;
    std::vector<double> c(mdim);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < mdim; ++d) c[d] = cloud.point(i)[d];
        candidates.push_back(coverMask(c));
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t d = 0; d < mdim; ++d) c[d] = 0.5 * (cloud.point(i)[d] + cloud.point(j)[d]);
            candidates.push_back(coverMask(c));
            if (mdim == 2) {
                for (std::size_t k = j + 1; k < n; ++k) {
                    // circumcenter of (i, j, k)
                    const auto a = cloud.point(i), b = cloud.point(j), p = cloud.point(k);
                    const double dd = 2.0 * (a[0] * (b[1] - p[1]) + b[0] * (p[1] - a[1]) + p[0] * (a[1] - b[1]));
                    if (std::abs(dd) < 1e-300) continue;
                    const double a2 = a[0] * a[0] + a[1] * a[1];
                    const double b2 = b[0] * b[0] + b[1] * b[1];
                    const double p2 = p[0] * p[0] + p[1] * p[1];
                    c[0] = (a2 * (b[1] - p[1]) + b2 * (p[1] - a[1]) + p2 * (a[1] - b[1])) / dd;
                    c[1] = (a2 * (p[0] - b[0]) + b2 * (a[0] - p[0]) + p2 * (b[0] - a[0])) / dd;
                    candidates.push_back(coverMask(c));
                }
            }
        }
    }
    // keep maximal masks only
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    std::vector<std::uint32_t> maximal;
    for (auto msk : candidates) {
        bool dominated = false;
        for (auto other : candidates)
            if (other != msk && (other & msk) == msk) { dominated = true; break; }
        if (!dominated && msk != 0) maximal.push_back(msk);
    }

    const std::uint32_t full = n == 32 ? ~0u : (1u << n) - 1;
    std::size_t best = n;  // one ball per point always works
    std::function<void(std::uint32_t, std::size_t)> dfs = [&](std::uint32_t covered, std::size_t used) {
        if (covered == full) { best = std::min(best, used); return; }
        if (used + 1 >= best) return;
        // branch on the lowest uncovered point
        std::uint32_t uncovered = full & ~covered;
        const int pt = std::countr_zero(uncovered);
        for (auto msk : maximal)
            if (msk & (1u << pt)) dfs(covered | msk, used + 1);
    };
    dfs(0, 0);
    return best;
}

/// Exact minimum cover of a 1-D cloud by sets of diameter 1/x (intervals);
/// the left-to-right greedy sweep is optimal on the line.
inline std::size_t exactDiamCover1d(const PointCloud& cloud, double x) {
    const auto pts = cloud.sorted1d();
    const double len = 1.0 / x;
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < pts.size()) {
        const double right = pts[i] + len;
        ++count;
        while (i < pts.size() && pts[i] <= right * (1.0 + 1e-15)) ++i;
    }
    return count;
}

struct DimensionEstimate {
    double upper = 0.0;
    double lower = 0.0;
    std::vector<double> windowSlopes;
    std::vector<int> usedK;
    std::vector<int> refusedK;  // scales finer than the cloud resolution
};

struct KRange {
    int kMin = 1;
    int kMax = 8;
};

/// Box dimension estimates from counts along the geometric scale sequence
/// x = lambda^k. Upper/lower estimates are the max/min regression slope over
/// two-decade windows in the trailing 60% of the log-log data, clamped to
/// [0, m]. The window is long relative to the log-periodic oscillations of
/// lattice self-similar sets, which keeps the estimate stable under a change
/// of scale base lambda.
inline DimensionEstimate dimensionEstimate(const PointCloud& cloud, double lambda, KRange kRange,
                                           BoxCountVariant variant = BoxCountVariant::meshCount) {
    if (!(lambda > 1.0)) throw domain_error("dimensionEstimate: lambda must exceed 1");
    if (kRange.kMax - kRange.kMin + 1 < 3)
        throw domain_error("dimensionEstimate: kRange must span at least 3 values");
    const double delta = cloud.meta().resolution;
    DimensionEstimate est;
    std::vector<double> lx, ly;
    for (int k = kRange.kMin; k <= kRange.kMax; ++k) {
        const double x = std::pow(lambda, k);
        if (delta > 0.0 && 1.0 / x < delta) {
            est.refusedK.push_back(k);
            continue;
        }
        const double n = boxCount(cloud, x, variant).count;
        if (n <= 0.0) continue;
        est.usedK.push_back(k);
        lx.push_back(static_cast<double>(k) * std::log(lambda));
        ly.push_back(std::log(n));
    }
    if (lx.size() < 3)
        throw insufficient_data_error("dimensionEstimate: fewer than 3 usable scales");
    const auto ws = windowedSlopes(lx, ly, 2.0 * std::log(10.0), 0.6);
    const double m = static_cast<double>(cloud.dim());
    est.upper = clamp01m(ws.maxSlope, m);
    est.lower = clamp01m(ws.minSlope, m);
    est.windowSlopes = ws.slopes;
    return est;
}

/// Sampled box-counting curve: pairs (x, N_B(A, x)), nondecreasing in x.
struct BoxCountCurve {
    BoxCountVariant variant = BoxCountVariant::meshCount;
    std::vector<std::pair<double, double>> samples;

    void validate() const {
        if (samples.size() < 2) throw data_error("BoxCountCurve: need at least 2 samples");
        for (std::size_t i = 1; i < samples.size(); ++i) {
            if (!(samples[i].first > samples[i - 1].first))
                throw data_error("BoxCountCurve: sample abscissae must increase");
            if (samples[i].second < samples[i - 1].second)
                throw data_error("BoxCountCurve: counts decrease; not a box-counting curve");
        }
    }
};

/// One jump of a counting function: the value M holds on (previous jump, x],
/// so x is the sup of the level set at M.
struct CountingJump {
    double x = 0.0;  // jump location (sup of the level set)
    double level = 0.0;  // count M on the interval ending at x
};

/// Detect an exact geometric block tail in a finite list of scale entries.
/// Tries periods 1..maxPeriod; requires at least `minBlocks` full repeating
/// blocks with scale ratios matching to 1e-9 relative and multiplicity ratios
/// an exact integer.
inline std::optional<GeometricTail> detectGeometricTail(const std::vector<ScaleEntry>& entries,
                                                        std::size_t maxPeriod = 4,
                                                        std::size_t minBlocks = 3) {
    for (std::size_t p = 1; p <= maxPeriod; ++p) {
        if (entries.size() < p * (minBlocks + 1)) continue;
        const double r0 = entries[entries.size() - 1].scale / entries[entries.size() - 1 - p].scale;
        const double g0 = entries[entries.size() - 1].mult / entries[entries.size() - 1 - p].mult;
        if (!(r0 > 0.0 && r0 < 1.0) || g0 < 1.0) continue;
        const double gInt = std::round(g0);
        if (std::abs(g0 - gInt) > 1e-9 * std::max(1.0, g0)) continue;
        // scan backward for the first (1-based) index violating the recurrence
        std::size_t idx = entries.size();
        while (idx > p) {
            const auto& cur = entries[idx - 1];
            const auto& prev = entries[idx - 1 - p];
            if (std::abs(cur.scale - r0 * prev.scale) > 1e-9 * prev.scale * r0 ||
                std::abs(cur.mult - gInt * prev.mult) > 1e-9 * gInt * prev.mult)
                break;
            --idx;
        }
        // recurrence holds for all indices >= idx + 1, so the block heads
        // start p entries earlier
        if (idx + 1 <= p) continue;
        const std::size_t onset = idx + 1 - p;
        if (entries.size() - (onset - 1) < p * (minBlocks + 1)) continue;  // too few confirming blocks
        GeometricTail t;
        t.ratio = r0;
        t.growth = gInt;
        t.period = p;
        t.onset = onset;
        return t;
    }
    return std::nullopt;
}

/// Build the box-counting fractal string from an exact jump list
/// (x_n, M_n), n = 1..: scales are reciprocals of jump locations,
/// multiplicities m_1 = M_2 and m_n = M_{n+1} - M_n.
inline FractalString extractBoxCountingString(const std::vector<CountingJump>& jumps,
                                              bool detectTail = true) {
    if (jumps.size() < 2) throw data_error("extractBoxCountingString: need at least 2 jumps");
    for (std::size_t i = 1; i < jumps.size(); ++i)
        if (!(jumps[i].x > jumps[i - 1].x) || !(jumps[i].level > jumps[i - 1].level))
            throw data_error("extractBoxCountingString: jumps must strictly increase");
    if (std::abs(jumps[0].level - 1.0) > 1e-9)
        throw data_error("extractBoxCountingString: counting function must start at 1");
    std::vector<ScaleEntry> entries;
    entries.reserve(jumps.size() - 1);
    for (std::size_t n = 0; n + 1 < jumps.size(); ++n) {
        const double mult = n == 0 ? jumps[1].level : jumps[n + 1].level - jumps[n].level;
        entries.push_back({1.0 / jumps[n].x, mult});
    }
    std::optional<GeometricTail> tail;
    if (detectTail) tail = detectGeometricTail(entries);
    if (tail) {
        // regularize: jump locations found by bisection carry ~1e-9 relative
        // error, so snap the repeating blocks onto the detected recurrence
        for (std::size_t idx = tail->onset - 1 + tail->period; idx < entries.size(); ++idx) {
            entries[idx].scale = tail->ratio * entries[idx - tail->period].scale;
            entries[idx].mult = tail->growth * entries[idx - tail->period].mult;
        }
    }
    return FractalString(std::move(entries), tail);
}

/// Locate the jumps of an analytic (callable) counting function on (0, xMax]
/// by geometric marching plus bisection to relative width 1e-9, then extract
/// the string. The curve must be nondecreasing with N -> 1 as x -> 0+.
inline FractalString extractBoxCountingString(const std::function<double(double)>& count,
                                              double xMax, bool detectTail = true) {
    if (!(xMax > 0.0)) throw domain_error("extractBoxCountingString: xMax must be positive");
    // march down to the count-1 plateau
    double x0 = xMax;
    while (count(x0) > 1.0 + 1e-9) x0 /= 2.0;
    if (count(xMax) <= 1.0 + 1e-9)
        throw data_error("extractBoxCountingString: curve constant at 1; set appears finite/degenerate");

    std::vector<CountingJump> jumps;
    double lo = x0, nLo = count(lo);
    while (lo < xMax) {
        double hi = lo, nHi = nLo;
        while (hi < xMax && nHi <= nLo + 1e-9) {
            hi = std::min(hi * 1.05, xMax);
            nHi = count(hi);
        }
        if (nHi <= nLo + 1e-9) break;  // no further jump before xMax
        double a = lo, b = hi;
        while ((b - a) > 1e-9 * b) {
            const double mid = 0.5 * (a + b);
            if (count(mid) <= nLo + 1e-9) a = mid; else b = mid;
        }
        jumps.push_back({0.5 * (a + b), nLo});
        lo = b;
        nLo = count(b);
    }
    jumps.push_back({xMax, nLo});  // sentinel supplies the final level value
    if (jumps.size() < 2) throw data_error("extractBoxCountingString: no jumps found");
    return extractBoxCountingString(jumps, detectTail);
}

/// Extract from a sampled curve: each jump is placed at the last sample that
/// still carries the lower level (the observable sup of the level set).
inline FractalString extractBoxCountingString(const BoxCountCurve& curve, bool detectTail = false) {
    curve.validate();
    const auto& s = curve.samples;
    if (std::abs(s.front().second - 1.0) > 1e-9)
        throw data_error("extractBoxCountingString: sampled curve must start at count 1");
    std::vector<CountingJump> jumps;
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (s[i + 1].second > s[i].second + 1e-9) jumps.push_back({s[i].first, s[i].second});
    if (jumps.empty())
        throw data_error("extractBoxCountingString: curve constant over the whole range (finite set?)");
    jumps.push_back({s.back().first, s.back().second});
    return extractBoxCountingString(jumps, detectTail);
}

/// Tessellation fractal string: scales lambda^n with multiplicities equal to
/// the occupied-cell counts of the n-th cube tessellation (mesh anchored at
/// the origin). Scales finer than the cloud resolution are refused.
inline FractalString tessellationString(const PointCloud& cloud, double lambda, int nMin, int nMax) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw domain_error("tessellationString: lambda must lie in (0,1)");
    if (nMax < nMin) throw domain_error("tessellationString: empty level range");
    const double delta = cloud.meta().resolution;
    std::vector<ScaleEntry> entries;
    for (int n = nMin; n <= nMax; ++n) {
        const double side = std::pow(lambda, n);
        if (delta > 0.0 && side < delta)
            throw domain_error("tessellationString: level " + std::to_string(n) +
                               " is finer than the cloud resolution");
        entries.push_back({side, static_cast<double>(meshCount(cloud, 1.0 / side))});
    }
    auto tail = detectGeometricTail(entries, 1);
    return FractalString(std::move(entries), tail);
}

/// Dimension of a tessellation string: exact log(g)/log(1/r) when a tail was
/// detected, otherwise the trailing-window limsup of log m_n / log(1/l_n).
inline double tessellationDimension(const FractalString& s) {
    if (s.tail())
        return std::log(s.tail()->growth) / std::log(1.0 / s.tail()->ratio);
    const auto& entries = s.storedScales();
    if (entries.size() < 3) throw insufficient_data_error("tessellationDimension: need >= 3 levels");
    double best = 0.0;
    for (std::size_t i = entries.size() / 2; i < entries.size(); ++i) {
        const double q = std::log(entries[i].mult) / std::log(1.0 / entries[i].scale);
        best = std::max(best, q);
    }
    return best;
}

}  // namespace fraczeta
