#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "fraczeta/common.hpp"
#include "fraczeta/pointcloud.hpp"
#include "fraczeta/strings.hpp"

namespace fraczeta {

/// eps -> vol_m(A_eps), either as strictly increasing samples (log-log
/// interpolated) or as an exact callable over a declared eps range.
class TubeFunction {
public:
    TubeFunction(std::size_t m, std::vector<std::pair<double, double>> samples, bool exact = false)
        : m_(m), samples_(std::move(samples)), exact_(exact) {
        if (m_ == 0) throw data_error("TubeFunction: ambient dimension must be positive");
        if (samples_.size() < 2) throw data_error("TubeFunction: need at least 2 samples");
        double prevEps = 0.0, prevVol = 0.0;
        for (const auto& [eps, vol] : samples_) {
            if (!(eps > prevEps)) throw data_error("TubeFunction: eps must be strictly increasing");
            if (!(vol >= 0.0) || !std::isfinite(vol))
                throw data_error("TubeFunction: volumes must be finite and nonnegative");
            if (vol < prevVol * (1.0 - 1e-12))
                throw data_error("TubeFunction: volume must be nondecreasing in eps");
            prevEps = eps;
            prevVol = vol;
        }
        epsMin_ = samples_.front().first;
        epsMax_ = samples_.back().first;
    }

    TubeFunction(std::size_t m, std::function<double(double)> fn, double epsMin, double epsMax)
        : m_(m), fn_(std::move(fn)), exact_(true), epsMin_(epsMin), epsMax_(epsMax) {
        if (m_ == 0) throw data_error("TubeFunction: ambient dimension must be positive");
        if (!fn_) throw data_error("TubeFunction: null callable");
        if (!(epsMin > 0.0 && epsMax > epsMin)) throw data_error("TubeFunction: need 0 < epsMin < epsMax");
    }

    double operator()(double eps) const {
        if (fn_) {
            // callable mode: the range declares where samples are dense, but
            // the exact formula extends to any positive eps (quadrature needs it)
            if (!(eps > 0.0)) throw domain_error("TubeFunction: eps must be positive");
            return fn_(eps);
        }
        if (!(eps >= epsMin_ * (1.0 - 1e-12) && eps <= epsMax_ * (1.0 + 1e-12)))
            throw domain_error("TubeFunction: eps outside the represented range");
        // log-log linear interpolation between bracketing samples
        auto it = std::lower_bound(samples_.begin(), samples_.end(), eps,
                                   [](const auto& s, double e) { return s.first < e; });
        if (it == samples_.begin()) return samples_.front().second;
        if (it == samples_.end()) return samples_.back().second;
        const auto& [e1, v1] = *it;
        const auto& [e0, v0] = *(it - 1);
        if (v0 <= 0.0 || v1 <= 0.0) {  // linear fallback when a volume is zero
            const double t = (eps - e0) / (e1 - e0);
            return v0 + t * (v1 - v0);
        }
        const double t = std::log(eps / e0) / std::log(e1 / e0);
        return std::exp(std::log(v0) + t * std::log(v1 / v0));
    }

    std::size_t ambientDim() const { return m_; }
    bool exact() const { return exact_; }
    double epsMin() const { return epsMin_; }
    double epsMax() const { return epsMax_; }
    const std::vector<std::pair<double, double>>& samples() const { return samples_; }

private:
    std::size_t m_;
    std::vector<std::pair<double, double>> samples_;
    std::function<double(double)> fn_;
    bool exact_ = false;
    double epsMin_ = 0.0, epsMax_ = 0.0;
};

struct TubeVolumeResult {
    double volume = 0.0;
    double errorBound = 0.0;  // 0 in exact mode
    bool exact = false;
};

namespace detail {

/// 1-D squared distance transform (lower envelope of parabolas).
inline void edt1d(const std::vector<double>& f, std::vector<double>& d, std::size_t n) {
    static constexpr double kInf = 1e30;
    std::vector<int> v(n);
    std::vector<double> z(n + 1);
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (std::size_t q = 1; q < n; ++q) {
        if (f[q] >= kInf && f[v[k]] >= kInf) continue;
        double s;
        while (true) {
            const double fq = f[q], fv = f[v[k]];
            s = ((fq + q * q) - (fv + static_cast<double>(v[k]) * v[k])) /
                (2.0 * q - 2.0 * v[k]);
            if (s <= z[k]) { --k; continue; }
            break;
        }
        ++k;
        v[k] = static_cast<int>(q);
        z[k] = s;
        z[k + 1] = kInf;
    }
    k = 0;
    d.resize(n);
    for (std::size_t q = 0; q < n; ++q) {
        while (z[k + 1] < static_cast<double>(q)) ++k;
        const double dq = static_cast<double>(q) - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

}  // namespace detail

/// vol_m({x : d(x, cloud) < eps}). Exact interval merge for m = 1; for m = 2 a
/// rasterized distance transform of pitch h (default eps/50) with a reported
/// error bound of h * (boundary-cell perimeter estimate).
inline TubeVolumeResult tubeVolume(const PointCloud& cloud, double eps, double pitch = 0.0) {
    if (!(eps > 0.0)) throw domain_error("tubeVolume: eps must be positive");
    if (cloud.dim() == 1) {
        const auto pts = cloud.sorted1d();
        double total = 0.0;
        double start = pts.front() - eps, end = pts.front() + eps;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            if (pts[i] - eps <= end) {
                end = pts[i] + eps;
            } else {
                total += end - start;
                start = pts[i] - eps;
                end = pts[i] + eps;
            }
        }
        total += end - start;
        return {total, 0.0, true};
    }
    if (cloud.dim() != 2)
        throw unsupported_error("tubeVolume: only ambient dimensions 1 and 2 are supported");

    const double h = pitch > 0.0 ? pitch : eps / 50.0;
    auto [lo, hi] = cloud.boundingBox();
    const double x0 = lo[0] - eps - 2.0 * h, y0 = lo[1] - eps - 2.0 * h;
    const auto w = static_cast<std::size_t>(std::ceil((hi[0] + eps + 2.0 * h - x0) / h)) + 1;
    const auto ht = static_cast<std::size_t>(std::ceil((hi[1] + eps + 2.0 * h - y0) / h)) + 1;
    if (w * ht > 40'000'000)
        throw resource_error("tubeVolume: raster would exceed 4e7 cells; increase the pitch");

    static constexpr double kInf = 1e30;
    std::vector<double> grid(w * ht, kInf);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        auto p = cloud.point(i);
        const auto cx = static_cast<std::size_t>(std::llround((p[0] - x0) / h));
        const auto cy = static_cast<std::size_t>(std::llround((p[1] - y0) / h));
        grid[cy * w + cx] = 0.0;
    }
    // squared EDT: rows, then columns (distances in cell units)
    std::vector<double> line, out;
    for (std::size_t y = 0; y < ht; ++y) {
        line.assign(grid.begin() + y * w, grid.begin() + (y + 1) * w);
        detail::edt1d(line, out, w);
        std::copy(out.begin(), out.end(), grid.begin() + y * w);
    }
    std::vector<double> col(ht);
    for (std::size_t x = 0; x < w; ++x) {
        for (std::size_t y = 0; y < ht; ++y) col[y] = grid[y * w + x];
        detail::edt1d(col, out, ht);
        for (std::size_t y = 0; y < ht; ++y) grid[y * w + x] = out[y];
    }
    const double rim = eps / h;  // rim radius in cell units
    std::size_t inside = 0, boundary = 0;
    for (double d2 : grid) {
        if (d2 < rim * rim) ++inside;
        if (std::abs(std::sqrt(d2) - rim) <= 1.5) ++boundary;  // within 1.5 cells of the rim
    }
    TubeVolumeResult res;
    res.volume = static_cast<double>(inside) * h * h;
    res.errorBound = static_cast<double>(boundary) * h * h;
    res.exact = false;
    return res;
}

/// Exact eps-callable tube function of a 1-D cloud. The sorted gap lengths
/// are precomputed once, so each evaluation is a binary search:
/// vol(eps) = 2 eps + sum_gaps min(gap, 2 eps), identical to the interval merge.
inline TubeFunction tubeFunctionFromCloud(const PointCloud& cloud, double epsMin, double epsMax) {
    if (cloud.dim() != 1)
        throw unsupported_error("tubeFunctionFromCloud: exact callable mode needs a 1-D cloud");
    const auto pts = cloud.sorted1d();
    auto gaps = std::make_shared<std::vector<double>>();
    gaps->reserve(pts.size());
    for (std::size_t i = 1; i < pts.size(); ++i) gaps->push_back(pts[i] - pts[i - 1]);
    std::sort(gaps->begin(), gaps->end());
    auto prefix = std::make_shared<std::vector<double>>(gaps->size() + 1, 0.0);
    for (std::size_t i = 0; i < gaps->size(); ++i) (*prefix)[i + 1] = (*prefix)[i] + (*gaps)[i];
    return TubeFunction(
        1,
        [gaps, prefix](double e) {
            const auto idx = static_cast<std::size_t>(
                std::lower_bound(gaps->begin(), gaps->end(), 2.0 * e) - gaps->begin());
            return 2.0 * e + (*prefix)[idx] + 2.0 * e * static_cast<double>(gaps->size() - idx);
        },
        epsMin, epsMax);
}

/// Inner eps-neighborhood volume of the boundary of a disjoint realization of
/// the string: exactly sum_j min(l_j, 2 eps), geometric tails in closed form.
inline double innerTubeVolume(const FractalString& s, double eps) {
    if (!(eps > 0.0)) throw domain_error("innerTubeVolume: eps must be positive");
    const auto& scales = s.storedScales();
    const std::size_t prefixEnd = s.tail() ? s.tail()->onset - 1 : scales.size();
    double total = 0.0;
    for (std::size_t i = 0; i < prefixEnd; ++i)
        total += scales[i].mult * std::min(scales[i].scale, 2.0 * eps);
    if (!s.tail()) return total;

    const auto& t = *s.tail();
    if (!(t.growth * t.ratio < 1.0))
        throw data_error("innerTubeVolume: total length diverges; string is not ordinary");
    const double logInvR = std::log(1.0 / t.ratio);
    for (std::size_t i = 0; i < t.period; ++i) {
        const ScaleEntry& head = scales[t.onset - 1 + i];
        // smallest k with head.scale * r^k < 2 eps
        double K = 0.0;
        if (head.scale >= 2.0 * eps)
            K = std::floor(std::log(head.scale / (2.0 * eps)) / logInvR + 1e-12) + 1.0;
        const double g = t.growth;
        const double saturated = std::abs(g - 1.0) < 1e-15 ? K : (std::pow(g, K) - 1.0) / (g - 1.0);
        total += head.mult * 2.0 * eps * saturated;
        total += head.mult * head.scale * std::pow(g * t.ratio, K) / (1.0 - g * t.ratio);
    }
    return total;
}

struct MinkowskiEstimate {
    double upperContent = 0.0;
    double lowerContent = 0.0;
    double dimUpper = 0.0;
    double dimLower = 0.0;
    std::vector<double> windowSlopes;
};

/// Upper/lower r-dimensional Minkowski content (max/min of vol/eps^{m-r} over
/// the trailing small-eps decade) and Minkowski dimension bounds from
/// windowed log-log regression (vol ~ eps^{m-D}), clamped to [0, m].
inline MinkowskiEstimate minkowskiEstimate(const TubeFunction& tf, double r,
                                           const GeometricGrid& epsGrid) {
    const auto m = static_cast<double>(tf.ambientDim());
    if (!(r >= 0.0 && r <= m)) throw domain_error("minkowskiEstimate: r must lie in [0, m]");
    if (epsGrid.decades() < 2.0)
        throw insufficient_data_error("minkowskiEstimate: grid must cover >= 2 decades");

    auto epsValues = epsGrid.values();  // ascending in eps
    std::vector<double> u, lv;          // u = log(1/eps) ascending => eps descending
    double upper = -std::numeric_limits<double>::infinity();
    double lower = std::numeric_limits<double>::infinity();
    const double decadeEnd = epsGrid.minValue * 10.0;
    for (auto it = epsValues.rbegin(); it != epsValues.rend(); ++it) {
        const double eps = *it;
        const double vol = tf(eps);
        if (vol > 0.0) {
            u.push_back(std::log(1.0 / eps));
            lv.push_back(std::log(vol));
        }
        if (eps <= decadeEnd * (1.0 + 1e-12)) {
            const double c = vol / std::pow(eps, m - r);
            upper = std::max(upper, c);
            lower = std::min(lower, c);
        }
    }
    if (u.size() < 4) throw insufficient_data_error("minkowskiEstimate: too few usable grid points");
    const auto ws = windowedSlopes(u, lv, std::log(10.0));
    MinkowskiEstimate est;
    est.upperContent = upper;
    est.lowerContent = lower;
    est.dimUpper = clamp01m(m + ws.maxSlope, m);
    est.dimLower = clamp01m(m + ws.minSlope, m);
    est.windowSlopes = ws.slopes;
    return est;
}

namespace detail {

/// |trapezoid of h(tau) e^{-2 pi i f tau}| over [a, b] with n nodes.
inline std::complex<double> windowedFourier(const std::function<double(double)>& h, double a,
                                            double b, double f, std::size_t n) {
    std::complex<double> acc = 0.0;
    const double dt = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double tau = a + dt * static_cast<double>(i);
        const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        acc += w * h(tau) * std::exp(std::complex<double>(0.0, -2.0 * M_PI * f * tau));
    }
    return acc * dt;
}

/// Golden-section maximization of |F| over [fLo, fHi].
inline double refinePeak(const std::function<double(double)>& mag, double fLo, double fHi) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = fLo, b = fHi;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = mag(c), fd = mag(d);
    for (int it = 0; it < 80; ++it) {
        if (fc > fd) { b = d; d = c; fd = fc; c = b - phi * (b - a); fc = mag(c); }
        else         { a = c; c = d; fc = fd; d = a + phi * (b - a); fd = mag(d); }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

struct MeasurabilityProbe {
    bool measurableConsistent = false;
    double content = 0.0;      // mean of g when measurable-consistent
    double oscillation = 0.0;  // (max - min)/mean of g over the trailing half
    double period = 0.0;       // dominant log-period T when log-periodic
    double gMin = 0.0, gMax = 0.0;
    double mean = 0.0;
};

/// Probe for Minkowski measurability: computes g(tau) = vol(e^{-tau})
/// e^{tau(m-D)} on a uniform tau grid over the represented eps range, judges
/// relative oscillation over the trailing (small-eps) half against `tol`, and
/// in the oscillatory case extracts the dominant log-period by Fourier peak.
inline MeasurabilityProbe measurabilityProbe(const TubeFunction& tf, double d, double tol = 0.01,
                                             std::size_t gridPoints = 2048) {
    const auto m = static_cast<double>(tf.ambientDim());
    if (!(d >= 0.0 && d <= m)) throw domain_error("measurabilityProbe: D must lie in [0, m]");
    const double tauMin = std::log(1.0 / tf.epsMax());
    const double tauMax = std::log(1.0 / tf.epsMin());
    auto g = [&](double tau) { return tf(std::exp(-tau)) * std::exp(tau * (m - d)); };

    const double tailStart = 0.5 * (tauMin + tauMax);
    std::vector<double> taus, gv;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, mean = 0.0;
    std::size_t tailCount = 0;
    for (std::size_t i = 0; i < gridPoints; ++i) {
        const double tau = tauMin + (tauMax - tauMin) * static_cast<double>(i) /
                                        static_cast<double>(gridPoints - 1);
        const double v = g(tau);
        taus.push_back(tau);
        gv.push_back(v);
        if (tau >= tailStart) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            mean += v;
            ++tailCount;
        }
    }
    mean /= static_cast<double>(tailCount);

    MeasurabilityProbe probe;
    probe.gMin = lo;
    probe.gMax = hi;
    probe.mean = mean;
    probe.oscillation = (hi - lo) / mean;
    if (probe.oscillation <= tol) {
        probe.measurableConsistent = true;
        probe.content = mean;
        return probe;
    }

    // Fourier peak over the trailing half, detrended by the mean
    auto h = [&](double tau) { return g(tau) - mean; };
    const double span = tauMax - tailStart;
    auto mag = [&](double f) { return std::abs(detail::windowedFourier(h, tailStart, tauMax, f, 2048)); };
    const double fLo = 2.0 / span, fHi = static_cast<double>(gridPoints) / (8.0 * span);
    double best = fLo, bestMag = -1.0;
    const double step = 1.0 / (8.0 * span);
    for (double f = fLo; f <= fHi; f += step) {
        const double v = mag(f);
        if (v > bestMag) { bestMag = v; best = f; }
    }
    const double peakAmp = 2.0 * bestMag / span;  // amplitude of the fitted sinusoid
    if (peakAmp < 0.1 * (hi - lo)) {
        // oscillation without a coherent period: treat as measurable-consistent noise
        probe.measurableConsistent = true;
        probe.content = mean;
        return probe;
    }
    double f = detail::refinePeak(mag, std::max(fLo, best - step), best + step);
    // re-window to an integer number of periods and refine twice more to kill leakage
    for (int pass = 0; pass < 2; ++pass) {
        const double t = 1.0 / f;
        const auto periods = static_cast<double>(std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor((tauMax - tauMin) / t))));
        if (periods < 1.0) throw insufficient_data_error("measurabilityProbe: range shorter than one period");
        const double a = tauMax - periods * t;
        auto magW = [&](double ff) {
            return std::abs(detail::windowedFourier(h, a, tauMax, ff, 4096));
        };
        f = detail::refinePeak(magW, f * 0.97, f * 1.03);
    }
    probe.period = 1.0 / f;
    if ((tauMax - tauMin) / probe.period < 1.0)
        throw insufficient_data_error("measurabilityProbe: range shorter than one fitted period");
    return probe;
}

}  // namespace fraczeta
