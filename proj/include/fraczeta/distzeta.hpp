#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "fraczeta/common.hpp"
#include "fraczeta/pointcloud.hpp"
#include "fraczeta/strings.hpp"
#include "fraczeta/tube.hpp"
#include "fraczeta/zeta.hpp"

namespace fraczeta {

enum class ZetaMethod { exact1d, quadrature, monteCarlo };

struct ZetaSample {
    Complex s;
    Complex value;
    ZetaMethod method = ZetaMethod::exact1d;
    double errorEstimate = 0.0;  // 0 iff exact-1d
    bool divergenceWarning = false;
};

namespace detail {

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
inline const std::pair<std::vector<double>, std::vector<double>>& gaussLegendre20() {
    static const auto rule = [] {
        constexpr int n = 20;
        std::vector<double> x(n), w(n);
        for (int i = 0; i < n; ++i) {
            double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const double dp = n * (t * p1 - p0) / (t * t - 1.0);
                const double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-16) {
                    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
                    break;
                }
            }
            x[i] = t;
        }
        return std::make_pair(x, w);
    }();
    return rule;
}

/// Sorted gap lengths of a 1-D cloud (between consecutive distinct points).
inline std::vector<double> gaps1d(const PointCloud& cloud) {
    const auto pts = cloud.sorted1d();
    std::vector<double> gaps;
    gaps.reserve(pts.size());
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i] - pts[i - 1] > 0.0) gaps.push_back(pts[i] - pts[i - 1]);
    std::sort(gaps.begin(), gaps.end(), std::greater<>());
    return gaps;
}

/// Convergence heuristic for the gap series at real part sigma: bins the
/// gap contributions l^sigma by decades of 1/gap and regresses the log of
/// the per-decade totals. A slope that fails to fall below -0.01 per unit of
/// log(1/l) means the series shows no decay within the resolved range.
/// Deliberately independent of the neighborhood width, so the divergence
/// threshold is exactly invariant under changes of eps.
inline bool gapSeriesDiverges(const std::vector<double>& gaps, double sigma) {
    std::vector<double> binSum;
    double anchor = 0.0;
    bool anchored = false;
    for (double l : gaps) {
        const double u = std::log(1.0 / l);
        if (!anchored) {
            anchor = u;
            anchored = true;
        }
        const auto bin = static_cast<std::size_t>(std::floor((u - anchor) / std::log(10.0)));
        if (bin >= binSum.size()) binSum.resize(bin + 1, 0.0);
        binSum[bin] += std::pow(l, sigma);
    }
    std::vector<double> bx, by;
    for (std::size_t b = 0; b < binSum.size(); ++b) {
        if (binSum[b] <= 0.0) continue;
        bx.push_back(anchor + (static_cast<double>(b) + 0.5) * std::log(10.0));
        by.push_back(std::log(binSum[b]));
    }
    if (bx.size() < 3) return false;  // not enough depth to judge
    return regressionSlope(bx, by, 0, bx.size()) > -0.01;
}

/// Adaptive Gauss-Legendre on [a, b]: bisects until the 20-node value and the
/// two-half value agree within tol (absolute), accumulating the residual
/// disagreement as the quadrature error. Handles integrands with derivative
/// kinks (piecewise-linear tube volumes) that defeat fixed-panel rules.
template <typename F>
Complex adaptiveGL(const F& f, double a, double b, double tol, int depth, double& err) {
    const auto& [nodes, weights] = gaussLegendre20();
    auto gl = [&](double x0, double x1) {
        Complex acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            acc += weights[i] * f(0.5 * (x0 + x1) + 0.5 * (x1 - x0) * nodes[i]);
        return acc * (0.5 * (x1 - x0));
    };
    const Complex whole = gl(a, b);
    const double mid = 0.5 * (a + b);
    const Complex halves = gl(a, mid) + gl(mid, b);
    const double diff = std::abs(halves - whole);
    if (diff <= tol || depth >= 24) {
        err += diff;
        return halves;
    }
    return adaptiveGL(f, a, mid, 0.5 * tol, depth + 1, err) +
           adaptiveGL(f, mid, b, 0.5 * tol, depth + 1, err);
}

/// Uniform-grid nearest-neighbor index for 2-D clouds; distances above
/// `range` are reported as infinity.
class NearestIndex2d {
public:
    NearestIndex2d(const PointCloud& cloud, double range) : cloud_(cloud), h_(range) {
        auto [lo, hi] = cloud.boundingBox();
        x0_ = lo[0];
        y0_ = lo[1];
        nx_ = static_cast<std::size_t>(std::floor((hi[0] - x0_) / h_)) + 1;
        ny_ = static_cast<std::size_t>(std::floor((hi[1] - y0_) / h_)) + 1;
        cells_.resize(nx_ * ny_);
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            auto p = cloud.point(i);
            cells_[cellOf(p[0], p[1])].push_back(i);
        }
    }

    double distance(double x, double y) const {
        const long cx = static_cast<long>(std::floor((x - x0_) / h_));
        const long cy = static_cast<long>(std::floor((y - y0_) / h_));
        double best = std::numeric_limits<double>::infinity();
        for (long ring = 0; ring <= 2; ++ring) {
            if (best < (static_cast<double>(ring) - 1.0) * h_) break;
            for (long dx = -ring; dx <= ring; ++dx)
                for (long dy = -ring; dy <= ring; ++dy) {
                    if (std::max(std::labs(dx), std::labs(dy)) != ring) continue;
                    const long gx = cx + dx, gy = cy + dy;
                    if (gx < 0 || gy < 0 || gx >= static_cast<long>(nx_) || gy >= static_cast<long>(ny_))
                        continue;
                    for (std::size_t idx : cells_[static_cast<std::size_t>(gy) * nx_ + gx]) {
                        auto p = cloud_.point(idx);
                        const double d = std::hypot(p[0] - x, p[1] - y);
                        best = std::min(best, d);
                    }
                }
        }
        return best;
    }

private:
    std::size_t cellOf(double x, double y) const {
        const auto cx = static_cast<std::size_t>(std::floor((x - x0_) / h_));
        const auto cy = static_cast<std::size_t>(std::floor((y - y0_) / h_));
        return std::min(cy, ny_ - 1) * nx_ + std::min(cx, nx_ - 1);
    }

    const PointCloud& cloud_;
    double h_, x0_ = 0.0, y0_ = 0.0;
    std::size_t nx_ = 1, ny_ = 1;
    std::vector<std::vector<std::size_t>> cells_;
};

}  // namespace detail

/// zeta_d(s) = int_{A_eps} d(x, A)^{s-m} dx. Exact gap-wise closed form for
/// m = 1; stratified Monte-Carlo with a spatial index for m = 2
/// (errorEstimate = 3 standard errors).
inline ZetaSample distanceZeta(const PointCloud& cloud, double eps, Complex s,
                               std::size_t mcSamples = 200'000, std::uint64_t seed = 1234) {
    if (!(eps > 0.0)) throw domain_error("distanceZeta: eps must be positive");
    if (std::abs(s) < 1e-14)
        throw domain_error("distanceZeta: s = 0 is a pole of the closed form");
    ZetaSample out;
    out.s = s;
    if (cloud.dim() == 1) {
        const auto gaps = detail::gaps1d(cloud);
        Complex acc = 2.0 * std::exp(s * std::log(eps)) / s;  // the two outer ends
        for (double l : gaps)
            acc += (2.0 / s) * std::exp(s * std::log(std::min(l / 2.0, eps)));
        out.value = acc;
        out.method = ZetaMethod::exact1d;
        out.errorEstimate = 0.0;
        out.divergenceWarning = detail::gapSeriesDiverges(gaps, s.real());
        return out;
    }
    if (cloud.dim() != 2)
        throw unsupported_error("distanceZeta: only ambient dimensions 1 and 2 are supported");

    auto [lo, hi] = cloud.boundingBox();
    const double x0 = lo[0] - eps, y0 = lo[1] - eps;
    const double wx = hi[0] - lo[0] + 2.0 * eps, wy = hi[1] - lo[1] + 2.0 * eps;
    detail::NearestIndex2d index(cloud, eps);

    constexpr std::size_t kStrata = 16;  // kStrata x kStrata grid of strata
    const std::size_t perStratum = std::max<std::size_t>(8, mcSamples / (kStrata * kStrata));
    const double areaStratum = (wx / kStrata) * (wy / kStrata);
    Complex total = 0.0;
    double varianceSum = 0.0;
    for (std::size_t sx = 0; sx < kStrata; ++sx)
        for (std::size_t sy = 0; sy < kStrata; ++sy) {
            std::mt19937_64 rng(seed + sx * kStrata + sy);  // per-stratum stream
            std::uniform_real_distribution<double> ux(x0 + sx * wx / kStrata,
                                                      x0 + (sx + 1) * wx / kStrata);
            std::uniform_real_distribution<double> uy(y0 + sy * wy / kStrata,
                                                      y0 + (sy + 1) * wy / kStrata);
            Complex sum = 0.0;
            double sumSq = 0.0;
            for (std::size_t i = 0; i < perStratum; ++i) {
                const double d = index.distance(ux(rng), uy(rng));
                if (!(d < eps) || d <= 0.0) continue;
                const Complex f = std::exp((s - 2.0) * std::log(d));
                sum += f;
                sumSq += std::norm(f);
            }
            const auto n = static_cast<double>(perStratum);
            const Complex mean = sum / n;
            total += mean * areaStratum;
            const double var = std::max(0.0, sumSq / n - std::norm(mean));
            varianceSum += var / n * areaStratum * areaStratum;
        }
    out.value = total;
    out.method = ZetaMethod::monteCarlo;
    out.errorEstimate = 3.0 * std::sqrt(varianceSum);
    return out;
}

/// Distance zeta of the canonical disjoint-interval realization of a string,
/// through zeta_d(z) = (2^{1-z}/z) zeta_L(z) + 2 eps^z / z, valid for
/// eps >= l_1 / 2 (no gap truncated). With a lattice tail the value extends
/// meromorphically through the rational closed form of zeta_L.
inline Complex distanceZetaStringForm(const FractalString& s, double eps, Complex z) {
    if (!(eps >= s.largestScale() / 2.0))
        throw domain_error("distanceZetaStringForm: need eps >= l_1 / 2");
    if (std::abs(z) < 1e-14)
        throw domain_error("distanceZetaStringForm: z = 0 is a pole");
    Complex zl;
    if (s.tail() && !(z.real() > s.abscissaOfConvergence() + 1e-9))
        zl = latticeClosedForm(s).evaluate(z);
    else
        zl = evalDirichlet(s, z).value;
    const Complex a = std::exp((1.0 - z) * std::log(2.0)) / z;
    const Complex b = 2.0 * std::exp(z * std::log(eps)) / z;
    return a * zl + b;
}

struct QuadSpec {
    double panelLength = 1.0;  // in u = log(1/t)
    std::size_t maxPanels = 400;
    double relTol = 1e-15;
};

/// Tube zeta int_0^eps t^{s-m-1} |A_t| dt via the substitution t = e^{-u}
/// and composite Gauss-Legendre panels on u in [log(1/eps), inf), stopping
/// once the panel tail is provably below relTol of the running value.
/// Sample-backed tube functions are integrated down to their smallest sample
/// and closed with a power-law remainder, reflected in errorEstimate.
inline ZetaSample tubeZeta(const TubeFunction& tf, double eps, Complex s, QuadSpec quad = {}) {
    if (!(eps > 0.0)) throw domain_error("tubeZeta: eps must be positive");
    const auto m = static_cast<double>(tf.ambientDim());
    ZetaSample out;
    out.s = s;
    out.method = ZetaMethod::quadrature;

    const bool sampleBacked = !tf.exact();
    const double uCap = sampleBacked ? std::log(1.0 / tf.epsMin())
                                     : std::numeric_limits<double>::infinity();
    auto integrand = [&](double u) -> Complex {
        return std::exp(-u * (s - m)) * tf(std::exp(-u));
    };
    Complex acc = 0.0;
    double quadError = 0.0;
    double u = std::log(1.0 / eps);
    std::size_t smallPanels = 0;
    std::vector<double> panelMags;
    for (std::size_t panel = 0; panel < quad.maxPanels; ++panel) {
        const double a = u, b = std::min(u + quad.panelLength, uCap);
        if (!(b > a)) break;
        const double panelTol = 1e-14 * (1.0 + std::abs(acc));
        const Complex pHalf = detail::adaptiveGL(integrand, a, b, panelTol, 0, quadError);
        acc += pHalf;
        panelMags.push_back(std::abs(pHalf));
        u = b;
        if (b >= uCap) break;
        if (std::abs(pHalf) < quad.relTol * std::max(1e-300, std::abs(acc))) {
            if (++smallPanels >= 2) break;
        } else {
            smallPanels = 0;
        }
        // stagnating or growing panels signal Re(s) at or below the dimension
        if (panelMags.size() >= 40) {
            const double recent = panelMags.back();
            const double earlier = panelMags[panelMags.size() - 20];
            if (recent > 0.5 * earlier && recent > 1e-12 * std::abs(acc)) {
                if (panelMags.size() >= quad.maxPanels / 2) {
                    out.divergenceWarning = true;
                    break;
                }
            }
        }
    }
    double remainder = 0.0;
    if (sampleBacked) {
        // close the integral below the smallest sample with a power-law fit
        const auto& samp = tf.samples();
        std::size_t i1 = 0;
        while (i1 + 1 < samp.size() && samp[i1].second <= 0.0) ++i1;
        const auto [t0, v0] = samp[i1];
        const auto [t1, v1] = samp[std::min(i1 + 1, samp.size() - 1)];
        if (v0 > 0.0 && v1 > v0 && t1 > t0) {
            const double p = std::log(v1 / v0) / std::log(t1 / t0);  // vol ~ c t^p
            const double c = v0 / std::pow(t0, p);
            const double expo = s.real() - m + p;
            if (expo > 1e-9) {
                remainder = c * std::pow(tf.epsMin(), expo) / expo;
                acc += remainder;
            } else {
                out.divergenceWarning = true;
            }
        }
    }
    out.value = acc;
    out.errorEstimate = quadError + 0.5 * std::abs(remainder);
    return out;
}

struct IdentityCheckResult {
    Complex distanceSide;  // zeta_d(s)
    Complex volumeTerm;    // eps^{s-m} |A_eps|
    Complex tubeSide;      // (m-s) * tube zeta
    double gap = 0.0;
    double combinedError = 0.0;
};

/// Check zeta_d(s) = eps^{s-m} |A_eps| + (m-s) tube-zeta(s) with each side
/// computed along an independent path (exact gaps vs quadrature on exact
/// interval-merge volumes in 1-D; independent Monte-Carlo streams in 2-D).
inline IdentityCheckResult identityCheck(const PointCloud& cloud, double eps, Complex s) {
    const auto m = static_cast<double>(cloud.dim());
    IdentityCheckResult res;
    const ZetaSample zd = distanceZeta(cloud, eps, s);
    res.distanceSide = zd.value;
    ZetaSample zt;
    double vol = 0.0;
    if (cloud.dim() == 1) {
        vol = tubeVolume(cloud, eps).volume;
        zt = tubeZeta(tubeFunctionFromCloud(cloud, eps * 1e-9, eps), eps, s);
    } else if (cloud.dim() == 2) {
        // one independent sample stream provides distances; area counts and
        // the tube function both derive from it
        auto [lo, hi] = cloud.boundingBox();
        const double x0 = lo[0] - eps, y0 = lo[1] - eps;
        const double wx = hi[0] - lo[0] + 2.0 * eps, wy = hi[1] - lo[1] + 2.0 * eps;
        detail::NearestIndex2d index(cloud, eps);
        std::mt19937_64 rng(987654321);
        std::uniform_real_distribution<double> ux(x0, x0 + wx), uy(y0, y0 + wy);
        constexpr std::size_t n = 400'000;
        std::vector<double> dists;
        dists.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = index.distance(ux(rng), uy(rng));
            if (d < eps) dists.push_back(d);
        }
        std::sort(dists.begin(), dists.end());
        const double area = wx * wy;
        vol = area * static_cast<double>(dists.size()) / static_cast<double>(n);
        std::vector<std::pair<double, double>> samples;
        GeometricGrid tGrid{eps / 1000.0, eps, 16};
        for (double t : tGrid.values()) {
            const auto below = std::lower_bound(dists.begin(), dists.end(), t) - dists.begin();
            samples.emplace_back(std::min(t, eps),
                                 area * static_cast<double>(below) / static_cast<double>(n));
        }
        zt = tubeZeta(TubeFunction(2, std::move(samples)), eps, s);
        res.combinedError = zd.errorEstimate + std::abs(m - s) * zt.errorEstimate +
                            3.0 * area * std::sqrt(vol / area / n);
    } else {
        throw unsupported_error("identityCheck: only ambient dimensions 1 and 2 are supported");
    }
    res.volumeTerm = std::exp((s - m) * std::log(eps)) * vol;
    res.tubeSide = (m - s) * zt.value;
    if (cloud.dim() == 1)
        res.combinedError = std::abs(m - s) * zt.errorEstimate;
    res.gap = std::abs(res.distanceSide - res.volumeTerm - res.tubeSide);
    return res;
}

/// Exact residue of the distance zeta function at the string's dimension,
/// via res(zeta_d; D) = a(D) res(zeta_L; D) with a(s) = 2^{1-s}/s (the
/// entire term b(s) contributes nothing to the residue).
inline double distanceZetaResidueClosedForm(const FractalString& s) {
    const auto form = latticeClosedForm(s);
    const double d = form.dimension();
    Window w;
    w.sigmaMin = d - 1e-9;
    w.tMax = 1e-6;
    const auto poles = polesInWindow(form, w);
    for (const auto& p : poles)
        if (std::abs(p.location.imag()) < 1e-12 && std::abs(p.location.real() - d) < 1e-9)
            return std::pow(2.0, 1.0 - d) / d * p.residue.real();
    throw data_error("distanceZetaResidueClosedForm: no real pole at the dimension");
}

struct ResidueExtrapolation {
    double value = 0.0;
    bool stabilized = false;
    std::vector<double> sequence;  // (s - D) * zeta(s) at delta = 0.1 * 2^{-i}
};

/// Richardson extrapolation of (s - D) zeta(s) along real s -> D+ with
/// deltas 0.1 * 2^{-i}. Assumes a simple pole (analytic remainder).
inline ResidueExtrapolation residueExtrapolation(const std::function<double(double)>& zeta,
                                                 double d, int levels = 9) {
    if (levels < 3) throw domain_error("residueExtrapolation: need at least 3 levels");
    ResidueExtrapolation out;
    std::vector<std::vector<double>> table(levels);
    for (int i = 0; i < levels; ++i) {
        const double delta = 0.1 * std::pow(2.0, -i);
        table[i].resize(i + 1);
        table[i][0] = delta * zeta(d + delta);
        out.sequence.push_back(table[i][0]);
        for (int j = 1; j <= i; ++j)
            table[i][j] = table[i][j - 1] +
                          (table[i][j - 1] - table[i - 1][j - 1]) / (std::pow(2.0, j) - 1.0);
    }
    const double last = table[levels - 1].back();
    const double prev = table[levels - 2].back();
    out.value = last;
    out.stabilized = std::abs(last - prev) <= 1e-3 * std::max(1e-300, std::abs(last));
    return out;
}

/// Smallest real s at which the 1-D gap series of the cloud shows decay
/// (no divergence warning); brackets the box dimension of the underlying set.
inline double divergenceThreshold(const PointCloud& cloud, double sLo = 1e-3,
                                  double sHi = 1.0) {
    if (cloud.dim() != 1) throw unsupported_error("divergenceThreshold: 1-D clouds only");
    const auto gaps = detail::gaps1d(cloud);
    auto diverges = [&](double sigma) { return detail::gapSeriesDiverges(gaps, sigma); };
    if (!diverges(sLo)) return sLo;
    if (diverges(sHi))
        throw divergence_error("divergenceThreshold: series shows no decay up to sHi");
    double lo = sLo, hi = sHi;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (diverges(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct LogPeriodicReport {
    double dimension = 0.0;
    double period = 0.0;  // 0 when measurable-consistent
    bool measurableConsistent = false;
    std::vector<std::pair<long, Complex>> fourier;   // (k, G_hat_0(k/T))
    std::vector<std::pair<long, Complex>> residues;  // G_hat_0(k/T) / T
    double averageContent = 0.0;                     // G_hat_0(0) / T
    double gMin = 0.0, gMax = 0.0;
};

/// Log-periodic analysis of G(tau) = vol(e^{-tau}) e^{tau(m-D)}: fits the
/// period T by Fourier peak, computes G_hat_0(k/T) by trapezoid over an
/// integer number of trailing periods, and cross-checks min/max G against
/// the Minkowski content estimates (3% agreement enforced).
inline LogPeriodicReport logPeriodicAnalysis(const TubeFunction& tf, double d, long kMax,
                                             double tol = 0.01) {
    if (kMax < 0) throw domain_error("logPeriodicAnalysis: kMax must be nonnegative");
    const auto m = static_cast<double>(tf.ambientDim());
    const auto probe = measurabilityProbe(tf, d, tol);
    LogPeriodicReport rep;
    rep.dimension = d;
    rep.gMin = probe.gMin;
    rep.gMax = probe.gMax;
    if (probe.measurableConsistent) {
        rep.measurableConsistent = true;
        rep.averageContent = probe.content;
        rep.fourier.emplace_back(0, Complex(0.0));  // placeholder: no period fitted
        return rep;
    }
    const double t = probe.period;
    rep.period = t;
    const double tauMin = std::log(1.0 / tf.epsMax());
    const double tauMax = std::log(1.0 / tf.epsMin());
    const auto periods = std::floor((tauMax - tauMin) / t);
    if (periods < 5.0)
        throw insufficient_data_error("logPeriodicAnalysis: need >= 5 periods of tube samples");
    const double a = tauMax - periods * t;
    auto g = [&](double tau) { return tf(std::exp(-tau)) * std::exp(tau * (m - d)); };
    for (long k = -kMax; k <= kMax; ++k) {
        const Complex coeff =
            detail::windowedFourier(g, a, tauMax, static_cast<double>(k) / t, 8192) / periods;
        rep.fourier.emplace_back(k, coeff);
        rep.residues.emplace_back(k, coeff / t);
        if (k == 0) rep.averageContent = coeff.real() / t;
    }
    // consistency: min/max of G must match the Minkowski content brackets
    GeometricGrid epsGrid{tf.epsMin(), tf.epsMax(), 32};
    if (epsGrid.decades() >= 2.0) {
        const auto mink = minkowskiEstimate(tf, d, epsGrid);
        if (std::abs(probe.gMin - mink.lowerContent) > 0.03 * mink.lowerContent ||
            std::abs(probe.gMax - mink.upperContent) > 0.03 * mink.upperContent)
            throw data_error("logPeriodicAnalysis: G range disagrees with Minkowski contents");
    }
    return rep;
}

}  // namespace fraczeta
