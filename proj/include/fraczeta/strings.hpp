#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "fraczeta/common.hpp"

namespace fraczeta {

/// One distinct scale with its multiplicity.
struct ScaleEntry {
    double scale = 0.0;  // l_n, strictly decreasing across entries
    double mult = 0.0;   // m_n, a positive integer (stored as double for closed-form sums)
};

/// Exact geometric continuation of a string beyond its stored prefix.
///
/// From entry index `onset` (1-based) onward the string repeats in blocks of
/// `period` entries: each block is the previous one with scales multiplied by
/// `ratio` and multiplicities by `growth`, forever. `period == 1` is the
/// plain per-step rule l_{n+1} = r*l_n, m_{n+1} = g*m_n; larger periods cover
/// strings whose distinct scales interleave several geometric families that
/// share a common block ratio.
struct GeometricTail {
    double ratio = 0.0;      // r in (0,1), applied once per block
    double growth = 1.0;     // g >= 1, applied once per block
    std::size_t onset = 1;   // 1-based index of the first tail entry
    std::size_t period = 1;  // entries per block
};

struct OrderEstimate {
    double value = 0.0;
    bool exact = false;      // true when derived from a geometric tail
    bool truncated = false;  // true when estimated from a finite prefix
    std::vector<double> windowSlopes;
};

struct GrowthEquivalenceReport {
    double supCountOverPower = 0.0;  // sup_x N(x) / x^alpha over the examined range
    double supScaleTimesRank = 0.0;  // sup_j l_j * j^(1/alpha)
    bool countBounded = false;
    bool scaleBounded = false;
};

/// A fractal string: strictly decreasing positive scales with positive integer
/// multiplicities, optionally continued to infinity by an exact geometric tail.
/// Immutable after construction.
class FractalString {
public:
    FractalString(std::vector<ScaleEntry> scales, std::optional<GeometricTail> tail = std::nullopt)
        : scales_(std::move(scales)), tail_(tail) {
        validate();
        if (tail_) trimToCanonical();
        cum_.reserve(scales_.size());
        double acc = 0.0;
        for (const auto& e : scales_) cum_.push_back(acc += e.mult);
    }

    const std::vector<ScaleEntry>& storedScales() const { return scales_; }
    const std::optional<GeometricTail>& tail() const { return tail_; }
    bool infinite() const { return tail_.has_value(); }

    /// n-th distinct scale entry (1-based); defined for all n when a tail is present.
    ScaleEntry entry(std::size_t n) const {
        if (n == 0) throw domain_error("FractalString::entry: index is 1-based");
        if (!tail_ || n < tail_->onset) {
            if (n > scales_.size()) throw domain_error("FractalString::entry: past end of finite string");
            return scales_[n - 1];
        }
        const std::size_t k = (n - tail_->onset) / tail_->period;
        const std::size_t i = (n - tail_->onset) % tail_->period;
        const ScaleEntry& head = scales_[tail_->onset - 1 + i];
        return {head.scale * std::pow(tail_->ratio, static_cast<double>(k)),
                head.mult * std::pow(tail_->growth, static_cast<double>(k))};
    }

    double largestScale() const { return scales_.front().scale; }
    double smallestStoredScale() const { return scales_.back().scale; }
    std::size_t storedEntryCount() const { return scales_.size(); }

    /// Total multiplicity of the stored prefix (finite strings: the whole string).
    double storedMultiplicity() const { return cum_.back(); }

    /// N_L(x): number of flattened scales with 1/l <= x. Exact, with geometric
    /// tails summed in closed form. Counts can exceed 2^53 only for extreme
    /// queries; they are returned as doubles.
    double countingFunction(double x) const {
        if (!(x > 0.0)) throw domain_error("countingFunction: x must be positive");
        const double threshold = 1.0 / x;
        double total = 0.0;
        const std::size_t prefixEnd = tail_ ? tail_->onset - 1 : scales_.size();
        // stored prefix: scales are sorted decreasing, so binary search
        std::size_t lo = 0, hi = prefixEnd;
        while (lo < hi) {  // first index with scale < threshold
            const std::size_t mid = (lo + hi) / 2;
            if (scales_[mid].scale >= threshold * (1.0 - 1e-13)) lo = mid + 1; else hi = mid;
        }
        if (lo > 0) total += cum_[lo - 1];
        if (!tail_) return total;

        const double logInvR = std::log(1.0 / tail_->ratio);
        for (std::size_t i = 0; i < tail_->period; ++i) {
            const ScaleEntry& head = scales_[tail_->onset - 1 + i];
            // largest k >= 0 with head.scale * r^k >= 1/x
            const double t = std::log(head.scale * x) / logInvR;
            if (t < -1e-12) continue;
            const double K = std::floor(t + 1e-12);
            const double g = tail_->growth;
            if (std::abs(g - 1.0) < 1e-15)
                total += head.mult * (K + 1.0);
            else
                total += head.mult * (std::pow(g, K + 1.0) - 1.0) / (g - 1.0);
        }
        return total;
    }

    /// j-th flattened scale (scales repeated by multiplicity), 1-based.
    double scaleAtRank(double j) const {
        if (!(j >= 1.0)) throw domain_error("scaleAtRank: rank is 1-based");
        // stored prefix
        std::size_t lo = 0, hi = cum_.size();
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (cum_[mid] < j - 1e-9) lo = mid + 1; else hi = mid;
        }
        const std::size_t prefixEnd = tail_ ? tail_->onset - 1 : scales_.size();
        if (lo < prefixEnd) return scales_[lo].scale;
        if (!tail_) {
            if (lo < scales_.size()) return scales_[lo].scale;
            throw domain_error("scaleAtRank: rank exceeds total multiplicity of finite string");
        }
        // walk tail blocks; block multiplicity grows by g per block
        double before = tail_->onset >= 2 ? cum_[tail_->onset - 2] : 0.0;
        double blockFactor = 1.0;
        for (std::size_t block = 0; block < 4096; ++block) {
            for (std::size_t i = 0; i < tail_->period; ++i) {
                const ScaleEntry& head = scales_[tail_->onset - 1 + i];
                before += head.mult * blockFactor;
                if (before >= j - 1e-9)
                    return head.scale * std::pow(tail_->ratio, static_cast<double>(block));
            }
            blockFactor *= tail_->growth;
        }
        throw domain_error("scaleAtRank: rank too deep for tail walk");
    }

    /// Order rho of the counting function: limsup log N(x) / log x.
    /// Exact log(g)/log(1/r) with a tail; otherwise a windowed log-log
    /// regression estimate over the given (or a default) geometric grid,
    /// taking the maximum slope across trailing one-decade windows.
    OrderEstimate orderOfCountingFunction(std::optional<GeometricGrid> grid = std::nullopt) const {
        OrderEstimate out;
        if (tail_) {
            out.value = std::log(tail_->growth) / std::log(1.0 / tail_->ratio);
            out.exact = true;
            return out;
        }
        if (scales_.size() < 8)
            throw insufficient_data_error("orderOfCountingFunction: need >= 8 distinct scales or a tail");
        GeometricGrid g = grid.value_or(defaultGrid());
        if (g.decades() < 3.0)
            throw insufficient_data_error("orderOfCountingFunction: grid must cover >= 3 decades");
        std::vector<double> lx, ly;
        for (double x : g.values()) {
            const double n = countingFunction(x);
            if (n <= 0.0) continue;
            lx.push_back(std::log(x));
            ly.push_back(std::log(n));
        }
        if (lx.size() < 3)
            throw insufficient_data_error("orderOfCountingFunction: fewer than 3 usable grid points");
        const auto ws = windowedSlopes(lx, ly, 2.0 * std::log(10.0), 0.6);
        out.value = std::max(0.0, ws.maxSlope);
        out.truncated = true;
        out.windowSlopes = ws.slopes;
        return out;
    }

    /// Abscissa of convergence sigma of the Dirichlet series sum l_j^s.
    /// Equals the counting-function order (D_L = D_N); exact for tailed
    /// strings, clamped at 0 in both modes.
    OrderEstimate abscissaDetail(std::optional<GeometricGrid> grid = std::nullopt) const {
        OrderEstimate e = orderOfCountingFunction(grid);
        e.value = std::max(0.0, e.value);
        return e;
    }

    double abscissaOfConvergence() const { return abscissaDetail().value; }

    /// Empirical check that N(x) = O(x^alpha) iff l_j = O(j^{-1/alpha}).
    /// Boundedness of each running sup is judged by comparing the sup over
    /// the trailing half of the (log-scaled) range against the leading half;
    /// a ratio above `growthThreshold` is reported unbounded.
    GrowthEquivalenceReport checkGrowthEquivalence(double alpha, double growthThreshold = 1.5) const {
        if (!(alpha > 0.0)) throw domain_error("checkGrowthEquivalence: alpha must be positive");
        const std::size_t nMax = tail_ ? tail_->onset - 1 + 40 * tail_->period : scales_.size();

        std::vector<double> pos1, val1;  // N(x_n)/x_n^alpha at jump points
        std::vector<double> pos2, val2;  // l_j * j^(1/alpha) at entry boundaries
        double cumulative = 0.0;
        for (std::size_t n = 1; n <= nMax; ++n) {
            const ScaleEntry e = entry(n);
            cumulative += e.mult;
            const double x = 1.0 / e.scale;
            pos1.push_back(std::log(x));
            val1.push_back(cumulative / std::pow(x, alpha));
            pos2.push_back(std::log(cumulative));
            val2.push_back(e.scale * std::pow(cumulative, 1.0 / alpha));
        }
        GrowthEquivalenceReport rep;
        rep.supCountOverPower = *std::max_element(val1.begin(), val1.end());
        rep.supScaleTimesRank = *std::max_element(val2.begin(), val2.end());
        rep.countBounded = boundedVerdict(pos1, val1, growthThreshold);
        rep.scaleBounded = boundedVerdict(pos2, val2, growthThreshold);
        return rep;
    }

    GeometricGrid defaultGrid() const {
        GeometricGrid g;
        g.minValue = 1.0 / scales_.front().scale;
        const double last = tail_ ? entry(tail_->onset - 1 + 12 * tail_->period).scale : scales_.back().scale;
        g.maxValue = 1.0 / last;
        g.pointsPerDecade = 16;
        return g;
    }

private:
    static bool boundedVerdict(const std::vector<double>& pos, const std::vector<double>& val,
                               double growthThreshold) {
        const double mid = 0.5 * (pos.front() + pos.back());
        double supLead = 0.0, supTrail = 0.0;
        for (std::size_t i = 0; i < pos.size(); ++i) {
            if (pos[i] <= mid) supLead = std::max(supLead, val[i]);
            else supTrail = std::max(supTrail, val[i]);
        }
        if (supTrail == 0.0) return true;
        if (supLead == 0.0) return false;
        return supTrail / supLead <= growthThreshold;
    }

    void validate() const {
        if (scales_.empty()) throw data_error("FractalString: no scales");
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& e : scales_) {
            if (!(e.scale > 0.0) || !std::isfinite(e.scale))
                throw data_error("FractalString: scales must be positive finite");
            if (!(e.scale < prev)) throw data_error("FractalString: scales must be strictly decreasing");
            if (!(e.mult >= 1.0)) throw data_error("FractalString: multiplicities must be >= 1");
            if (std::abs(e.mult - std::round(e.mult)) > 1e-9 * std::max(1.0, e.mult))
                throw data_error("FractalString: multiplicities must be integers");
            prev = e.scale;
        }
        if (!tail_) return;
        const auto& t = *tail_;
        if (!(t.ratio > 0.0 && t.ratio < 1.0)) throw data_error("GeometricTail: ratio must lie in (0,1)");
        if (!(t.growth >= 1.0)) throw data_error("GeometricTail: growth must be >= 1");
        if (t.onset < 1 || t.period < 1) throw data_error("GeometricTail: onset and period must be >= 1");
        if (scales_.size() < t.onset - 1 + t.period)
            throw data_error("GeometricTail: stored scales must include one full block from onset");
        // the next block must continue the strict decrease
        const double blockFirst = scales_[t.onset - 1].scale;
        const double blockLast = scales_[t.onset - 1 + t.period - 1].scale;
        if (!(t.ratio * blockFirst < blockLast))
            throw data_error("GeometricTail: ratio too large, repeated blocks would not decrease");
        // stored entries beyond the first block must match the recurrence exactly
        for (std::size_t idx = t.onset - 1 + t.period; idx < scales_.size(); ++idx) {
            const auto& prevE = scales_[idx - t.period];
            const auto& cur = scales_[idx];
            if (std::abs(cur.scale - t.ratio * prevE.scale) > 1e-12 * prevE.scale ||
                std::abs(cur.mult - t.growth * prevE.mult) > 1e-9 * prevE.mult)
                throw data_error("FractalString: stored entries disagree with the declared tail");
        }
    }

    void trimToCanonical() {
        scales_.resize(tail_->onset - 1 + tail_->period);
    }

    std::vector<ScaleEntry> scales_;
    std::optional<GeometricTail> tail_;
    std::vector<double> cum_;  // cumulative multiplicities over stored entries
};

/// The Cantor string: scales 3^-n with multiplicity 2^(n-1).
inline FractalString cantorString() {
    return FractalString({{1.0 / 3.0, 1.0}}, GeometricTail{1.0 / 3.0, 2.0, 1, 1});
}

}  // namespace fraczeta
