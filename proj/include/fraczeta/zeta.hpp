#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "fraczeta/common.hpp"
#include "fraczeta/strings.hpp"

namespace fraczeta {

using Complex = std::complex<double>;

/// coeff * base^s with base > 0.
struct ExpTerm {
    double coeff = 0.0;
    double base = 1.0;
};

inline Complex evalExpTerms(const std::vector<ExpTerm>& terms, Complex s) {
    Complex acc = 0.0;
    for (const auto& t : terms) acc += t.coeff * std::exp(s * std::log(t.base));
    return acc;
}

/// Exact rational-in-r^s representation of a lattice zeta function:
/// an entire exponential polynomial plus terms g_i(s) / (1 - b_i * r^s),
/// meromorphic on all of C.
struct LatticeZetaForm {
    struct PolarTerm {
        std::vector<ExpTerm> numerator;  // g(s)
        double b = 1.0;                  // denominator 1 - b * r^s
    };

    double r = 0.5;  // common base ratio in (0,1)
    std::vector<ExpTerm> entirePart;
    std::vector<PolarTerm> polarTerms;

    Complex evaluate(Complex s) const {
        Complex acc = evalExpTerms(entirePart, s);
        const double logR = std::log(r);
        for (const auto& p : polarTerms)
            acc += evalExpTerms(p.numerator, s) / (1.0 - p.b * std::exp(s * logR));
        return acc;
    }

    /// Abscissa of convergence of the underlying series: the largest polar real part.
    double dimension() const {
        double d = -std::numeric_limits<double>::infinity();
        for (const auto& p : polarTerms) d = std::max(d, std::log(p.b) / std::log(1.0 / r));
        return d;
    }
};

/// A simple pole with its residue.
struct PoleData {
    Complex location;
    Complex residue;
    int order = 1;
};

/// Rectangular window {Re(s) >= sigmaMin, |Im(s)| <= tMax}.
struct Window {
    double sigmaMin = -std::numeric_limits<double>::infinity();
    double tMax = 10.0;
};

struct DirichletValue {
    Complex value;
    double tailBound = 0.0;  // rigorous remainder bound (0 when the sum is closed-form exact)
    bool truncated = false;  // true for tail-less strings (finite data carrier)
};

/// Geometric zeta function sum_j l_j^z. Prefix summed directly, geometric
/// tails in closed form; convergence requires Re(z) > abscissa + 1e-9.
inline DirichletValue evalDirichlet(const FractalString& s, Complex z) {
    DirichletValue out;
    const auto& scales = s.storedScales();
    const std::size_t prefixEnd = s.tail() ? s.tail()->onset - 1 : scales.size();
    for (std::size_t i = 0; i < prefixEnd; ++i)
        out.value += scales[i].mult * std::exp(z * std::log(scales[i].scale));
    if (!s.tail()) {
        out.truncated = true;
        return out;
    }
    const auto& t = *s.tail();
    const double sigma = std::log(t.growth) / std::log(1.0 / t.ratio);
    if (!(z.real() > sigma + 1e-9))
        throw divergence_error("evalDirichlet: Re(z) must exceed the abscissa of convergence");
    const Complex common = t.growth * std::exp(z * std::log(t.ratio));  // |common| < 1
    for (std::size_t i = 0; i < t.period; ++i) {
        const auto& head = scales[t.onset - 1 + i];
        out.value += head.mult * std::exp(z * std::log(head.scale)) / (1.0 - common);
    }
    return out;
}

/// Exact meromorphic closed form of the zeta function of a tailed string:
/// prefix terms become the entire part, the tail block becomes a single
/// polar term g(s)/(1 - g_growth * r^s).
inline LatticeZetaForm latticeClosedForm(const FractalString& s) {
    if (!s.tail()) throw data_error("latticeClosedForm: string has no geometric tail (not lattice)");
    const auto& t = *s.tail();
    const auto& scales = s.storedScales();
    LatticeZetaForm form;
    form.r = t.ratio;
    for (std::size_t i = 0; i + 1 < t.onset; ++i)
        form.entirePart.push_back({scales[i].mult, scales[i].scale});
    LatticeZetaForm::PolarTerm polar;
    polar.b = t.growth;
    for (std::size_t i = 0; i < t.period; ++i)
        polar.numerator.push_back({scales[t.onset - 1 + i].mult, scales[t.onset - 1 + i].scale});
    form.polarTerms.push_back(std::move(polar));
    return form;
}

/// Enumerate the (simple) poles of a lattice form inside a window. Each polar
/// term contributes the arithmetic progression D + 2 pi i k / log(1/r) with
/// D = log(b)/log(1/r); the residue at a simple pole is g(w)/log(1/r).
/// Coincident poles from distinct terms merge (residues summed); numerator
/// zeros cancel the pole.
inline std::vector<PoleData> polesInWindow(const LatticeZetaForm& form, const Window& w) {
    if (!std::isfinite(w.tMax) || !(w.tMax >= 0.0))
        throw domain_error("polesInWindow: window must be finite");
    const double T = std::log(1.0 / form.r);
    std::vector<PoleData> poles;
    for (const auto& p : form.polarTerms) {
        const double d = std::log(p.b) / T;
        if (d < w.sigmaMin) continue;
        const auto kMax = static_cast<long>(std::floor(w.tMax * T / (2.0 * M_PI) + 1e-12));
        for (long k = -kMax; k <= kMax; ++k) {
            const Complex omega(d, 2.0 * M_PI * static_cast<double>(k) / T);
            const Complex res = evalExpTerms(p.numerator, omega) / T;
            bool merged = false;
            for (auto& existing : poles) {
                if (std::abs(existing.location - omega) < 1e-12 * (1.0 + std::abs(omega))) {
                    existing.residue += res;
                    merged = true;
                    break;
                }
            }
            if (!merged) poles.push_back({omega, res, 1});
        }
    }
    // drop cancelled poles, sort by imaginary then real part
    std::erase_if(poles, [](const PoleData& p) { return std::abs(p.residue) < 1e-14; });
    std::sort(poles.begin(), poles.end(), [](const PoleData& a, const PoleData& b) {
        if (a.location.imag() != b.location.imag()) return a.location.imag() < b.location.imag();
        return a.location.real() < b.location.real();
    });
    return poles;
}

struct TransformCheck {
    Complex lhs;  // zeta via Dirichlet series / closed form
    Complex rhs;  // s * integral of N(x) x^{-s-1}, summed piecewise exactly
    double gap = 0.0;
};

/// Verify zeta(s) = s * int_0^inf N(x) x^{-s-1} dx. The integrand is a
/// piecewise power, so the right side is the exact jump-interval sum
/// sum_n N * (x_n^{-s} - x_{n+1}^{-s}), with the counting function evaluated
/// independently at interval midpoints; geometric tails are iterated until
/// the remaining contribution is provably below 1e-13 of the total.
inline TransformCheck integralTransformCheck(const FractalString& s, Complex z,
                                             std::size_t maxTerms = 200000) {
    TransformCheck out;
    out.lhs = evalDirichlet(s, z).value;

    const bool infinite = s.infinite();
    const std::size_t finiteCount = infinite ? 0 : s.storedScales().size();
    Complex acc = 0.0;
    double decayFactor = 0.0;
    if (infinite) {
        const auto& t = *s.tail();
        decayFactor = std::pow(t.growth * std::pow(t.ratio, z.real()), 1.0 / static_cast<double>(t.period));
    }
    std::size_t n = 1;
    while (true) {
        const double xn = 1.0 / s.entry(n).scale;
        const bool last = !infinite && n == finiteCount;
        if (last) {
            // final interval [x_n, infinity)
            const double total = s.countingFunction(xn * (1.0 + 1e-12));
            acc += total * std::exp(-z * std::log(xn));
            break;
        }
        const double xn1 = 1.0 / s.entry(n + 1).scale;
        const double mid = std::sqrt(xn * xn1);
        const double count = s.countingFunction(mid);
        const Complex term = count * (std::exp(-z * std::log(xn)) - std::exp(-z * std::log(xn1)));
        acc += term;
        if (infinite && n > 4) {
            const double bound = std::abs(term) * decayFactor / (1.0 - decayFactor);
            if (bound < 1e-13 * std::abs(acc)) break;
        }
        if (++n > maxTerms)
            throw resource_error("integralTransformCheck: series did not settle within the term budget");
    }
    out.rhs = acc;
    out.gap = std::abs(out.lhs - out.rhs);
    return out;
}

/// Explicit counting formula: Re( sum over poles of x^w / w * res ) plus the
/// optional zeta(0) bracket term. Poles are truncated symmetrically to the
/// 2K+1 smallest imaginary parts so partial sums stay real; the discarded
/// imaginary residue must be below 1e-10.
inline double explicitCountingFormula(std::vector<PoleData> poles, std::optional<Complex> zetaAtZero,
                                      double x, std::size_t K) {
    if (!(x > 0.0)) throw domain_error("explicitCountingFormula: x must be positive");
    for (const auto& p : poles)
        if (p.order != 1) throw unsupported_error("explicitCountingFormula: only simple poles supported");
    std::sort(poles.begin(), poles.end(), [](const PoleData& a, const PoleData& b) {
        return std::abs(a.location.imag()) < std::abs(b.location.imag());
    });
    if (poles.size() > 2 * K + 1) poles.resize(2 * K + 1);
    Complex acc = zetaAtZero.value_or(Complex(0.0));
    for (const auto& p : poles) {
        if (std::abs(p.location) < 1e-14)
            throw unsupported_error("explicitCountingFormula: pole at 0 not supported");
        acc += std::exp(p.location * std::log(x)) / p.location * p.residue;
    }
    if (std::abs(acc.imag()) > 1e-10 * std::max(1.0, std::abs(acc.real())))
        throw data_error("explicitCountingFormula: non-real partial sum; pole set not conjugate-symmetric");
    return acc.real();
}

struct MeasurabilityFitSpec {
    double tol = 0.05;                       // trailing oscillation amplitude / mean
    std::optional<GeometricGrid> grid;       // defaults to the string's own range
};

struct MeasurabilityVerdict {
    bool measurableConsistent = false;
    double dimension = 0.0;
    double oscillation = 0.0;        // trailing (max-min)/mean of N(x)/x^D
    double content = 0.0;            // Minkowski content when measurable-consistent
    double leadingCoefficient = 0.0; // fitted c in N(x) ~ c x^D
    std::optional<bool> poleCriterionMeasurable;  // criterion (i), lattice forms only
};

/// Minkowski-measurability criterion for an ordinary fractal string with
/// dimension D in (0,1): fits N(x)/x^D on a geometric grid and, when an exact
/// lattice form exists, cross-checks against the pole criterion (only the
/// real pole on the line Re(s) = D). When measurable-consistent, returns the
/// content 2^{1-D} c / (1-D).
inline MeasurabilityVerdict measurabilityCriterion(const FractalString& s,
                                                   const MeasurabilityFitSpec& fit = {}) {
    const double d = s.abscissaOfConvergence();
    if (!(d > 0.0 && d < 1.0))
        throw domain_error("measurabilityCriterion: dimension must lie in (0,1)");
    GeometricGrid grid = fit.grid.value_or(s.defaultGrid());

    std::vector<double> ratios;
    const auto xs = grid.values();
    const double tailStart = grid.maxValue / 10.0;  // trailing decade
    for (double x : xs) {
        if (x < tailStart) continue;
        const double n = s.countingFunction(x);
        if (n <= 0.0) continue;
        ratios.push_back(n / std::pow(x, d));
    }
    if (ratios.size() < 4)
        throw insufficient_data_error("measurabilityCriterion: too few trailing grid points");
    const double lo = *std::min_element(ratios.begin(), ratios.end());
    const double hi = *std::max_element(ratios.begin(), ratios.end());
    double mean = 0.0;
    for (double v : ratios) mean += v;
    mean /= static_cast<double>(ratios.size());

    MeasurabilityVerdict v;
    v.dimension = d;
    v.oscillation = (hi - lo) / mean;
    v.measurableConsistent = v.oscillation <= fit.tol;
    v.leadingCoefficient = mean;
    if (v.measurableConsistent)
        v.content = mean * std::pow(2.0, 1.0 - d) / (1.0 - d);

    if (s.tail()) {
        const auto form = latticeClosedForm(s);
        const double period = 2.0 * M_PI / std::log(1.0 / form.r);
        Window w;
        w.sigmaMin = d - 1e-9;
        w.tMax = 2.5 * period;
        bool oscillatoryPoles = false;
        for (const auto& p : polesInWindow(form, w))
            if (std::abs(p.location.real() - d) < 1e-9 && std::abs(p.location.imag()) > 1e-9)
                oscillatoryPoles = true;
        v.poleCriterionMeasurable = !oscillatoryPoles;
        if (*v.poleCriterionMeasurable != v.measurableConsistent)
            throw data_error("measurabilityCriterion: fit and pole criteria disagree");
    }
    return v;
}

}  // namespace fraczeta
