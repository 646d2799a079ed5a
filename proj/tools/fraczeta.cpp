// fraczeta: fractal strings, box-counting dimensions, and zeta functions
// from the command line.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fraczeta/analytic.hpp"
#include "fraczeta/boxcount.hpp"
#include "fraczeta/distzeta.hpp"
#include "fraczeta/ifs.hpp"
#include "fraczeta/io.hpp"
#include "fraczeta/strings.hpp"
#include "fraczeta/tube.hpp"
#include "fraczeta/zeta.hpp"

namespace {

using namespace fraczeta;
using nlohmann::json;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct Options {
    std::string input;
    std::string analytic;
    std::string variant = "meshCount";
    std::string ratios;
    double lambda = 3.0;
    double eps = 0.0;
    int kMin = -2;
    int kMax = 0;  // 0: choose from the cloud resolution
    double tMax = 10.0;
    std::string sRect;
    double delta = 0.0;
    std::uint64_t seed = 1;
    std::string format = "json";
    std::string output;
};

void emit(const Options& opt, const std::string& text) {
    if (opt.output.empty())
        std::cout << text;
    else
        io::writeFile(opt.output, text);
}

BoxCountVariant parseVariant(const std::string& name) {
    if (name == "meshCount") return BoxCountVariant::meshCount;
    if (name == "packing") return BoxCountVariant::packing;
    if (name == "diamCover") return BoxCountVariant::diamCover;
    if (name == "ballCover") return BoxCountVariant::ballCover;
    if (name == "cubeCover") return BoxCountVariant::cubeCover;
    throw domain_error("unknown box-count variant: " + name);
}

PointCloud loadCloud(const Options& opt) {
    if (!opt.analytic.empty()) {
        if (opt.analytic == "cantor") return analytic::cantorEndpoints(12);
        if (opt.analytic == "setf") return generateAttractor(setFIfs(), 8);
        if (opt.analytic == "astring") return analytic::aStringCloud(100'000);
        throw data_error("unknown analytic cloud: " + opt.analytic);
    }
    if (opt.input.empty()) throw data_error("need --input or --analytic");
    std::ifstream f(opt.input);
    if (!f) throw data_error("cannot open file: " + opt.input);
    return io::readCloudCsv(f);
}

FractalString loadString(const Options& opt) {
    if (!opt.analytic.empty()) {
        if (opt.analytic == "cantor" || opt.analytic == "cantor-box")
            return analytic::cantorBoxCountingString();
        if (opt.analytic == "cantor-string") return cantorString();
        if (opt.analytic == "setf" || opt.analytic == "setf-box")
            return analytic::setFBoxCountingString();
        if (opt.analytic == "setf-tess") return analytic::setFTessellationString();
        if (opt.analytic == "astring") return analytic::aStringGapString(1000);
        throw data_error("unknown analytic string: " + opt.analytic);
    }
    if (opt.input.empty()) throw data_error("need --input or --analytic");
    return io::stringFromJson(io::parseJson(io::readFile(opt.input)));
}

/// Box-counting curve of a cloud sampled at x = lambda^k.
BoxCountCurve sampleCurve(const PointCloud& cloud, const Options& opt, int kMaxEff) {
    BoxCountCurve curve;
    curve.variant = parseVariant(opt.variant);
    for (int k = opt.kMin; k <= kMaxEff; ++k) {
        const double x = std::pow(opt.lambda, k);
        curve.samples.emplace_back(x, boxCount(cloud, x, curve.variant).count);
    }
    curve.validate();
    return curve;
}

/// Cloud resolution: the declared one when present, otherwise the mean
/// nearest-neighbor spacing scale diam / n^(1/m). Below this scale counts
/// saturate at the number of points and carry no dimension information.
double inferredResolution(const PointCloud& cloud) {
    if (cloud.meta().resolution > 0.0) return cloud.meta().resolution;
    auto [lo, hi] = cloud.boundingBox();
    double diam = 0.0;
    for (std::size_t d = 0; d < cloud.dim(); ++d) diam = std::max(diam, hi[d] - lo[d]);
    if (diam <= 0.0) return 0.0;
    return diam / std::pow(static_cast<double>(cloud.size()),
                           1.0 / static_cast<double>(cloud.dim()));
}

int effectiveKMax(const PointCloud& cloud, const Options& opt) {
    if (opt.kMax != 0) return opt.kMax;
    const double delta = inferredResolution(cloud);
    if (delta <= 0.0) return 10;
    return std::max(opt.kMin + 2,
                    static_cast<int>(std::floor(std::log(1.0 / delta) / std::log(opt.lambda))));
}

json dimReport(const PointCloud& cloud, const Options& opt) {
    const int kMaxEff = effectiveKMax(cloud, opt);
    const KRange kr{std::max(opt.kMin, 1), kMaxEff};

    const auto mesh = dimensionEstimate(cloud, opt.lambda, kr, BoxCountVariant::meshCount);
    const auto pack = dimensionEstimate(cloud, opt.lambda, kr, BoxCountVariant::packing);

    // Minkowski dimensions from tube volumes
    auto [lo, hi] = cloud.boundingBox();
    double diam = 0.0;
    for (std::size_t d = 0; d < cloud.dim(); ++d) diam = std::max(diam, hi[d] - lo[d]);
    const double resolution = inferredResolution(cloud);
    const double epsLo = std::max(resolution > 0.0 ? 2.0 * resolution : diam * 1e-5, 1e-12);
    // eps beyond the diameter probes the far field of the cloud, where every
    // tube looks like a single ball; stay inside the set's own scaling range
    const double epsHi = diam / 8.0;
    std::optional<MinkowskiEstimate> mink;
    try {
        if (cloud.dim() == 1) {
            mink = minkowskiEstimate(tubeFunctionFromCloud(cloud, epsLo, epsHi), 0.5,
                                     {epsLo, epsHi, 16});
        } else {
            std::vector<std::pair<double, double>> samples;
            double runningMax = 0.0;
            for (double e : GeometricGrid{epsLo, epsHi, 8}.values()) {
                // rasterized volumes carry approximation noise; clamp to restore
                // the monotonicity the exact volumes have
                runningMax = std::max(
                    runningMax, tubeVolume(cloud, e, std::max(e / 20.0, diam / 2000.0)).volume);
                samples.emplace_back(e, runningMax);
            }
            mink = minkowskiEstimate(TubeFunction(cloud.dim(), std::move(samples)), 1.0,
                                     {epsLo, epsHi, 8});
        }
    } catch (const insufficient_data_error&) {
        // the span between the cloud resolution and its diameter is too short
        // for a tube-volume regression; skip these legs
    }

    // order of the extracted box-counting string; small clouds may not span
    // enough scale decades for a truncated order estimate, so this leg is
    // reported only when the data supports it
    std::optional<double> order;
    try {
        const auto boxString = extractBoxCountingString(sampleCurve(cloud, opt, kMaxEff), true);
        order = boxString.orderOfCountingFunction().value;
    } catch (const insufficient_data_error&) {
    }

    json legs;
    legs["box_mesh_upper"] = mesh.upper;
    legs["box_mesh_lower"] = mesh.lower;
    legs["packing_upper"] = pack.upper;
    legs["packing_lower"] = pack.lower;
    if (mink) {
        legs["minkowski_upper"] = mink->dimUpper;
        legs["minkowski_lower"] = mink->dimLower;
    }
    if (order) legs["counting_order"] = *order;

    std::vector<double> headline = {mesh.upper, pack.upper};
    if (mink) headline.push_back(mink->dimUpper);
    if (order) headline.push_back(*order);
    if (cloud.dim() == 1) {
        const double threshold = divergenceThreshold(cloud, 1e-3, static_cast<double>(cloud.dim()));
        legs["distance_zeta_threshold"] = threshold;
        headline.push_back(threshold);
    }
    double maxGap = 0.0;
    for (double a : headline)
        for (double b : headline) maxGap = std::max(maxGap, std::abs(a - b));

    json rep;
    rep["legs"] = legs;
    rep["max_discrepancy"] = maxGap;
    return rep;
}

int cmdDim(const Options& opt) {
    const auto cloud = loadCloud(opt);
    emit(opt, dimReport(cloud, opt).dump(2) + "\n");
    return 0;
}

int cmdString(const Options& opt) {
    FractalString s = [&] {
        if (!opt.analytic.empty() || opt.input.rfind(".json") != std::string::npos)
            return loadString(opt);
        const auto cloud = loadCloud(opt);
        return extractBoxCountingString(sampleCurve(cloud, opt, effectiveKMax(cloud, opt)), true);
    }();
    emit(opt, io::toJson(s).dump(2) + "\n");
    return 0;
}

int cmdZeta(const Options& opt) {
    const auto s = loadString(opt);
    if (opt.sRect.empty()) throw domain_error("zeta: need --s-rect re0,re1,im0,im1,nre,nim");
    std::vector<double> v;
    std::stringstream ss(opt.sRect);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    if (v.size() != 6) throw domain_error("zeta: --s-rect needs 6 comma-separated values");
    const auto nre = static_cast<std::size_t>(v[4]), nim = static_cast<std::size_t>(v[5]);
    if (nre < 1 || nim < 1) throw domain_error("zeta: grid counts must be >= 1");

    std::optional<LatticeZetaForm> form;
    if (s.tail()) form = latticeClosedForm(s);
    std::vector<io::ZetaSweepRow> rows;
    for (std::size_t i = 0; i < nre; ++i)
        for (std::size_t j = 0; j < nim; ++j) {
            const double re = nre == 1 ? v[0] : v[0] + (v[1] - v[0]) * i / double(nre - 1);
            const double im = nim == 1 ? v[2] : v[2] + (v[3] - v[2]) * j / double(nim - 1);
            io::ZetaSweepRow row;
            row.re = re;
            row.im = im;
            if (form) {
                row.value = form->evaluate({re, im});
                row.tailBound = 0.0;
            } else {
                const auto dv = evalDirichlet(s, {re, im});
                row.value = dv.value;
                row.tailBound = dv.tailBound;
            }
            rows.push_back(row);
        }
    std::ostringstream out;
    io::writeZetaCsv(out, rows);
    emit(opt, out.str());
    return 0;
}

int cmdPoles(const Options& opt) {
    const auto s = loadString(opt);
    Window w;
    w.tMax = opt.tMax;
    const auto poles = polesInWindow(latticeClosedForm(s), w);
    emit(opt, io::toJson(poles).dump(2) + "\n");
    return 0;
}

int cmdTube(const Options& opt) {
    if (!opt.analytic.empty() && opt.eps <= 0.0) {
        // emit a sampled tube function over a default grid
        std::function<double(double)> vol;
        std::size_t m = 1;
        if (opt.analytic == "cantor") vol = analytic::cantorTubeVolume;
        else if (opt.analytic == "astring") vol = analytic::aStringTubeVolume;
        else throw data_error("tube sweep supports --analytic cantor|astring");
        std::ostringstream out;
        io::writeTubeCsv(out, TubeFunction(m, vol, 1e-6, 1e-1));
        emit(opt, out.str());
        return 0;
    }
    if (!(opt.eps > 0.0)) throw domain_error("tube: need --eps > 0");
    const auto cloud = loadCloud(opt);
    const auto res = tubeVolume(cloud, opt.eps);
    json j{{"eps", opt.eps}, {"vol", res.volume}, {"error_bound", res.errorBound}, {"exact", res.exact}};
    emit(opt, j.dump(2) + "\n");
    return 0;
}

int cmdMoran(const Options& opt) {
    if (opt.ratios.empty()) throw domain_error("moran: need --ratios r1,r2,...");
    IfsSpec spec;
    spec.ambientDim = 1;
    std::stringstream ss(opt.ratios);
    std::string cell;
    while (std::getline(ss, cell, ',')) spec.maps.push_back({std::stod(cell), {0.0}});
    const double sigma = moranSolve(spec);
    double residual = -1.0;
    for (const auto& map : spec.maps) residual += std::pow(map.ratio, sigma);
    const auto lattice = classifyLattice(spec);
    json j{{"sigma", sigma},
           {"residual", residual},
           {"lattice", lattice.isLattice}};
    if (lattice.isLattice) {
        j["r"] = lattice.r;
        j["oscillatory_period"] = lattice.oscillatoryPeriod;
        j["exponents"] = lattice.exponents;
    }
    emit(opt, j.dump(2) + "\n");
    return 0;
}

int cmdVerify(const Options& opt) {
    Options local = opt;
    if (local.analytic.empty() && local.input.empty()) local.analytic = "cantor";
    const auto cloud = loadCloud(local);
    const auto rep = dimReport(cloud, local);
    const double gap = rep["max_discrepancy"].get<double>();
    const bool pass = gap <= 0.05;
    json j = rep;
    j["tolerance"] = 0.05;
    j["pass"] = pass;
    emit(opt, j.dump(2) + "\n");
    return pass ? 0 : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractal strings, box-counting dimensions, and zeta functions"};
    app.require_subcommand(1);

    Options opt;
    std::string command;
    for (const char* name : {"dim", "string", "zeta", "poles", "tube", "moran", "verify"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--input", opt.input, "input file (cloud CSV or string JSON)");
        sub->add_option("--analytic", opt.analytic, "built-in generator: cantor|setf|astring|...");
        sub->add_option("--form", opt.analytic, "alias of --analytic for zeta forms");
        sub->add_option("--variant", opt.variant, "box-count variant");
        sub->add_option("--lambda", opt.lambda, "scale base for box-count grids");
        sub->add_option("--eps", opt.eps, "neighborhood width");
        sub->add_option("--kmin", opt.kMin, "smallest scale exponent");
        sub->add_option("--kmax", opt.kMax, "largest scale exponent (0 = auto)");
        sub->add_option("--tmax", opt.tMax, "imaginary-part window for pole search");
        sub->add_option("--s-rect", opt.sRect, "re0,re1,im0,im1,nre,nim sweep rectangle");
        sub->add_option("--delta", opt.delta, "extrapolation offset");
        sub->add_option("--seed", opt.seed, "random seed");
        sub->add_option("--format", opt.format, "json|csv");
        sub->add_option("--output", opt.output, "output path (default stdout)");
        sub->add_option("--ratios", opt.ratios, "comma-separated contraction ratios (moran)");
        sub->callback([&command, name] { command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (command == "dim") return cmdDim(opt);
        if (command == "string") return cmdString(opt);
        if (command == "zeta") return cmdZeta(opt);
        if (command == "poles") return cmdPoles(opt);
        if (command == "tube") return cmdTube(opt);
        if (command == "moran") return cmdMoran(opt);
        if (command == "verify") return cmdVerify(opt);
        std::cerr << "error: unknown command\n";
        return kExitUsage;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const insufficient_data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const error& e) {  // domain, divergence, resource, unsupported
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
