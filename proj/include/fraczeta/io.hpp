#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fraczeta/common.hpp"
#include "fraczeta/ifs.hpp"
#include "fraczeta/pointcloud.hpp"
#include "fraczeta/strings.hpp"
#include "fraczeta/tube.hpp"
#include "fraczeta/zeta.hpp"

namespace fraczeta::io {

using nlohmann::json;

/// Shortest round-trip decimal form of a double (deterministic).
inline std::string formatDouble(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) {
        for (int prec = 1; prec <= 16; ++prec) {
            char shorter[40];
            std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
            std::sscanf(shorter, "%lf", &back);
            if (back == v) return shorter;
        }
    }
    return buf;
}

// ---- FractalString JSON -----------------------------------------------------
// {"scales":[{"l":1.0,"m":2},...],"tail":{"r":...,"g":2,"onset":2[,"period":3]}}

inline json toJson(const FractalString& s) {
    json j;
    j["scales"] = json::array();
    for (const auto& e : s.storedScales()) j["scales"].push_back({{"l", e.scale}, {"m", e.mult}});
    if (s.tail()) {
        const auto& t = *s.tail();
        json tj{{"r", t.ratio}, {"g", t.growth}, {"onset", t.onset}};
        if (t.period != 1) tj["period"] = t.period;
        j["tail"] = tj;
    }
    return j;
}

inline FractalString stringFromJson(const json& j) {
    try {
        std::vector<ScaleEntry> scales;
        for (const auto& e : j.at("scales"))
            scales.push_back({e.at("l").get<double>(), e.at("m").get<double>()});
        std::optional<GeometricTail> tail;
        if (j.contains("tail")) {
            const auto& t = j.at("tail");
            GeometricTail gt;
            gt.ratio = t.at("r").get<double>();
            gt.growth = t.at("g").get<double>();
            gt.onset = t.at("onset").get<std::size_t>();
            gt.period = t.value("period", std::size_t{1});
            tail = gt;
        }
        return FractalString(std::move(scales), tail);
    } catch (const json::exception& e) {
        throw data_error(std::string("FractalString JSON: ") + e.what());
    }
}

// ---- IfsSpec JSON -----------------------------------------------------------
// {"m":2,"maps":[{"r":0.25,"b":[...]}],"osc":true}

inline json toJson(const IfsSpec& spec) {
    json j;
    j["m"] = spec.ambientDim;
    j["maps"] = json::array();
    for (const auto& f : spec.maps) j["maps"].push_back({{"r", f.ratio}, {"b", f.translation}});
    j["osc"] = spec.openSetDeclared;
    return j;
}

inline IfsSpec ifsFromJson(const json& j) {
    try {
        IfsSpec spec;
        spec.ambientDim = j.at("m").get<std::size_t>();
        for (const auto& f : j.at("maps")) {
            SimilarityMap map;
            map.ratio = f.at("r").get<double>();
            map.translation = f.at("b").get<std::vector<double>>();
            spec.maps.push_back(std::move(map));
        }
        spec.openSetDeclared = j.value("osc", false);
        spec.validate();
        return spec;
    } catch (const json::exception& e) {
        throw data_error(std::string("IfsSpec JSON: ") + e.what());
    }
}

// ---- Pole table JSON --------------------------------------------------------
// [{"re":..,"im":..,"res_re":..,"res_im":..},...]

inline json toJson(const std::vector<PoleData>& poles) {
    json j = json::array();
    for (const auto& p : poles)
        j.push_back({{"re", p.location.real()},
                     {"im", p.location.imag()},
                     {"res_re", p.residue.real()},
                     {"res_im", p.residue.imag()}});
    return j;
}

inline std::vector<PoleData> polesFromJson(const json& j) {
    try {
        std::vector<PoleData> poles;
        for (const auto& p : j)
            poles.push_back({Complex(p.at("re").get<double>(), p.at("im").get<double>()),
                             Complex(p.at("res_re").get<double>(), p.at("res_im").get<double>()),
                             1});
        return poles;
    } catch (const json::exception& e) {
        throw data_error(std::string("pole table JSON: ") + e.what());
    }
}

// ---- PointCloud CSV ---------------------------------------------------------
// header x1[,x2,...], one point per row

inline void writeCloudCsv(std::ostream& os, const PointCloud& cloud) {
    for (std::size_t d = 0; d < cloud.dim(); ++d) os << (d ? "," : "") << "x" << (d + 1);
    os << "\n";
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        auto p = cloud.point(i);
        for (std::size_t d = 0; d < cloud.dim(); ++d) os << (d ? "," : "") << formatDouble(p[d]);
        os << "\n";
    }
}

inline PointCloud readCloudCsv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw data_error("cloud CSV: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t dim = 0;
    {
        std::stringstream header(line);
        std::string col;
        while (std::getline(header, col, ',')) {
            ++dim;
            if (col != "x" + std::to_string(dim))
                throw data_error("cloud CSV: header must be x1[,x2,...]");
        }
    }
    if (dim == 0) throw data_error("cloud CSV: no columns");
    std::vector<double> coords;
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t cols = 0;
        while (std::getline(ss, cell, ',')) {
            ++cols;
            try {
                std::size_t used = 0;
                coords.push_back(std::stod(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw data_error("cloud CSV: bad number at row " + std::to_string(row));
            }
        }
        if (cols != dim) throw data_error("cloud CSV: wrong column count at row " + std::to_string(row));
    }
    return PointCloud(dim, std::move(coords));
}

// ---- TubeFunction CSV -------------------------------------------------------
// header eps,vol; strictly increasing eps

inline void writeTubeCsv(std::ostream& os, const TubeFunction& tf) {
    os << "eps,vol\n";
    if (!tf.samples().empty()) {
        for (const auto& [e, v] : tf.samples())
            os << formatDouble(e) << "," << formatDouble(v) << "\n";
        return;
    }
    GeometricGrid grid{tf.epsMin(), tf.epsMax(), 32};
    for (double e : grid.values()) os << formatDouble(e) << "," << formatDouble(tf(e)) << "\n";
}

inline TubeFunction readTubeCsv(std::istream& is, std::size_t ambientDim) {
    std::string line;
    if (!std::getline(is, line)) throw data_error("tube CSV: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "eps,vol") throw data_error("tube CSV: header must be eps,vol");
    std::vector<std::pair<double, double>> samples;
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw data_error("tube CSV: missing comma at row " + std::to_string(row));
        try {
            samples.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw data_error("tube CSV: bad number at row " + std::to_string(row));
        }
    }
    return TubeFunction(ambientDim, std::move(samples));
}

// ---- zeta sweep CSV ---------------------------------------------------------
// re,im,zeta_re,zeta_im,err

struct ZetaSweepRow {
    double re = 0.0, im = 0.0;
    Complex value;
    double tailBound = 0.0;
};

inline void writeZetaCsv(std::ostream& os, const std::vector<ZetaSweepRow>& rows) {
    os << "re,im,zeta_re,zeta_im,err\n";
    for (const auto& r : rows)
        os << formatDouble(r.re) << "," << formatDouble(r.im) << "," << formatDouble(r.value.real())
           << "," << formatDouble(r.value.imag()) << "," << formatDouble(r.tailBound) << "\n";
}

// ---- file helpers -----------------------------------------------------------

inline std::string readFile(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw data_error("cannot open file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline void writeFile(const std::string& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw data_error("cannot write file: " + path);
    f << contents;
}

inline json parseJson(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw data_error(std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace fraczeta::io
