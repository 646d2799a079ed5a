#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fraczeta/common.hpp"

namespace fraczeta {

struct CloudMeta {
    std::string source;
    int depth = 0;
    double resolution = 0.0;  // guaranteed Hausdorff distance to the intended set, 0 if exact
};

/// A finite set of points in R^m standing in for a bounded set.
class PointCloud {
public:
    PointCloud(std::size_t dim, std::vector<double> coords, CloudMeta meta = {})
        : dim_(dim), coords_(std::move(coords)), meta_(std::move(meta)) {
        if (dim_ == 0) throw data_error("PointCloud: ambient dimension must be positive");
        if (coords_.empty() || coords_.size() % dim_ != 0)
            throw data_error("PointCloud: coordinate count must be a positive multiple of the dimension");
        for (double c : coords_)
            if (!std::isfinite(c)) throw data_error("PointCloud: coordinates must be finite");
    }

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return coords_.size() / dim_; }
    std::span<const double> point(std::size_t i) const {
        return {coords_.data() + i * dim_, dim_};
    }
    const std::vector<double>& coords() const { return coords_; }
    const CloudMeta& meta() const { return meta_; }

    std::pair<std::vector<double>, std::vector<double>> boundingBox() const {
        std::vector<double> lo(point(0).begin(), point(0).end());
        std::vector<double> hi = lo;
        for (std::size_t i = 1; i < size(); ++i) {
            auto p = point(i);
            for (std::size_t d = 0; d < dim_; ++d) {
                lo[d] = std::min(lo[d], p[d]);
                hi[d] = std::max(hi[d], p[d]);
            }
        }
        return {lo, hi};
    }

    /// Sorted distinct coordinates; only meaningful for m = 1.
    std::vector<double> sorted1d() const {
        if (dim_ != 1) throw unsupported_error("sorted1d: cloud is not one-dimensional");
        std::vector<double> pts = coords_;
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        return pts;
    }

private:
    std::size_t dim_;
    std::vector<double> coords_;  // row-major, size() * dim()
    CloudMeta meta_;
};

}  // namespace fraczeta
