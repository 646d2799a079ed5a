#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fraczeta/analytic.hpp"
#include "fraczeta/tube.hpp"
#include "helpers.hpp"

using namespace fraczeta;

namespace {

const double kD = analytic::kCantorDim;

TEST(Tube, ExactOneDimensional) {
    const PointCloud pair(1, {0.0, 1.0});
    const auto v = tubeVolume(pair, 0.25);
    EXPECT_TRUE(v.exact);
    EXPECT_DOUBLE_EQ(v.volume, 1.0);  // two radius-1/4 intervals meet exactly
    EXPECT_DOUBLE_EQ(tubeVolume(pair, 0.1).volume, 0.4);
    EXPECT_DOUBLE_EQ(tubeVolume(pair, 2.0).volume, 5.0);
}

TEST(Tube, CantorEndpointsMatchesClosedForm) {
    const auto cloud = analytic::cantorEndpoints(12);
    EXPECT_NEAR(tubeVolume(cloud, 1.0 / 6.0).volume, 4.0 / 3.0, 1e-12);
    for (double eps : {1e-3, 3e-3, 1e-2, 0.05, 0.1}) {
        EXPECT_NEAR(tubeVolume(cloud, eps).volume, analytic::cantorTubeVolume(eps),
                    1e-12)
            << "eps=" << eps;
    }
}

TEST(Tube, AStringCloudMatchesClosedForm) {
    const auto cloud = analytic::aStringCloud(100000);
    // the finite truncation matches the infinite set once 2 eps covers the
    // residual gap [0, 1/J]
    for (double eps : {5e-6, 1e-5, 1e-4, 1e-3}) {
        EXPECT_NEAR(tubeVolume(cloud, eps).volume, analytic::aStringTubeVolume(eps),
                    1e-12 * analytic::aStringTubeVolume(eps))
            << "eps=" << eps;
    }
}

TEST(Tube, TwoDimensionalRaster) {
    // four unit-square corners, disjoint disks
    const PointCloud corners(2, {0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0});
    const auto v = tubeVolume(corners, 0.1);
    const double exact = 4.0 * M_PI * 0.01;
    EXPECT_LE(std::abs(v.volume - exact), std::max(v.errorBound, 0.01 * exact));

    // dense points along a unit segment: a stadium of radius eps
    std::vector<double> coords;
    for (int i = 0; i <= 100; ++i) {
        coords.push_back(i / 100.0);
        coords.push_back(0.0);
    }
    const PointCloud segment(2, std::move(coords));
    const auto sv = tubeVolume(segment, 0.05);
    const double stadium = 2.0 * 0.05 * 1.0 + M_PI * 0.05 * 0.05;
    EXPECT_LE(std::abs(sv.volume - stadium), std::max(sv.errorBound, 0.01 * stadium));
}

TEST(Tube, InnerTubeVolume) {
    const auto cs = cantorString();
    EXPECT_NEAR(innerTubeVolume(cs, 1.0 / 18.0), 7.0 / 9.0, 1e-14);
    EXPECT_NEAR(innerTubeVolume(cs, 10.0), 1.0, 1e-12);  // saturates at total length
    const FractalString single({{1.0, 1.0}});
    EXPECT_DOUBLE_EQ(innerTubeVolume(single, 0.2), 0.4);
    EXPECT_DOUBLE_EQ(innerTubeVolume(single, 0.7), 1.0);
    const FractalString divergent({{0.5, 1.0}}, GeometricTail{0.5, 2.0, 1, 1});
    EXPECT_THROW(innerTubeVolume(divergent, 0.1), data_error);
}

TEST(Tube, InnerTubeCountingRelation) {
    // V(eps)/(2 eps) >= number of intervals longer than 2 eps
    const auto cs = cantorString();
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        EXPECT_GE(innerTubeVolume(cs, eps) / (2.0 * eps),
                  cs.countingFunction(1.0 / (2.0 * eps)) - 1e-9);
    }
}

TEST(Tube, MinkowskiEstimateCantor) {
    const TubeFunction tf(1, [](double e) { return analytic::cantorTubeVolume(e); }, 1e-6, 1e-1);
    const auto est = minkowskiEstimate(tf, kD, GeometricGrid{1e-5, 1e-2, 64});
    EXPECT_NEAR(est.upperContent, 2.5830, 0.02 * 2.5830);
    EXPECT_NEAR(est.lowerContent, 2.4950, 0.02 * 2.4950);
    EXPECT_GT(est.upperContent, est.lowerContent);
    EXPECT_NEAR(est.dimUpper, kD, 0.01);
    EXPECT_NEAR(est.dimLower, kD, 0.01);
}

TEST(Tube, MinkowskiDimMatchesMesh) {
    const auto cloud = analytic::cantorEndpoints(12);
    const auto tf = tubeFunctionFromCloud(cloud, 1e-5, 1e-2);
    const auto est = minkowskiEstimate(tf, kD, GeometricGrid{1e-5, 1e-2, 32});
    EXPECT_NEAR(est.dimUpper, kD, 0.03);
    EXPECT_NEAR(est.dimLower, kD, 0.03);
}

TEST(Tube, ProbeCantorLogPeriodic) {
    const TubeFunction tf(1, [](double e) { return analytic::cantorTubeVolume(e); }, 1e-6, 1e-1);
    const auto probe = measurabilityProbe(tf, kD);
    EXPECT_FALSE(probe.measurableConsistent);
    EXPECT_NEAR(probe.period, std::log(3.0), 0.01 * std::log(3.0));
}

TEST(Tube, ProbeMeasurablePowerLaw) {
    const TubeFunction tf(1, [](double e) { return 3.0 * std::pow(e, 0.4); }, 1e-6, 1e-1);
    const auto probe = measurabilityProbe(tf, 0.6);
    EXPECT_TRUE(probe.measurableConsistent);
    EXPECT_NEAR(probe.content, 3.0, 0.01 * 3.0);
}

TEST(Tube, ProbeAStringMeasurable) {
    const TubeFunction tf(1, [](double e) { return analytic::aStringTubeVolume(e); }, 1e-8, 1e-2);
    const auto probe = measurabilityProbe(tf, 0.5);
    EXPECT_TRUE(probe.measurableConsistent);
    EXPECT_NEAR(probe.content, 2.0 * std::sqrt(2.0), 0.02 * 2.0 * std::sqrt(2.0));
}

TEST(Tube, MonotoneAndScaling) {
    std::mt19937_64 rng(53);
    for (int c = 0; c < 20; ++c) {
        const auto cloud = testutil::randomCloud1d(rng, 60);
        double prev = 0.0;
        for (double eps : {1e-4, 1e-3, 1e-2, 0.1, 1.0}) {
            const double v = tubeVolume(cloud, eps).volume;
            EXPECT_GE(v, prev);
            prev = v;
        }
        // scaling: vol_{cA}(c eps) = c vol_A(eps)
        std::vector<double> scaled = cloud.coords();
        for (auto& p : scaled) p *= 2.5;
        const PointCloud cloud2(1, std::move(scaled));
        EXPECT_NEAR(tubeVolume(cloud2, 2.5 * 0.01).volume,
                    2.5 * tubeVolume(cloud, 0.01).volume, 1e-12);
    }
}

TEST(Tube, TubeFunctionFromCloudMatchesDirect) {
    std::mt19937_64 rng(59);
    for (int c = 0; c < 20; ++c) {
        const auto cloud = testutil::randomCloud1d(rng, 40);
        const auto tf = tubeFunctionFromCloud(cloud, 1e-5, 0.5);
        for (double eps : {1e-5, 1e-4, 1e-3, 0.02, 0.3}) {
            EXPECT_NEAR(tf(eps), tubeVolume(cloud, eps).volume, 1e-13);
        }
    }
}

TEST(Tube, TubeFunctionValidation) {
    EXPECT_THROW(TubeFunction(0, {{0.1, 1.0}, {0.2, 2.0}}), data_error);
    EXPECT_THROW(TubeFunction(1, {{0.2, 1.0}, {0.1, 2.0}}), data_error);
    EXPECT_THROW(TubeFunction(1, {{0.1, 2.0}, {0.2, 1.0}}), data_error);
}

}  // namespace
