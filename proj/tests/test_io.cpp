#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fraczeta/analytic.hpp"
#include "fraczeta/io.hpp"
#include "helpers.hpp"

using namespace fraczeta;

namespace {

TEST(Io, FractalStringRoundTrip) {
    std::mt19937_64 rng(73);
    for (int c = 0; c < 50; ++c) {
        const auto s = testutil::randomTailedString(rng);
        const auto j = io::toJson(s);
        const auto back = io::stringFromJson(j);
        ASSERT_EQ(back.storedEntryCount(), s.storedEntryCount());
        for (std::size_t i = 0; i < s.storedEntryCount(); ++i) {
            EXPECT_EQ(back.storedScales()[i].scale, s.storedScales()[i].scale);
            EXPECT_EQ(back.storedScales()[i].mult, s.storedScales()[i].mult);
        }
        ASSERT_TRUE(back.tail().has_value());
        EXPECT_EQ(back.tail()->ratio, s.tail()->ratio);
        EXPECT_EQ(back.tail()->growth, s.tail()->growth);
        EXPECT_EQ(back.tail()->onset, s.tail()->onset);
        EXPECT_EQ(back.tail()->period, s.tail()->period);
    }
}

TEST(Io, FractalStringJsonShape) {
    const auto j = io::toJson(analytic::cantorBoxCountingString());
    ASSERT_TRUE(j.contains("scales"));
    ASSERT_TRUE(j.contains("tail"));
    EXPECT_EQ(j["scales"][0]["l"], 1.0);
    EXPECT_EQ(j["scales"][0]["m"], 2);
    EXPECT_EQ(j["tail"]["g"], 2);
    EXPECT_EQ(j["tail"]["onset"], 2);
}

TEST(Io, FractalStringBadJson) {
    EXPECT_THROW(io::stringFromJson(io::parseJson("{}")), data_error);
    EXPECT_THROW(io::stringFromJson(io::parseJson(R"({"scales":[]})")), data_error);
    EXPECT_THROW(io::stringFromJson(io::parseJson(R"({"scales":[{"l":-1,"m":2}]})")), data_error);
    EXPECT_THROW(io::parseJson("not json"), data_error);
}

TEST(Io, IfsRoundTrip) {
    const auto spec = setFIfs();
    const auto back = io::ifsFromJson(io::toJson(spec));
    ASSERT_EQ(back.maps.size(), spec.maps.size());
    EXPECT_EQ(back.ambientDim, spec.ambientDim);
    for (std::size_t i = 0; i < spec.maps.size(); ++i) {
        EXPECT_EQ(back.maps[i].ratio, spec.maps[i].ratio);
        EXPECT_EQ(back.maps[i].translation, spec.maps[i].translation);
    }
}

TEST(Io, PolesRoundTrip) {
    std::vector<PoleData> poles = {{Complex(0.5, 1.25), Complex(0.125, -2.0), 1},
                                   {Complex(0.5, -1.25), Complex(0.125, 2.0), 1}};
    const auto back = io::polesFromJson(io::toJson(poles));
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].location, poles[0].location);
    EXPECT_EQ(back[1].residue, poles[1].residue);
}

TEST(Io, CloudCsvRoundTrip) {
    std::mt19937_64 rng(79);
    const auto cloud = testutil::randomCloud1d(rng, 25);
    std::stringstream ss;
    io::writeCloudCsv(ss, cloud);
    const auto back = io::readCloudCsv(ss);
    ASSERT_EQ(back.size(), cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i)
        EXPECT_EQ(back.point(i)[0], cloud.point(i)[0]);  // exact round trip

    std::stringstream s2d;
    io::writeCloudCsv(s2d, fraczeta::generateAttractor(setFIfs(), 2));
    const auto back2 = io::readCloudCsv(s2d);
    EXPECT_EQ(back2.dim(), 2u);
    EXPECT_EQ(back2.size(), 16u);
}

TEST(Io, CloudCsvErrors) {
    std::stringstream bad1("y1\n0.5\n");
    EXPECT_THROW(io::readCloudCsv(bad1), data_error);
    std::stringstream bad2("x1,x2\n0.5\n");
    EXPECT_THROW(io::readCloudCsv(bad2), data_error);
    std::stringstream bad3("x1\nhello\n");
    EXPECT_THROW(io::readCloudCsv(bad3), data_error);
}

TEST(Io, TubeCsvRoundTrip) {
    const TubeFunction tf(1, {{0.01, 0.3}, {0.1, 0.8}, {1.0, 2.0}});
    std::stringstream ss;
    io::writeTubeCsv(ss, tf);
    const auto back = io::readTubeCsv(ss, 1);
    EXPECT_EQ(back.samples().size(), 3u);
    EXPECT_EQ(back.samples()[1].second, 0.8);  // exact round trip of the sample
    EXPECT_NEAR(back(0.1), 0.8, 1e-14);        // interpolation at a node
    std::stringstream bad("eps;vol\n");
    EXPECT_THROW(io::readTubeCsv(bad, 1), data_error);
}

TEST(Io, FormatDoubleRoundTrip) {
    std::mt19937_64 rng(83);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int c = 0; c < 1000; ++c) {
        const double v = std::ldexp(u(rng), c % 60 - 30);
        EXPECT_EQ(std::stod(io::formatDouble(v)), v);
    }
}

}  // namespace
