#include <gtest/gtest.h>

#include <cmath>

#include "snn/errors.hpp"
#include "snn/rng.hpp"
#include "snn/stats.hpp"

using namespace snn;

TEST(Stats, MomentsAndJackknife) {
    const std::vector<double> x{1.0, 2.0, 4.0, 7.0};
    EXPECT_DOUBLE_EQ(mean(x), 3.5);
    EXPECT_DOUBLE_EQ(variance(x), 7.0);
    EXPECT_NEAR(mean_se(x), std::sqrt(7.0 / 4.0), 1e-14);
    EXPECT_THROW(variance({1.0}), DomainError);
    EXPECT_THROW(mean({}), DomainError);
}

TEST(Stats, VarianceJackknifeMatchesDirectLeaveOneOut) {
    Rng rng = make_rng(3);
    std::vector<double> x(25);
    for (double& v : x) v = standard_normal(rng);
    std::vector<double> loo;
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::vector<double> y = x;
        y.erase(y.begin() + static_cast<long>(i));
        loo.push_back(variance(y));
    }
    const double n = static_cast<double>(x.size()), m = mean(loo);
    double acc = 0.0;
    for (double v : loo) acc += (v - m) * (v - m);
    EXPECT_NEAR(variance_se(x), std::sqrt((n - 1) / n * acc), 1e-12);
}

TEST(ScalingFit, ExactPowerLaw) {
    const std::vector<double> n{256, 1024, 4096};
    std::vector<double> v;
    for (double k : n) v.push_back(2.0 * std::pow(k, -0.3));
    const ScalingFitReport r = scaling_fit("q", n, v, -0.3, 0.01);
    EXPECT_NEAR(r.slope, -0.3, 1e-12);
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(scaling_fit("q", n, {1.5, 1.5, 1.5}, 0.0, 0.01).slope, 0.0, 1e-14);
}

TEST(ScalingFit, RejectsDegenerateGrids) {
    EXPECT_THROW(scaling_fit("q", {10, 100}, {1, 2}, 0, 1), DomainError);
    EXPECT_THROW(scaling_fit("q", {10, 20, 40}, {1, 2, 3}, 0, 1), DomainError);
    EXPECT_THROW(scaling_fit("q", {10, 100, 1000}, {1, 0, 3}, 0, 1), DomainError);
}

TEST(Kolmogorov, SurvivalFunctionReference) {
    const std::vector<std::pair<double, double>> ref{{0.3, 0.9999906941986655},   {0.5, 0.9639452436648751},
                                                     {0.8, 0.5441424115741981},   {1.0, 0.26999967167735456},
                                                     {1.36, 0.049485876755377876}, {2.0, 0.0006709252557796953}};
    for (const auto& [x, p] : ref) EXPECT_NEAR(kolmogorov_sf(x), p, 1e-12) << x;
}

TEST(Normality, CalibratedUnderTheNull) {
    Rng rng = make_rng(11);
    int accepted = 0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) {
        std::vector<double> s(500);
        for (double& v : s) v = 1.5 * standard_normal(rng);
        accepted += normality_check(s, 2.25).p_value > 0.01;
    }
    EXPECT_GE(accepted, static_cast<int>(0.98 * reps));
}

TEST(Normality, RejectsDegenerateSamples) {
    const std::vector<double> zeros(600, 0.0);
    EXPECT_LT(normality_check(zeros, 1.0).p_value, 1e-6);
    EXPECT_THROW(normality_check(std::vector<double>(100, 0.0), 1.0), DomainError);
    EXPECT_THROW(normality_check(zeros, 0.0), DomainError);
}

TEST(VarianceBand, ChiSquareQuantiles) {
    const Band b = variance_band(2.0, 1000, 0.99);
    EXPECT_NEAR(b.lo, 1.7770192897247619, 1e-9);
    EXPECT_NEAR(b.hi, 2.2380189242815636, 1e-9);
}
