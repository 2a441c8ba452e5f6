#include <gtest/gtest.h>

#include <cmath>

#include "snn/errors.hpp"
#include "snn/model.hpp"

using namespace snn;

TEST(Init, PointMassLawGivesZeroParameters) {
    const ScalingConfig cfg = ScalingConfig::two_layer(3, 5, 1.0, 1.0, 2);
    InitLaw law;
    law.c = law.w2 = law.w1 = Law1d::point_mass(0.0);
    const Theta th = init_params(cfg, law, 4);
    EXPECT_EQ(th.C.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(th.W1.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(th.W[0].cwiseAbs().maxCoeff(), 0.0);
}

TEST(Init, RademacherOutputWeightsHaveUnitMagnitude) {
    const Theta th = init_params(ScalingConfig::two_layer(3, 64, 1.0, 1.0, 2), InitLaw::standard(), 9);
    for (Eigen::Index i = 0; i < th.C.size(); ++i) EXPECT_EQ(std::abs(th.C(i)), 1.0);
}

TEST(Init, RademacherMeanConcentrates) {
    // sd of the mean is 0.01, so 0.04 is a four-sigma band.
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Theta th = init_params(ScalingConfig::two_layer(1, 10000, 1.0, 1.0, 1), InitLaw::standard(), seed);
        EXPECT_LT(std::abs(th.C.mean()), 0.04);
    }
}

TEST(Init, SameSeedIsDeterministic) {
    const ScalingConfig cfg = ScalingConfig::three_layer(3, 4, 5, 0.5, 0.75, 1.0, 2);
    const Theta a = init_params(cfg, InitLaw::standard(), 17), b = init_params(cfg, InitLaw::standard(), 17);
    EXPECT_EQ(a.W1, b.W1);
    EXPECT_EQ(a.W[1], b.W[1]);
    EXPECT_EQ(a.C, b.C);
}

TEST(Forward, ZeroOutputWeightsGiveZero) {
    const ScalingConfig cfg = ScalingConfig::two_layer(3, 7, 0.5, 0.75, 2);
    Theta th = init_params(cfg, InitLaw::standard(), 1);
    th.C.setZero();
    EXPECT_EQ(forward(cfg, th, Eigen::Vector2d(0.3, -1.2)).output(), 0.0);
}

TEST(Forward, ScalarHandComputation) {
    ScalingConfig cfg = ScalingConfig::two_layer(1, 1, 0.5, 0.5, 2);
    Theta th;
    th.W1 = Eigen::RowVector2d(1.0, 0.0);
    th.W = {Eigen::MatrixXd::Constant(1, 1, 2.0)};
    th.C = Eigen::MatrixXd::Constant(1, 1, 3.0);
    EXPECT_NEAR(forward(cfg, th, Eigen::Vector2d(1.0, 0.0)).output(), 2.7277550219908275, 1e-14);
}

TEST(Forward, OuterPrefactorRescalesOutput) {
    const ScalingConfig a = ScalingConfig::two_layer(4, 9, 0.75, 0.5, 3);
    const ScalingConfig b = ScalingConfig::two_layer(4, 9, 0.75, 1.0, 3);
    const Theta th = init_params(a, InitLaw::standard(), 2);
    const Eigen::Vector3d x(0.2, -0.4, 0.9);
    EXPECT_NEAR(forward(b, th, x).output(), std::pow(9.0, 0.5 - 1.0) * forward(a, th, x).output(), 1e-15);
}

TEST(Forward, BatchMatchesSingleCalls) {
    const ScalingConfig cfg = ScalingConfig::three_layer(3, 4, 5, 0.5, 0.75, 1.0, 2);
    const Theta th = init_params(cfg, InitLaw::standard(), 5);
    EXPECT_TRUE(forward_batch(cfg, th, Eigen::MatrixXd(0, 2)).empty());
    Eigen::MatrixXd X(3, 2);
    X << 0.1, 0.2, -0.5, 0.7, 1.5, -0.3;
    const auto out = forward_batch(cfg, th, X);
    ASSERT_EQ(out.size(), 3u);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(out[i].g, forward(cfg, th, X.row(i).transpose()).g);
}

TEST(Scaling, RejectsGammaOutsideRange) {
    EXPECT_THROW(ScalingConfig::two_layer(2, 2, 0.4, 1.0, 1).validate(), DomainError);
    EXPECT_THROW(ScalingConfig::two_layer(2, 2, 1.0, 1.2, 1).validate(), DomainError);
}
