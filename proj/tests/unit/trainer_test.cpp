#include <gtest/gtest.h>

#include <cmath>

#include "snn/dataset.hpp"
#include "snn/errors.hpp"
#include "snn/stats.hpp"
#include "snn/trainer.hpp"

using namespace snn;

namespace {

double fd_output(const ScalingConfig& cfg, Theta& th, double* p, const Eigen::VectorXd& x) {
    const double h = 1e-4, v0 = *p;
    auto at = [&](double dv) {
        *p = v0 + dv;
        const double g = forward(cfg, th, x).output();
        *p = v0;
        return g;
    };
    return (8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h);
}

// Checks theta' - theta = rate * e * dg/dparam for each scalar parameter.
void check_scalar_chain(const ScalingConfig& cfg, const Theta& th, const Theta& next, const RateSchedule& rates,
                        const Eigen::VectorXd& x, double y) {
    const double e = y - forward(cfg, th, x).output();
    Theta t = th;
    auto check = [&](double* p, double after, double rate) {
        const double before = *p;
        const double fd = fd_output(cfg, t, p, x);
        EXPECT_NEAR((after - before) / (rate * e), fd, 1e-6 * std::max(1.0, std::abs(fd)));
    };
    check(t.C.data(), next.C(0, 0), rates.C());
    check(t.W1.data(), next.W1(0, 0), rates.W(1));
    for (std::size_t k = 0; k < t.W.size(); ++k) check(t.W[k].data(), next.W[k](0, 0), rates.W(int(k) + 2));
}

}  // namespace

TEST(Sgd, ZeroResidualLeavesParametersUnchanged) {
    const ScalingConfig cfg = ScalingConfig::two_layer(3, 5, 0.75, 0.75, 2);
    const Theta th = init_params(cfg, InitLaw::standard(), 1);
    const Eigen::Vector2d x(0.5, -0.2);
    const double y = forward(cfg, th, x).output();
    const Theta n = sgd_step_two_layer(th, x, y, rates_for(cfg), cfg);
    EXPECT_EQ(n.C, th.C);
    EXPECT_EQ(n.W1, th.W1);
    EXPECT_EQ(n.W[0], th.W[0]);
}

TEST(Sgd, ZeroRatesLeaveParametersUnchanged) {
    const ScalingConfig cfg = ScalingConfig::three_layer(2, 3, 4, 0.75, 0.75, 1.0, 2);
    const Theta th = init_params(cfg, InitLaw::standard(), 1);
    const Theta n = sgd_step_three_layer(th, Eigen::Vector2d(0.5, -0.2), 2.0, rates_for(cfg).scaled(0.0), cfg);
    EXPECT_EQ(n.C, th.C);
    EXPECT_EQ(n.W1, th.W1);
    EXPECT_EQ(n.W[1], th.W[1]);
}

TEST(Sgd, ScalarTwoLayerMatchesFiniteDifferences) {
    const ScalingConfig cfg = ScalingConfig::two_layer(1, 1, 0.75, 0.5, 1);
    Theta th;
    th.W1 = Eigen::MatrixXd::Constant(1, 1, 0.7);
    th.W = {Eigen::MatrixXd::Constant(1, 1, -1.3)};
    th.C = Eigen::MatrixXd::Constant(1, 1, 0.9);
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 1.4);
    const RateSchedule r = rates_for(cfg);
    check_scalar_chain(cfg, th, sgd_step_two_layer(th, x, 0.3, r, cfg), r, x, 0.3);
}

TEST(Sgd, ScalarThreeLayerMatchesFiniteDifferences) {
    const ScalingConfig cfg = ScalingConfig::three_layer(1, 1, 1, 1.0, 0.75, 0.5, 1);
    Theta th;
    th.W1 = Eigen::MatrixXd::Constant(1, 1, 0.7);
    th.W = {Eigen::MatrixXd::Constant(1, 1, -1.3), Eigen::MatrixXd::Constant(1, 1, 0.4)};
    th.C = Eigen::MatrixXd::Constant(1, 1, 0.9);
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, -0.8);
    const RateSchedule r = rates_for(cfg);
    check_scalar_chain(cfg, th, sgd_step_three_layer(th, x, 1.1, r, cfg), r, x, 1.1);
}

TEST(Sgd, ZeroOutputWeightsFreezeHiddenLayers) {
    const ScalingConfig cfg = ScalingConfig::three_layer(2, 3, 4, 0.75, 0.75, 1.0, 2);
    Theta th = init_params(cfg, InitLaw::standard(), 3);
    th.C.setZero();
    const Theta n = sgd_step_three_layer(th, Eigen::Vector2d(0.5, -0.2), 2.0, rates_for(cfg), cfg);
    EXPECT_EQ(n.W1, th.W1);
    EXPECT_EQ(n.W[0], th.W[0]);
    EXPECT_EQ(n.W[1], th.W[1]);
    EXPECT_NE(n.C, th.C);
}

TEST(Sgd, BackpropAgreesWithExplicitLines) {
    for (int depth : {2, 3}) {
        const ScalingConfig cfg = depth == 2 ? ScalingConfig::two_layer(3, 5, 0.625, 0.875, 2)
                                             : ScalingConfig::three_layer(3, 4, 5, 0.625, 0.875, 0.75, 2);
        const Theta th = init_params(cfg, InitLaw::standard(), 8);
        const Eigen::Vector2d x(-0.3, 0.9);
        const RateSchedule r = rates_for(cfg);
        const Theta a = depth == 2 ? sgd_step_two_layer(th, x, 0.7, r, cfg) : sgd_step_three_layer(th, x, 0.7, r, cfg);
        const Theta b = sgd_step(th, x, 0.7, r, cfg);
        EXPECT_LT((a.C - b.C).cwiseAbs().maxCoeff(), 1e-14);
        EXPECT_LT((a.W1 - b.W1).cwiseAbs().maxCoeff(), 1e-14);
        for (std::size_t k = 0; k < a.W.size(); ++k) EXPECT_LT((a.W[k] - b.W[k]).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(Sgd, BatchStepAveragesSingleSampleGradients) {
    const ScalingConfig cfg = ScalingConfig::two_layer(3, 5, 0.75, 0.75, 2);
    const Theta th = init_params(cfg, InitLaw::standard(), 4);
    const Dataset ds = synth_dataset(3, 2, 6);
    const RateSchedule r = rates_for(cfg);
    const Theta one = sgd_step_batch(th, ds, {1}, Loss::Quadratic, r, cfg);
    const Theta ref = sgd_step(th, ds.x(1), ds.Y(1), r, cfg);
    EXPECT_LT((one.W[0] - ref.W[0]).cwiseAbs().maxCoeff(), 1e-14);
    const Theta two = sgd_step_batch(th, ds, {0, 2}, Loss::Quadratic, r, cfg);
    const Theta a = sgd_step(th, ds.x(0), ds.Y(0), r, cfg), b = sgd_step(th, ds.x(2), ds.Y(2), r, cfg);
    EXPECT_LT((two.C - th.C - 0.5 * ((a.C - th.C) + (b.C - th.C))).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((two.W1 - th.W1 - 0.5 * ((a.W1 - th.W1) + (b.W1 - th.W1))).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Sgd, CrossEntropyResidualSumsToZero) {
    const Eigen::Vector3d g(1000.0, 999.0, -5.0);
    const Eigen::VectorXd e = loss_residual(g, Loss::CrossEntropy, 0.0, 1);
    EXPECT_TRUE(e.allFinite());
    EXPECT_NEAR(e.sum(), 0.0, 1e-15);
    EXPECT_GT(e(1), 0.0);
    EXPECT_DOUBLE_EQ(loss_residual(Eigen::VectorXd::Constant(1, 0.25), Loss::Quadratic, 1.0, -1)(0), 0.75);
}

TEST(Train, ZeroStepsKeepsInitialState) {
    TrainConfig c;
    c.scaling = ScalingConfig::two_layer(3, 4, 0.75, 0.75, 2);
    c.rates = rates_for(c.scaling);
    c.T = 0.2;
    const Dataset ds = synth_dataset(2, 2, 1);
    const Theta th = init_params(c.scaling, InitLaw::standard(), 2);
    const Trajectory tr = train(c, ds, th);
    ASSERT_EQ(tr.t.size(), 1u);
    EXPECT_EQ(tr.h[0], outputs_on(c.scaling, th, ds.X));
}

TEST(Train, IdenticalSeedsAreBitIdentical) {
    TrainConfig c;
    c.scaling = ScalingConfig::two_layer(3, 32, 0.75, 0.75, 2);
    c.rates = rates_for(c.scaling);
    c.T = 2.0;
    c.stride = 8;
    c.seed = 42;
    const Dataset ds = synth_dataset(3, 2, 1);
    const Theta th = init_params(c.scaling, InitLaw::standard(), 2);
    const Trajectory a = train(c, ds, th), b = train(c, ds, th);
    ASSERT_EQ(a.h.size(), b.h.size());
    for (std::size_t r = 0; r < a.h.size(); ++r) EXPECT_EQ(a.h[r], b.h[r]);
    EXPECT_EQ(a.t.back(), 2.0);
}

TEST(Train, ParameterBoundAborts) {
    TrainConfig c;
    c.scaling = ScalingConfig::two_layer(3, 16, 0.75, 0.75, 2);
    c.rates = rates_for(c.scaling).scaled(1e6);
    c.T = 1.0;
    c.param_bound = 10.0;
    const Dataset ds = synth_dataset(3, 2, 1, 3.0);
    EXPECT_THROW(train(c, ds, init_params(c.scaling, InitLaw::standard(), 2)), NumericError);
}

TEST(Train, MeanFieldResidualDecreases) {
    TrainConfig c;
    c.scaling = ScalingConfig::two_layer(4, 64, 1.0, 1.0, 2);
    c.rates = rates_for(c.scaling);
    c.T = 4.0;
    c.stride = 64;
    Dataset ds = synth_dataset(1, 2, 3);
    ds.Y(0) = 0.8;
    std::vector<double> mean_res(5, 0.0);
    for (std::uint64_t s = 0; s < 32; ++s) {
        c.seed = s;
        const Trajectory tr = train(c, ds, init_params(c.scaling, InitLaw::standard(), 100 + s));
        for (int r = 0; r < 5; ++r) mean_res[r] += std::abs(ds.Y(0) - tr.h[r](0)) / 32;
    }
    for (int r = 0; r + 1 < 5; ++r) EXPECT_LT(mean_res[r + 1], mean_res[r]);
}

TEST(Train, QuadraticLossNeedsDistinctDirections) {
    TrainConfig c;
    c.scaling = ScalingConfig::two_layer(3, 4, 0.75, 0.75, 2);
    c.rates = rates_for(c.scaling);
    Dataset ds;
    ds.X = Eigen::MatrixXd(2, 2);
    ds.X << 1.0, 1.0, 2.0, 2.0;
    ds.Y = Eigen::Vector2d(0.1, 0.2);
    EXPECT_THROW(train(c, ds, init_params(c.scaling, InitLaw::standard(), 2)), DomainError);
}

TEST(Decomposition, ZeroForcingGivesZeroSides) {
    const ScalingConfig cfg = ScalingConfig::two_layer(3, 16, 0.75, 0.75, 2);
    const Theta th = init_params(cfg, InitLaw::standard(), 4);
    const Dataset ds = synth_dataset(3, 2, 1);
    const double y = forward(cfg, th, ds.x(0)).output();
    const auto a = one_step_decomposition_check(th, ds.x(0), y, rates_for(cfg), cfg, ds.X);
    EXPECT_EQ(a.actual.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(a.predicted.cwiseAbs().maxCoeff(), 0.0);
    const auto b = one_step_decomposition_check(th, ds.x(0), ds.Y(0), rates_for(cfg).scaled(0.0), cfg, ds.X);
    EXPECT_EQ(b.actual.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(b.predicted.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Decomposition, ResidualIsSecondOrderInTheStep) {
    const ScalingConfig cfg = ScalingConfig::two_layer(3, 16, 0.75, 0.75, 2);
    const Theta th = init_params(cfg, InitLaw::standard(), 4);
    const Dataset ds = synth_dataset(3, 2, 1);
    const RateSchedule r = rates_for(cfg);
    const double a = one_step_decomposition_check(th, ds.x(0), ds.Y(0), r.scaled(0.1), cfg, ds.X).max_residual;
    const double b = one_step_decomposition_check(th, ds.x(0), ds.Y(0), r.scaled(0.05), cfg, ds.X).max_residual;
    EXPECT_NEAR(std::log2(a / b), 2.0, 0.1);
}
