#include <gtest/gtest.h>

#include <cmath>

#include "snn/dataset.hpp"
#include "snn/errors.hpp"
#include "snn/experiments.hpp"
#include "snn/limit_ode.hpp"
#include "snn/ode.hpp"

using namespace snn;

namespace {

Eigen::VectorXd euler(const Eigen::MatrixXd& A, const Eigen::VectorXd& Y, double T, long steps) {
    const double dt = T / static_cast<double>(steps);
    const double M = static_cast<double>(Y.size());
    Eigen::VectorXd h = Eigen::VectorXd::Zero(Y.size()), k(Y.size());
    for (long n = 0; n < steps; ++n) {
        k.noalias() = A * (Y - h);
        h += (dt / M) * k;
    }
    return h;
}

}  // namespace

TEST(TimeGrid, RejectsNonIntegerStepCount) {
    EXPECT_THROW(TimeGrid::make(1.0, 0.3), DomainError);
    EXPECT_EQ(TimeGrid::make(1.0, 1e-3).steps, 1000);
}

TEST(IntegrateH, ScalarClosedForm) {
    const TimeGrid g = TimeGrid::make(1.0, 1e-3);
    const StagedPath h = integrate_h(Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::VectorXd::Ones(1),
                                     Eigen::VectorXd::Zero(1), g);
    EXPECT_NEAR(h.node_value(g.steps, 0), 0.8646647167633873, 1e-10);
    EXPECT_EQ(h.node_value(0, 0), 0.0);
}

TEST(IntegrateH, MatchesRichardsonEulerOracle) {
    const DefaultProblem dp;
    const LimitProblem p = dp.limit();
    const TimeGrid g = TimeGrid::make(1.0, 1e-3);
    const StagedPath h = integrate_h(p.tables.A, p.Y, Eigen::VectorXd::Zero(p.M()), g);
    const Eigen::VectorXd oracle = 2.0 * euler(p.tables.A, p.Y, 1.0, 1000000) - euler(p.tables.A, p.Y, 1.0, 500000);
    EXPECT_LT((h.node(g.steps) - oracle).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Rk4, FourthOrderConvergence) {
    auto err = [](double dt) {
        const TimeGrid g = TimeGrid::make(2.0, dt);
        const StagedPath p = rk4_staged(g, Eigen::VectorXd::Ones(1),
                                        [](int, int, const Eigen::VectorXd& y, Eigen::VectorXd& dy) { dy = -3.0 * y; });
        return std::abs(p.node_value(g.steps, 0) - std::exp(-6.0));
    };
    const double ratio = err(0.02) / err(0.01);
    EXPECT_NEAR(std::log2(ratio), 4.0, 0.1);
}

TEST(Rk4, StagesFollowTheClassicalScheme) {
    const TimeGrid g = TimeGrid::make(0.5, 0.25);
    const StagedPath p = rk4_staged(g, Eigen::VectorXd::Ones(1),
                                    [](int, int, const Eigen::VectorXd& y, Eigen::VectorXd& dy) { dy = -y; });
    const double dt = 0.25, y0 = 1.0;
    const double k1 = -y0, y2 = y0 + dt / 2 * k1, k2 = -y2, y3 = y0 + dt / 2 * k2, k3 = -y3, y4 = y0 + dt * k3;
    EXPECT_EQ(p.stage_value(0, 0, 0), y0);
    EXPECT_DOUBLE_EQ(p.stage_value(0, 1, 0), y2);
    EXPECT_DOUBLE_EQ(p.stage_value(0, 2, 0), y3);
    EXPECT_DOUBLE_EQ(p.stage_value(0, 3, 0), y4);
    EXPECT_DOUBLE_EQ(p.node_value(1, 0), y0 + dt / 6 * (k1 + 2 * k2 + 2 * k3 - y4));
}

TEST(Rk4, NonFiniteStateRaises) {
    const TimeGrid g = TimeGrid::make(1.0, 0.5);
    EXPECT_THROW(rk4_staged(g, Eigen::VectorXd::Ones(1),
                            [](int, int, const Eigen::VectorXd&, Eigen::VectorXd& dy) { dy(0) = NAN; }),
                 NumericError);
}
