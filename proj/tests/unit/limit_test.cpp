#include <gtest/gtest.h>

#include <cmath>

#include "snn/errors.hpp"
#include "snn/expansion.hpp"
#include "snn/experiments.hpp"
#include "snn/kernels.hpp"
#include "snn/limit_ode.hpp"

using namespace snn;

namespace {

Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

LimitProblem small_problem() {
    DefaultProblem dp;
    dp.N1 = 3;
    dp.input_radius = 1.0;
    dp.law_c = "discrete:-1/0.75,3/0.25";
    dp.law_w2 = "discrete:-1/0.75,3/0.25";
    return dp.limit();
}

}  // namespace

TEST(Regime, Windows) {
    const RegimeInfo a = classify_regime(0.6);
    EXPECT_EQ(a.nu, 1);
    EXPECT_NEAR(a.exponent, 0.1, 1e-15);
    EXPECT_FALSE(a.boundary);
    const RegimeInfo b = classify_regime(0.8);
    EXPECT_EQ(b.nu, 2);
    EXPECT_NEAR(b.exponent, 0.2, 1e-15);
    const RegimeInfo c = classify_regime(0.75);
    EXPECT_EQ(c.nu, 2);
    EXPECT_TRUE(c.boundary);
    EXPECT_TRUE(classify_regime(5.0 / 6.0).boundary);
    EXPECT_THROW(classify_regime(0.5), DomainError);
    EXPECT_THROW(classify_regime(1.0), DomainError);
}

TEST(Regime, ExponentInHalfOpenInterval) {
    for (double g = 0.51; g < 1.0; g += 0.01) {
        const RegimeInfo r = classify_regime(g);
        EXPECT_GE(r.nu, 1);
        EXPECT_GT(r.exponent, 0.0);
        EXPECT_LE(r.exponent, 0.5);
    }
}

TEST(IntegrateK, HomogeneousScalarDecay) {
    const TimeGrid g = TimeGrid::make(1.0, 1e-3);
    const StagedPath K = integrate_K(classify_regime(0.6), scalar(2.0), Eigen::VectorXd::Ones(1), g);
    EXPECT_NEAR(K.node_value(g.steps, 0), 0.1353352832366127, 1e-10);
    const StagedPath Z = integrate_K(classify_regime(0.6), scalar(2.0), Eigen::VectorXd::Zero(1), g);
    EXPECT_EQ(Z.nodes().cwiseAbs().maxCoeff(), 0.0);
    EXPECT_THROW(integrate_K(classify_regime(0.8), scalar(2.0), Eigen::VectorXd::Ones(1), g), DomainError);
}

TEST(IntegratePsi, HomogeneousScalarDecay) {
    const TimeGrid g = TimeGrid::make(1.0, 1e-3);
    const StagedPath P = integrate_Psi(classify_regime(0.8), scalar(2.0), Eigen::VectorXd::Constant(1, 0.5), g);
    for (int n : {0, 250, 1000}) EXPECT_NEAR(P.node_value(n, 0), 0.5 * std::exp(-2.0 * g.t(n)), 1e-12);
    const StagedPath Z = integrate_Psi(classify_regime(0.8), scalar(2.0), Eigen::VectorXd::Zero(1), g);
    EXPECT_EQ(Z.nodes().cwiseAbs().maxCoeff(), 0.0);
}

TEST(IntegrateL, StartsAtZeroAndIgnoresConstants) {
    const LimitProblem p = small_problem();
    const TimeGrid g = TimeGrid::make(0.5, 1e-2);
    const StagedPath h = integrate_h(p.tables.A, p.Y, Eigen::VectorXd::Zero(p.M()), g);
    const KernelFamily fam(p);
    std::vector<TestFunction> fs = fam.functions();
    fs.push_back(p.space->constant(2.5));
    const StagedPath l = integrate_l(fs, p, h);
    EXPECT_EQ(l.node(0).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(l.nodes().row(fs.size() - 1).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_GT(l.nodes().cwiseAbs().maxCoeff(), 0.0);
    const StagedPath K = integrate_K(classify_regime(0.8), p, fam, h,
                                     integrate_l(fam.functions(), p, h), Eigen::VectorXd::Zero(p.M()));
    const StagedPath L = integrate_L(fs, p, h, K);
    EXPECT_EQ(L.node(0).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(L.nodes().row(fs.size() - 1).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Expansion, MatchesDirectLimitEquations) {
    const LimitProblem p = small_problem();
    const TimeGrid g = TimeGrid::make(0.5, 1e-3);
    const StagedPath h = integrate_h(p.tables.A, p.Y, Eigen::VectorXd::Zero(p.M()), g);
    const KernelFamily fam(p);
    const StagedPath l = integrate_l(fam.functions(), p, h);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(p.M());
    const RegimeInfo r = classify_regime(6.0 / 7.0);
    const ExpansionState e = expansion_recursion(r, p, h, zero);
    EXPECT_EQ(e.Q[0], h.nodes());
    const StagedPath K = integrate_K(r, p, fam, h, l, zero);
    const StagedPath L = integrate_L(fam.functions(), p, h, K);
    const StagedPath Psi = integrate_Psi(r, p, fam, h, K, l, L, zero);
    EXPECT_LT((e.Q[1] - K.nodes()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((e.Q[2] - Psi.nodes()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_GT(Psi.nodes().cwiseAbs().maxCoeff(), 1e-4);
    const StagedPath printed = integrate_Psi(r, p, fam, h, K, l, L, zero, PsiForm::AsPrinted);
    EXPECT_GT((printed.nodes() - Psi.nodes()).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Expansion, HomogeneousDataGivesZeroCorrections) {
    LimitProblem p = small_problem();
    p.Y.setZero();
    const TimeGrid g = TimeGrid::make(0.2, 1e-2);
    const StagedPath h = integrate_h(p.tables.A, p.Y, Eigen::VectorXd::Zero(p.M()), g);
    const ExpansionState e = expansion_recursion(classify_regime(6.0 / 7.0), p, h, Eigen::VectorXd::Zero(p.M()));
    for (const auto& q : e.Q) EXPECT_EQ(q.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Expansion, ReconstructionInFirstWindow) {
    const LimitProblem p = small_problem();
    const TimeGrid g = TimeGrid::make(0.2, 1e-2);
    const StagedPath h = integrate_h(p.tables.A, p.Y, Eigen::VectorXd::Zero(p.M()), g);
    const Eigen::VectorXd G = gaussian_draw(fluctuation_covariance(p.X, p.law, *p.space), 3);
    const ExpansionState e = expansion_recursion(classify_regime(0.6), p, h, G);
    ASSERT_EQ(e.Q.size(), 2u);
    const Eigen::MatrixXd r = reconstruct(e, 1024.0, 0.6);
    EXPECT_LT((r - (e.Q[0] + std::pow(1024.0, -0.1) * e.Q[1])).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((reconstruct(e, 1e300, 0.6) - e.Q[0]).cwiseAbs().maxCoeff(), 1e-20);
}

TEST(GaussianDraw, MatchesCovariance) {
    Eigen::Matrix2d cov;
    cov << 2.0, 0.6, 0.6, 0.5;
    Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
    const int n = 20000;
    for (int s = 0; s < n; ++s) {
        const Eigen::VectorXd v = gaussian_draw(cov, s);
        acc += v * v.transpose();
    }
    acc /= n;
    EXPECT_LT((acc - cov).cwiseAbs().maxCoeff(), 0.06);
}
