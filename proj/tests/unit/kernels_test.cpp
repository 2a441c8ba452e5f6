#include <gtest/gtest.h>

#include <cmath>

#include "snn/dataset.hpp"
#include "snn/kernels.hpp"
#include "snn/rng.hpp"

using namespace snn;

namespace {

struct Particle {
    InitLaw law;
    std::shared_ptr<const ParticleSpace> space;
};

Particle make(int n1, int d, double gamma1, std::uint64_t seed = 5) {
    Particle s;
    s.law = InitLaw::standard().with_frozen_w1(n1, d, seed);
    s.space = ParticleSpace::create(n1, d, gamma1, Activation());
    return s;
}

Eigen::VectorXd random_particle(const ParticleSpace& s, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    Eigen::VectorXd p(s.P());
    for (int k = 0; k < p.size(); ++k) p(k) = standard_normal(rng);
    return p;
}

}  // namespace

TEST(Expect, Normalization) {
    const Particle s = make(3, 2, 0.75);
    EXPECT_DOUBLE_EQ(expect(s.space->constant(1.0), s.law).value, 1.0);
    EXPECT_NEAR(expect(s.space->c(), s.law).value, 0.0, 1e-15);
}

TEST(Expect, EnumerationAgreesWithMonteCarlo) {
    const Particle s = make(3, 2, 0.75);
    const Eigen::Vector2d x(0.6, -0.8);
    const TestFunction sz = s.space->act(0, s.space->Z(x));
    const TestFunction f = s.space->product({s.space->c(), s.space->c(), sz, sz});
    ExpectOptions mc;
    mc.method = ExpectMethod::MonteCarlo;
    mc.mc_seed = 7;
    ExpectOptions en;
    en.method = ExpectMethod::Enumerate;
    const Expectation a = expect(f, s.law, en), b = expect(f, s.law, mc);
    EXPECT_EQ(a.points, 16u);
    EXPECT_GT(b.std_error, 0.0);
    EXPECT_LT(std::abs(a.value - b.value), 4 * b.std_error);
}

TEST(KernelTables, MatchBruteForceEnumeration) {
    const int n1 = 2, d = 2;
    const double g1 = 0.75;
    const Particle s = make(n1, d, g1);
    Eigen::MatrixXd X(2, d);
    X << 1.0, 0.0, 0.3, 0.9;
    const KernelTables t = build_kernels(X, s.law, *s.space);
    const Eigen::MatrixXd& W1 = *s.law.w1_atoms;
    Eigen::MatrixXd B1 = Eigen::MatrixXd::Zero(2, 2), B3 = Eigen::MatrixXd::Zero(n1, 2);
    std::vector<Eigen::MatrixXd> B2(n1, Eigen::MatrixXd::Zero(2, 2));
    const double pre = std::pow(n1, -g1);
    auto dtanh = [](double z) { return 1.0 - std::tanh(z) * std::tanh(z); };
    for (int mask = 0; mask < (1 << (1 + n1)); ++mask) {
        const double c = (mask & 1) ? 1.0 : -1.0;
        const double w2[2] = {(mask & 2) ? 1.0 : -1.0, (mask & 4) ? 1.0 : -1.0};
        const double wt = 1.0 / (1 << (1 + n1));
        double Z[2];
        for (int a = 0; a < 2; ++a) {
            Z[a] = 0.0;
            for (int j = 0; j < n1; ++j) Z[a] += pre * w2[j] * std::tanh(W1.row(j).dot(X.row(a)));
        }
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                B1(a, b) += wt * std::tanh(Z[a]) * std::tanh(Z[b]);
                for (int j = 0; j < n1; ++j)
                    B2[j](a, b) += wt * c * c * dtanh(Z[a]) * dtanh(Z[b]) * std::tanh(W1.row(j).dot(X.row(a))) *
                                   std::tanh(W1.row(j).dot(X.row(b)));
            }
        for (int j = 0; j < n1; ++j)
            for (int a = 0; a < 2; ++a) B3(j, a) += wt * c * w2[j] * dtanh(W1.row(j).dot(X.row(a))) * dtanh(Z[a]);
    }
    EXPECT_LT((t.B1 - B1).cwiseAbs().maxCoeff(), 1e-14);
    for (int j = 0; j < n1; ++j) EXPECT_LT((t.B2[j] - B2[j]).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((t.B3 - B3).cwiseAbs().maxCoeff(), 1e-14);
    Eigen::MatrixXd A = B1;
    for (int j = 0; j < n1; ++j)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                A(a, b) += (B2[j](a, b) + X.row(a).dot(X.row(b)) * B3(j, a) * B3(j, b)) / n1;
    EXPECT_LT((t.A - A).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(KernelTables, VanishingOutputLawLeavesOnlyFirstKernel) {
    Particle s = make(3, 2, 0.75);
    s.law.c = Law1d::point_mass(0.0);
    Eigen::MatrixXd X(2, 2);
    X << 1.0, 0.0, 0.0, 1.0;
    const KernelTables t = build_kernels(X, s.law, *s.space);
    for (const auto& b : t.B2) EXPECT_EQ(b.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(t.B3.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LT((t.A - t.B1).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(lambda_sq(X.row(0).transpose(), s.law, *s.space), 0.0);
}

TEST(KernelTables, SymmetricPositiveDefinite) {
    const Particle s = make(4, 3, 0.6);
    const Dataset ds = synth_dataset(3, 3, 2);
    const KernelTables t = build_kernels(ds.X, s.law, *s.space);
    EXPECT_EQ(t.A, t.A.transpose());
    for (int a = 0; a < 3; ++a) EXPECT_GE(t.B1(a, a), 0.0);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t.A).eigenvalues()(0), 0.0);
}

TEST(KernelTables, RademacherVarianceEqualsFirstKernelDiagonal) {
    const Particle s = make(3, 2, 0.75);
    Eigen::MatrixXd X(2, 2);
    X << 0.8, 0.6, -0.6, 0.8;
    const KernelTables t = build_kernels(X, s.law, *s.space);
    for (int a = 0; a < 2; ++a) EXPECT_NEAR(lambda_sq(X.row(a).transpose(), s.law, *s.space), t.B1(a, a), 1e-15);
}

TEST(Operators, ConstantAndOutputCoordinate) {
    const Particle s = make(3, 2, 0.75);
    const Eigen::Vector2d x(0.4, -1.1);
    const Eigen::VectorXd p = random_particle(*s.space, 1);
    EXPECT_EQ(operator_C(s.space->constant(4.0), x, s.law).value(p), 0.0);
    EXPECT_NEAR(operator_C(s.space->c(), x, s.law).value(p), s.space->act(0, s.space->Z(x)).value(p), 1e-15);
    const TestFunction expect_w2 = s.space->product(
        {s.space->c(), s.space->act(1, s.space->Z(x)), s.space->act(0, s.space->inner(0, x))});
    EXPECT_NEAR(operator_C(s.space->w2(0), x, s.law).value(p), s.space->eps() * expect_w2.value(p), 1e-15);
    EXPECT_DOUBLE_EQ(s.space->eps(), std::pow(3.0, -0.25));
}

TEST(Operators, DecompositionIdentity) {
    Particle s = make(3, 2, 0.75);
    s.law.c = Law1d::discrete({-1.0, 3.0}, {0.75, 0.25});
    s.law.w2 = Law1d::discrete({-1.0, 3.0}, {0.75, 0.25});
    const Eigen::Vector2d x(0.4, -1.1), xp(0.9, 0.2);
    const TestFunction f = kernel_B2(*s.space, 1, x, xp) + kernel_B3(*s.space, 2, x);
    const CfOperators ops = operators_Cf1_Cf2_C3(f, xp);
    const double eps = s.space->eps();
    TestFunction rhs = ops.Cf1 + ops.Cf2 * eps;
    for (int j = 0; j < 3; ++j) rhs = rhs + grad_w1_dot(f, j, xp) * (eps * expect(ops.C3[j], s.law).value);
    const TestFunction lhs = operator_C(f, xp, s.law);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Eigen::VectorXd p = random_particle(*s.space, seed);
        EXPECT_LE(std::abs(lhs.value(p) - rhs.value(p)), 1e-12 * std::max(1.0, std::abs(rhs.value(p))));
    }
}

TEST(Operators, MeanZeroOutputLawKillsThirdKernelMean) {
    Particle s = make(3, 2, 0.75);
    s.law.c = Law1d::discrete({-1.0, 3.0}, {0.75, 0.25});
    const Eigen::Vector2d x(0.4, -1.1);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(expect(kernel_B3(*s.space, j, x), s.law).value, 0.0, 1e-15);
}
