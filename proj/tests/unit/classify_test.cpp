#include <gtest/gtest.h>

#include "snn/classify.hpp"
#include "snn/ensemble.hpp"
#include "snn/errors.hpp"
#include "snn/parallel.hpp"
#include "snn/rng.hpp"

using namespace snn;

namespace {

Dataset balanced(int per_class, int d, std::uint64_t seed) {
    Dataset ds;
    ds.X.resize(10 * per_class, d);
    Rng rng = make_rng(seed);
    for (int i = 0; i < ds.X.rows(); ++i) {
        for (int k = 0; k < d; ++k) ds.X(i, k) = uniform01(rng);
        ds.labels.push_back(i % 10);
    }
    return ds;
}

}  // namespace

TEST(Accuracy, TieBreakGoesToFirstClass) {
    const Dataset ds = balanced(7, 4, 1);
    ScalingConfig cfg = ScalingConfig::two_layer(3, 5, 1.0, 1.0, 4);
    cfg.outputs = 10;
    Theta th = init_params(cfg, InitLaw::standard(), 2);
    th.C.setZero();
    const double acc = accuracy_eval(th, cfg, ds);
    EXPECT_DOUBLE_EQ(acc, 0.1);
    EXPECT_GE(acc, 0.05);
    EXPECT_LE(acc, 0.15);
}

TEST(Accuracy, OneHotScoresArePerfect) {
    const std::vector<int> labels{3, 0, 9, 9, 1};
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(5, 10);
    for (int i = 0; i < 5; ++i) s(i, labels[i]) = 1.0;
    EXPECT_DOUBLE_EQ(accuracy_from_scores(s, labels), 1.0);
    EXPECT_THROW(accuracy_from_scores(Eigen::MatrixXd(0, 10), {}), DomainError);
}

TEST(Classifier, LearnsSeparableClasses) {
    Dataset tr, te;
    tr.X.resize(200, 2);
    Rng rng = make_rng(4);
    for (int i = 0; i < 200; ++i) {
        const int c = i % 2;
        tr.X(i, 0) = (c ? 1.0 : -1.0) + 0.2 * standard_normal(rng);
        tr.X(i, 1) = 0.2 * standard_normal(rng);
        tr.labels.push_back(c);
    }
    te = tr;
    ClassifyConfig cfg;
    cfg.scaling = ScalingConfig::two_layer(8, 16, 1.0, 1.0, 2);
    cfg.scaling.outputs = 2;
    cfg.rates = rates_for(cfg.scaling);
    cfg.epochs = 3;
    cfg.batch = 10;
    const auto rec = train_classifier(cfg, InitLaw::standard(), tr, te);
    ASSERT_EQ(rec.size(), 3u);
    EXPECT_GT(rec.back().test_acc, 0.95);
}

TEST(Ensemble, RejectsSingleSeedAndCollapsesOnRepeatedSeed) {
    EnsembleSpec spec;
    spec.base.scaling = ScalingConfig::two_layer(3, 8, 0.75, 0.75, 2);
    spec.base.rates = rates_for(spec.base.scaling);
    spec.base.T = 0.5;
    Dataset ds;
    ds.X = Eigen::MatrixXd(2, 2);
    ds.X << 1.0, 0.0, 0.0, 1.0;
    ds.Y = Eigen::Vector2d(0.3, -0.2);
    spec.seeds = {5};
    EXPECT_THROW(mc_ensemble(spec, ds), DomainError);
    spec.seeds = {5, 5, 5};
    const EnsembleStats st = mc_ensemble(spec, ds);
    for (const auto& v : st.var) EXPECT_EQ(v.cwiseAbs().maxCoeff(), 0.0);
    spec.seeds = {5, 6, 7};
    EXPECT_GT(mc_ensemble(spec, ds).var.back().maxCoeff(), 0.0);
}

TEST(Ensemble, ThreadCountDoesNotChangeResults) {
    EnsembleSpec spec;
    spec.base.scaling = ScalingConfig::two_layer(3, 16, 0.75, 0.75, 2);
    spec.base.rates = rates_for(spec.base.scaling);
    spec.base.T = 0.5;
    spec.base.stride = 4;
    spec.seeds = seed_range(1, 6);
    Dataset ds;
    ds.X = Eigen::MatrixXd(2, 2);
    ds.X << 1.0, 0.0, 0.0, 1.0;
    ds.Y = Eigen::Vector2d(0.3, -0.2);
    set_thread_count(1);
    const EnsembleStats a = mc_ensemble(spec, ds);
    set_thread_count(3);
    const EnsembleStats b = mc_ensemble(spec, ds);
    set_thread_count(1);
    for (std::size_t r = 0; r < a.mean.size(); ++r) {
        EXPECT_EQ(a.mean[r], b.mean[r]);
        EXPECT_EQ(a.var[r], b.var[r]);
    }
}
