#include "snn/classify.hpp"

#include <fstream>
#include <numeric>

#include "snn/csv.hpp"
#include "snn/errors.hpp"
#include "snn/rng.hpp"
#include "snn/trainer.hpp"

namespace snn {

namespace {

int argmax_low(const Eigen::VectorXd& v) {
    int best = 0;
    for (int k = 1; k < v.size(); ++k)
        if (v(k) > v(best)) best = k;
    return best;
}

Eigen::MatrixXd scores_of(const ScalingConfig& cfg, const Theta& th, const Eigen::MatrixXd& X) {
    const auto sig = [&](double z) { return cfg.act(z); };
    Eigen::MatrixXd H = (X * th.W1.transpose()).unaryExpr(sig);
    for (int L = 2; L <= cfg.depth; ++L) H = (cfg.prefactor(L - 1) * (H * th.W[L - 2])).unaryExpr(sig);
    return cfg.prefactor(cfg.depth) * (H * th.C);
}

}  // namespace

int predict_class(const ScalingConfig& cfg, const Theta& th, const Eigen::VectorXd& x) {
    return argmax_low(forward(cfg, th, x).g);
}

double accuracy_from_scores(const Eigen::MatrixXd& scores, const std::vector<int>& labels) {
    if (scores.rows() == 0) throw DomainError("accuracy of an empty set");
    if (static_cast<std::size_t>(scores.rows()) != labels.size()) throw DomainError("scores and labels differ in count");
    int hit = 0;
    for (Eigen::Index r = 0; r < scores.rows(); ++r)
        if (argmax_low(scores.row(r).transpose()) == labels[r]) ++hit;
    return static_cast<double>(hit) / static_cast<double>(scores.rows());
}

double accuracy_eval(const Theta& th, const ScalingConfig& cfg, const Dataset& data) {
    if (data.size() == 0) throw DomainError("accuracy of an empty set");
    if (!data.is_classification()) throw DomainError("accuracy needs class labels");
    return accuracy_from_scores(scores_of(cfg, th, data.X), data.labels);
}

std::vector<EpochRecord> train_classifier(const ClassifyConfig& cfg, const InitLaw& law, const Dataset& train,
                                          const Dataset& test, Theta* final_theta) {
    if (train.size() == 0 || test.size() == 0) throw DomainError("classification needs non-empty train and test sets");
    if (!train.is_classification() || !test.is_classification()) throw DomainError("classification needs labels");
    if (cfg.epochs < 1 || cfg.batch < 1) throw DomainError("epochs and batch size must be positive");
    Theta th = init_params(cfg.scaling, law, cfg.seed);
    Rng rng = make_rng(cfg.seed, 0xE0);
    std::vector<int> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<EpochRecord> out;
    for (int ep = 1; ep <= cfg.epochs; ++ep) {
        for (int i = static_cast<int>(order.size()) - 1; i > 0; --i) {
            const int j = std::min(i, static_cast<int>(uniform01(rng) * (i + 1)));
            std::swap(order[i], order[j]);
        }
        for (std::size_t s = 0; s < order.size(); s += cfg.batch) {
            const std::size_t e = std::min(order.size(), s + cfg.batch);
            const std::vector<int> rows(order.begin() + static_cast<long>(s), order.begin() + static_cast<long>(e));
            th = sgd_step_batch(th, train, rows, Loss::CrossEntropy, cfg.rates, cfg.scaling);
        }
        out.push_back({ep, accuracy_eval(th, cfg.scaling, train), accuracy_eval(th, cfg.scaling, test)});
    }
    if (final_theta) *final_theta = th;
    return out;
}

void write_accuracy_csv(const std::string& path, const std::vector<double>& gammas,
                        const std::vector<EpochRecord>& records, bool append) {
    if (gammas.size() < 2 || gammas.size() > 3) throw DomainError("accuracy rows carry two or three gammas");
    std::vector<std::string> header{"epoch", "gamma1", "gamma2"};
    if (gammas.size() == 3) header.push_back("gamma3");
    header.push_back("train_acc");
    header.push_back("test_acc");
    const bool fresh = !append || !std::ifstream(path).good();
    std::ofstream out(path, fresh ? std::ios::trunc : std::ios::app);
    if (!out) throw IoError("cannot write " + path);
    if (fresh) {
        for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
        out << "\n";
    }
    for (const auto& r : records) {
        out << r.epoch;
        for (double g : gammas) out << "," << fmt_double(g);
        out << "," << fmt_double(r.train_acc) << "," << fmt_double(r.test_acc) << "\n";
    }
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace snn
