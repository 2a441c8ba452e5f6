#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "snn/dataset.hpp"
#include "snn/law.hpp"
#include "snn/model.hpp"
#include "snn/rates.hpp"

namespace snn {

struct ClassifyConfig {
    ScalingConfig scaling;  // outputs = number of classes
    RateSchedule rates;
    int epochs = 5;
    int batch = 20;
    std::uint64_t seed = 0;
};

struct EpochRecord {
    int epoch = 0;
    double train_acc = 0.0;
    double test_acc = 0.0;
};

// Argmax prediction; ties go to the lowest class index.
int predict_class(const ScalingConfig& cfg, const Theta& th, const Eigen::VectorXd& x);
double accuracy_eval(const Theta& th, const ScalingConfig& cfg, const Dataset& data);
// Same tie-break applied to precomputed scores (rows = samples).
double accuracy_from_scores(const Eigen::MatrixXd& scores, const std::vector<int>& labels);

// Cross-entropy mini-batch SGD with a fresh shuffle every epoch; records accuracy after each epoch.
std::vector<EpochRecord> train_classifier(const ClassifyConfig& cfg, const InitLaw& law, const Dataset& train,
                                          const Dataset& test, Theta* final_theta = nullptr);

// epoch,gamma1,gamma2[,gamma3],train_acc,test_acc
void write_accuracy_csv(const std::string& path, const std::vector<double>& gammas,
                        const std::vector<EpochRecord>& records, bool append = false);

}  // namespace snn
