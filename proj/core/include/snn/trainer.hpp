#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "snn/dataset.hpp"
#include "snn/model.hpp"
#include "snn/rates.hpp"
#include "snn/testfn.hpp"

namespace snn {

enum class Loss { Quadratic, CrossEntropy };

struct TrainConfig {
    ScalingConfig scaling;
    RateSchedule rates;
    double T = 1.0;
    int batch = 1;
    Loss loss = Loss::Quadratic;
    int stride = 1;
    std::uint64_t seed = 0;
    // Largest admissible parameter magnitude; exceeding it aborts the run.
    double param_bound = 1e6;
    // Test functions averaged over the outer particles at every record (two-layer only).
    std::vector<TestFunction> probes;
};

struct Trajectory {
    std::vector<long long> step;
    std::vector<double> t;
    std::vector<Eigen::VectorXd> h;  // outputs on the dataset
    std::vector<double> max_abs_C, max_abs_W1;
    std::vector<std::vector<double>> max_abs_W;  // per record, W2..Wm
    std::vector<std::vector<double>> probes;
    // Largest single-step increments over the run.
    double max_step_C = 0.0, max_step_W1 = 0.0;
    std::vector<double> max_step_W;

    void write_csv(const std::string& path) const;
};

// Gradient of e . g with respect to every parameter.
struct ParamGrad {
    Eigen::MatrixXd W1;
    std::vector<Eigen::MatrixXd> W;
    Eigen::MatrixXd C;

    static ParamGrad zeros_like(const Theta& th);
    void add_scaled(const ParamGrad& o, double a);
};

ParamGrad output_gradient(const ScalingConfig& cfg, const Theta& th, const ForwardTrace& tr, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& e);

// theta + rates * grad, group by group.
Theta apply_update(const Theta& th, const ParamGrad& g, const RateSchedule& rates);

// Quadratic-loss update lines written out for depth two and three.
Theta sgd_step_two_layer(const Theta& th, const Eigen::VectorXd& x, double y, const RateSchedule& rates,
                         const ScalingConfig& cfg);
Theta sgd_step_three_layer(const Theta& th, const Eigen::VectorXd& x, double y, const RateSchedule& rates,
                           const ScalingConfig& cfg);
// Any depth via backpropagation; quadratic loss on a scalar output.
Theta sgd_step(const Theta& th, const Eigen::VectorXd& x, double y, const RateSchedule& rates,
               const ScalingConfig& cfg);
// Mini-batch step: the forcing is averaged over the rows of the batch.
// Quadratic loss reads targets, cross-entropy reads labels.
Theta sgd_step_batch(const Theta& th, const Dataset& data, const std::vector<int>& rows, Loss loss,
                     const RateSchedule& rates, const ScalingConfig& cfg);

// Residual y - g for quadratic loss, onehot - softmax(g) for cross-entropy.
Eigen::VectorXd loss_residual(const Eigen::VectorXd& g, Loss loss, double y, int label);

Trajectory train(const TrainConfig& cfg, const Dataset& data, const Theta& theta0);

// Network outputs on every input of the dataset (first output component).
Eigen::VectorXd outputs_on(const ScalingConfig& cfg, const Theta& th, const Eigen::MatrixXd& X);

struct DecompositionReport {
    Eigen::VectorXd actual;     // g_{k+1}(x) - g_k(x)
    Eigen::VectorXd predicted;  // kernel terms
    Eigen::VectorXd residual;   // actual - predicted
    double max_residual = 0.0;
};

DecompositionReport one_step_decomposition_check(const Theta& th, const Eigen::VectorXd& xk, double yk,
                                                 const RateSchedule& rates, const ScalingConfig& cfg,
                                                 const Eigen::MatrixXd& X);

}  // namespace snn
