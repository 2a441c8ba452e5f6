#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "snn/activation.hpp"
#include "snn/law.hpp"

namespace snn {

// Widths and scaling exponents of a depth-m network.
// alpha holds the order-one base rate constants: alpha[0] for C, alpha[k] for W_k.
struct ScalingConfig {
    int depth = 2;
    std::vector<int> N{1, 1};
    std::vector<double> gamma{1.0, 1.0};
    std::vector<double> alpha{1.0, 1.0, 1.0};
    int input_dim = 1;
    int outputs = 1;
    Activation act;

    static ScalingConfig two_layer(int n1, int n2, double g1, double g2, int d);
    static ScalingConfig three_layer(int n1, int n2, int n3, double g1, double g2, double g3, int d);

    int width(int layer) const { return N[layer - 1]; }
    // N_k^{-gamma_k}
    double prefactor(int layer) const;
    void validate() const;
};

// W1 is N1 x d. W[k] couples layer k+1 to layer k+2 and has shape N_{k+1} x N_{k+2};
// entry (j, i) is the weight from unit j below to unit i above. C is N_m x outputs.
struct Theta {
    Eigen::MatrixXd W1;
    std::vector<Eigen::MatrixXd> W;
    Eigen::MatrixXd C;

    bool all_finite() const;
    double max_abs_C() const;
    // Largest Euclidean row norm of W1.
    double max_norm_W1() const;
    double max_abs_W(std::size_t k) const;
    void check_shapes(const ScalingConfig& cfg) const;
};

// Z[0] = W1 x, Z[k] = N_k^{-gamma_k} W[k-1]^T H[k-1]; H[k] = sigma(Z[k]).
struct ForwardTrace {
    std::vector<Eigen::VectorXd> Z;
    std::vector<Eigen::VectorXd> H;
    Eigen::VectorXd g;

    double output() const { return g(0); }
};

Theta init_params(const ScalingConfig& cfg, const InitLaw& law, std::uint64_t seed);

ForwardTrace forward(const ScalingConfig& cfg, const Theta& theta, const Eigen::VectorXd& x);

std::vector<ForwardTrace> forward_batch(const ScalingConfig& cfg, const Theta& theta,
                                        const Eigen::MatrixXd& X);

}  // namespace snn
