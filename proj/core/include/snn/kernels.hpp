#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "snn/law.hpp"
#include "snn/testfn.hpp"

namespace snn {

enum class ExpectMethod { Auto, Enumerate, Quadrature, MonteCarlo };

struct ExpectOptions {
    ExpectMethod method = ExpectMethod::Auto;
    int quad_nodes = 64;
    std::size_t max_points = 20'000'000;
    std::size_t mc_samples = 100'000;
    std::uint64_t mc_seed = 0;
};

struct Expectation {
    double value = 0.0;
    double std_error = 0.0;  // zero for deterministic methods
    std::size_t points = 0;
};

// Integrates f against the product law of one particle: c ~ mu_C, w2_j ~ mu_W2 i.i.d.,
// first-layer rows fixed at the law's frozen atoms.
Expectation expect(const TestFunction& f, const InitLaw& law, const ExpectOptions& opt = {});

// Same as expect for several functions over one shared pass through the atoms.
std::vector<Expectation> expect_many(const std::vector<TestFunction>& fs, const InitLaw& law,
                                     const ExpectOptions& opt = {});

// Atoms and weights used for one coordinate (Gauss-Legendre nodes for uniform laws).
void law_nodes(const Law1d& law, int quad_nodes, std::vector<double>& atoms, std::vector<double>& weights);

TestFunction kernel_B1(const ParticleSpace& s, const Eigen::VectorXd& x, const Eigen::VectorXd& xp);
TestFunction kernel_B2(const ParticleSpace& s, int j, const Eigen::VectorXd& x, const Eigen::VectorXd& xp);
TestFunction kernel_B3(const ParticleSpace& s, int j, const Eigen::VectorXd& x);

struct KernelTables {
    int N1 = 0;
    int M = 0;
    Eigen::MatrixXd B1;               // M x M
    std::vector<Eigen::MatrixXd> B2;  // N1 slices of M x M
    Eigen::MatrixXd B3;               // N1 x M
    Eigen::MatrixXd A;                // M x M, filled by assemble_A

    // Writes B1.csv, B2.csv, B3.csv and A.csv into dir.
    void write_csv(const std::string& dir) const;
};

KernelTables kernel_B(const Eigen::MatrixXd& X, const InitLaw& law, const ParticleSpace& space,
                      const ExpectOptions& opt = {});
Eigen::MatrixXd assemble_A(const KernelTables& tables, const Eigen::MatrixXd& X);
// kernel_B followed by assemble_A.
KernelTables build_kernels(const Eigen::MatrixXd& X, const InitLaw& law, const ParticleSpace& space,
                           const ExpectOptions& opt = {});

// Upper bounds on |B1|, |B2|, |B3| implied by the activation and the law supports.
Eigen::Vector3d kernel_bounds(const InitLaw& law, const Activation& act);

// The C^{f,1}, C^{f,2} and C^{3} operators applied to a test function at input x.
struct CfOperators {
    TestFunction Cf1;              // d_c f sigma(Z(x))
    TestFunction Cf2;              // c sigma'(Z(x)) sigma(w1 x) . d_w2 f
    std::vector<TestFunction> C3;  // c sigma'(Z(x)) sigma'(w1_j x) w2_j, one per unit
};
CfOperators operators_Cf1_Cf2_C3(const TestFunction& f, const Eigen::VectorXd& x);

// x . grad_{w1_j} f
TestFunction grad_w1_dot(const TestFunction& f, int j, const Eigen::VectorXd& x);

// Particle function C^{N1,f}_{x'}; the first-layer coefficient uses <C3_j(x')> under the law.
TestFunction operator_C(const TestFunction& f, const Eigen::VectorXd& xp, const InitLaw& law,
                        const ExpectOptions& opt = {});

// Variance <(c sigma(Z(x)))^2> of the initial Gaussian fluctuation.
double lambda_sq(const Eigen::VectorXd& x, const InitLaw& law, const ParticleSpace& space,
                 const ExpectOptions& opt = {});
// Covariance <c^2 sigma(Z(x)) sigma(Z(x'))> over the dataset.
Eigen::MatrixXd fluctuation_covariance(const Eigen::MatrixXd& X, const InitLaw& law,
                                       const ParticleSpace& space, const ExpectOptions& opt = {});

}  // namespace snn
