#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "snn/dataset.hpp"
#include "snn/law.hpp"
#include "snn/limit_ode.hpp"
#include "snn/model.hpp"

namespace snn {

// The standard regression problem used by the scaling studies.
struct DefaultProblem {
    int M = 3;
    int d = 3;
    int N1 = 10;
    double gamma1 = 0.6;
    double input_radius = 3.0;
    std::uint64_t data_seed = 11;
    std::uint64_t w1_seed = 12;
    std::string law_c = "rademacher";
    std::string law_w2 = "rademacher";
    std::string law_w1 = "uniform:-1:1";
    std::string activation = "tanh";

    Dataset dataset() const;
    InitLaw law() const;  // with frozen first-layer atoms
    LimitProblem limit(const ExpectOptions& opt = {}) const;
    ScalingConfig scaling(int n2, double gamma2) const;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

CriterionResult criterion_closed_form();
CriterionResult criterion_cross_equality();
CriterionResult criterion_gradient_fidelity(int configs = 120, std::uint64_t seed = 3);
CriterionResult criterion_clt_init(int seeds = 2000);
CriterionResult criterion_convergence_rate(int seeds = 64);
CriterionResult criterion_variance_monotone(int seeds = 64);
CriterionResult criterion_global_minimum(int seeds = 10);
CriterionResult criterion_rate_reduction();
CriterionResult criterion_one_step(int seeds = 32);
CriterionResult criterion_mnist_ordering(const std::string& mnist_dir, int seeds = 3);

CriterionResult run_criterion(int id, const std::string& mnist_dir);

}  // namespace snn
