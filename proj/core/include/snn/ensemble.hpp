#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "snn/dataset.hpp"
#include "snn/law.hpp"
#include "snn/trainer.hpp"

namespace snn {

struct EnsembleSpec {
    TrainConfig base;
    InitLaw law;
    std::vector<std::uint64_t> seeds;
};

struct EnsembleStats {
    std::vector<double> t;
    std::vector<Eigen::VectorXd> mean;  // per record
    std::vector<Eigen::VectorXd> var;   // unbiased, per record
    // paths[s][r]: output vector of seed s at record r.
    std::vector<std::vector<Eigen::VectorXd>> paths;

    int seeds() const { return static_cast<int>(paths.size()); }
    // Samples of component a at record r across seeds.
    std::vector<double> samples(int r, int a) const;
    // Writes n2,gamma2,t,mean,var,se rows for component a.
    void write_csv(const std::string& path, int a, double n2, double gamma2) const;
};

// Each member starts from init_params(base.scaling, law, seed) and trains with that seed.
// Members run in parallel; aggregation follows the seed order.
EnsembleStats mc_ensemble(const EnsembleSpec& spec, const Dataset& data);

// Outputs at initialization only, one row per seed (M columns).
Eigen::MatrixXd init_outputs(const ScalingConfig& cfg, const InitLaw& law, const std::vector<std::uint64_t>& seeds,
                             const Eigen::MatrixXd& X);

std::vector<std::uint64_t> seed_range(std::uint64_t master, int count);

}  // namespace snn
