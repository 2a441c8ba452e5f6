#pragma once

#include <string>
#include <vector>

#include "snn/model.hpp"
#include "snn/rational.hpp"

namespace snn {

// One parameter group: rate = base * prod_i N_i^{exponents[i]}.
struct RateGroup {
    std::string label;
    std::vector<Rational> exponents;
    double base = 1.0;
    double value = 0.0;
};

// Groups are ordered C, W1, W2, ..., Wm.
struct RateSchedule {
    int depth = 0;
    std::vector<int> N;
    std::vector<RateGroup> groups;

    double rate(const std::string& label) const;
    const RateGroup& group(const std::string& label) const;
    double C() const { return groups[0].value; }
    // Rate of W_k (k = 1 is the first layer).
    double W(int k) const { return groups[k].value; }
    // One "group=value" line per group.
    std::string to_text() const;
    // Uniformly scales every rate, used for the all-zero-rate checks.
    RateSchedule scaled(double factor) const;
};

RateSchedule rates_two_layer(int n1, int n2, double g1, double g2, double a_c = 1.0,
                             double a_w1 = 1.0, double a_w2 = 1.0);

RateSchedule rates_three_layer(int n1, int n2, int n3, double g1, double g2, double g3,
                               double a_c = 1.0, double a_w1 = 1.0, double a_w2 = 1.0,
                               double a_w3 = 1.0);

// Ladder for arbitrary depth; alpha (optional) holds base constants in group order.
RateSchedule rates_general(int m, const std::vector<int>& N, const std::vector<double>& gamma,
                           const std::vector<double>& alpha = {});

// Specialized formulas for depth 2 and 3, ladder otherwise.
RateSchedule rates_for(const ScalingConfig& cfg);

}  // namespace snn
