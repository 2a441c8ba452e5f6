#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "snn/rng.hpp"

namespace snn {

// One-dimensional law for a single parameter coordinate.
struct Law1d {
    enum class Kind { Discrete, Uniform, Normal };

    Kind kind = Kind::Discrete;
    std::vector<double> atoms{0.0};
    std::vector<double> weights{1.0};
    double lo = 0.0, hi = 0.0;       // Uniform
    double mu = 0.0, sd = 1.0;       // Normal

    static Law1d point_mass(double v);
    static Law1d rademacher();
    static Law1d discrete(std::vector<double> atoms, std::vector<double> weights);
    static Law1d uniform(double a, double b);
    static Law1d normal(double mean, double sd);
    // Parses "rademacher", "point:V", "uniform:A:B", "normal:M:S", "discrete:a1/w1,a2/w2,...".
    static Law1d parse(const std::string& text);

    bool is_discrete() const { return kind == Kind::Discrete; }
    bool bounded() const { return kind != Kind::Normal; }
    double mean() const;
    // Largest |value| in the support; infinite for unbounded laws.
    double radius() const;
    double sample(Rng& rng) const;
    std::string describe() const;

    // Throws DomainError on malformed weights or (when asked) non-zero mean or unbounded support.
    void validate(bool require_mean_zero, bool require_bounded) const;
};

// Product law of one particle: c ~ mu_C, w2_j ~ mu_W2 i.i.d., plus the first-layer rows.
// For the limit measure the first-layer rows are frozen atoms drawn once per experiment.
struct InitLaw {
    Law1d c = Law1d::rademacher();
    Law1d w2 = Law1d::rademacher();
    Law1d w1 = Law1d::uniform(-1.0, 1.0);
    std::optional<Eigen::MatrixXd> w1_atoms;

    static InitLaw standard() { return InitLaw{}; }

    // Draws and freezes N1 first-layer rows of dimension d.
    InitLaw with_frozen_w1(int n1, int d, std::uint64_t seed) const;
    void validate_for_init() const;
    void validate_for_limit(int n1) const;
};

}  // namespace snn
