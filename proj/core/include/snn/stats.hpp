#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace snn {

double mean(const std::vector<double>& x);
// Unbiased sample variance.
double variance(const std::vector<double>& x);
// Jackknife standard errors of the mean and of the unbiased variance.
double mean_se(const std::vector<double>& x);
double variance_se(const std::vector<double>& x);

struct ScalingFitReport {
    std::string quantity;
    std::vector<double> n2;
    std::vector<double> values;
    double slope = 0.0;
    double slope_se = 0.0;
    double intercept = 0.0;
    double theory = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// Least squares of log(values) on log(n2); pass iff |slope - theory| <= tolerance.
ScalingFitReport scaling_fit(const std::string& quantity, const std::vector<double>& n2,
                             const std::vector<double>& values, double theory, double tolerance);

struct LinearFit {
    double slope = 0.0, intercept = 0.0, slope_se = 0.0, r2 = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// P(K > x) for the Kolmogorov distribution.
double kolmogorov_sf(double x);

struct NormalityReport {
    std::size_t n = 0;
    double statistic = 0.0;  // sup |F_n - Phi|
    double p_value = 0.0;
};

// One-sample Kolmogorov-Smirnov test against N(0, target_variance), asymptotic p-value.
NormalityReport normality_check(const std::vector<double>& samples, double target_variance);

// Two-sided chi-square acceptance band for the sample variance of n Gaussian draws.
struct Band {
    double lo = 0.0, hi = 0.0;
};
Band variance_band(double target_variance, std::size_t n, double level = 0.99);

}  // namespace snn
