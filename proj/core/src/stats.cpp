#include "snn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>

#include "snn/errors.hpp"

namespace snn {

double mean(const std::vector<double>& x) {
    if (x.empty()) throw DomainError("mean of an empty sample");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x) {
    if (x.size() < 2) throw DomainError("variance needs at least two samples");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

double mean_se(const std::vector<double>& x) {
    return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

double variance_se(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n < 3) throw DomainError("jackknife variance error needs at least three samples");
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    // Leave-one-out sums of squares in closed form.
    const double nn = static_cast<double>(n);
    std::vector<double> loo(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - m;
        loo[i] = (ss - d * d * nn / (nn - 1.0)) / (nn - 2.0);
    }
    const double lm = mean(loo);
    double acc = 0.0;
    for (double v : loo) acc += (v - lm) * (v - lm);
    return std::sqrt((nn - 1.0) / nn * acc);
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw DomainError("linear fit needs two or more paired points");
    const double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw DomainError("linear fit needs distinct abscissae");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        rss += r * r;
    }
    f.slope_se = n > 2 ? std::sqrt(rss / static_cast<double>(n - 2) / sxx) : 0.0;
    f.r2 = syy > 0.0 ? 1.0 - rss / syy : 1.0;
    return f;
}

ScalingFitReport scaling_fit(const std::string& quantity, const std::vector<double>& n2,
                             const std::vector<double>& values, double theory, double tolerance) {
    if (n2.size() != values.size()) throw DomainError("scaling fit: grid and values differ in length");
    if (n2.size() < 3) throw DomainError("scaling fit needs at least three grid points");
    const auto [lo, hi] = std::minmax_element(n2.begin(), n2.end());
    if (!(*lo > 0.0) || *hi / *lo < 10.0) throw DomainError("scaling fit grid must span at least one decade");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < n2.size(); ++i) {
        if (!(values[i] > 0.0)) throw DomainError("scaling fit needs positive values");
        lx.push_back(std::log(n2[i]));
        ly.push_back(std::log(values[i]));
    }
    const LinearFit f = linear_fit(lx, ly);
    ScalingFitReport r;
    r.quantity = quantity;
    r.n2 = n2;
    r.values = values;
    r.slope = f.slope;
    r.slope_se = f.slope_se;
    r.intercept = f.intercept;
    r.theory = theory;
    r.tolerance = tolerance;
    r.pass = std::abs(f.slope - theory) <= tolerance;
    return r;
}

double kolmogorov_sf(double x) {
    if (x <= 0.0) return 1.0;
    constexpr double pi = std::numbers::pi;
    if (x < 1.0) {
        // Theta-function form, fast for small x: CDF = sqrt(2 pi)/x sum exp(-(2k-1)^2 pi^2 / (8 x^2)).
        double s = 0.0;
        for (int k = 1; k <= 50; ++k) {
            const double a = (2.0 * k - 1.0) * pi / x;
            const double term = std::exp(-a * a / 8.0);
            s += term;
            if (term < 1e-300) break;
        }
        return 1.0 - std::sqrt(2.0 * pi) / x * s;
    }
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        s += (k % 2 == 1 ? term : -term);
        if (term < 1e-300) break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

NormalityReport normality_check(const std::vector<double>& samples, double target_variance) {
    if (samples.size() < 500) throw DomainError("normality check needs at least 500 samples");
    if (!(target_variance > 0.0) || !std::isfinite(target_variance))
        throw DomainError("normality check needs a positive target variance");
    std::vector<double> s = samples;
    for (double v : s)
        if (!std::isfinite(v)) throw DomainError("normality check got a non-finite sample");
    std::sort(s.begin(), s.end());
    const double sd = std::sqrt(target_variance);
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double F = 0.5 * std::erfc(-s[i] / (sd * std::numbers::sqrt2));
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - F, F - static_cast<double>(i) / n});
    }
    NormalityReport r;
    r.n = s.size();
    r.statistic = d;
    r.p_value = kolmogorov_sf(std::sqrt(n) * d);
    return r;
}

Band variance_band(double target_variance, std::size_t n, double level) {
    if (n < 2) throw DomainError("variance band needs at least two samples");
    if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
    const double k = static_cast<double>(n - 1);
    boost::math::chi_squared dist(k);
    const double a = (1.0 - level) / 2.0;
    Band b;
    b.lo = target_variance * boost::math::quantile(dist, a) / k;
    b.hi = target_variance * boost::math::quantile(dist, 1.0 - a) / k;
    return b;
}

}  // namespace snn
