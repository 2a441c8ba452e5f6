#include "snn/rates.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "snn/errors.hpp"

namespace snn {

namespace {

Rational gamma_rational(double g, int layer) {
    if (!(g >= 0.5 && g <= 1.0))
        throw DomainError("gamma" + std::to_string(layer) + " out of range [1/2,1]");
    return Rational::from_double(g);
}

void check_widths(const std::vector<int>& N) {
    for (int n : N)
        if (n < 1) throw DomainError("layer width must be >= 1");
}

void check_base(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("rate base constants must be positive");
}

RateGroup make_group(std::string label, std::vector<Rational> e, double base, const std::vector<int>& N) {
    check_base(base);
    RateGroup g{std::move(label), std::move(e), base, base};
    for (std::size_t i = 0; i < N.size(); ++i)
        if (g.exponents[i].sign() != 0) g.value *= std::pow(static_cast<double>(N[i]), g.exponents[i].to_double());
    return g;
}

}  // namespace

const RateGroup& RateSchedule::group(const std::string& label) const {
    for (const auto& g : groups)
        if (g.label == label) return g;
    throw DomainError("no rate group named '" + label + "'");
}

double RateSchedule::rate(const std::string& label) const { return group(label).value; }

std::string RateSchedule::to_text() const {
    std::ostringstream o;
    for (const auto& g : groups) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", g.value);
        o << g.label << "=" << buf << "\n";
    }
    return o.str();
}

RateSchedule RateSchedule::scaled(double factor) const {
    RateSchedule s = *this;
    for (auto& g : s.groups) g.value *= factor;
    return s;
}

RateSchedule rates_two_layer(int n1, int n2, double g1, double g2, double a_c, double a_w1, double a_w2) {
    const std::vector<int> N{n1, n2};
    check_widths(N);
    const Rational r1 = gamma_rational(g1, 1), r2 = gamma_rational(g2, 2);
    RateSchedule s;
    s.depth = 2;
    s.N = N;
    // alpha_C / N2^{2-2g2}
    s.groups.push_back(make_group("C", {0, r2 * 2 - 2}, a_c, N));
    // alpha_W1 / (N1^{1-2g1} N2^{3-2g2})
    s.groups.push_back(make_group("W1", {r1 * 2 - 1, r2 * 2 - 3}, a_w1, N));
    // alpha_W2 / (N1^{1-2g1} N2^{2-2g2})
    s.groups.push_back(make_group("W2", {r1 * 2 - 1, r2 * 2 - 2}, a_w2, N));
    return s;
}

RateSchedule rates_three_layer(int n1, int n2, int n3, double g1, double g2, double g3, double a_c,
                               double a_w1, double a_w2, double a_w3) {
    const std::vector<int> N{n1, n2, n3};
    check_widths(N);
    const Rational r1 = gamma_rational(g1, 1), r2 = gamma_rational(g2, 2), r3 = gamma_rational(g3, 3);
    RateSchedule s;
    s.depth = 3;
    s.N = N;
    s.groups.push_back(make_group("C", {0, 0, r3 * 2 - 2}, a_c, N));
    s.groups.push_back(make_group("W1", {r1 * 2 - 1, r2 * 2 - 2, r3 * 2 - 3}, a_w1, N));
    s.groups.push_back(make_group("W2", {r1 * 2 - 1, r2 * 2 - 1, r3 * 2 - 3}, a_w2, N));
    s.groups.push_back(make_group("W3", {0, r2 * 2 - 1, r3 * 2 - 2}, a_w3, N));
    return s;
}

RateSchedule rates_general(int m, const std::vector<int>& N, const std::vector<double>& gamma,
                           const std::vector<double>& alpha) {
    if (m < 2) throw DomainError("general learning rates need depth m >= 2");
    if (static_cast<int>(N.size()) != m || static_cast<int>(gamma.size()) != m)
        throw DomainError("widths and gammas must have m entries");
    if (!alpha.empty() && static_cast<int>(alpha.size()) != m + 1)
        throw DomainError("rate base constants must have m + 1 entries");
    check_widths(N);
    std::vector<Rational> g;
    for (int i = 0; i < m; ++i) g.push_back(gamma_rational(gamma[i], i + 1));

    // Group W^{N_k} for k = m..0; layer index i runs 1..m, N_0 = 1 carries no factor.
    auto ladder = [&](int k) {
        std::vector<Rational> e(m, Rational(0));
        e[m - 1] = g[m - 1] * 2 - (k >= m - 1 ? 2 : 3);
        for (int i = std::max(k, 1); i <= m - 1; ++i)
            e[i - 1] = g[i - 1] * 2 - ((i == k || i == k + 1) ? 1 : 2);
        return e;
    };
    auto base = [&](int idx) { return alpha.empty() ? 1.0 : alpha[idx]; };

    RateSchedule s;
    s.depth = m;
    s.N = N;
    s.groups.push_back(make_group("C", ladder(m), base(0), N));
    for (int layer = 1; layer <= m; ++layer)
        s.groups.push_back(make_group("W" + std::to_string(layer), ladder(layer - 1), base(layer), N));
    return s;
}

RateSchedule rates_for(const ScalingConfig& cfg) {
    const auto& N = cfg.N;
    const auto& g = cfg.gamma;
    const auto& a = cfg.alpha;
    if (cfg.depth == 2) return rates_two_layer(N[0], N[1], g[0], g[1], a[0], a[1], a[2]);
    if (cfg.depth == 3)
        return rates_three_layer(N[0], N[1], N[2], g[0], g[1], g[2], a[0], a[1], a[2], a[3]);
    return rates_general(cfg.depth, N, g, a);
}

}  // namespace snn
