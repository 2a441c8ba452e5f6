#include "snn/model.hpp"

#include <cmath>
#include <string>

#include "snn/errors.hpp"

namespace snn {

ScalingConfig ScalingConfig::two_layer(int n1, int n2, double g1, double g2, int d) {
    ScalingConfig c;
    c.depth = 2;
    c.N = {n1, n2};
    c.gamma = {g1, g2};
    c.alpha = {1.0, 1.0, 1.0};
    c.input_dim = d;
    return c;
}

ScalingConfig ScalingConfig::three_layer(int n1, int n2, int n3, double g1, double g2, double g3,
                                         int d) {
    ScalingConfig c;
    c.depth = 3;
    c.N = {n1, n2, n3};
    c.gamma = {g1, g2, g3};
    c.alpha = {1.0, 1.0, 1.0, 1.0};
    c.input_dim = d;
    return c;
}

double ScalingConfig::prefactor(int layer) const {
    return std::pow(static_cast<double>(N[layer - 1]), -gamma[layer - 1]);
}

void ScalingConfig::validate() const {
    if (depth < 1) throw DomainError("depth must be positive");
    if (static_cast<int>(N.size()) != depth || static_cast<int>(gamma.size()) != depth)
        throw DomainError("widths and gammas must have one entry per layer");
    if (static_cast<int>(alpha.size()) != depth + 1)
        throw DomainError("rate constants must have depth + 1 entries");
    for (int k = 0; k < depth; ++k) {
        if (N[k] < 1) throw DomainError("layer width must be >= 1");
        if (!(gamma[k] >= 0.5 && gamma[k] <= 1.0))
            throw DomainError("gamma" + std::to_string(k + 1) + " out of range [1/2,1]");
    }
    for (double a : alpha)
        if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("rate constants must be positive");
    if (input_dim < 1) throw DomainError("input dimension must be >= 1");
    if (outputs < 1) throw DomainError("output count must be >= 1");
}

bool Theta::all_finite() const {
    if (!W1.allFinite() || !C.allFinite()) return false;
    for (const auto& w : W)
        if (!w.allFinite()) return false;
    return true;
}

double Theta::max_abs_C() const { return C.size() ? C.cwiseAbs().maxCoeff() : 0.0; }

double Theta::max_norm_W1() const { return W1.size() ? W1.rowwise().norm().maxCoeff() : 0.0; }

double Theta::max_abs_W(std::size_t k) const {
    return k < W.size() && W[k].size() ? W[k].cwiseAbs().maxCoeff() : 0.0;
}

void Theta::check_shapes(const ScalingConfig& cfg) const {
    auto fail = [](const std::string& what) { throw DomainError("parameter shape mismatch: " + what); };
    if (W1.rows() != cfg.N[0] || W1.cols() != cfg.input_dim) fail("W1");
    if (static_cast<int>(W.size()) != cfg.depth - 1) fail("number of inter-layer matrices");
    for (int k = 0; k + 1 < cfg.depth; ++k)
        if (W[k].rows() != cfg.N[k] || W[k].cols() != cfg.N[k + 1]) fail("W" + std::to_string(k + 2));
    if (C.rows() != cfg.N[cfg.depth - 1] || C.cols() != cfg.outputs) fail("C");
}

Theta init_params(const ScalingConfig& cfg, const InitLaw& law, std::uint64_t seed) {
    cfg.validate();
    law.validate_for_init();
    Theta th;
    const int n1 = cfg.N[0], d = cfg.input_dim;
    if (law.w1_atoms) {
        if (law.w1_atoms->rows() != n1 || law.w1_atoms->cols() != d)
            throw DomainError("frozen first-layer atoms do not match N1 x d");
        th.W1 = *law.w1_atoms;
    } else {
        Rng r = make_rng(seed, 1);
        th.W1.resize(n1, d);
        for (int j = 0; j < n1; ++j)
            for (int k = 0; k < d; ++k) th.W1(j, k) = law.w1.sample(r);
    }
    for (int k = 0; k + 1 < cfg.depth; ++k) {
        Rng r = make_rng(seed, 2 + static_cast<std::uint64_t>(k));
        Eigen::MatrixXd w(cfg.N[k], cfg.N[k + 1]);
        for (int a = 0; a < w.rows(); ++a)
            for (int b = 0; b < w.cols(); ++b) w(a, b) = law.w2.sample(r);
        th.W.push_back(std::move(w));
    }
    Rng rc = make_rng(seed, 1000);
    th.C.resize(cfg.N[cfg.depth - 1], cfg.outputs);
    for (int i = 0; i < th.C.rows(); ++i)
        for (int o = 0; o < th.C.cols(); ++o) th.C(i, o) = law.c.sample(rc);
    return th;
}

ForwardTrace forward(const ScalingConfig& cfg, const Theta& theta, const Eigen::VectorXd& x) {
    if (x.size() != theta.W1.cols())
        throw DomainError("input has dimension " + std::to_string(x.size()) + ", expected " +
                          std::to_string(theta.W1.cols()));
    if (static_cast<int>(theta.W.size()) != cfg.depth - 1)
        throw DomainError("parameter depth does not match configuration");
    ForwardTrace tr;
    tr.Z.reserve(cfg.depth);
    tr.H.reserve(cfg.depth);
    tr.Z.push_back(theta.W1 * x);
    tr.H.push_back(tr.Z.back().unaryExpr([&](double z) { return cfg.act(z); }));
    for (int k = 1; k < cfg.depth; ++k) {
        const auto& w = theta.W[k - 1];
        if (w.rows() != tr.H.back().size()) throw DomainError("inter-layer weight shape mismatch");
        tr.Z.push_back(cfg.prefactor(k) * (w.transpose() * tr.H.back()));
        tr.H.push_back(tr.Z.back().unaryExpr([&](double z) { return cfg.act(z); }));
    }
    if (theta.C.rows() != tr.H.back().size()) throw DomainError("outer weight shape mismatch");
    tr.g = cfg.prefactor(cfg.depth) * (theta.C.transpose() * tr.H.back());
    return tr;
}

std::vector<ForwardTrace> forward_batch(const ScalingConfig& cfg, const Theta& theta,
                                        const Eigen::MatrixXd& X) {
    std::vector<ForwardTrace> out;
    out.reserve(X.rows());
    for (Eigen::Index r = 0; r < X.rows(); ++r) out.push_back(forward(cfg, theta, X.row(r).transpose()));
    return out;
}

}  // namespace snn
