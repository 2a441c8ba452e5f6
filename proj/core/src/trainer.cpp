#include "snn/trainer.hpp"

#include <cmath>

#include "snn/csv.hpp"
#include "snn/errors.hpp"
#include "snn/rng.hpp"

namespace snn {

ParamGrad ParamGrad::zeros_like(const Theta& th) {
    ParamGrad g;
    g.W1 = Eigen::MatrixXd::Zero(th.W1.rows(), th.W1.cols());
    for (const auto& w : th.W) g.W.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    g.C = Eigen::MatrixXd::Zero(th.C.rows(), th.C.cols());
    return g;
}

void ParamGrad::add_scaled(const ParamGrad& o, double a) {
    W1 += a * o.W1;
    for (std::size_t k = 0; k < W.size(); ++k) W[k] += a * o.W[k];
    C += a * o.C;
}

ParamGrad output_gradient(const ScalingConfig& cfg, const Theta& th, const ForwardTrace& tr, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& e) {
    const int m = cfg.depth;
    ParamGrad g;
    g.W.resize(m - 1);
    const double pm = cfg.prefactor(m);
    g.C = pm * tr.H[m - 1] * e.transpose();
    Eigen::VectorXd dH = pm * (th.C * e);
    for (int L = m; L >= 1; --L) {
        const Eigen::VectorXd& Z = tr.Z[L - 1];
        Eigen::VectorXd dZ(Z.size());
        for (Eigen::Index i = 0; i < Z.size(); ++i) dZ(i) = dH(i) * cfg.act.deriv(1, Z(i));
        if (L == 1) {
            g.W1 = dZ * x.transpose();
        } else {
            const double p = cfg.prefactor(L - 1);
            g.W[L - 2] = p * tr.H[L - 2] * dZ.transpose();
            dH = p * (th.W[L - 2] * dZ);
        }
    }
    return g;
}

Theta apply_update(const Theta& th, const ParamGrad& g, const RateSchedule& rates) {
    Theta out = th;
    out.C += rates.C() * g.C;
    out.W1 += rates.W(1) * g.W1;
    for (std::size_t k = 0; k < out.W.size(); ++k) out.W[k] += rates.W(static_cast<int>(k) + 2) * g.W[k];
    return out;
}

namespace {

void require_finite(const Theta& th) {
    if (!th.C.allFinite()) throw NumericError("non-finite update in group C");
    if (!th.W1.allFinite()) throw NumericError("non-finite update in group W1");
    for (std::size_t k = 0; k < th.W.size(); ++k)
        if (!th.W[k].allFinite()) throw NumericError("non-finite update in group W" + std::to_string(k + 2));
}

}  // namespace

namespace {

struct StepSize {
    double C = 0.0, W1 = 0.0, W2 = 0.0;
};

// The three two-layer update lines, applied in place from the pre-step values:
// C_i += aC p2 e H2_i
// W1_j += aW1 p1 p2 e (sum_i C_i sigma'(Z2_i) W2(j,i)) sigma'(W1_j x) x
// W2(j,i) += aW2 p1 p2 e C_i sigma'(Z2_i) H1_j
StepSize two_layer_update(Theta& th, const Eigen::VectorXd& x, double y, const RateSchedule& rates,
                          const ScalingConfig& cfg) {
    const int n1 = cfg.N[0], n2 = cfg.N[1];
    const double p1 = cfg.prefactor(1), p2 = cfg.prefactor(2);
    const auto& act = cfg.act;
    Eigen::MatrixXd& W2 = th.W[0];
    const Eigen::VectorXd u1 = th.W1 * x;
    Eigen::VectorXd H1(n1), d1(n1), H2(n2), dZ2(n2);
    double buf[2];
    for (int j = 0; j < n1; ++j) {
        act.eval_all(u1(j), 1, buf);
        H1(j) = buf[0];
        d1(j) = buf[1];
    }
    const Eigen::VectorXd Z2 = p1 * (W2.transpose() * H1);
    for (int i = 0; i < n2; ++i) {
        act.eval_all(Z2(i), 1, buf);
        H2(i) = buf[0];
        dZ2(i) = buf[1];
    }
    const double e = y - p2 * th.C.col(0).dot(H2);
    const Eigen::VectorXd v = th.C.col(0).cwiseProduct(dZ2);
    const Eigen::VectorXd s = W2 * v;
    const double kC = rates.C() * p2 * e, kW1 = rates.W(1) * p1 * p2 * e, kW2 = rates.W(2) * p1 * p2 * e;
    th.C.col(0) += kC * H2;
    W2.noalias() += (kW2 * H1) * v.transpose();
    const Eigen::VectorXd r1 = kW1 * s.cwiseProduct(d1);
    th.W1.noalias() += r1 * x.transpose();
    StepSize st;
    st.C = std::abs(kC) * H2.cwiseAbs().maxCoeff();
    st.W1 = r1.cwiseAbs().maxCoeff() * x.norm();
    st.W2 = std::abs(kW2) * H1.cwiseAbs().maxCoeff() * v.cwiseAbs().maxCoeff();
    return st;
}

}  // namespace

Theta sgd_step_two_layer(const Theta& th, const Eigen::VectorXd& x, double y, const RateSchedule& rates,
                         const ScalingConfig& cfg) {
    if (cfg.depth != 2 || rates.depth != 2) throw DomainError("sgd_step_two_layer needs a depth-two configuration");
    th.check_shapes(cfg);
    Theta out = th;
    two_layer_update(out, x, y, rates, cfg);
    require_finite(out);
    return out;
}

Theta sgd_step_three_layer(const Theta& th, const Eigen::VectorXd& x, double y, const RateSchedule& rates,
                           const ScalingConfig& cfg) {
    if (cfg.depth != 3 || rates.depth != 3)
        throw DomainError("sgd_step_three_layer needs a depth-three configuration");
    th.check_shapes(cfg);
    const int n1 = cfg.N[0], n2 = cfg.N[1], n3 = cfg.N[2];
    const double p1 = cfg.prefactor(1), p2 = cfg.prefactor(2), p3 = cfg.prefactor(3);
    const auto& act = cfg.act;
    const Eigen::MatrixXd& W2 = th.W[0];  // (nu, j) = W^{2, j, nu}
    const Eigen::MatrixXd& W3 = th.W[1];  // (j, i) = W^{3, i, j}
    const Eigen::VectorXd u1 = th.W1 * x;
    Eigen::VectorXd H1(n1), H2(n2), H3(n3), d2(n2), d3(n3);
    for (int v = 0; v < n1; ++v) H1(v) = act(u1(v));
    const Eigen::VectorXd Z2 = p1 * (W2.transpose() * H1);
    for (int j = 0; j < n2; ++j) {
        H2(j) = act(Z2(j));
        d2(j) = act.deriv(1, Z2(j));
    }
    const Eigen::VectorXd Z3 = p2 * (W3.transpose() * H2);
    for (int i = 0; i < n3; ++i) {
        H3(i) = act(Z3(i));
        d3(i) = act.deriv(1, Z3(i));
    }
    const double g = p3 * th.C.col(0).dot(H3);
    const double e = y - g;
    const double aC = rates.C(), aW1 = rates.W(1), aW2 = rates.W(2), aW3 = rates.W(3);

    Theta out = th;
    for (int i = 0; i < n3; ++i) out.C(i, 0) += aC * p3 * e * H3(i);
    for (int v = 0; v < n1; ++v) {
        double outer = 0.0;
        for (int i = 0; i < n3; ++i) {
            double inner = 0.0;
            for (int j = 0; j < n2; ++j) inner += W3(j, i) * d2(j) * W2(v, j);
            outer += th.C(i, 0) * d3(i) * p2 * inner;
        }
        out.W1.row(v) += (aW1 * p1 * e * p3 * outer * act.deriv(1, u1(v))) * x.transpose();
    }
    for (int j = 0; j < n2; ++j) {
        double s = 0.0;
        for (int i = 0; i < n3; ++i) s += th.C(i, 0) * d3(i) * W3(j, i);
        for (int v = 0; v < n1; ++v) out.W[0](v, j) += aW2 * p1 * p2 * e * p3 * s * d2(j) * H1(v);
    }
    for (int i = 0; i < n3; ++i)
        for (int j = 0; j < n2; ++j) out.W[1](j, i) += aW3 * p2 * p3 * e * th.C(i, 0) * d3(i) * H2(j);
    require_finite(out);
    return out;
}

Theta sgd_step(const Theta& th, const Eigen::VectorXd& x, double y, const RateSchedule& rates,
               const ScalingConfig& cfg) {
    if (rates.depth != cfg.depth) throw DomainError("rate schedule depth does not match the network");
    const ForwardTrace tr = forward(cfg, th, x);
    Eigen::VectorXd e(1);
    e(0) = y - tr.output();
    Theta out = apply_update(th, output_gradient(cfg, th, tr, x, e), rates);
    require_finite(out);
    return out;
}

Eigen::VectorXd loss_residual(const Eigen::VectorXd& g, Loss loss, double y, int label) {
    if (loss == Loss::Quadratic) {
        Eigen::VectorXd e(1);
        e(0) = y - g(0);
        return e;
    }
    if (label < 0 || label >= g.size()) throw DomainError("label outside the output range");
    const double mx = g.maxCoeff();
    Eigen::VectorXd p = (g.array() - mx).exp();
    p /= p.sum();
    Eigen::VectorXd e = -p;
    e(label) += 1.0;
    return e;
}

Theta sgd_step_batch(const Theta& th, const Dataset& data, const std::vector<int>& rows, Loss loss,
                     const RateSchedule& rates, const ScalingConfig& cfg) {
    if (rows.empty()) throw DomainError("empty batch");
    if (rates.depth != cfg.depth) throw DomainError("rate schedule depth does not match the network");
    if (loss == Loss::CrossEntropy && !data.is_classification())
        throw DomainError("cross-entropy needs class labels");
    if (loss == Loss::Quadratic && data.Y.size() != data.size()) throw DomainError("quadratic loss needs targets");
    const int B = static_cast<int>(rows.size()), m = cfg.depth;
    Eigen::MatrixXd Xb(B, data.dim());
    for (int r = 0; r < B; ++r) Xb.row(r) = data.X.row(rows[r]);
    const auto sig = [&](double z) { return cfg.act(z); };
    const auto dsig = [&](double z) { return cfg.act.deriv(1, z); };

    std::vector<Eigen::MatrixXd> Z, H;
    Z.push_back(Xb * th.W1.transpose());
    H.push_back(Z.back().unaryExpr(sig));
    for (int L = 2; L <= m; ++L) {
        Z.push_back(cfg.prefactor(L - 1) * (H.back() * th.W[L - 2]));
        H.push_back(Z.back().unaryExpr(sig));
    }
    const double pm = cfg.prefactor(m);
    const Eigen::MatrixXd G = pm * (H.back() * th.C);
    Eigen::MatrixXd E(B, G.cols());
    for (int r = 0; r < B; ++r) {
        const Eigen::VectorXd g = G.row(r).transpose();
        E.row(r) = (loss == Loss::Quadratic ? loss_residual(g, loss, data.Y(rows[r]), -1)
                                            : loss_residual(g, loss, 0.0, data.labels[rows[r]]))
                       .transpose();
    }
    const double w = 1.0 / B;
    ParamGrad grad;
    grad.W.resize(m - 1);
    grad.C = (w * pm) * (H.back().transpose() * E);
    Eigen::MatrixXd dH = pm * (E * th.C.transpose());
    for (int L = m; L >= 1; --L) {
        const Eigen::MatrixXd dZ = dH.cwiseProduct(Z[L - 1].unaryExpr(dsig));
        if (L == 1) {
            grad.W1 = w * (dZ.transpose() * Xb);
        } else {
            const double p = cfg.prefactor(L - 1);
            grad.W[L - 2] = (w * p) * (H[L - 2].transpose() * dZ);
            dH = p * (dZ * th.W[L - 2].transpose());
        }
    }
    Theta out = apply_update(th, grad, rates);
    require_finite(out);
    return out;
}

Eigen::VectorXd outputs_on(const ScalingConfig& cfg, const Theta& th, const Eigen::MatrixXd& X) {
    Eigen::VectorXd h(X.rows());
    for (Eigen::Index r = 0; r < X.rows(); ++r) h(r) = forward(cfg, th, X.row(r).transpose()).output();
    return h;
}

namespace {

double max_abs_W(const Theta& th, std::size_t k) { return th.W[k].cwiseAbs().maxCoeff(); }

std::vector<double> probe_averages(const TrainConfig& cfg, const Theta& th) {
    std::vector<double> out;
    if (cfg.probes.empty()) return out;
    const ParticleSpace& s = cfg.probes[0].space();
    const int n2 = cfg.scaling.N[1];
    out.assign(cfg.probes.size(), 0.0);
    for (int i = 0; i < n2; ++i) {
        const Eigen::VectorXd w2 = th.W[0].col(i);
        const Eigen::VectorXd p = s.particle(th.C(i, 0), w2, th.W1);
        for (std::size_t f = 0; f < cfg.probes.size(); ++f) out[f] += cfg.probes[f].value(p);
    }
    for (double& v : out) v /= n2;
    return out;
}

}  // namespace

Trajectory train(const TrainConfig& cfg, const Dataset& data, const Theta& theta0) {
    const ScalingConfig& sc = cfg.scaling;
    sc.validate();
    theta0.check_shapes(sc);
    if (!(cfg.T > 0.0)) throw DomainError("horizon T must be positive");
    if (cfg.batch < 1) throw DomainError("batch size must be positive");
    if (cfg.stride < 1) throw DomainError("record stride must be positive");
    if (data.size() < 1) throw DomainError("empty dataset");
    if (cfg.rates.depth != sc.depth) throw DomainError("rate schedule depth does not match the network");
    if (cfg.loss == Loss::Quadratic && sc.outputs != 1) throw DomainError("quadratic loss needs a scalar output");
    if (cfg.loss == Loss::Quadratic) require_distinct_directions(data.X);
    if (!cfg.probes.empty()) {
        if (sc.depth != 2) throw DomainError("probe averages need a two-layer network");
        const ParticleSpace& s = cfg.probes[0].space();
        if (s.N1() != sc.N[0] || s.d() != sc.input_dim) throw DomainError("probe space does not match the network");
    }

    const int Nm = sc.N[sc.depth - 1];
    const long long steps = static_cast<long long>(std::floor(Nm * cfg.T * (1.0 + 1e-12)));
    Rng rng = make_rng(cfg.seed, 0x5A);
    const int M = data.size();

    Trajectory tj;
    tj.max_step_W.assign(sc.depth - 1, 0.0);
    auto record = [&](long long k, const Theta& th) {
        tj.step.push_back(k);
        tj.t.push_back(static_cast<double>(k) / Nm);
        if (sc.outputs == 1) tj.h.push_back(outputs_on(sc, th, data.X));
        tj.max_abs_C.push_back(th.max_abs_C());
        tj.max_abs_W1.push_back(th.W1.cwiseAbs().maxCoeff());
        std::vector<double> mw;
        for (std::size_t k2 = 0; k2 < th.W.size(); ++k2) mw.push_back(max_abs_W(th, k2));
        tj.max_abs_W.push_back(std::move(mw));
        tj.probes.push_back(probe_averages(cfg, th));
    };

    Theta th = theta0;
    record(0, th);
    std::vector<int> rows(cfg.batch);
    const bool fast = cfg.batch == 1 && cfg.loss == Loss::Quadratic && sc.depth == 2;
    for (long long k = 0; k < steps; ++k) {
        for (int b = 0; b < cfg.batch; ++b) rows[b] = std::min(M - 1, static_cast<int>(uniform01(rng) * M));
        if (fast) {
            const StepSize d = two_layer_update(th, data.x(rows[0]), data.Y(rows[0]), cfg.rates, sc);
            if (!(std::isfinite(d.C) && std::isfinite(d.W1) && std::isfinite(d.W2)))
                throw NumericError("non-finite update at step " + std::to_string(k + 1));
            tj.max_step_C = std::max(tj.max_step_C, d.C);
            tj.max_step_W1 = std::max(tj.max_step_W1, d.W1);
            tj.max_step_W[0] = std::max(tj.max_step_W[0], d.W2);
        } else {
            Theta next = sgd_step_batch(th, data, rows, cfg.loss, cfg.rates, sc);
            tj.max_step_C = std::max(tj.max_step_C, (next.C - th.C).cwiseAbs().maxCoeff());
            tj.max_step_W1 = std::max(tj.max_step_W1, (next.W1 - th.W1).rowwise().norm().maxCoeff());
            for (std::size_t q = 0; q < th.W.size(); ++q)
                tj.max_step_W[q] = std::max(tj.max_step_W[q], (next.W[q] - th.W[q]).cwiseAbs().maxCoeff());
            th = std::move(next);
        }
        const double mag = std::max({th.max_abs_C(), th.max_norm_W1(),
                                     th.W.empty() ? 0.0 : th.W[0].cwiseAbs().maxCoeff()});
        if (!(mag <= cfg.param_bound))
            throw NumericError("parameter magnitude " + std::to_string(mag) + " exceeded the bound at step " +
                               std::to_string(k + 1));
        if ((k + 1) % cfg.stride == 0 || k + 1 == steps) record(k + 1, th);
    }
    return tj;
}

void Trajectory::write_csv(const std::string& path) const {
    std::vector<std::string> header{"t"};
    const std::size_t M = h.empty() ? 0 : static_cast<std::size_t>(h[0].size());
    for (std::size_t a = 0; a < M; ++a) header.push_back("h_" + std::to_string(a + 1));
    header.push_back("max_abs_C");
    header.push_back("max_abs_W1");
    const std::size_t nw = max_abs_W.empty() ? 0 : max_abs_W[0].size();
    for (std::size_t k = 0; k < nw; ++k) header.push_back("max_abs_W" + std::to_string(k + 2));
    const std::size_t nf = probes.empty() ? 0 : probes[0].size();
    for (std::size_t f = 0; f < nf; ++f) header.push_back("f_" + std::to_string(f + 1));
    CsvWriter w(path, header);
    for (std::size_t r = 0; r < t.size(); ++r) {
        std::vector<double> row{t[r]};
        for (std::size_t a = 0; a < M; ++a) row.push_back(h[r](static_cast<Eigen::Index>(a)));
        row.push_back(max_abs_C[r]);
        row.push_back(max_abs_W1[r]);
        for (double v : max_abs_W[r]) row.push_back(v);
        for (double v : probes[r]) row.push_back(v);
        w.row(row);
    }
}

DecompositionReport one_step_decomposition_check(const Theta& th, const Eigen::VectorXd& xk, double yk,
                                                 const RateSchedule& rates, const ScalingConfig& cfg,
                                                 const Eigen::MatrixXd& X) {
    if (cfg.depth != 2 || cfg.outputs != 1) throw DomainError("decomposition check needs a two-layer scalar network");
    const int n1 = cfg.N[0], n2 = cfg.N[1], M = static_cast<int>(X.rows());
    const double g1 = cfg.gamma[0], g2 = cfg.gamma[1];
    const auto& act = cfg.act;
    const Theta next = sgd_step_two_layer(th, xk, yk, rates, cfg);

    const ForwardTrace tk = forward(cfg, th, xk);
    const double e = yk - tk.output();
    const Eigen::VectorXd& H1k = tk.H[0];
    const Eigen::VectorXd& Zk = tk.Z[1];
    // Per-unit factor c w2_j sigma'(w1_j x) sigma'(Z(x)), averaged over the outer particles.
    auto b3_avg = [&](const ForwardTrace& tr) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(n1);
        for (int j = 0; j < n1; ++j) {
            double s = 0.0;
            for (int i = 0; i < n2; ++i) s += th.C(i, 0) * th.W[0](j, i) * act.deriv(1, tr.Z[1](i));
            out(j) = s * act.deriv(1, tr.Z[0](j)) / n2;
        }
        return out;
    };
    const Eigen::VectorXd b3k = b3_avg(tk);

    const double fC = rates.C() / std::pow(n2, 2.0 * g2 - 1.0);
    const double fW2 = rates.W(2) / (std::pow(n1, 2.0 * g1) * std::pow(n2, 2.0 * g2 - 1.0));
    const double fW1 = rates.W(1) / (std::pow(n1, 2.0 * g1) * std::pow(n2, 2.0 * g2 - 2.0));

    DecompositionReport rep;
    rep.actual.resize(M);
    rep.predicted.resize(M);
    for (int a = 0; a < M; ++a) {
        const Eigen::VectorXd x = X.row(a).transpose();
        const ForwardTrace tr = forward(cfg, th, x);
        rep.actual(a) = forward(cfg, next, x).output() - tr.output();
        double s1 = 0.0, s2 = 0.0;
        for (int i = 0; i < n2; ++i) {
            s1 += act(Zk(i)) * act(tr.Z[1](i));
            const double cc = th.C(i, 0) * th.C(i, 0) * act.deriv(1, Zk(i)) * act.deriv(1, tr.Z[1](i));
            double inner = 0.0;
            for (int j = 0; j < n1; ++j) inner += H1k(j) * tr.H[0](j);
            s2 += cc * inner;
        }
        s1 /= n2;
        s2 /= n2;
        const Eigen::VectorXd b3x = b3_avg(tr);
        const double s3 = x.dot(xk) * b3x.dot(b3k);
        rep.predicted(a) = e * (fC * s1 + fW2 * s2 + fW1 * s3);
    }
    rep.residual = rep.actual - rep.predicted;
    rep.max_residual = rep.residual.cwiseAbs().maxCoeff();
    return rep;
}

}  // namespace snn
