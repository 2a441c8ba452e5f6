#include "snn/kernels.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/legendre.hpp>

#include "snn/csv.hpp"
#include "snn/errors.hpp"
#include "snn/parallel.hpp"

namespace snn {

void law_nodes(const Law1d& law, int quad_nodes, std::vector<double>& atoms, std::vector<double>& weights) {
    atoms.clear();
    weights.clear();
    if (law.kind == Law1d::Kind::Discrete) {
        atoms = law.atoms;
        weights = law.weights;
        return;
    }
    if (law.kind != Law1d::Kind::Uniform) throw DomainError("quadrature needs a law with compact support");
    if (quad_nodes < 1) throw DomainError("quadrature needs at least one node");
    // Positive Legendre zeros; the negative half mirrors them.
    const auto zeros = boost::math::legendre_p_zeros<double>(quad_nodes);
    std::vector<double> xs, ws;
    for (double z : zeros) {
        const double dp = boost::math::legendre_p_prime(quad_nodes, z);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        if (z == 0.0) {
            xs.push_back(0.0);
            ws.push_back(w);
        } else {
            xs.push_back(z);
            ws.push_back(w);
            xs.push_back(-z);
            ws.push_back(w);
        }
    }
    const double mid = 0.5 * (law.lo + law.hi), half = 0.5 * (law.hi - law.lo);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        atoms.push_back(mid + half * xs[i]);
        weights.push_back(0.5 * ws[i]);
    }
}

std::vector<Expectation> expect_many(const std::vector<TestFunction>& fs, const InitLaw& law,
                                     const ExpectOptions& opt) {
    std::vector<Expectation> out(fs.size());
    if (fs.empty()) return out;
    const ParticleSpace& space = fs[0].space();
    for (const auto& f : fs)
        if (&f.space() != &space) throw DomainError("expect_many needs functions over one particle space");
    law.validate_for_limit(space.N1());
    if (law.w1_atoms->cols() != space.d()) throw DomainError("frozen first-layer atoms have the wrong dimension");
    const int n1 = space.N1();

    Eigen::VectorXd base = Eigen::VectorXd::Zero(space.P());
    for (int j = 0; j < n1; ++j)
        for (int k = 0; k < space.d(); ++k) base(space.idx_w1(j, k)) = (*law.w1_atoms)(j, k);

    ExpectMethod method = opt.method;
    const bool discrete = law.c.is_discrete() && law.w2.is_discrete();
    if (method == ExpectMethod::Auto) method = discrete ? ExpectMethod::Enumerate : ExpectMethod::Quadrature;

    if (method == ExpectMethod::MonteCarlo) {
        if (opt.mc_samples < 2) throw DomainError("Monte Carlo expectation needs at least 2 samples");
        Rng rng = make_rng(opt.mc_seed, 0xE1);
        std::vector<double> mean(fs.size(), 0.0), m2(fs.size(), 0.0);
        Eigen::VectorXd th = base;
        for (std::size_t s = 0; s < opt.mc_samples; ++s) {
            th(0) = law.c.sample(rng);
            for (int j = 0; j < n1; ++j) th(1 + j) = law.w2.sample(rng);
            Evaluator ev(space, th);
            for (std::size_t i = 0; i < fs.size(); ++i) {
                const double v = ev.eval(fs[i].node(), 0).v;
                const double delta = v - mean[i];
                mean[i] += delta / static_cast<double>(s + 1);
                m2[i] += delta * (v - mean[i]);
            }
        }
        const double S = static_cast<double>(opt.mc_samples);
        for (std::size_t i = 0; i < fs.size(); ++i)
            out[i] = {mean[i], std::sqrt(m2[i] / (S - 1.0) / S), opt.mc_samples};
        return out;
    }

    if (method == ExpectMethod::Enumerate && !discrete)
        throw DomainError("enumeration requested on a continuous law");
    std::vector<double> ca, cw, wa, ww;
    law_nodes(law.c, opt.quad_nodes, ca, cw);
    law_nodes(law.w2, opt.quad_nodes, wa, ww);
    const std::size_t nc = ca.size(), nw = wa.size();
    double total_d = static_cast<double>(nc) * std::pow(static_cast<double>(nw), n1);
    if (total_d > static_cast<double>(opt.max_points))
        throw DomainError("tensor-product integration needs " + std::to_string(total_d) +
                          " points, above the cap of " + std::to_string(opt.max_points) +
                          "; use a discrete law, fewer nodes, or Monte Carlo");
    const std::size_t total = static_cast<std::size_t>(total_d);
    constexpr std::size_t kBlock = 2048;
    const std::size_t nblocks = (total + kBlock - 1) / kBlock;
    std::vector<double> block_sums(nblocks * fs.size(), 0.0);

    parallel_for(nblocks, [&](std::size_t b) {
        const std::size_t lo = b * kBlock, hi = std::min(total, lo + kBlock);
        std::vector<double> vals((hi - lo) * fs.size());
        Eigen::VectorXd th = base;
        for (std::size_t p = lo; p < hi; ++p) {
            std::size_t rest = p;
            const std::size_t ic = rest % nc;
            rest /= nc;
            double w = cw[ic];
            th(0) = ca[ic];
            for (int j = 0; j < n1; ++j) {
                const std::size_t iw = rest % nw;
                rest /= nw;
                th(1 + j) = wa[iw];
                w *= ww[iw];
            }
            Evaluator ev(space, th);
            for (std::size_t i = 0; i < fs.size(); ++i)
                vals[i * (hi - lo) + (p - lo)] = w * ev.eval(fs[i].node(), 0).v;
        }
        for (std::size_t i = 0; i < fs.size(); ++i)
            block_sums[i * nblocks + b] = pairwise_sum(&vals[i * (hi - lo)], hi - lo);
    });
    for (std::size_t i = 0; i < fs.size(); ++i)
        out[i] = {pairwise_sum(&block_sums[i * nblocks], nblocks), 0.0, total};
    return out;
}

Expectation expect(const TestFunction& f, const InitLaw& law, const ExpectOptions& opt) {
    return expect_many({f}, law, opt)[0];
}

TestFunction kernel_B1(const ParticleSpace& s, const Eigen::VectorXd& x, const Eigen::VectorXd& xp) {
    return s.act(0, s.Z(xp)) * s.act(0, s.Z(x));
}

TestFunction kernel_B2(const ParticleSpace& s, int j, const Eigen::VectorXd& x, const Eigen::VectorXd& xp) {
    return s.product({s.c(), s.c(), s.act(1, s.Z(xp)), s.act(1, s.Z(x)), s.act(0, s.inner(j, xp)),
                      s.act(0, s.inner(j, x))});
}

TestFunction kernel_B3(const ParticleSpace& s, int j, const Eigen::VectorXd& x) {
    return s.product({s.c(), s.w2(j), s.act(1, s.inner(j, x)), s.act(1, s.Z(x))});
}

KernelTables kernel_B(const Eigen::MatrixXd& X, const InitLaw& law, const ParticleSpace& s,
                      const ExpectOptions& opt) {
    const int M = static_cast<int>(X.rows()), n1 = s.N1();
    if (X.cols() != s.d()) throw DomainError("dataset dimension does not match the particle space");
    std::vector<TestFunction> fs;
    for (int a = 0; a < M; ++a)
        for (int b = a; b < M; ++b) fs.push_back(kernel_B1(s, X.row(a).transpose(), X.row(b).transpose()));
    for (int j = 0; j < n1; ++j)
        for (int a = 0; a < M; ++a)
            for (int b = a; b < M; ++b)
                fs.push_back(kernel_B2(s, j, X.row(a).transpose(), X.row(b).transpose()));
    for (int j = 0; j < n1; ++j)
        for (int a = 0; a < M; ++a) fs.push_back(kernel_B3(s, j, X.row(a).transpose()));
    const auto e = expect_many(fs, law, opt);

    KernelTables t;
    t.N1 = n1;
    t.M = M;
    t.B1 = Eigen::MatrixXd::Zero(M, M);
    t.B2.assign(n1, Eigen::MatrixXd::Zero(M, M));
    t.B3 = Eigen::MatrixXd::Zero(n1, M);
    std::size_t i = 0;
    for (int a = 0; a < M; ++a)
        for (int b = a; b < M; ++b, ++i) t.B1(a, b) = t.B1(b, a) = e[i].value;
    for (int j = 0; j < n1; ++j)
        for (int a = 0; a < M; ++a)
            for (int b = a; b < M; ++b, ++i) t.B2[j](a, b) = t.B2[j](b, a) = e[i].value;
    for (int j = 0; j < n1; ++j)
        for (int a = 0; a < M; ++a, ++i) t.B3(j, a) = e[i].value;
    return t;
}

Eigen::MatrixXd assemble_A(const KernelTables& t, const Eigen::MatrixXd& X) {
    const int M = t.M;
    if (X.rows() != M) throw DomainError("dataset size does not match kernel tables");
    Eigen::MatrixXd A = t.B1;
    const double inv = 1.0 / t.N1;
    const Eigen::MatrixXd G = X * X.transpose();
    for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b) {
            double s = 0.0;
            for (int j = 0; j < t.N1; ++j) s += t.B2[j](a, b) + G(a, b) * t.B3(j, a) * t.B3(j, b);
            A(a, b) += inv * s;
        }
    return A;
}

KernelTables build_kernels(const Eigen::MatrixXd& X, const InitLaw& law, const ParticleSpace& space,
                           const ExpectOptions& opt) {
    KernelTables t = kernel_B(X, law, space, opt);
    t.A = assemble_A(t, X);
    return t;
}

void KernelTables::write_csv(const std::string& dir) const {
    ensure_dir(dir);
    {
        CsvWriter w(dir + "/B1.csv", {"a", "b", "value"});
        for (int a = 0; a < M; ++a)
            for (int b = 0; b < M; ++b) w.row({double(a), double(b), B1(a, b)});
    }
    {
        CsvWriter w(dir + "/B2.csv", {"j", "a", "b", "value"});
        for (int j = 0; j < N1; ++j)
            for (int a = 0; a < M; ++a)
                for (int b = 0; b < M; ++b) w.row({double(j), double(a), double(b), B2[j](a, b)});
    }
    {
        CsvWriter w(dir + "/B3.csv", {"j", "a", "value"});
        for (int j = 0; j < N1; ++j)
            for (int a = 0; a < M; ++a) w.row({double(j), double(a), B3(j, a)});
    }
    if (A.size()) {
        CsvWriter w(dir + "/A.csv", {"a", "b", "value"});
        for (int a = 0; a < M; ++a)
            for (int b = 0; b < M; ++b) w.row({double(a), double(b), A(a, b)});
    }
}

Eigen::Vector3d kernel_bounds(const InitLaw& law, const Activation& act) {
    const double rc = law.c.radius(), rw = law.w2.radius();
    const double s0 = act.sup(0), s1 = act.sup(1);
    return {s0 * s0, rc * rc * s1 * s1 * s0 * s0, rc * rw * s1 * s1};
}

CfOperators operators_Cf1_Cf2_C3(const TestFunction& f, const Eigen::VectorXd& x) {
    const ParticleSpace& s = f.space();
    CfOperators out;
    VectorField f1;
    f1.terms.emplace_back(s.idx_c(), s.act(0, s.Z(x)));
    out.Cf1 = s.apply(f, f1);
    VectorField f2;
    const TestFunction lead = s.c() * s.act(1, s.Z(x));
    for (int j = 0; j < s.N1(); ++j) f2.terms.emplace_back(s.idx_w2(j), lead * s.act(0, s.inner(j, x)));
    out.Cf2 = s.apply(f, f2);
    for (int j = 0; j < s.N1(); ++j) out.C3.push_back(kernel_B3(s, j, x));
    return out;
}

TestFunction grad_w1_dot(const TestFunction& f, int j, const Eigen::VectorXd& x) {
    const ParticleSpace& s = f.space();
    VectorField v;
    for (int k = 0; k < s.d(); ++k) v.terms.emplace_back(s.idx_w1(j, k), s.constant(x(k)));
    return s.apply(f, v);
}

TestFunction operator_C(const TestFunction& f, const Eigen::VectorXd& xp, const InitLaw& law,
                        const ExpectOptions& opt) {
    const ParticleSpace& s = f.space();
    const double eps = s.eps();
    std::vector<TestFunction> c3;
    for (int j = 0; j < s.N1(); ++j) c3.push_back(kernel_B3(s, j, xp));
    const auto mc3 = expect_many(c3, law, opt);
    VectorField v;
    v.terms.emplace_back(s.idx_c(), s.act(0, s.Z(xp)));
    const TestFunction lead = s.c() * s.act(1, s.Z(xp));
    for (int j = 0; j < s.N1(); ++j)
        v.terms.emplace_back(s.idx_w2(j), (lead * s.act(0, s.inner(j, xp))) * eps);
    for (int j = 0; j < s.N1(); ++j)
        for (int k = 0; k < s.d(); ++k)
            v.terms.emplace_back(s.idx_w1(j, k), s.constant(eps * mc3[j].value * xp(k)));
    return s.apply(f, v);
}

double lambda_sq(const Eigen::VectorXd& x, const InitLaw& law, const ParticleSpace& s, const ExpectOptions& opt) {
    const TestFunction g = s.c() * s.act(0, s.Z(x));
    return expect(g * g, law, opt).value;
}

Eigen::MatrixXd fluctuation_covariance(const Eigen::MatrixXd& X, const InitLaw& law, const ParticleSpace& s,
                                       const ExpectOptions& opt) {
    const int M = static_cast<int>(X.rows());
    std::vector<TestFunction> fs;
    for (int a = 0; a < M; ++a)
        for (int b = a; b < M; ++b)
            fs.push_back(s.product({s.c(), s.c(), s.act(0, s.Z(X.row(a).transpose())),
                                    s.act(0, s.Z(X.row(b).transpose()))}));
    const auto e = expect_many(fs, law, opt);
    Eigen::MatrixXd S(M, M);
    std::size_t i = 0;
    for (int a = 0; a < M; ++a)
        for (int b = a; b < M; ++b, ++i) S(a, b) = S(b, a) = e[i].value;
    return S;
}

}  // namespace snn
