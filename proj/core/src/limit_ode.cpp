#include "snn/limit_ode.hpp"

#include <cmath>

#include "snn/errors.hpp"
#include "snn/rng.hpp"

namespace snn {

RegimeInfo classify_regime(double gamma2) {
    if (!(gamma2 > 0.5 && gamma2 < 1.0)) throw DomainError("gamma2 out of range (1/2,1)");
    const double r = 1.0 / (2.0 * (1.0 - gamma2));
    const double tol = 1e-9;
    int nu = static_cast<int>(std::floor(r + tol));
    RegimeInfo info;
    info.gamma2 = gamma2;
    info.nu = std::max(nu, 1);
    info.boundary = info.nu >= 2 && std::abs(r - info.nu) < tol;
    info.exponent = std::min(1.0 - gamma2, gamma2 - 0.5);
    return info;
}

LimitProblem LimitProblem::build(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const InitLaw& law,
                                 double gamma1, const Activation& act, const ExpectOptions& opt) {
    if (X.rows() != Y.size()) throw DomainError("inputs and targets differ in count");
    if (!law.w1_atoms) throw DomainError("limit problem needs frozen first-layer atoms");
    LimitProblem p;
    p.space = ParticleSpace::create(static_cast<int>(law.w1_atoms->rows()), static_cast<int>(X.cols()), gamma1, act);
    p.law = law;
    p.X = X;
    p.Y = Y;
    p.opt = opt;
    p.tables = build_kernels(X, law, *p.space, opt);
    return p;
}

KernelFamily::KernelFamily(const LimitProblem& p) : M_(p.M()), N1_(p.N1()) {
    const ParticleSpace& s = *p.space;
    pairs_ = M_ * (M_ + 1) / 2;
    for (int a = 0; a < M_; ++a)
        for (int b = a; b < M_; ++b) fns_.push_back(kernel_B1(s, p.x(a), p.x(b)));
    for (int j = 0; j < N1_; ++j)
        for (int a = 0; a < M_; ++a)
            for (int b = a; b < M_; ++b) fns_.push_back(kernel_B2(s, j, p.x(a), p.x(b)));
    off_b3_ = static_cast<int>(fns_.size());
    for (int j = 0; j < N1_; ++j)
        for (int a = 0; a < M_; ++a) fns_.push_back(kernel_B3(s, j, p.x(a)));
}

namespace {

int pair_index(int M, int a, int b) {
    if (a > b) std::swap(a, b);
    return a * M - a * (a - 1) / 2 + (b - a);
}

Eigen::VectorXd family_means(const LimitProblem& p, const KernelFamily& fam) {
    Eigen::VectorXd v(fam.size());
    const int M = p.M();
    for (int a = 0; a < M; ++a)
        for (int b = a; b < M; ++b) v(fam.b1(a, b)) = p.tables.B1(a, b);
    for (int j = 0; j < p.N1(); ++j) {
        for (int a = 0; a < M; ++a) {
            for (int b = a; b < M; ++b) v(fam.b2(j, a, b)) = p.tables.B2[j](a, b);
            v(fam.b3(j, a)) = p.tables.B3(j, a);
        }
    }
    return v;
}

Eigen::VectorXd residual(const LimitProblem& p, const StagedPath& h, int n, int s) {
    return p.Y - h.stage(n, s);
}

void check_grid(const StagedPath& a, const StagedPath& b) {
    if (!(a.grid() == b.grid())) throw DomainError("paths live on different time grids");
}

}  // namespace

int KernelFamily::b1(int a, int b) const { return pair_index(M_, a, b); }

int KernelFamily::b2(int j, int a, int b) const { return pairs_ + j * pairs_ + pair_index(M_, a, b); }

TestFunction op_C(const LimitProblem& p, const TestFunction& f, int b) {
    const ParticleSpace& s = *p.space;
    const Eigen::VectorXd xb = p.x(b);
    const double eps = s.eps();
    VectorField v;
    v.terms.emplace_back(s.idx_c(), s.act(0, s.Z(xb)));
    const TestFunction lead = s.c() * s.act(1, s.Z(xb));
    for (int j = 0; j < s.N1(); ++j) v.terms.emplace_back(s.idx_w2(j), (lead * s.act(0, s.inner(j, xb))) * eps);
    for (int j = 0; j < s.N1(); ++j)
        for (int k = 0; k < s.d(); ++k)
            v.terms.emplace_back(s.idx_w1(j, k), s.constant(eps * p.tables.B3(j, b) * xb(k)));
    return s.apply(f, v);
}

Eigen::MatrixXd kernel_of_order(const LimitProblem& p, const KernelFamily& fam,
                                const std::vector<Eigen::VectorXd>& lk, int q) {
    const int M = p.M(), n1 = p.N1();
    const double inv = 1.0 / n1;
    Eigen::MatrixXd K(M, M);
    for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b) {
            const double g = p.X.row(a).dot(p.X.row(b));
            double s2 = 0.0, s3 = 0.0;
            for (int j = 0; j < n1; ++j) {
                s2 += lk[q](fam.b2(j, a, b));
                double c = 0.0;
                for (int k = 0; k <= q; ++k) c += lk[k](fam.b3(j, a)) * lk[q - k](fam.b3(j, b));
                s3 += c;
            }
            K(a, b) = lk[q](fam.b1(a, b)) + inv * s2 + inv * g * s3;
        }
    return K;
}

StagedPath integrate_h(const Eigen::MatrixXd& A, const Eigen::VectorXd& Y, const Eigen::VectorXd& h0,
                       const TimeGrid& grid) {
    const int M = static_cast<int>(Y.size());
    if (A.rows() != M || A.cols() != M || h0.size() != M) throw DomainError("integrate_h: dimension mismatch");
    if (!A.isApprox(A.transpose(), 1e-12)) throw DomainError("integrate_h: kernel matrix is not symmetric");
    const double inv = 1.0 / M;
    return rk4_staged(grid, h0, [&](int, int, const Eigen::VectorXd& h, Eigen::VectorXd& dh) {
        dh = inv * (A * (Y - h));
    });
}

StagedPath integrate_l(const std::vector<TestFunction>& fs, const LimitProblem& p, const StagedPath& h) {
    const int M = p.M(), nf = static_cast<int>(fs.size());
    std::vector<TestFunction> ops;
    ops.reserve(static_cast<std::size_t>(nf) * M);
    for (const auto& f : fs)
        for (int b = 0; b < M; ++b) ops.push_back(op_C(p, f, b));
    const auto e = expect_many(ops, p.law, p.opt);
    Eigen::MatrixXd kappa(nf, M);
    for (int i = 0; i < nf; ++i)
        for (int b = 0; b < M; ++b) kappa(i, b) = e[static_cast<std::size_t>(i) * M + b].value;
    const double inv = 1.0 / M;
    return rk4_staged(h.grid(), Eigen::VectorXd::Zero(nf), [&](int n, int s, const Eigen::VectorXd&, Eigen::VectorXd& dl) {
        dl = inv * (kappa * residual(p, h, n, s));
    });
}

StagedPath integrate_K(const RegimeInfo& r, const Eigen::MatrixXd& A, const Eigen::VectorXd& K0,
                       const TimeGrid& grid) {
    if (r.nu != 1) throw DomainError("homogeneous K equation applies only for gamma2 < 3/4");
    const double inv = 1.0 / static_cast<double>(K0.size());
    if (A.rows() != K0.size() || A.cols() != K0.size()) throw DomainError("integrate_K: dimension mismatch");
    return rk4_staged(grid, K0, [&](int, int, const Eigen::VectorXd& K, Eigen::VectorXd& dK) { dK = -inv * (A * K); });
}

StagedPath integrate_K(const RegimeInfo& r, const LimitProblem& p, const KernelFamily& fam, const StagedPath& h,
                       const StagedPath& lfam, const Eigen::VectorXd& K0) {
    if (r.nu < 2) throw DomainError("forced K equation applies only for gamma2 >= 3/4");
    check_grid(h, lfam);
    if (lfam.dim() != fam.size()) throw DomainError("integrate_K: l paths do not cover the kernel family");
    if (K0.size() != p.M()) throw DomainError("integrate_K: dimension mismatch");
    const double inv = 1.0 / p.M();
    std::vector<Eigen::VectorXd> lk{family_means(p, fam), Eigen::VectorXd()};
    const Eigen::MatrixXd& A = p.tables.A;
    return rk4_staged(h.grid(), K0, [&](int n, int s, const Eigen::VectorXd& K, Eigen::VectorXd& dK) {
        lk[1] = lfam.stage(n, s);
        const Eigen::MatrixXd K1 = kernel_of_order(p, fam, lk, 1);
        dK = inv * (K1 * residual(p, h, n, s) - A * K);
    });
}

StagedPath integrate_L(const std::vector<TestFunction>& fs, const LimitProblem& p, const StagedPath& h,
                       const StagedPath& K) {
    check_grid(h, K);
    const int M = p.M(), n1 = p.N1(), nf = static_cast<int>(fs.size());
    const ParticleSpace& s = *p.space;
    const double eps = s.eps();

    // Composites g_{ib} = C^{N1,f_i}_{x_b}, then C3_{jb}, all integrated as l paths.
    std::vector<TestFunction> comp;
    for (const auto& f : fs)
        for (int b = 0; b < M; ++b) comp.push_back(op_C(p, f, b));
    const int off_c3 = static_cast<int>(comp.size());
    for (int j = 0; j < n1; ++j)
        for (int b = 0; b < M; ++b) comp.push_back(kernel_B3(s, j, p.x(b)));
    const StagedPath lc = integrate_l(comp, p, h);

    std::vector<TestFunction> consts;
    for (int i = 0; i < nf; ++i)
        for (int b = 0; b < M; ++b) consts.push_back(comp[static_cast<std::size_t>(i) * M + b]);
    for (const auto& f : fs)
        for (int j = 0; j < n1; ++j)
            for (int b = 0; b < M; ++b) consts.push_back(grad_w1_dot(f, j, p.x(b)));
    const auto e = expect_many(consts, p.law, p.opt);
    Eigen::MatrixXd kappa(nf, M);
    std::vector<Eigen::MatrixXd> sgrad(nf, Eigen::MatrixXd(n1, M));
    std::size_t q = 0;
    for (int i = 0; i < nf; ++i)
        for (int b = 0; b < M; ++b) kappa(i, b) = e[q++].value;
    for (int i = 0; i < nf; ++i)
        for (int j = 0; j < n1; ++j)
            for (int b = 0; b < M; ++b) sgrad[i](j, b) = e[q++].value;

    const double inv = 1.0 / M;
    return rk4_staged(h.grid(), Eigen::VectorXd::Zero(nf), [&](int n, int st, const Eigen::VectorXd&, Eigen::VectorXd& dL) {
        const Eigen::VectorXd u = residual(p, h, n, st);
        const auto Ks = K.stage(n, st);
        const auto l = lc.stage(n, st);
        for (int i = 0; i < nf; ++i) {
            double acc = 0.0;
            for (int b = 0; b < M; ++b) {
                double cross = 0.0;
                for (int j = 0; j < n1; ++j) cross += l(off_c3 + j * M + b) * sgrad[i](j, b);
                acc += u(b) * (l(i * M + b) + eps * cross) - Ks(b) * kappa(i, b);
            }
            dL(i) = inv * acc;
        }
    });
}

StagedPath integrate_Psi(const RegimeInfo& r, const Eigen::MatrixXd& A, const Eigen::VectorXd& Psi0,
                         const TimeGrid& grid) {
    if (r.nu < 2 || (r.nu == 2 && r.boundary)) throw DomainError("homogeneous Psi equation needs gamma2 > 3/4");
    if (A.rows() != Psi0.size() || A.cols() != Psi0.size()) throw DomainError("integrate_Psi: dimension mismatch");
    const double inv = 1.0 / static_cast<double>(Psi0.size());
    return rk4_staged(grid, Psi0, [&](int, int, const Eigen::VectorXd& P, Eigen::VectorXd& dP) { dP = -inv * (A * P); });
}

StagedPath integrate_Psi(const RegimeInfo& r, const LimitProblem& p, const KernelFamily& fam, const StagedPath& h,
                         const StagedPath& K, const StagedPath& lfam, const StagedPath& Lfam,
                         const Eigen::VectorXd& Psi0, PsiForm form) {
    if (r.nu < 3) throw DomainError("forced Psi equation applies only for gamma2 >= 5/6");
    check_grid(h, K);
    check_grid(h, lfam);
    check_grid(h, Lfam);
    if (lfam.dim() != fam.size() || Lfam.dim() != fam.size())
        throw DomainError("integrate_Psi: paths do not cover the kernel family");
    if (Psi0.size() != p.M()) throw DomainError("integrate_Psi: dimension mismatch");
    const int M = p.M(), n1 = p.N1();
    const double inv = 1.0 / M;
    std::vector<Eigen::VectorXd> lk{family_means(p, fam), Eigen::VectorXd(), Eigen::VectorXd()};
    const Eigen::MatrixXd A = kernel_of_order(p, fam, lk, 0);
    return rk4_staged(h.grid(), Psi0, [&](int n, int s, const Eigen::VectorXd& P, Eigen::VectorXd& dP) {
        lk[1] = lfam.stage(n, s);
        lk[2] = Lfam.stage(n, s);
        const Eigen::MatrixXd K1 = kernel_of_order(p, fam, lk, 1);
        Eigen::MatrixXd K2 = kernel_of_order(p, fam, lk, 2);
        if (form == PsiForm::AsPrinted) {
            for (int a = 0; a < M; ++a)
                for (int b = 0; b < M; ++b) {
                    double c = 0.0;
                    for (int j = 0; j < n1; ++j) c += lk[1](fam.b3(j, a)) * lk[1](fam.b3(j, b));
                    K2(a, b) -= p.X.row(a).dot(p.X.row(b)) * c / n1;
                }
        }
        dP = inv * (K2 * residual(p, h, n, s) - K1 * K.stage(n, s) - A * P);
    });
}

Eigen::VectorXd gaussian_draw(const Eigen::MatrixXd& cov, std::uint64_t seed) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success) throw NumericError("covariance eigendecomposition failed");
    Rng rng = make_rng(seed, 0x6A);
    Eigen::VectorXd z(cov.rows());
    for (int i = 0; i < z.size(); ++i) z(i) = standard_normal(rng);
    const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * root.cwiseProduct(z);
}

}  // namespace snn
