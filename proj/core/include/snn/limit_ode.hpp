#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "snn/kernels.hpp"
#include "snn/law.hpp"
#include "snn/ode.hpp"
#include "snn/testfn.hpp"

namespace snn {

struct RegimeInfo {
    double gamma2 = 0.0;
    int nu = 1;
    double exponent = 0.0;  // min(1 - gamma2, gamma2 - 1/2)
    bool boundary = false;  // gamma2 == (2 nu - 1) / (2 nu) with nu >= 2
};

RegimeInfo classify_regime(double gamma2);

// Everything the limit system needs about one dataset and one frozen first layer.
struct LimitProblem {
    std::shared_ptr<const ParticleSpace> space;
    InitLaw law;
    Eigen::MatrixXd X;  // M x d
    Eigen::VectorXd Y;  // M
    KernelTables tables;
    ExpectOptions opt;

    int M() const { return static_cast<int>(X.rows()); }
    int N1() const { return space->N1(); }
    Eigen::VectorXd x(int a) const { return X.row(a).transpose(); }

    // law must carry frozen first-layer atoms with N1 rows.
    static LimitProblem build(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const InitLaw& law,
                              double gamma1, const Activation& act = Activation(), const ExpectOptions& opt = {});
};

// The closed family {B1_ab (a <= b), B2_jab (a <= b), B3_ja} in a fixed order.
class KernelFamily {
public:
    explicit KernelFamily(const LimitProblem& p);

    int size() const { return static_cast<int>(fns_.size()); }
    const std::vector<TestFunction>& functions() const { return fns_; }
    int b1(int a, int b) const;
    int b2(int j, int a, int b) const;
    int b3(int j, int a) const { return off_b3_ + j * M_ + a; }

private:
    int M_, N1_, pairs_, off_b3_;
    std::vector<TestFunction> fns_;
};

// C^{N1,f}_{x_b} with the first-layer coefficient taken from the kernel tables.
TestFunction op_C(const LimitProblem& p, const TestFunction& f, int b);

// Kernel of order q assembled from per-family values l_k(g), k = 0..q.
// lk[k] holds the family vector at order k.
Eigen::MatrixXd kernel_of_order(const LimitProblem& p, const KernelFamily& fam,
                                const std::vector<Eigen::VectorXd>& lk, int q);

StagedPath integrate_h(const Eigen::MatrixXd& A, const Eigen::VectorXd& Y, const Eigen::VectorXd& h0,
                       const TimeGrid& grid);

// l_t(f) for each f, driven by the stages of h; one path component per function.
StagedPath integrate_l(const std::vector<TestFunction>& fs, const LimitProblem& p, const StagedPath& h);

// Homogeneous decay dK/dt = -(1/M) A K (gamma2 < 3/4).
StagedPath integrate_K(const RegimeInfo& r, const Eigen::MatrixXd& A, const Eigen::VectorXd& K0,
                       const TimeGrid& grid);
// Forced equation (gamma2 >= 3/4); lfam holds l_t of the kernel family.
StagedPath integrate_K(const RegimeInfo& r, const LimitProblem& p, const KernelFamily& fam, const StagedPath& h,
                       const StagedPath& lfam, const Eigen::VectorXd& K0);

// L_t(f) for each f; K must be the forced K path.
StagedPath integrate_L(const std::vector<TestFunction>& fs, const LimitProblem& p, const StagedPath& h,
                       const StagedPath& K);

// AsPrinted drops the l(B3_x) l(B3_x') product from the forcing, exactly as the published
// equation reads; Consistent keeps it, matching the general recursion.
enum class PsiForm { Consistent, AsPrinted };

// Homogeneous decay (gamma2 > 3/4).
StagedPath integrate_Psi(const RegimeInfo& r, const Eigen::MatrixXd& A, const Eigen::VectorXd& Psi0,
                         const TimeGrid& grid);
// Forced system (gamma2 >= 5/6).
StagedPath integrate_Psi(const RegimeInfo& r, const LimitProblem& p, const KernelFamily& fam, const StagedPath& h,
                         const StagedPath& K, const StagedPath& lfam, const StagedPath& Lfam,
                         const Eigen::VectorXd& Psi0, PsiForm form = PsiForm::Consistent);

// Joint mean-zero Gaussian draw with the given covariance.
Eigen::VectorXd gaussian_draw(const Eigen::MatrixXd& cov, std::uint64_t seed);

}  // namespace snn
