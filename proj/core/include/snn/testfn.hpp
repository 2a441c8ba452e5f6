#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "snn/activation.hpp"

namespace snn {

// Taylor jet of a scalar function of the particle up to a fixed order (at most 3).
// Derivative tensors are stored dense and fully symmetric.
struct Jet {
    static constexpr int kMaxOrderDefault = 3;

    int P = 0;
    int order = 0;
    double v = 0.0;
    std::vector<double> g;  // P
    std::vector<double> h;  // P*P
    std::vector<double> t;  // P*P*P

    Jet() = default;
    Jet(int p, int ord);

    void add_scaled(const Jet& o, double a);
    void scale(double a);
    // Jet of the partial derivative along variable k, one order lower.
    Jet partial(int k) const;
};

Jet jet_product(const Jet& a, const Jet& b);
// out += a * b, truncated to out.order.
void jet_fma(Jet& out, const Jet& a, const Jet& b);
// Jet of sigma^(k) composed with u.
Jet jet_compose(const Activation& act, int k, const Jet& u);

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind { Const, Var, Inner, Act, Sum, Product, Apply };
    Kind kind = Kind::Const;
    double value = 0.0;
    int var = -1;
    int j = -1;
    int k = 0;
    std::vector<double> x;                      // Inner input
    std::vector<NodePtr> kids;                  // Act: 1, Sum/Product: n, Apply: f
    std::vector<double> coefs;                  // Sum weights
    std::vector<std::pair<int, NodePtr>> field; // Apply: variable index -> coefficient
    std::vector<int> deps;                      // sorted variables the node depends on
};

class ParticleSpace;

// Smooth function of one particle theta = (c, w2_1..w2_N1, w1_1..w1_N1).
// Variable layout: 0 = c, 1..N1 = w2_j, N1 + 1 + j*d + k = w1_{j,k}.
class TestFunction {
public:
    TestFunction() = default;
    TestFunction(std::shared_ptr<const ParticleSpace> space, NodePtr node)
        : space_(std::move(space)), node_(std::move(node)) {}

    const ParticleSpace& space() const { return *space_; }
    const std::shared_ptr<const ParticleSpace>& space_ptr() const { return space_; }
    const NodePtr& node() const { return node_; }
    bool valid() const { return static_cast<bool>(node_); }
    bool is_zero() const;

    double value(const Eigen::VectorXd& theta) const;
    Jet jet(const Eigen::VectorXd& theta, int order) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const;
    Eigen::MatrixXd hessian(const Eigen::VectorXd& theta) const;
    double d_c(const Eigen::VectorXd& theta) const;
    double d_w2(const Eigen::VectorXd& theta, int j) const;
    Eigen::VectorXd grad_w1(const Eigen::VectorXd& theta, int j) const;

    TestFunction operator+(const TestFunction& o) const;
    TestFunction operator-(const TestFunction& o) const;
    TestFunction operator*(const TestFunction& o) const;
    TestFunction operator*(double a) const;
    friend TestFunction operator*(double a, const TestFunction& f) { return f * a; }

private:
    std::shared_ptr<const ParticleSpace> space_;
    NodePtr node_;
};

// First-order differential operator: sum over (variable, coefficient function) of coef * d/dvar.
struct VectorField {
    std::vector<std::pair<int, TestFunction>> terms;
};

// Factory for test functions over particles of a fixed two-layer geometry.
class ParticleSpace : public std::enable_shared_from_this<ParticleSpace> {
public:
    static std::shared_ptr<const ParticleSpace> create(int n1, int d, double gamma1,
                                                       Activation act = Activation(),
                                                       int max_order = Jet::kMaxOrderDefault);

    int N1() const { return n1_; }
    int d() const { return d_; }
    int P() const { return 1 + n1_ * (1 + d_); }
    double gamma1() const { return gamma1_; }
    const Activation& act() const { return act_; }
    int max_order() const { return max_order_; }
    // N1^{-(1-gamma1)}
    double eps() const;

    int idx_c() const { return 0; }
    int idx_w2(int j) const { return 1 + j; }
    int idx_w1(int j, int k) const { return 1 + n1_ + j * d_ + k; }

    Eigen::VectorXd particle(double c, const Eigen::VectorXd& w2, const Eigen::MatrixXd& w1) const;

    TestFunction constant(double v) const;
    TestFunction var(int index) const;
    TestFunction c() const { return var(idx_c()); }
    TestFunction w2(int j) const { return var(idx_w2(j)); }
    TestFunction w1(int j, int k) const { return var(idx_w1(j, k)); }
    // w1_j . x
    TestFunction inner(int j, const Eigen::VectorXd& x) const;
    // sigma^(k)(g)
    TestFunction act(int k, const TestFunction& g) const;
    // N1^{-gamma1} sum_j w2_j sigma(w1_j . x), memoized per input.
    TestFunction Z(const Eigen::VectorXd& x) const;
    TestFunction sum(const std::vector<TestFunction>& fs, const std::vector<double>& w = {}) const;
    TestFunction product(const std::vector<TestFunction>& fs) const;
    // Applies a first-order differential operator to f.
    TestFunction apply(const TestFunction& f, const VectorField& field) const;

private:
    ParticleSpace(int n1, int d, double gamma1, Activation act, int max_order);

    int n1_, d_;
    double gamma1_;
    Activation act_;
    int max_order_;
    mutable std::mutex memo_mu_;
    mutable std::map<std::vector<double>, NodePtr> z_memo_;
};

// Evaluates test functions at one particle, sharing sub-results across calls.
class Evaluator {
public:
    Evaluator(const ParticleSpace& space, const Eigen::VectorXd& theta);
    const Jet& eval(const NodePtr& n, int order);

private:
    struct Key {
        const Node* n;
        int order;
        bool operator==(const Key& o) const { return n == o.n && order == o.order; }
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            return std::hash<const void*>()(k.n) * 31u + static_cast<std::size_t>(k.order);
        }
    };
    Jet compute(const Node& n, int order);

    const ParticleSpace& space_;
    const Eigen::VectorXd& theta_;
    std::unordered_map<Key, Jet, KeyHash> cache_;
};

}  // namespace snn
