#include "snn/testfn.hpp"

#include <algorithm>
#include <cmath>

#include "snn/errors.hpp"

namespace snn {

Jet::Jet(int p, int ord) : P(p), order(ord) {
    if (ord >= 1) g.assign(p, 0.0);
    if (ord >= 2) h.assign(static_cast<std::size_t>(p) * p, 0.0);
    if (ord >= 3) t.assign(static_cast<std::size_t>(p) * p * p, 0.0);
}

void Jet::add_scaled(const Jet& o, double a) {
    v += a * o.v;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += a * o.g[i];
    for (std::size_t i = 0; i < h.size(); ++i) h[i] += a * o.h[i];
    for (std::size_t i = 0; i < t.size(); ++i) t[i] += a * o.t[i];
}

void Jet::scale(double a) {
    v *= a;
    for (double& e : g) e *= a;
    for (double& e : h) e *= a;
    for (double& e : t) e *= a;
}

Jet Jet::partial(int k) const {
    if (order < 1) throw OrderExhausted("cannot differentiate a value-only jet");
    Jet out(P, order - 1);
    out.v = g[k];
    if (out.order >= 1)
        for (int a = 0; a < P; ++a) out.g[a] = h[static_cast<std::size_t>(k) * P + a];
    if (out.order >= 2)
        for (int a = 0; a < P; ++a)
            for (int b = 0; b < P; ++b)
                out.h[static_cast<std::size_t>(a) * P + b] = t[(static_cast<std::size_t>(k) * P + a) * P + b];
    return out;
}

void jet_fma(Jet& out, const Jet& a, const Jet& b) {
    const int P = out.P, r = out.order;
    out.v += a.v * b.v;
    if (r >= 1)
        for (int i = 0; i < P; ++i) out.g[i] += a.v * b.g[i] + b.v * a.g[i];
    if (r >= 2) {
        for (int i = 0; i < P; ++i) {
            double* row = &out.h[static_cast<std::size_t>(i) * P];
            const double* ah = &a.h[static_cast<std::size_t>(i) * P];
            const double* bh = &b.h[static_cast<std::size_t>(i) * P];
            for (int j = 0; j < P; ++j) row[j] += a.v * bh[j] + b.v * ah[j];
            const double ag = a.g[i], bg = b.g[i];
            if (ag != 0.0)
                for (int j = 0; j < P; ++j) row[j] += ag * b.g[j];
            if (bg != 0.0)
                for (int j = 0; j < P; ++j) row[j] += bg * a.g[j];
        }
    }
    if (r >= 3) {
        const std::size_t PP = static_cast<std::size_t>(P) * P;
        for (std::size_t i = 0; i < out.t.size(); ++i) out.t[i] += a.v * b.t[i] + b.v * a.t[i];
        // Sum over the three placements of the gradient index.
        auto cross = [&](const Jet& gj, const Jet& hj) {
            for (int i = 0; i < P; ++i) {
                const double gi = gj.g[i];
                if (gi == 0.0) continue;
                for (int j = 0; j < P; ++j)
                    for (int k = 0; k < P; ++k) {
                        const double hv = gi * hj.h[static_cast<std::size_t>(j) * P + k];
                        out.t[i * PP + static_cast<std::size_t>(j) * P + k] += hv;
                        out.t[j * PP + static_cast<std::size_t>(i) * P + k] += hv;
                        out.t[j * PP + static_cast<std::size_t>(k) * P + i] += hv;
                    }
            }
        };
        cross(a, b);
        cross(b, a);
    }
}

Jet jet_product(const Jet& a, const Jet& b) {
    Jet out(a.P, std::min(a.order, b.order));
    jet_fma(out, a, b);
    return out;
}

Jet jet_compose(const Activation& act, int k, const Jet& u) {
    const int r = u.order, P = u.P;
    if (k + r > Activation::kMaxOrder)
        throw OrderExhausted("activation derivative of order " + std::to_string(k + r) +
                             " required but only " + std::to_string(Activation::kMaxOrder) +
                             " are provided");
    double s_all[Activation::kMaxOrder + 1];
    act.eval_all(u.v, k + r, s_all);
    const double* s = s_all + k;
    Jet out(P, r);
    out.v = s[0];
    if (r >= 1)
        for (int i = 0; i < P; ++i) out.g[i] = s[1] * u.g[i];
    if (r >= 2) {
        for (int i = 0; i < P; ++i)
            for (int j = 0; j < P; ++j) {
                const std::size_t ij = static_cast<std::size_t>(i) * P + j;
                out.h[ij] = s[1] * u.h[ij] + s[2] * u.g[i] * u.g[j];
            }
    }
    if (r >= 3) {
        const std::size_t PP = static_cast<std::size_t>(P) * P;
        for (int i = 0; i < P; ++i)
            for (int j = 0; j < P; ++j)
                for (int k2 = 0; k2 < P; ++k2) {
                    const std::size_t ijk = i * PP + static_cast<std::size_t>(j) * P + k2;
                    out.t[ijk] = s[1] * u.t[ijk] +
                                 s[2] * (u.g[i] * u.h[static_cast<std::size_t>(j) * P + k2] +
                                         u.g[j] * u.h[static_cast<std::size_t>(i) * P + k2] +
                                         u.g[k2] * u.h[static_cast<std::size_t>(i) * P + j]) +
                                 s[3] * u.g[i] * u.g[j] * u.g[k2];
                }
    }
    return out;
}

namespace {

std::vector<int> merge_deps(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool depends_on(const Node& n, int var) {
    return std::binary_search(n.deps.begin(), n.deps.end(), var);
}

bool is_const(const NodePtr& n, double* v = nullptr) {
    if (n->kind != Node::Kind::Const) return false;
    if (v) *v = n->value;
    return true;
}

NodePtr make_const(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Const;
    n->value = v;
    return n;
}

}  // namespace

bool TestFunction::is_zero() const {
    double v = 1.0;
    return is_const(node_, &v) && v == 0.0;
}

double TestFunction::value(const Eigen::VectorXd& theta) const {
    Evaluator ev(*space_, theta);
    return ev.eval(node_, 0).v;
}

Jet TestFunction::jet(const Eigen::VectorXd& theta, int order) const {
    Evaluator ev(*space_, theta);
    return ev.eval(node_, order);
}

Eigen::VectorXd TestFunction::gradient(const Eigen::VectorXd& theta) const {
    const Jet j = jet(theta, 1);
    return Eigen::Map<const Eigen::VectorXd>(j.g.data(), j.P);
}

Eigen::MatrixXd TestFunction::hessian(const Eigen::VectorXd& theta) const {
    const Jet j = jet(theta, 2);
    return Eigen::Map<const Eigen::MatrixXd>(j.h.data(), j.P, j.P);
}

double TestFunction::d_c(const Eigen::VectorXd& theta) const { return gradient(theta)(space_->idx_c()); }

double TestFunction::d_w2(const Eigen::VectorXd& theta, int j) const {
    return gradient(theta)(space_->idx_w2(j));
}

Eigen::VectorXd TestFunction::grad_w1(const Eigen::VectorXd& theta, int j) const {
    return gradient(theta).segment(space_->idx_w1(j, 0), space_->d());
}

TestFunction TestFunction::operator+(const TestFunction& o) const { return space_->sum({*this, o}); }

TestFunction TestFunction::operator-(const TestFunction& o) const {
    return space_->sum({*this, o}, {1.0, -1.0});
}

TestFunction TestFunction::operator*(const TestFunction& o) const { return space_->product({*this, o}); }

TestFunction TestFunction::operator*(double a) const { return space_->sum({*this}, {a}); }

ParticleSpace::ParticleSpace(int n1, int d, double gamma1, Activation act, int max_order)
    : n1_(n1), d_(d), gamma1_(gamma1), act_(act), max_order_(max_order) {}

std::shared_ptr<const ParticleSpace> ParticleSpace::create(int n1, int d, double gamma1, Activation act,
                                                           int max_order) {
    if (n1 < 1 || d < 1) throw DomainError("particle space needs N1 >= 1 and d >= 1");
    if (!(gamma1 >= 0.5 && gamma1 <= 1.0)) throw DomainError("gamma1 out of range [1/2,1]");
    if (max_order < 0 || max_order > Jet::kMaxOrderDefault)
        throw DomainError("test-function derivative order cap must be in [0,3]");
    return std::shared_ptr<const ParticleSpace>(new ParticleSpace(n1, d, gamma1, act, max_order));
}

double ParticleSpace::eps() const { return std::pow(static_cast<double>(n1_), -(1.0 - gamma1_)); }

Eigen::VectorXd ParticleSpace::particle(double c, const Eigen::VectorXd& w2,
                                        const Eigen::MatrixXd& w1) const {
    if (w2.size() != n1_ || w1.rows() != n1_ || w1.cols() != d_)
        throw DomainError("particle components do not match the space geometry");
    Eigen::VectorXd th(P());
    th(0) = c;
    th.segment(1, n1_) = w2;
    for (int j = 0; j < n1_; ++j)
        for (int k = 0; k < d_; ++k) th(idx_w1(j, k)) = w1(j, k);
    return th;
}

TestFunction ParticleSpace::constant(double v) const { return TestFunction(shared_from_this(), make_const(v)); }

TestFunction ParticleSpace::var(int index) const {
    if (index < 0 || index >= P()) throw DomainError("particle variable index out of range");
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Var;
    n->var = index;
    n->deps = {index};
    return TestFunction(shared_from_this(), n);
}

TestFunction ParticleSpace::inner(int j, const Eigen::VectorXd& x) const {
    if (j < 0 || j >= n1_) throw DomainError("first-layer unit index out of range");
    if (x.size() != d_) throw DomainError("input dimension does not match the particle space");
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Inner;
    n->j = j;
    n->x.assign(x.data(), x.data() + x.size());
    for (int k = 0; k < d_; ++k)
        if (x(k) != 0.0) n->deps.push_back(idx_w1(j, k));
    if (n->deps.empty()) return constant(0.0);
    return TestFunction(shared_from_this(), n);
}

TestFunction ParticleSpace::act(int k, const TestFunction& g) const {
    if (k < 0 || k > Activation::kMaxOrder) throw OrderExhausted("activation derivative order not provided");
    double v = 0.0;
    if (is_const(g.node(), &v)) return constant(act_.deriv(k, v));
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Act;
    n->k = k;
    n->kids = {g.node()};
    n->deps = g.node()->deps;
    return TestFunction(shared_from_this(), n);
}

TestFunction ParticleSpace::Z(const Eigen::VectorXd& x) const {
    std::vector<double> key(x.data(), x.data() + x.size());
    {
        std::lock_guard<std::mutex> lock(memo_mu_);
        auto it = z_memo_.find(key);
        if (it != z_memo_.end()) return TestFunction(shared_from_this(), it->second);
    }
    std::vector<TestFunction> terms;
    for (int j = 0; j < n1_; ++j) terms.push_back(w2(j) * act(0, inner(j, x)));
    const double pre = std::pow(static_cast<double>(n1_), -gamma1_);
    TestFunction z = sum(terms, std::vector<double>(terms.size(), pre));
    std::lock_guard<std::mutex> lock(memo_mu_);
    z_memo_.emplace(std::move(key), z.node());
    return z;
}

TestFunction ParticleSpace::sum(const std::vector<TestFunction>& fs, const std::vector<double>& w) const {
    if (!w.empty() && w.size() != fs.size()) throw DomainError("sum weights do not match terms");
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Sum;
    double cst = 0.0;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const double wi = w.empty() ? 1.0 : w[i];
        double v = 0.0;
        if (wi == 0.0) continue;
        if (is_const(fs[i].node(), &v)) {
            cst += wi * v;
            continue;
        }
        n->kids.push_back(fs[i].node());
        n->coefs.push_back(wi);
        n->deps = merge_deps(n->deps, fs[i].node()->deps);
    }
    if (n->kids.empty()) return constant(cst);
    if (cst != 0.0) {
        n->kids.push_back(make_const(cst));
        n->coefs.push_back(1.0);
    }
    if (n->kids.size() == 1 && n->coefs[0] == 1.0) return TestFunction(shared_from_this(), n->kids[0]);
    return TestFunction(shared_from_this(), n);
}

TestFunction ParticleSpace::product(const std::vector<TestFunction>& fs) const {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Product;
    double cst = 1.0;
    for (const auto& f : fs) {
        double v = 0.0;
        if (is_const(f.node(), &v)) {
            cst *= v;
            continue;
        }
        n->kids.push_back(f.node());
        n->deps = merge_deps(n->deps, f.node()->deps);
    }
    if (cst == 0.0 || n->kids.empty()) return constant(n->kids.empty() ? cst : 0.0);
    TestFunction prod = n->kids.size() == 1 ? TestFunction(shared_from_this(), n->kids[0])
                                            : TestFunction(shared_from_this(), n);
    return cst == 1.0 ? prod : sum({prod}, {cst});
}

TestFunction ParticleSpace::apply(const TestFunction& f, const VectorField& field) const {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Apply;
    n->kids = {f.node()};
    n->deps = f.node()->deps;
    for (const auto& [var, coef] : field.terms) {
        if (var < 0 || var >= P()) throw DomainError("vector field variable index out of range");
        if (coef.is_zero() || !depends_on(*f.node(), var)) continue;
        n->field.emplace_back(var, coef.node());
        n->deps = merge_deps(n->deps, coef.node()->deps);
    }
    if (n->field.empty()) return constant(0.0);
    return TestFunction(shared_from_this(), n);
}

Evaluator::Evaluator(const ParticleSpace& space, const Eigen::VectorXd& theta)
    : space_(space), theta_(theta) {
    if (theta.size() != space.P())
        throw DomainError("particle has " + std::to_string(theta.size()) + " coordinates, expected " +
                          std::to_string(space.P()));
}

const Jet& Evaluator::eval(const NodePtr& n, int order) {
    if (order > space_.max_order())
        throw OrderExhausted("test-function derivative of order " + std::to_string(order) +
                             " exceeds the supported maximum " + std::to_string(space_.max_order()));
    Key key{n.get(), order};
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    Jet j = compute(*n, order);
    return cache_.emplace(key, std::move(j)).first->second;
}

Jet Evaluator::compute(const Node& n, int order) {
    const int P = space_.P();
    Jet out(P, order);
    switch (n.kind) {
        case Node::Kind::Const: out.v = n.value; break;
        case Node::Kind::Var:
            out.v = theta_(n.var);
            if (order >= 1) out.g[n.var] = 1.0;
            break;
        case Node::Kind::Inner: {
            for (int k = 0; k < space_.d(); ++k) {
                const int idx = space_.idx_w1(n.j, k);
                out.v += n.x[k] * theta_(idx);
                if (order >= 1) out.g[idx] = n.x[k];
            }
            break;
        }
        case Node::Kind::Act: return jet_compose(space_.act(), n.k, eval(n.kids[0], order));
        case Node::Kind::Sum:
            for (std::size_t i = 0; i < n.kids.size(); ++i) out.add_scaled(eval(n.kids[i], order), n.coefs[i]);
            break;
        case Node::Kind::Product: {
            Jet acc = eval(n.kids[0], order);
            for (std::size_t i = 1; i < n.kids.size(); ++i) acc = jet_product(acc, eval(n.kids[i], order));
            return acc;
        }
        case Node::Kind::Apply: {
            const Jet& f = eval(n.kids[0], order + 1);
            for (const auto& [var, coef] : n.field) jet_fma(out, eval(coef, order), f.partial(var));
            break;
        }
    }
    return out;
}

}  // namespace snn
