#pragma once

#include <string>

namespace snn {

enum class ActivationKind { Tanh, Logistic };

// Smooth bounded nonlinearity with derivatives up to order 3.
// Logistic is shifted by -1/2 so that it is odd around zero like tanh.
class Activation {
public:
    static constexpr int kMaxOrder = 3;

    Activation() = default;
    explicit Activation(ActivationKind kind) : kind_(kind) {}

    static Activation parse(const std::string& name);

    ActivationKind kind() const { return kind_; }
    std::string name() const;

    double operator()(double x) const;
    double deriv(int k, double x) const;
    // out[0..order] receives sigma, sigma', ..., sigma^(order).
    void eval_all(double x, int order, double* out) const;
    // Least upper bound of |sigma^(k)| on the real line.
    double sup(int k) const;

private:
    ActivationKind kind_ = ActivationKind::Tanh;
};

}  // namespace snn
