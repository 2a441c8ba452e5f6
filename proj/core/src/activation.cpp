#include "snn/activation.hpp"

#include <cmath>

#include "snn/errors.hpp"

namespace snn {

Activation Activation::parse(const std::string& name) {
    if (name == "tanh") return Activation(ActivationKind::Tanh);
    if (name == "logistic") return Activation(ActivationKind::Logistic);
    throw DomainError("unknown activation '" + name + "' (expected tanh or logistic)");
}

std::string Activation::name() const {
    return kind_ == ActivationKind::Tanh ? "tanh" : "logistic";
}

double Activation::operator()(double x) const {
    if (kind_ == ActivationKind::Tanh) return std::tanh(x);
    return 1.0 / (1.0 + std::exp(-x)) - 0.5;
}

void Activation::eval_all(double x, int order, double* out) const {
    if (order < 0 || order > kMaxOrder)
        throw OrderExhausted("activation derivative order " + std::to_string(order) +
                             " exceeds the supported maximum " + std::to_string(kMaxOrder));
    if (kind_ == ActivationKind::Tanh) {
        const double t = std::tanh(x);
        out[0] = t;
        if (order == 0) return;
        const double d1 = 1.0 - t * t;
        out[1] = d1;
        if (order == 1) return;
        out[2] = -2.0 * t * d1;
        if (order == 2) return;
        out[3] = d1 * (6.0 * t * t - 2.0);
        return;
    }
    const double s = 1.0 / (1.0 + std::exp(-x));
    out[0] = s - 0.5;
    if (order == 0) return;
    const double d1 = s * (1.0 - s);
    out[1] = d1;
    if (order == 1) return;
    out[2] = d1 * (1.0 - 2.0 * s);
    if (order == 2) return;
    out[3] = d1 * (1.0 - 6.0 * s + 6.0 * s * s);
}

double Activation::deriv(int k, double x) const {
    double buf[kMaxOrder + 1];
    eval_all(x, k, buf);
    return buf[k];
}

double Activation::sup(int k) const {
    if (k < 0 || k > kMaxOrder)
        throw OrderExhausted("activation derivative order " + std::to_string(k) + " not provided");
    static const double kTanh[] = {1.0, 1.0, 4.0 / (3.0 * std::sqrt(3.0)), 2.0};
    static const double kLogistic[] = {0.5, 0.25, 1.0 / (6.0 * std::sqrt(3.0)), 0.125};
    return kind_ == ActivationKind::Tanh ? kTanh[k] : kLogistic[k];
}

}  // namespace snn
