#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "snn/limit_ode.hpp"

namespace snn {

// Words over the letters T_b (b < M) and S_jb (M + j M + b), stored innermost letter first.
// l_n(f) = sum_w a_{n,w} <w f>, where a word acts on f by successive first-order operators.
class WordBasis {
public:
    WordBasis(const LimitProblem& p, int max_len);

    int letters() const { return lambda_; }
    int max_len() const { return max_len_; }
    int count() const { return offset_.back(); }
    // Global index range [offset(len), offset(len + 1)) holds words of that length.
    int offset(int len) const { return offset_[len]; }
    int length(int w) const;
    // Index of [letter] + w.
    int prepend(int letter, int w) const;
    int letter_T(int b) const { return b; }
    int letter_S(int j, int b) const { return M_ + j * M_ + b; }

    // All word functions of f up to max_len in global order (index 0 is f itself).
    std::vector<TestFunction> apply_all(const TestFunction& f, int max_len) const;

private:
    int M_, lambda_, max_len_;
    std::vector<int> offset_;
    std::vector<VectorField> fields_;
    const ParticleSpace* space_;
};

struct ExpansionState {
    RegimeInfo regime;
    TimeGrid grid;
    int lmax = 0;
    int M = 0;
    // Q[n] is M x (steps + 1), n = 0..nu.
    std::vector<Eigen::MatrixXd> Q;
    // Word coefficients a_n at the grid nodes: coeffs[n - 1] is words x (steps + 1).
    std::vector<Eigen::MatrixXd> coeffs;

    // l_{n,t}(f) at the grid nodes, n <= lmax.
    Eigen::VectorXd l_path(const TestFunction& f, int order, const LimitProblem& p) const;
    void write_csv(const std::string& path) const;
};

inline constexpr int kMaxExpansionOrder = 3;

// Joint solve of the word coefficients and Q_1..Q_nu, driven by the stages of h.
// G is the Gaussian initial value placed on the first order that carries it.
ExpansionState expansion_recursion(const RegimeInfo& r, const LimitProblem& p, const StagedPath& h,
                                   const Eigen::VectorXd& G);

// Predicted output path (M x (steps + 1)) at finite N2.
Eigen::MatrixXd reconstruct(const ExpansionState& e, double n2, double gamma2);

}  // namespace snn
