#include "snn/expansion.hpp"

#include <cmath>

#include "snn/csv.hpp"
#include "snn/errors.hpp"

namespace snn {

WordBasis::WordBasis(const LimitProblem& p, int max_len)
    : M_(p.M()), lambda_(p.M() * (1 + p.N1())), max_len_(max_len), space_(p.space.get()) {
    if (max_len < 0) throw DomainError("word length must be non-negative");
    offset_.push_back(0);
    long long size = 1, total = 0;
    for (int len = 0; len <= max_len; ++len) {
        total += size;
        if (total > 50'000'000) throw DomainError("word basis too large");
        offset_.push_back(static_cast<int>(total));
        size *= lambda_;
    }
    const ParticleSpace& s = *space_;
    const double eps = s.eps();
    fields_.resize(lambda_);
    for (int b = 0; b < M_; ++b) {
        const Eigen::VectorXd xb = p.x(b);
        VectorField& t = fields_[letter_T(b)];
        t.terms.emplace_back(s.idx_c(), s.act(0, s.Z(xb)));
        const TestFunction lead = s.c() * s.act(1, s.Z(xb));
        for (int j = 0; j < s.N1(); ++j) t.terms.emplace_back(s.idx_w2(j), (lead * s.act(0, s.inner(j, xb))) * eps);
        for (int j = 0; j < s.N1(); ++j) {
            VectorField& f = fields_[letter_S(j, b)];
            for (int k = 0; k < s.d(); ++k) f.terms.emplace_back(s.idx_w1(j, k), s.constant(xb(k)));
        }
    }
}

int WordBasis::length(int w) const {
    for (int len = 0; len <= max_len_; ++len)
        if (w < offset_[len + 1]) return len;
    throw DomainError("word index out of range");
}

int WordBasis::prepend(int letter, int w) const {
    const int len = length(w);
    return offset_[len + 1] + letter + lambda_ * (w - offset_[len]);
}

std::vector<TestFunction> WordBasis::apply_all(const TestFunction& f, int max_len) const {
    if (max_len > max_len_) throw DomainError("word length beyond the basis");
    std::vector<TestFunction> out{f};
    for (int len = 1; len <= max_len; ++len) {
        const int prev0 = offset_[len - 1], prev1 = offset_[len];
        const int n_prev = prev1 - prev0;
        out.resize(offset_[len + 1]);
        // Appending the outer letter L to w gives local index loc(w) + n_prev * L.
        for (int L = 0; L < lambda_; ++L)
            for (int i = 0; i < n_prev; ++i) out[prev1 + i + n_prev * L] = space_->apply(out[prev0 + i], fields_[L]);
    }
    return out;
}

Eigen::VectorXd ExpansionState::l_path(const TestFunction& f, int order, const LimitProblem& p) const {
    if (order < 0 || order > lmax) throw DomainError("l path order not available in this expansion");
    const int n_nodes = grid.steps + 1;
    if (order == 0) return Eigen::VectorXd::Constant(n_nodes, expect(f, p.law, p.opt).value);
    WordBasis basis(p, lmax);
    const auto wf = basis.apply_all(f, order);
    const auto e = expect_many(wf, p.law, p.opt);
    Eigen::VectorXd ev(basis.count());
    ev.setZero();
    for (std::size_t w = 0; w < e.size(); ++w) ev(static_cast<int>(w)) = e[w].value;
    return coeffs[order - 1].transpose() * ev;
}

void ExpansionState::write_csv(const std::string& path) const {
    CsvWriter w(path, {"t", "order", "component_index", "value"});
    for (int n = 0; n <= grid.steps; ++n)
        for (std::size_t k = 0; k < Q.size(); ++k)
            for (int a = 0; a < M; ++a) w.row({grid.t(n), double(k), double(a), Q[k](a, n)});
}

ExpansionState expansion_recursion(const RegimeInfo& r, const LimitProblem& p, const StagedPath& h,
                                   const Eigen::VectorXd& G) {
    if (r.nu > kMaxExpansionOrder)
        throw DomainError("expansion order " + std::to_string(r.nu) + " exceeds the derivative cap of " +
                          std::to_string(kMaxExpansionOrder));
    const int M = p.M(), n1 = p.N1(), nu = r.nu;
    if (h.dim() != M || G.size() != M) throw DomainError("expansion_recursion: dimension mismatch");
    const int lmax = nu - 1;
    // Orders 1..nu-1 are forced; the top order decays from G inside a window and vanishes on its edge.
    const bool top_decays = !r.boundary;
    const int n_forced = nu - 1;

    const KernelFamily fam(p);
    const WordBasis basis(p, lmax);
    const int W = basis.count(), F = fam.size(), lam = basis.letters();

    Eigen::MatrixXd E(W, F);
    {
        std::vector<TestFunction> all;
        all.reserve(static_cast<std::size_t>(W) * F);
        for (const auto& g : fam.functions()) {
            auto wf = basis.apply_all(g, lmax);
            all.insert(all.end(), wf.begin(), wf.end());
        }
        const auto e = expect_many(all, p.law, p.opt);
        for (int g = 0; g < F; ++g)
            for (int w = 0; w < W; ++w) E(w, g) = e[static_cast<std::size_t>(g) * W + w].value;
    }

    // State: a_1..a_lmax (W each), then Q_1..Q_{n_forced}, then the decaying top order.
    const int off_q = lmax * W;
    const int dim = off_q + M * n_forced + (top_decays ? M : 0);
    Eigen::VectorXd y0 = Eigen::VectorXd::Zero(dim);
    if (top_decays)
        y0.segment(off_q + M * n_forced, M) = G;
    else if (n_forced >= 1)
        y0.segment(off_q + M * (n_forced - 1), M) = G;

    const double inv = 1.0 / M, eps = p.space->eps();
    Eigen::VectorXd a0 = Eigen::VectorXd::Zero(W);
    a0(0) = 1.0;
    // parent[w] and the letter prepended to it, for every word of length >= 1.
    std::vector<int> parent(W, -1), letter(W, -1), wlen(W, 0);
    for (int w = 0; w < basis.offset(lmax); ++w)
        for (int L = 0; L < lam; ++L) {
            const int c = basis.prepend(L, w);
            parent[c] = w;
            letter[c] = L;
        }
    for (int w = 0; w < W; ++w) wlen[w] = basis.length(w);

    std::vector<Eigen::VectorXd> lk(lmax + 1), u(nu + 1);
    std::vector<Eigen::MatrixXd> kern(lmax + 1);
    auto rhs = [&](int n, int s, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        dy.setZero(dim);
        auto a = [&](int q) -> Eigen::Ref<const Eigen::VectorXd> {
            return q == 0 ? Eigen::Ref<const Eigen::VectorXd>(a0) : Eigen::Ref<const Eigen::VectorXd>(y.segment((q - 1) * W, W));
        };
        u[0] = p.Y - h.stage(n, s);
        for (int k = 1; k <= nu; ++k) {
            if (k <= n_forced)
                u[k] = -y.segment(off_q + M * (k - 1), M);
            else if (top_decays)
                u[k] = -y.segment(off_q + M * n_forced, M);
            else
                u[k] = Eigen::VectorXd::Zero(M);
        }
        for (int k = 0; k <= lmax; ++k) lk[k] = E.transpose() * a(k);

        for (int ord = 1; ord <= lmax; ++ord) {
            auto da = dy.segment((ord - 1) * W, W);
            for (int c = basis.offset(1); c < basis.offset(ord + 1); ++c) {
                const int w = parent[c], L = letter[c];
                double acc = 0.0;
                if (L < M) {
                    const int b = L;
                    for (int pp = 0; pp <= ord - 1 - wlen[w]; ++pp) acc += u[pp](b) * a(ord - 1 - pp)(w);
                    acc *= inv;
                } else {
                    const int j = (L - M) / M, b = (L - M) % M;
                    const int c3 = fam.b3(j, b);
                    for (int pp = 0; pp <= ord - 1 - wlen[w]; ++pp) {
                        const int q = ord - 1 - pp;
                        double inner = 0.0;
                        for (int k = 0; k <= q - wlen[w]; ++k) inner += lk[k](c3) * a(q - k)(w);
                        acc += u[pp](b) * inner;
                    }
                    acc *= inv * eps;
                }
                da(c) = acc;
            }
        }
        for (int q = 0; q <= lmax; ++q) kern[q] = kernel_of_order(p, fam, lk, q);
        for (int ord = 1; ord <= n_forced; ++ord) {
            Eigen::VectorXd acc = Eigen::VectorXd::Zero(M);
            for (int pp = 0; pp <= ord; ++pp) acc += kern[ord - pp] * u[pp];
            dy.segment(off_q + M * (ord - 1), M) = inv * acc;
        }
        if (top_decays) dy.segment(off_q + M * n_forced, M) = inv * (kern[0] * u[nu]);
    };
    const StagedPath path = rk4_staged(h.grid(), y0, rhs);
    (void)n1;

    ExpansionState st;
    st.regime = r;
    st.grid = h.grid();
    st.lmax = lmax;
    st.M = M;
    st.Q.push_back(h.nodes());
    for (int ord = 1; ord <= nu; ++ord) {
        if (ord <= n_forced)
            st.Q.push_back(path.nodes().middleRows(off_q + M * (ord - 1), M));
        else if (top_decays)
            st.Q.push_back(path.nodes().middleRows(off_q + M * n_forced, M));
        else
            st.Q.push_back(Eigen::MatrixXd::Zero(M, h.grid().steps + 1));
    }
    for (int ord = 1; ord <= lmax; ++ord) st.coeffs.push_back(path.nodes().middleRows((ord - 1) * W, W));
    return st;
}

Eigen::MatrixXd reconstruct(const ExpansionState& e, double n2, double gamma2) {
    const RegimeInfo r = classify_regime(gamma2);
    if (r.nu != e.regime.nu || r.boundary != e.regime.boundary)
        throw DomainError("gamma2 is not in the regime of this expansion");
    if (!(n2 >= 1.0)) throw DomainError("N2 must be at least 1");
    const int nu = r.nu;
    Eigen::MatrixXd out = e.Q[0];
    for (int n = 1; n < nu; ++n) out += std::pow(n2, -n * (1.0 - gamma2)) * e.Q[n];
    out += std::pow(n2, -(gamma2 - 0.5)) * e.Q[nu];
    return out;
}

}  // namespace snn
