#include "snn/ensemble.hpp"


#include "snn/csv.hpp"
#include "snn/errors.hpp"
#include "snn/parallel.hpp"
#include "snn/rng.hpp"
#include "snn/stats.hpp"

namespace snn {

std::vector<double> EnsembleStats::samples(int r, int a) const {
    std::vector<double> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.push_back(p[r](a));
    return out;
}

void EnsembleStats::write_csv(const std::string& path, int a, double n2, double gamma2) const {
    CsvWriter w(path, {"n2", "gamma2", "t", "mean", "var", "se"});
    for (std::size_t r = 0; r < t.size(); ++r) {
        const auto s = samples(static_cast<int>(r), a);
        w.row({n2, gamma2, t[r], mean[r](a), var[r](a), s.size() >= 3 ? variance_se(s) : 0.0});
    }
}

std::vector<std::uint64_t> seed_range(std::uint64_t master, int count) {
    std::vector<std::uint64_t> out;
    for (int i = 0; i < count; ++i) out.push_back(split_seed(master, 0x5EED0000ULL + static_cast<std::uint64_t>(i)));
    return out;
}

EnsembleStats mc_ensemble(const EnsembleSpec& spec, const Dataset& data) {
    if (spec.seeds.size() < 2) throw DomainError("an ensemble needs at least two seeds");
    const std::size_t S = spec.seeds.size();
    std::vector<Trajectory> runs(S);
    std::vector<std::string> errors(S);
    parallel_for(S, [&](std::size_t s) {
        try {
            TrainConfig cfg = spec.base;
            cfg.seed = spec.seeds[s];
            const Theta th0 = init_params(cfg.scaling, spec.law, spec.seeds[s]);
            runs[s] = train(cfg, data, th0);
        } catch (const std::exception& e) {
            errors[s] = e.what();
        }
    });
    for (std::size_t s = 0; s < S; ++s)
        if (!errors[s].empty())
            throw NumericError("ensemble member with seed " + std::to_string(spec.seeds[s]) + " failed: " + errors[s]);

    EnsembleStats st;
    st.t = runs[0].t;
    const std::size_t R = st.t.size();
    const int M = data.size();
    st.paths.resize(S);
    for (std::size_t s = 0; s < S; ++s) st.paths[s] = std::move(runs[s].h);
    for (std::size_t r = 0; r < R; ++r) {
        // Shifted by the first member so that identical members give exactly zero variance.
        const Eigen::VectorXd x0 = st.paths[0][r];
        Eigen::VectorXd m = Eigen::VectorXd::Zero(M), v = Eigen::VectorXd::Zero(M);
        for (std::size_t s = 0; s < S; ++s) m += st.paths[s][r] - x0;
        m /= static_cast<double>(S);
        for (std::size_t s = 0; s < S; ++s) v += (st.paths[s][r] - x0 - m).cwiseAbs2();
        v /= static_cast<double>(S - 1);
        st.mean.push_back(x0 + m);
        st.var.push_back(v);
    }
    return st;
}

Eigen::MatrixXd init_outputs(const ScalingConfig& cfg, const InitLaw& law, const std::vector<std::uint64_t>& seeds,
                             const Eigen::MatrixXd& X) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(seeds.size()), X.rows());
    parallel_for(seeds.size(), [&](std::size_t s) {
        const Theta th = init_params(cfg, law, seeds[s]);
        out.row(static_cast<Eigen::Index>(s)) = outputs_on(cfg, th, X).transpose();
    });
    return out;
}

}  // namespace snn
