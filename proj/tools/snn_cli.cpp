#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "snn/classify.hpp"
#include "snn/config.hpp"
#include "snn/csv.hpp"
#include "snn/dataset.hpp"
#include "snn/ensemble.hpp"
#include "snn/errors.hpp"
#include "snn/expansion.hpp"
#include "snn/experiments.hpp"
#include "snn/kernels.hpp"
#include "snn/limit_ode.hpp"
#include "snn/parallel.hpp"
#include "snn/trainer.hpp"

namespace {

const std::vector<std::string> kKeys{
    "depth",     "n1",          "n2",          "n3",         "gamma1",      "gamma2",       "gamma3",
    "alpha",     "activation",  "law_c",       "law_w2",     "law_w1",      "w1_seed",      "dataset",
    "M",         "d",           "input_radius", "data_seed", "mnist_dir",   "train_subset", "test_subset",
    "T",         "dt",          "batch",       "stride",     "loss",        "seed",         "seeds",
    "n2_list",   "gamma1_list", "gamma2_list", "epochs",     "psi_form",    "expect",       "quad_nodes"};

struct Run {
    snn::Config cfg{kKeys};
    std::string out;
    std::uint64_t seed = 0;
    std::vector<std::string> overrides;
};

snn::DefaultProblem problem(const snn::Config& c) {
    snn::DefaultProblem p;
    p.M = c.get_int("M", p.M);
    p.d = c.get_int("d", p.d);
    p.N1 = c.get_int("n1", p.N1);
    p.gamma1 = c.get_double("gamma1", p.gamma1);
    p.input_radius = c.get_double("input_radius", p.input_radius);
    p.data_seed = c.get_u64("data_seed", p.data_seed);
    p.w1_seed = c.get_u64("w1_seed", p.w1_seed);
    p.law_c = c.get_string("law_c", p.law_c);
    p.law_w2 = c.get_string("law_w2", p.law_w2);
    p.law_w1 = c.get_string("law_w1", p.law_w1);
    p.activation = c.get_string("activation", p.activation);
    return p;
}

snn::ExpectOptions expect_options(const snn::Config& c) {
    snn::ExpectOptions o;
    const std::string m = c.get_string("expect", "auto");
    if (m == "auto") o.method = snn::ExpectMethod::Auto;
    else if (m == "enumerate") o.method = snn::ExpectMethod::Enumerate;
    else if (m == "quadrature") o.method = snn::ExpectMethod::Quadrature;
    else if (m == "montecarlo") o.method = snn::ExpectMethod::MonteCarlo;
    else throw snn::DomainError("unknown expectation method: " + m);
    o.quad_nodes = c.get_int("quad_nodes", o.quad_nodes);
    return o;
}

void check_gamma2(double g2) {
    if (!(g2 >= 0.5 && g2 <= 1.0)) throw snn::DomainError("gamma2 out of range (1/2,1]");
}

snn::ScalingConfig scaling(const snn::Config& c, int d, double g2) {
    check_gamma2(g2);
    const int depth = c.get_int("depth", 2);
    const int n1 = c.get_int("n1", 10), n2 = c.get_int("n2", 256);
    const double g1 = c.get_double("gamma1", 0.6);
    snn::ScalingConfig s;
    if (depth == 2) s = snn::ScalingConfig::two_layer(n1, n2, g1, g2, d);
    else if (depth == 3)
        s = snn::ScalingConfig::three_layer(n1, n2, c.get_int("n3", 16), g1, g2, c.get_double("gamma3", 1.0), d);
    else throw snn::DomainError("depth must be 2 or 3");
    s.act = snn::Activation::parse(c.get_string("activation", "tanh"));
    if (c.has("alpha")) s.alpha = c.get_list("alpha", {});
    s.validate();
    return s;
}

snn::TrainConfig train_config(const Run& r, const snn::ScalingConfig& s) {
    snn::TrainConfig t;
    t.scaling = s;
    t.rates = snn::rates_for(s);
    t.T = r.cfg.get_double("T", 1.0);
    t.batch = r.cfg.get_int("batch", 1);
    t.stride = r.cfg.get_int("stride", 1);
    t.seed = r.seed;
    const std::string loss = r.cfg.get_string("loss", "quadratic");
    if (loss == "quadratic") t.loss = snn::Loss::Quadratic;
    else if (loss == "cross_entropy") t.loss = snn::Loss::CrossEntropy;
    else throw snn::DomainError("unknown loss: " + loss);
    return t;
}

void write_path(const std::string& path, const snn::StagedPath& p, const snn::TimeGrid& g) {
    snn::CsvWriter w(path, {"t", "component_index", "value"});
    const Eigen::MatrixXd n = p.nodes();
    for (int k = 0; k <= g.steps; ++k)
        for (Eigen::Index a = 0; a < n.rows(); ++a) w.row({g.t(k), double(a), n(a, k)});
}

int cmd_train(const Run& r) {
    const snn::DefaultProblem dp = problem(r.cfg);
    const snn::Dataset ds = dp.dataset();
    const snn::ScalingConfig s = scaling(r.cfg, dp.d, r.cfg.get_double("gamma2", 0.75));
    const snn::TrainConfig t = train_config(r, s);
    const snn::Theta th0 = snn::init_params(s, s.depth == 2 ? dp.law() : snn::InitLaw::standard(), r.seed);
    snn::train(t, ds, th0).write_csv(r.out + "/trajectory.csv");
    return 0;
}

int cmd_limit(const Run& r) {
    const snn::DefaultProblem dp = problem(r.cfg);
    const snn::LimitProblem p = dp.limit(expect_options(r.cfg));
    const snn::TimeGrid grid = snn::TimeGrid::make(r.cfg.get_double("T", 1.0), r.cfg.get_double("dt", 1e-3));
    const snn::StagedPath h = snn::integrate_h(p.tables.A, p.Y, Eigen::VectorXd::Zero(p.M()), grid);
    p.tables.write_csv(r.out + "/kernels");
    write_path(r.out + "/h.csv", h, grid);
    const double g2 = r.cfg.get_double("gamma2", 0.75);
    if (g2 > 0.5 && g2 < 1.0) {
        const snn::RegimeInfo reg = snn::classify_regime(g2);
        const Eigen::MatrixXd cov = snn::fluctuation_covariance(p.X, p.law, *p.space, p.opt);
        if (reg.nu == 1) {
            write_path(r.out + "/K.csv", snn::integrate_K(reg, p.tables.A, snn::gaussian_draw(cov, r.seed), grid), grid);
        } else {
            const snn::KernelFamily fam(p);
            const snn::StagedPath l = snn::integrate_l(fam.functions(), p, h);
            const Eigen::VectorXd zero = Eigen::VectorXd::Zero(p.M());
            const snn::StagedPath K = snn::integrate_K(reg, p, fam, h, l, zero);
            write_path(r.out + "/K.csv", K, grid);
            if (reg.nu >= 3) {
                const snn::StagedPath L = snn::integrate_L(fam.functions(), p, h, K);
                const snn::PsiForm form = r.cfg.get_string("psi_form", "consistent") == "as_printed"
                                              ? snn::PsiForm::AsPrinted
                                              : snn::PsiForm::Consistent;
                write_path(r.out + "/Psi.csv", snn::integrate_Psi(reg, p, fam, h, K, l, L, zero, form), grid);
            }
        }
    }
    return 0;
}

int cmd_expand(const Run& r) {
    const snn::DefaultProblem dp = problem(r.cfg);
    const snn::LimitProblem p = dp.limit(expect_options(r.cfg));
    const double g2 = r.cfg.get_double("gamma2", 0.75);
    check_gamma2(g2);
    const snn::RegimeInfo reg = snn::classify_regime(g2);
    const snn::TimeGrid grid = snn::TimeGrid::make(r.cfg.get_double("T", 1.0), r.cfg.get_double("dt", 1e-3));
    const snn::StagedPath h = snn::integrate_h(p.tables.A, p.Y, Eigen::VectorXd::Zero(p.M()), grid);
    const Eigen::VectorXd G = snn::gaussian_draw(snn::fluctuation_covariance(p.X, p.law, *p.space, p.opt), r.seed);
    const snn::ExpansionState e = snn::expansion_recursion(reg, p, h, G);
    e.write_csv(r.out + "/expansion.csv");
    const double n2 = r.cfg.get_double("n2", 256);
    const Eigen::MatrixXd g = snn::reconstruct(e, n2, g2);
    snn::CsvWriter w(r.out + "/reconstruction.csv", {"n2", "gamma2", "t", "component_index", "value"});
    for (int k = 0; k <= grid.steps; ++k)
        for (Eigen::Index a = 0; a < g.rows(); ++a) w.row({n2, g2, grid.t(k), double(a), g(a, k)});
    return 0;
}

int cmd_ensemble(const Run& r) {
    const snn::DefaultProblem dp = problem(r.cfg);
    const snn::Dataset ds = dp.dataset();
    const auto n2s = r.cfg.get_list("n2_list", {r.cfg.get_double("n2", 256)});
    const auto g2s = r.cfg.get_list("gamma2_list", {r.cfg.get_double("gamma2", 0.75)});
    const int count = r.cfg.get_int("seeds", 16);
    snn::ensure_dir(r.out + "/ensemble");
    for (double n2 : n2s)
        for (double g2 : g2s) {
            snn::Config c = r.cfg;
            c.set("n2", std::to_string(static_cast<long long>(n2)));
            c.set("depth", "2");
            snn::EnsembleSpec spec;
            spec.base = train_config(r, scaling(c, dp.d, g2));
            spec.law = dp.law();
            spec.seeds = snn::seed_range(r.seed, count);
            const snn::EnsembleStats st = snn::mc_ensemble(spec, ds);
            for (int a = 0; a < ds.size(); ++a)
                st.write_csv(r.out + "/ensemble/n2_" + std::to_string(static_cast<long long>(n2)) + "_gamma2_" +
                                 snn::fmt_double(g2) + "_x" + std::to_string(a) + ".csv",
                             a, n2, g2);
        }
    return 0;
}

int cmd_mnist(const Run& r) {
    const std::string dir = r.cfg.get_string("mnist_dir", SNN_MNIST_DIR);
    const snn::Dataset train = snn::load_mnist(dir + "/train/images.gz", dir + "/train/labels.gz",
                                               r.cfg.get_int("train_subset", 5000), r.seed);
    const snn::Dataset test = snn::load_mnist(dir + "/test/images.gz", dir + "/test/labels.gz",
                                              r.cfg.get_int("test_subset", 2000), r.seed + 1);
    const auto g1s = r.cfg.get_list("gamma1_list", {1.0});
    const auto g2s = r.cfg.get_list("gamma2_list", {0.5, 0.6, 0.7, 0.8, 0.9, 1.0});
    const std::string path = r.out + "/accuracy.csv";
    bool append = false;
    for (double g1 : g1s)
        for (double g2 : g2s) {
            check_gamma2(g2);
            snn::ClassifyConfig c;
            c.scaling = snn::ScalingConfig::two_layer(r.cfg.get_int("n1", 100), r.cfg.get_int("n2", 100), g1, g2,
                                                      train.dim());
            c.scaling.outputs = 10;
            c.scaling.act = snn::Activation::parse(r.cfg.get_string("activation", "tanh"));
            c.rates = snn::rates_for(c.scaling);
            c.epochs = r.cfg.get_int("epochs", 5);
            c.batch = r.cfg.get_int("batch", 20);
            c.seed = r.seed;
            snn::write_accuracy_csv(path, {g1, g2}, snn::train_classifier(c, snn::InitLaw::standard(), train, test),
                                    append);
            append = true;
        }
    return 0;
}

int cmd_selftest() {
    const snn::CriterionResult res = snn::criterion_closed_form();
    std::printf("%s\n", res.detail.c_str());
    std::printf("selftest %s\n", res.pass ? "passed" : "failed");
    return res.pass ? 0 : 1;
}

int default_threads() {
    if (const char* env = std::getenv("SCALED_NN_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scaled neural network laboratory"};
    app.require_subcommand(1, 1);
    std::string config_path, out = "out";
    std::vector<std::string> sets;
    int threads = default_threads();
    std::uint64_t seed = 0;
    bool seed_given = false;
    app.add_option("--config", config_path, "key=value settings file");
    app.add_option("--out", out, "output directory");
    app.add_option("--set", sets, "override KEY=VALUE (repeatable)")->allow_extra_args(false);
    app.add_option("--threads", threads, "worker threads (default $SCALED_NN_THREADS or 1)")
        ->check(CLI::PositiveNumber);
    app.add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) {
        seed = s;
        seed_given = true;
    }, "master seed");
    for (const char* name : {"train", "limit", "expand", "ensemble", "mnist", "selftest"})
        app.add_subcommand(name)->fallthrough();
    app.get_subcommand("train")->description("SGD run on the synthetic problem");
    app.get_subcommand("limit")->description("kernel tables and limit ODE paths");
    app.get_subcommand("expand")->description("asymptotic expansion and finite-N2 reconstruction");
    app.get_subcommand("ensemble")->description("Monte Carlo ensembles over N2 and gamma2");
    app.get_subcommand("mnist")->description("classification accuracy sweep");
    app.get_subcommand("selftest")->description("closed-form ODE oracles");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        snn::set_thread_count(threads);
        if (cmd == "selftest") return cmd_selftest();
        Run r;
        if (!config_path.empty()) r.cfg = snn::Config::load(config_path, kKeys);
        for (const auto& s : sets) r.cfg.apply_override(s);
        r.seed = seed_given ? seed : r.cfg.get_u64("seed", 1);
        r.out = out;
        r.overrides = sets;
        snn::ensure_dir(out);
        int rc = 0;
        if (cmd == "train") rc = cmd_train(r);
        else if (cmd == "limit") rc = cmd_limit(r);
        else if (cmd == "expand") rc = cmd_expand(r);
        else if (cmd == "ensemble") rc = cmd_ensemble(r);
        else rc = cmd_mnist(r);
        snn::write_manifest(out, cmd, r.cfg, r.seed, r.overrides);
        return rc;
    } catch (const snn::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const snn::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const snn::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
