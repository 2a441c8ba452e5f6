#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "snn/experiments.hpp"
#include "snn/parallel.hpp"

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<int> ids;
    std::string mnist = SNN_MNIST_DIR;
    int threads = 1;
    app.add_option("--criterion", ids, "criterion ids (default: all)")->check(CLI::Range(1, 10));
    app.add_option("--mnist-dir", mnist, "directory with train/ and test/ IDX files");
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);
    snn::set_thread_count(threads);
    if (ids.empty())
        for (int i = 1; i <= 10; ++i) ids.push_back(i);
    bool all = true;
    for (int id : ids) {
        snn::CriterionResult r;
        try {
            r = snn::run_criterion(id, mnist);
        } catch (const std::exception& e) {
            r.id = id;
            r.name = "error";
            r.detail = e.what();
        }
        std::printf("[%s] criterion %d %s (%.1fs): %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                    r.detail.c_str());
        std::fflush(stdout);
        all = all && r.pass;
    }
    return all ? 0 : 1;
}
