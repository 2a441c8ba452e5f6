#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace snn {

struct Dataset {
    Eigen::MatrixXd X;        // M x d
    Eigen::VectorXd Y;        // regression targets (empty for classification)
    std::vector<int> labels;  // class labels (empty for regression)
    std::string provenance;

    int size() const { return static_cast<int>(X.rows()); }
    int dim() const { return static_cast<int>(X.cols()); }
    bool is_classification() const { return !labels.empty(); }
    Eigen::VectorXd x(int i) const { return X.row(i).transpose(); }
};

// True when no input is zero and no two inputs are positive multiples of each other.
bool distinct_directions(const Eigen::MatrixXd& X, double tol = 1e-12);
// Throws DomainError naming the offending pair.
void require_distinct_directions(const Eigen::MatrixXd& X);

// Inputs of norm `radius` with pairwise angles of at least 10 degrees, targets U[-1, 1].
Dataset synth_dataset(int M, int d, std::uint64_t seed, double radius = 1.0);

// IDX image and label files, plain or gzip-compressed. subset == 0 is rejected;
// subset >= count keeps every record in file order.
Dataset load_mnist(const std::string& images_path, const std::string& labels_path, std::size_t subset,
                   std::uint64_t seed);

}  // namespace snn
