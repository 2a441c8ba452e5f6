#include "snn/dataset.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include <zlib.h>

#include "snn/errors.hpp"
#include "snn/rng.hpp"

namespace snn {

bool distinct_directions(const Eigen::MatrixXd& X, double tol) {
    const int M = static_cast<int>(X.rows());
    for (int a = 0; a < M; ++a)
        if (X.row(a).norm() == 0.0) return false;
    for (int a = 0; a < M; ++a)
        for (int b = a + 1; b < M; ++b) {
            const double c = X.row(a).dot(X.row(b)) / (X.row(a).norm() * X.row(b).norm());
            if (c >= 1.0 - tol) return false;
        }
    return true;
}

void require_distinct_directions(const Eigen::MatrixXd& X) {
    const int M = static_cast<int>(X.rows());
    for (int a = 0; a < M; ++a)
        if (X.row(a).norm() == 0.0) throw DomainError("input " + std::to_string(a) + " is zero");
    for (int a = 0; a < M; ++a)
        for (int b = a + 1; b < M; ++b) {
            const double c = X.row(a).dot(X.row(b)) / (X.row(a).norm() * X.row(b).norm());
            if (c >= 1.0 - 1e-12)
                throw DomainError("inputs " + std::to_string(a) + " and " + std::to_string(b) +
                                  " point in the same direction");
        }
}

Dataset synth_dataset(int M, int d, std::uint64_t seed, double radius) {
    if (M < 1) throw DomainError("synthetic dataset needs M >= 1");
    if (d < 2) throw DomainError("synthetic dataset needs d >= 2");
    if (!(radius > 0.0)) throw DomainError("input radius must be positive");
    Rng rng = make_rng(seed, 0xDA7A);
    Dataset ds;
    ds.X.resize(M, d);
    if (M <= d) {
        Eigen::MatrixXd G(d, M);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < M; ++j) G(i, j) = standard_normal(rng);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
        const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(d, M);
        ds.X = Q.transpose();
    } else {
        const double max_cos = std::cos(10.0 * std::numbers::pi / 180.0);
        const long long max_tries = 200000LL * M;
        int filled = 0;
        for (long long tries = 0; filled < M; ++tries) {
            if (tries > max_tries) throw DomainError("cannot pack the requested directions at 10 degree separation");
            Eigen::VectorXd v(d);
            for (int k = 0; k < d; ++k) v(k) = standard_normal(rng);
            v.normalize();
            bool ok = true;
            for (int b = 0; b < filled && ok; ++b) ok = ds.X.row(b).dot(v) < max_cos;
            if (ok) ds.X.row(filled++) = v.transpose();
        }
    }
    ds.X *= radius;
    ds.Y.resize(M);
    for (int i = 0; i < M; ++i) ds.Y(i) = 2.0 * uniform01(rng) - 1.0;
    ds.provenance = "synthetic M=" + std::to_string(M) + " d=" + std::to_string(d) + " seed=" + std::to_string(seed);
    return ds;
}

namespace {

std::vector<unsigned char> read_all(const std::string& path) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw IoError("cannot open " + path);
    std::vector<unsigned char> out;
    unsigned char buf[1 << 16];
    for (;;) {
        const int n = gzread(f, buf, sizeof(buf));
        if (n < 0) {
            gzclose(f);
            throw IoError("read error in " + path);
        }
        if (n == 0) break;
        out.insert(out.end(), buf, buf + n);
    }
    gzclose(f);
    return out;
}

std::uint32_t be32(const std::vector<unsigned char>& b, std::size_t off, const std::string& path) {
    if (off + 4 > b.size()) throw IoError("truncated header in " + path);
    return (std::uint32_t(b[off]) << 24) | (std::uint32_t(b[off + 1]) << 16) | (std::uint32_t(b[off + 2]) << 8) |
           std::uint32_t(b[off + 3]);
}

}  // namespace

Dataset load_mnist(const std::string& images_path, const std::string& labels_path, std::size_t subset,
                   std::uint64_t seed) {
    if (subset == 0) throw DomainError("subset size must be positive");
    const auto img = read_all(images_path);
    const auto lab = read_all(labels_path);
    if (be32(img, 0, images_path) != 2051) throw IoError("bad image magic in " + images_path);
    if (be32(lab, 0, labels_path) != 2049) throw IoError("bad label magic in " + labels_path);
    const std::size_t n = be32(img, 4, images_path), rows = be32(img, 8, images_path),
                      cols = be32(img, 12, images_path);
    const std::size_t nl = be32(lab, 4, labels_path);
    if (n != nl) throw IoError("image and label counts differ");
    const std::size_t dim = rows * cols;
    if (img.size() < 16 + n * dim) throw IoError("truncated image payload in " + images_path);
    if (lab.size() < 8 + n) throw IoError("truncated label payload in " + labels_path);

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::size_t take = n;
    if (subset < n) {
        Rng rng = make_rng(seed, 0x4D);
        for (std::size_t i = 0; i < subset; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n - i));
            std::swap(idx[i], idx[std::min(j, n - 1)]);
        }
        take = subset;
    }
    Dataset ds;
    ds.X.resize(static_cast<Eigen::Index>(take), static_cast<Eigen::Index>(dim));
    ds.labels.resize(take);
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t r = idx[i];
        const unsigned char* p = img.data() + 16 + r * dim;
        for (std::size_t k = 0; k < dim; ++k) ds.X(i, k) = p[k] / 255.0;
        const int label = lab[8 + r];
        if (label > 9) throw IoError("label out of range in " + labels_path);
        ds.labels[i] = label;
    }
    ds.provenance = "idx " + images_path + " subset=" + std::to_string(take) + " seed=" + std::to_string(seed);
    return ds;
}

}  // namespace snn
