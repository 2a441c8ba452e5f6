#include <gtest/gtest.h>

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "snn/dataset.hpp"
#include "snn/errors.hpp"

using namespace snn;
namespace fs = std::filesystem;

namespace {

void put_be32(std::string& s, std::uint32_t v) {
    for (int k = 3; k >= 0; --k) s.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}

std::string idx_images(std::uint32_t magic, std::uint32_t n, int rows, int cols, int truncate = 0) {
    std::string s;
    put_be32(s, magic);
    put_be32(s, n);
    put_be32(s, rows);
    put_be32(s, cols);
    for (std::uint32_t i = 0; i < n * rows * cols; ++i) s.push_back(static_cast<char>(i % 256));
    s.resize(s.size() - truncate);
    return s;
}

std::string idx_labels(std::uint32_t magic, std::uint32_t n, int bad = -1) {
    std::string s;
    put_be32(s, magic);
    put_be32(s, n);
    for (std::uint32_t i = 0; i < n; ++i) s.push_back(static_cast<char>(static_cast<int>(i) == bad ? 12 : i % 10));
    return s;
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("snn_ds_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                                  "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string write(const std::string& name, const std::string& bytes, bool gz = false) const {
        const std::string p = (path / name).string();
        if (gz) {
            gzFile f = gzopen(p.c_str(), "wb");
            gzwrite(f, bytes.data(), static_cast<unsigned>(bytes.size()));
            gzclose(f);
        } else {
            std::ofstream(p, std::ios::binary) << bytes;
        }
        return p;
    }
};

}  // namespace

TEST(Synth, ConstructionGuarantees) {
    EXPECT_EQ(synth_dataset(1, 3, 1).size(), 1);
    const Dataset a = synth_dataset(3, 2, 4);
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            EXPECT_LT(a.x(i).dot(a.x(j)) / (a.x(i).norm() * a.x(j).norm()), std::cos(10.0 * M_PI / 180.0));
    const Dataset b = synth_dataset(3, 2, 4);
    EXPECT_EQ(a.X, b.X);
    EXPECT_EQ(a.Y, b.Y);
    const Dataset c = synth_dataset(3, 3, 4, 3.0);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(c.x(i).norm(), 3.0, 1e-12);
    EXPECT_LE(c.Y.cwiseAbs().maxCoeff(), 1.0);
}

TEST(Synth, DistinctDirections) {
    Eigen::MatrixXd X(2, 2);
    X << 1.0, 2.0, 2.0, 4.0;
    EXPECT_FALSE(distinct_directions(X));
    EXPECT_THROW(require_distinct_directions(X), DomainError);
    X << 1.0, 2.0, -1.0, -2.0;
    EXPECT_TRUE(distinct_directions(X));
    X << 0.0, 0.0, 1.0, 0.0;
    EXPECT_FALSE(distinct_directions(X));
}

TEST(Mnist, ReadsPlainAndCompressed) {
    TempDir d;
    for (bool gz : {false, true}) {
        const auto im = d.write(gz ? "i.gz" : "i", idx_images(2051, 12, 2, 3), gz);
        const auto lb = d.write(gz ? "l.gz" : "l", idx_labels(2049, 12), gz);
        const Dataset all = load_mnist(im, lb, 100, 1);
        ASSERT_EQ(all.size(), 12);
        EXPECT_EQ(all.dim(), 6);
        EXPECT_EQ(all.labels[11], 1);
        EXPECT_DOUBLE_EQ(all.X(1, 0), 6.0 / 255.0);
        const Dataset sub = load_mnist(im, lb, 5, 1);
        EXPECT_EQ(sub.size(), 5);
        const Dataset again = load_mnist(im, lb, 5, 1);
        EXPECT_EQ(sub.X, again.X);
    }
}

TEST(Mnist, RejectsMalformedFiles) {
    TempDir d;
    const auto good_i = d.write("gi", idx_images(2051, 4, 2, 2));
    const auto good_l = d.write("gl", idx_labels(2049, 4));
    EXPECT_THROW(load_mnist(d.write("bm", idx_images(2049, 4, 2, 2)), good_l, 4, 1), IoError);
    EXPECT_THROW(load_mnist(good_i, d.write("bl", idx_labels(2051, 4)), 4, 1), IoError);
    EXPECT_THROW(load_mnist(d.write("tr", idx_images(2051, 4, 2, 2, 3)), good_l, 4, 1), IoError);
    EXPECT_THROW(load_mnist(good_i, d.write("cnt", idx_labels(2049, 3)), 4, 1), IoError);
    EXPECT_THROW(load_mnist(good_i, d.write("lab", idx_labels(2049, 4, 2)), 4, 1), IoError);
    EXPECT_THROW(load_mnist((d.path / "missing").string(), good_l, 4, 1), IoError);
    EXPECT_THROW(load_mnist(good_i, good_l, 0, 1), DomainError);
}

TEST(Mnist, BundledFilesHaveExpectedHeaders) {
    const std::string dir = SNN_MNIST_DIR;
    if (!fs::exists(dir + "/train/images.gz")) GTEST_SKIP() << "bundled digits not present";
    const Dataset tr = load_mnist(dir + "/train/images.gz", dir + "/train/labels.gz", 100000, 1);
    const Dataset te = load_mnist(dir + "/test/images.gz", dir + "/test/labels.gz", 100000, 1);
    EXPECT_EQ(tr.size(), 8000);
    EXPECT_EQ(te.size(), 2000);
    EXPECT_EQ(tr.dim(), 784);
    EXPECT_GE(tr.X.minCoeff(), 0.0);
    EXPECT_LE(tr.X.maxCoeff(), 1.0);
}
