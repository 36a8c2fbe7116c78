#pragma once

#include <cstddef>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sketch_sfa/sfa_exact/dataset.hpp"
#include "sketch_sfa/sq_core/rng.hpp"

namespace sketch_sfa::verify {

struct BlobSpec {
  std::size_t n = 4096;
  std::size_t d = 16;
  std::size_t classes = 3;
  double separation = 8.0;
};

/// Gaussian classes in d dimensions. Class 0 has mean separation * e0,
/// class 1 has 0.7 * separation * e1, class k in [2, K-2] has
/// 0.5 * separation * e_k, and class K-1 sits at the origin. Noise has per-dimension standard
/// deviation drawn from [0.5, 1.5], and the whole cloud is rotated by a
/// random orthogonal matrix. Rows are assigned to classes round-robin.
/// When `class_means` is given it receives the rotated K x d true means.
exact::Dataset make_blobs(const BlobSpec& spec, Rng& rng, Eigen::MatrixXd* class_means = nullptr);

/// x1 = sin t + cos^2(11 t), x2 = cos(11 t) on n points of [0, 2 pi).
/// Returns the raw two-column time series; the slow source is sin t.
exact::Dataset make_wiskott_signal(std::size_t n);

struct LowRankInstance {
  Eigen::MatrixXd a;
  Eigen::VectorXd sigma;  // exact singular values of the noiseless part
  Eigen::MatrixXd v;      // exact right singular vectors of the noiseless part
};

/// n x m matrix U diag(sigma) V^T with Haar-random orthonormal U and V, plus
/// i.i.d. Gaussian noise of standard deviation `noise`.
LowRankInstance make_low_rank(std::size_t n, std::size_t m, const Eigen::VectorXd& sigma, double noise, Rng& rng);

/// Haar-random matrix with orthonormal columns (rows >= cols).
Eigen::MatrixXd random_orthonormal(std::size_t rows, std::size_t cols, Rng& rng);
Eigen::MatrixXd gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng);

nlohmann::json describe(const BlobSpec& spec);

}  // namespace sketch_sfa::verify
