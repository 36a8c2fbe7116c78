#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "sketch_sfa/sketch_ops/approx_matmul.hpp"
#include "sketch_sfa/sketch_ops/approx_svd.hpp"
#include "sketch_sfa/sketch_ops/composed.hpp"
#include "sketch_sfa/sketch_ops/inner_product.hpp"
#include "sketch_sfa/sketch_ops/sq_matvec.hpp"
#include "sketch_sfa/sq_core/errors.hpp"
#include "sketch_sfa/sq_core/matrix_sq.hpp"
#include "sketch_sfa/verify/alignment.hpp"
#include "sketch_sfa/verify/chi_square.hpp"
#include "sketch_sfa/verify/datagen.hpp"

using namespace sketch_sfa;
using namespace sketch_sfa::sketch;

namespace {

std::shared_ptr<const MatrixSQ> stored(const Eigen::MatrixXd& a) { return std::make_shared<MatrixSQ>(build_matrix(a)); }

double total_variation(const std::vector<std::uint64_t>& counts, const Eigen::VectorXd& p) {
  double draws = 0.0;
  for (auto c : counts) draws += static_cast<double>(c);
  double tv = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    tv += std::abs(static_cast<double>(counts[i]) / draws - p(static_cast<Eigen::Index>(i)));
  }
  return tv / 2.0;
}

Eigen::VectorXd squared_distribution(const Eigen::VectorXd& x) { return x.cwiseAbs2() / x.squaredNorm(); }

}  // namespace

// ------------------------------------------------------------------ FKV SVD

TEST_CASE("fkv: rank-1 outer product recovers its direction") {
  Rng gen(1);
  const Eigen::VectorXd u = verify::random_orthonormal(40, 1, gen).col(0);
  const Eigen::VectorXd v = verify::random_orthonormal(12, 1, gen).col(0);
  const MatrixSQ a = build_matrix(u * v.transpose());
  Rng rng(2);
  const ApproxSvd svd = fkv_approx_svd(a, 0.5, 0.1, 0.5, rng);
  REQUIRE(svd.rank() == 1);
  CHECK(std::abs(svd.v.col(0).dot(v)) >= 0.99);
  CHECK(svd.sigma(0) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("fkv: diag(4, 2, 1e-3) padded to 8 x 8 keeps two values within (eta / 10) |A|_F") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(8, 8);
  a(0, 0) = 4.0;
  a(1, 1) = 2.0;
  a(2, 2) = 1e-3;
  const double eta = 0.2;
  const MatrixSQ stored_a = build_matrix(a);
  Rng rng(3);
  const ApproxSvd svd = fkv_approx_svd(stored_a, 1.0, 0.1, eta, rng);
  REQUIRE(svd.rank() == 2);
  const double tolerance = eta / 10.0 * a.norm();
  CHECK(std::abs(svd.sigma(0) - 4.0) <= tolerance);
  CHECK(std::abs(svd.sigma(1) - 2.0) <= tolerance);
}

TEST_CASE("fkv: rank-5 512 x 64 plus noise projects within |A - A_5|_F + 0.1 |A|_F on >= 8/10 seeds") {
  Eigen::VectorXd sigma(5);
  sigma << 5, 4, 3, 2, 1;
  int good = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng gen(100 + seed);
    const verify::LowRankInstance inst = verify::make_low_rank(512, 64, sigma, 1e-3, gen);
    const Eigen::JacobiSVD<Eigen::MatrixXd> dense(inst.a);
    const double sigma5 = dense.singularValues()(4);
    double tail = 0.0;
    for (Eigen::Index k = 5; k < dense.singularValues().size(); ++k) tail += std::pow(dense.singularValues()(k), 2);
    const MatrixSQ a = build_matrix(inst.a);
    Rng rng(200 + seed);
    FkvConfig cfg;
    cfg.max_rows = std::size_t{1} << 20;
    cfg.budget = BudgetPolicy::Clamp;
    const ApproxSvd svd = fkv_approx_svd(a, 0.9 * sigma5, 0.05, 0.1, rng, cfg);
    const Eigen::MatrixXd projected = inst.a * svd.v * svd.v.transpose();
    if ((inst.a - projected).norm() <= std::sqrt(tail) + 0.1 * inst.a.norm()) ++good;
  }
  CHECK(good >= 8);
}

TEST_CASE("property: lifted right vectors are a 10 eta eps^2 approximate isometry") {
  Eigen::VectorXd sigma(4);
  sigma << 4, 3, 2, 1;
  const double eps = 0.1;
  const double eta = 0.1;
  for (auto columns : {ColumnSampling::Never, ColumnSampling::Always}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng gen(300 + seed);
      const verify::LowRankInstance inst = verify::make_low_rank(1024, 24, sigma, 1e-3, gen);
      const MatrixSQ a = build_matrix(inst.a);
      Rng rng(400 + seed);
      FkvConfig cfg;
      cfg.columns = columns;
      const ApproxSvd svd = fkv_approx_svd(a, 0.8, eps, eta, rng, cfg);
      const Eigen::MatrixXd gram = svd.v.transpose() * svd.v;
      const Eigen::MatrixXd defect = gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
      const double spectral = Eigen::JacobiSVD<Eigen::MatrixXd>(defect).singularValues()(0);
      REQUIRE(spectral <= 10.0 * eta * eps * eps);
      CHECK(svd.diagnostics.isometry_error == doctest::Approx(spectral).epsilon(1e-6).scale(1e-12));
    }
  }
}

TEST_CASE("fkv: threshold above the spectrum raises EmptySpectrum") {
  const MatrixSQ a = build_matrix(Eigen::MatrixXd::Identity(6, 6));
  Rng rng(1);
  CHECK_THROWS_AS(fkv_approx_svd(a, 100.0, 0.1, 0.1, rng), EmptySpectrum);
}

TEST_CASE("fkv: sketch above the memory budget raises BudgetExceeded, or clamps when asked") {
  const MatrixSQ a = build_matrix(Eigen::MatrixXd::Identity(6, 6));
  Rng rng(1);
  FkvConfig cfg;
  cfg.max_rows = 32;
  CHECK_THROWS_AS(fkv_approx_svd(a, 0.5, 0.01, 0.01, rng, cfg), BudgetExceeded);
  cfg.budget = BudgetPolicy::Clamp;
  const ApproxSvd svd = fkv_approx_svd(a, 0.5, 0.01, 0.01, rng, cfg);
  CHECK(svd.diagnostics.clamped);
  CHECK(svd.diagnostics.sketch_rows == 32);
}

TEST_CASE("fkv: sketch size formula") {
  // c / (eps^2 eta^2) * |A|_F^2 / sigma^2 with c = 4: 4 / (0.01 * 0.04) * 2 / 1 = 20000.
  FkvConfig cfg;
  CHECK(fkv_sketch_rows(2.0, 1.0, 0.1, 0.2, cfg) == doctest::Approx(20000.0));
  CHECK(fkv_sketch_rows(1e-9, 1.0, 0.9, 0.9, cfg) == doctest::Approx(static_cast<double>(cfg.min_rows)));
}

TEST_CASE("LeftFactorSQ entries equal (A V Sigma^-1)^T") {
  Eigen::VectorXd sigma(3);
  sigma << 3, 2, 1;
  Rng gen(5);
  const verify::LowRankInstance inst = verify::make_low_rank(200, 10, sigma, 0.0, gen);
  const auto pair = MatrixSQPair::build(inst.a);
  Rng rng(6);
  const ApproxSvd svd = fkv_approx_svd(*pair.a, 0.5, 0.1, 0.2, rng);
  const LeftFactorSQ left(svd, pair.a, pair.at);
  const Eigen::MatrixXd u = inst.a * svd.v * svd.sigma.cwiseInverse().asDiagonal();
  for (std::size_t l = 0; l < left.rows(); ++l) {
    for (std::size_t i = 0; i < 200; i += 17) {
      CHECK(left.entry(l, i) ==
            doctest::Approx(u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l))).epsilon(1e-10));
    }
  }
}

// ------------------------------------------------------------------ matmul

TEST_CASE("matmul: e1 e1^T times I is recovered exactly for any t") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 0) = 1.0;
  const auto at = stored(a.transpose());
  const auto b = stored(Eigen::MatrixXd::Identity(2, 2));
  for (std::size_t t : {1u, 2u, 7u, 100u}) {
    Rng rng(t);
    const SuccinctProduct p = approx_matmul_with_samples(at, b, t, rng);
    CHECK((p.materialize() - a).norm() <= 1e-14);
  }
}

TEST_CASE("matmul: sample count is |A|_F^2 |B|_F^2 / (delta eps^2)") {
  CHECK(matmul_sample_count(1.0, 1.0, 0.1, 0.1) == doctest::Approx(1000.0));
  CHECK(matmul_sample_count(4.0, 9.0, 3.0, 0.5) == doctest::Approx(8.0));
}

TEST_CASE("matmul: random 50 x 20 by 20 x 30 meets eps = 0.05 |A|_F |B|_F in >= 85/100 trials") {
  Rng gen(7);
  const Eigen::MatrixXd a = verify::gaussian_matrix(50, 20, gen);
  const Eigen::MatrixXd b = verify::gaussian_matrix(20, 30, gen);
  const auto at = stored(a.transpose());
  const auto bs = stored(b);
  const double eps = 0.05 * a.norm() * b.norm();
  const Eigen::MatrixXd exact = a * b;
  int good = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    Rng rng(1000 + trial);
    const SuccinctProduct p = approx_matmul(at, bs, eps, 0.1, rng);
    if ((p.materialize() - exact).norm() <= eps) ++good;
  }
  CHECK(good >= 85);
}

TEST_CASE("matmul: A A^T for orthogonal A approximates the identity") {
  Rng gen(8);
  const Eigen::MatrixXd q = verify::random_orthonormal(30, 30, gen);
  const auto at = stored(q.transpose());
  const auto b = stored(q.transpose());
  const double eps = 0.1 * q.norm() * q.norm();
  int good = 0;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    Rng rng(trial);
    const SuccinctProduct p = approx_matmul(at, b, eps, 0.1, rng);
    if ((p.materialize() - Eigen::MatrixXd::Identity(30, 30)).norm() <= eps) ++good;
  }
  CHECK(good >= 17);
}

TEST_CASE("matmul: dimension mismatch") {
  Rng rng(1);
  CHECK_THROWS_AS(approx_matmul(stored(Eigen::MatrixXd::Ones(3, 2)), stored(Eigen::MatrixXd::Ones(4, 2)), 0.1, 0.1, rng),
                  InvalidInput);
}

TEST_CASE("property: averaged sketches converge to AB at rate 1 / sqrt(trials)") {
  Rng gen(9);
  const Eigen::MatrixXd a = verify::gaussian_matrix(20, 10, gen);
  const Eigen::MatrixXd b = verify::gaussian_matrix(10, 8, gen);
  const auto at = stored(a.transpose());
  const auto bs = stored(b);
  const Eigen::MatrixXd exact = a * b;
  const std::vector<int> checkpoints{5, 10, 20, 40, 80, 160, 200};
  const int replicates = 30;
  std::vector<double> mean_sq(checkpoints.size(), 0.0);
  for (int r = 0; r < replicates; ++r) {
    Rng rng(5000 + static_cast<std::uint64_t>(r));
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(exact.rows(), exact.cols());
    std::size_t next = 0;
    for (int m = 1; m <= checkpoints.back(); ++m) {
      sum += approx_matmul_with_samples(at, bs, 4, rng).materialize();
      if (m == checkpoints[next]) {
        mean_sq[next] += (sum / m - exact).squaredNorm() / replicates;
        ++next;
      }
    }
  }
  // Least-squares slope of log RMS error against log trials.
  Eigen::MatrixXd design(static_cast<Eigen::Index>(checkpoints.size()), 2);
  Eigen::VectorXd target(design.rows());
  for (Eigen::Index k = 0; k < design.rows(); ++k) {
    design(k, 0) = 1.0;
    design(k, 1) = std::log(static_cast<double>(checkpoints[static_cast<std::size_t>(k)]));
    target(k) = 0.5 * std::log(mean_sq[static_cast<std::size_t>(k)]);
  }
  const double slope = design.colPivHouseholderQr().solve(target)(1);
  CHECK(std::abs(slope + 0.5) <= 0.15);
}

TEST_CASE("SuccinctProduct rows and scattered factor agree with the dense product") {
  Rng gen(10);
  const Eigen::MatrixXd a = verify::gaussian_matrix(15, 6, gen);
  const Eigen::MatrixXd b = verify::gaussian_matrix(6, 4, gen);
  Rng rng(11);
  const SuccinctProduct p = approx_matmul_with_samples(stored(a.transpose()), stored(b), 50, rng);
  const Eigen::MatrixXd dense = p.materialize();
  CHECK((a * p.scattered_right_factor() - dense).norm() <= 1e-12 * dense.norm());
  for (std::size_t i = 0; i < 15; ++i) {
    CHECK((p.row(i) - dense.row(static_cast<Eigen::Index>(i)).transpose()).norm() <= 1e-12 * dense.norm());
  }
}

// --------------------------------------------------------------- sq_matvec

TEST_CASE("sq_matvec: V = I, w = (3, 4) samples (0.36, 0.64)") {
  const auto vt = stored(Eigen::MatrixXd::Identity(2, 2));
  Eigen::VectorXd w(2);
  w << 3, 4;
  const SQHandle h = sq_matvec(vt, w);
  const std::vector<double> expected{0.36, 0.64};
  Rng rng(1);
  CHECK(verify::chi_square_test(h, expected, 200'000, rng).pass);
}

TEST_CASE("sq_matvec: orthonormal V gives C(V, w) = 1 and acceptance >= 1 / (2k)") {
  Rng gen(2);
  const Eigen::MatrixXd v = verify::random_orthonormal(60, 3, gen);
  Eigen::VectorXd w(3);
  w << 0.3, -2.0, 1.1;
  const auto mv = std::make_shared<MatVecVector>(stored(v.transpose()), w);
  CHECK(mv->proposal_mass() / (v * w).squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
  Rng rng(3);
  for (int k = 0; k < 20000; ++k) mv->sample(rng);
  CHECK(mv->stats().acceptance_rate() >= 1.0 / 6.0);
}

TEST_CASE("sq_matvec: random 100 x 3 V, w = (1, -1, 0.5) matches D_Vw within TV 0.02 at 1e5 draws") {
  Rng gen(4);
  const Eigen::MatrixXd v = verify::gaussian_matrix(100, 3, gen);
  Eigen::VectorXd w(3);
  w << 1, -1, 0.5;
  const SQHandle h = sq_matvec(stored(v.transpose()), w);
  std::vector<std::uint64_t> counts(100, 0);
  Rng rng(5);
  for (int k = 0; k < 100'000; ++k) ++counts[h.sample(rng)];
  CHECK(total_variation(counts, squared_distribution(v * w)) <= 0.02);
}

TEST_CASE("property: sq_matvec queries are exact and deterministic") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng gen(seed);
    const Eigen::MatrixXd v = verify::gaussian_matrix(40, 4, gen);
    const Eigen::VectorXd w = verify::gaussian_matrix(4, 1, gen).col(0);
    const SQHandle h = sq_matvec(stored(v.transpose()), w);
    const Eigen::VectorXd x = v * w;
    Rng rng(seed);
    for (std::size_t i = 0; i < 40; ++i) {
      const double first = h.query(i);
      h.sample(rng);  // interleaved randomness must not affect queries
      REQUIRE(h.query(i) == first);
      REQUIRE(first == doctest::Approx(x(static_cast<Eigen::Index>(i))).epsilon(1e-13));
    }
  }
}

TEST_CASE("sq_matvec: near-cancelling columns stall the rejection sampler") {
  Eigen::MatrixXd v(50, 2);
  Rng gen(6);
  v.col(0) = verify::gaussian_matrix(50, 1, gen).col(0);
  v.col(1) = v.col(0);
  v(0, 1) += 1e-9;
  Eigen::VectorXd w(2);
  w << 1, -1;
  MatVecOptions opts;
  opts.hard_trial_cap = 1000;
  const SQHandle h = sq_matvec(stored(v.transpose()), w, opts);
  Rng rng(7);
  CHECK_THROWS_AS(h.sample(rng), RejectionStall);
}

TEST_CASE("sq_matvec: norm estimate within nu") {
  Rng gen(8);
  const Eigen::MatrixXd v = verify::gaussian_matrix(80, 3, gen);
  Eigen::VectorXd w(3);
  w << 2, 1, -1;
  const SQHandle h = sq_matvec(stored(v.transpose()), w);
  Rng rng(9);
  CHECK_FALSE(h.exact_norm());
  int good = 0;
  for (int k = 0; k < 20; ++k) {
    if (std::abs(h.norm(0.1, rng) - (v * w).norm()) <= 0.1 * (v * w).norm()) ++good;
  }
  CHECK(good >= 18);
}

// ------------------------------------------------------------ ProductRowsSQ

TEST_CASE("ProductRowsSQ samples rows of A M from their squared norms") {
  Rng gen(10);
  const Eigen::MatrixXd a = verify::gaussian_matrix(30, 5, gen);
  const Eigen::MatrixXd m = verify::gaussian_matrix(5, 3, gen);
  Rng rng(11);
  const ProductRowsSQ rows(stored(a), m, rng);
  const Eigen::MatrixXd am = a * m;
  CHECK(rows.entry(4, 2) == doctest::Approx(am(4, 2)).epsilon(1e-13));
  std::vector<double> expected(30);
  for (Eigen::Index i = 0; i < 30; ++i) expected[static_cast<std::size_t>(i)] = am.row(i).squaredNorm() / am.squaredNorm();
  const auto report = verify::chi_square_test("product_rows", [&](Rng& r) { return rows.sample_row(r); }, expected,
                                              200'000, rng);
  CHECK(report.pass);
  CHECK(rows.frobenius_squared() == doctest::Approx(am.squaredNorm()).epsilon(0.2));
}

// ----------------------------------------------------------- inner product

TEST_CASE("inner product: x = y = e1 is exact") {
  const std::vector<double> e1{1.0, 0.0, 0.0};
  const SQHandle x = SQHandle::from_values(e1);
  Rng rng(1);
  CHECK(estimate_inner_product(x, x, 0.05, 0.1, rng) == 1.0);
}

TEST_CASE("inner product: orthogonal pair within eps on >= (1 - delta) of 200 trials") {
  const double r = 1.0 / std::sqrt(2.0);
  const std::vector<double> xv{r, r};
  const std::vector<double> yv{r, -r};
  const SQHandle x = SQHandle::from_values(xv);
  const SQHandle y = SQHandle::from_values(yv);
  int good = 0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    Rng rng(t);
    if (std::abs(estimate_inner_product(x, y, 0.05, 0.1, rng)) <= 0.05) ++good;
  }
  CHECK(good >= 180);
}

TEST_CASE("inner product: random unit 1000-vectors within eps on >= (1 - delta) of 200 trials") {
  Rng gen(3);
  const Eigen::VectorXd xv = verify::gaussian_matrix(1000, 1, gen).col(0).normalized();
  const Eigen::VectorXd yv = verify::gaussian_matrix(1000, 1, gen).col(0).normalized();
  const SQHandle x = SQHandle::from_values({xv.data(), 1000});
  const SQHandle y = SQHandle::from_values({yv.data(), 1000});
  const double truth = xv.dot(yv);
  int good = 0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    Rng rng(t);
    if (std::abs(estimate_inner_product(x, y, 0.05, 0.1, rng) - truth) <= 0.05) ++good;
  }
  CHECK(good >= 180);
}

TEST_CASE("median-of-means plan") {
  // ceil(6 ln 10) = 14 groups; ceil(9 / 0.01) = 900 samples per group.
  const MedianOfMeansPlan p = median_of_means_plan(1.0, 1.0, 0.1, 0.1);
  CHECK(p.groups == 14);
  CHECK(p.group_size == 900);
}

TEST_CASE("inner product: zero x is degenerate") {
  const std::vector<double> zero{0.0, 0.0};
  const std::vector<double> one{1.0, 1.0};
  Rng rng(1);
  CHECK_THROWS_AS(estimate_inner_product(SQHandle::from_values(zero), SQHandle::from_values(one), 0.1, 0.1, rng),
                  DegenerateDistribution);
}
