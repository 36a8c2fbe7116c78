#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <set>

#include "sketch_sfa/sfa_exact/dataset.hpp"
#include "sketch_sfa/sfa_exact/exact_sfa.hpp"
#include "sketch_sfa/sfa_exact/preprocess.hpp"
#include "sketch_sfa/sq_core/errors.hpp"
#include "sketch_sfa/verify/datagen.hpp"

using namespace sketch_sfa;
using namespace sketch_sfa::exact;

namespace {

Dataset series(const Eigen::MatrixXd& x) {
  Dataset ds;
  ds.x = x;
  return ds;
}

Dataset labelled(const Eigen::MatrixXd& x, std::vector<long> labels) {
  Dataset ds;
  ds.x = x;
  ds.labels = std::move(labels);
  ds.mode = DataMode::Classification;
  return ds;
}

struct Prepared {
  Dataset data;
  DiffMatrix pairs;
};

Prepared normalized_blobs(std::size_t n, std::size_t d, std::size_t classes, std::uint64_t seed) {
  Rng rng(seed);
  verify::BlobSpec spec;
  spec.n = n;
  spec.d = d;
  spec.classes = classes;
  Prepared p;
  p.data = normalize(verify::make_blobs(spec, rng));
  Rng pair_rng(seed + 1);
  p.pairs = pairwise_differentiate(p.data, 400, pair_rng);
  return p;
}

// Unit-variance signal X u.
Eigen::VectorXd unit_signal(const Eigen::MatrixXd& x, const Eigen::VectorXd& u) {
  const Eigen::VectorXd y = x * u;
  return y / std::sqrt(y.squaredNorm() / static_cast<double>(y.size()));
}

}  // namespace

// --------------------------------------------------------------- normalize

TEST_CASE("normalize: column (1, 3) becomes (-1, 1)") {
  Eigen::MatrixXd x(2, 1);
  x << 1, 3;
  const Dataset out = normalize(series(x));
  CHECK(out.x(0, 0) == doctest::Approx(-1.0));
  CHECK(out.x(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("normalize is idempotent") {
  Rng rng(1);
  const Dataset once = normalize(series(verify::gaussian_matrix(50, 4, rng)));
  const Dataset twice = normalize(once);
  CHECK((once.x - twice.x).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("normalize: random 200 x 5 has zero means and unit variances") {
  Rng rng(2);
  Eigen::MatrixXd x = verify::gaussian_matrix(200, 5, rng);
  for (Eigen::Index c = 0; c < 5; ++c) x.col(c) = x.col(c) * (c + 1.5) + Eigen::VectorXd::Constant(200, 3.0 * c);
  const Dataset out = normalize(series(x));
  for (Eigen::Index c = 0; c < 5; ++c) {
    CHECK(std::abs(out.x.col(c).mean()) <= 1e-12);
    const double var = out.x.col(c).squaredNorm() / 200.0;
    CHECK(var >= 1.0 - 1e-9);
    CHECK(var <= 1.0 + 1e-9);
  }
}

TEST_CASE("normalize drops constant columns with a warning") {
  Eigen::MatrixXd x(3, 2);
  x << 1, 7, 2, 7, 4, 7;
  Dataset ds = series(x);
  ds.columns = {"a", "flat"};
  const Dataset out = normalize(ds);
  CHECK(out.cols() == 1);
  CHECK(out.columns == std::vector<std::string>{"a"});
  REQUIRE(out.warnings.size() == 1);
  CHECK(out.warnings[0].find("flat") != std::string::npos);
}

TEST_CASE("normalize needs two rows") { CHECK_THROWS_AS(normalize(series(Eigen::MatrixXd::Ones(1, 3))), InvalidInput); }

// -------------------------------------------------------- quadratic_expand

TEST_CASE("quadratic_expand: (a, b) -> (a, b, a^2, ab, b^2)") {
  Eigen::MatrixXd x(1, 2);
  x << 2, 3;
  const Dataset out = quadratic_expand(series(x));
  Eigen::RowVectorXd expected(5);
  expected << 2, 3, 4, 6, 9;
  CHECK(out.x.row(0) == expected);
}

TEST_CASE("quadratic_expand widths") {
  CHECK(quadratic_expand(series(Eigen::MatrixXd::Constant(2, 1, 5.0))).x.row(0) == Eigen::RowVector2d(5, 25));
  CHECK(quadratic_expand(series(Eigen::MatrixXd::Ones(2, 3))).cols() == 9);
  CHECK_THROWS_AS(quadratic_expand(series(Eigen::MatrixXd::Ones(2, 3)), 8), BudgetExceeded);
}

// ------------------------------------------------- pairwise_differentiate

TEST_CASE("pairs: a two-point class gives one row with s < t") {
  Eigen::MatrixXd x(2, 2);
  x << 0, 0, 1, 1;
  Rng rng(1);
  const DiffMatrix p = pairwise_differentiate(labelled(x, {4, 4}), 10, rng);
  REQUIRE(p.rows() == 1);
  CHECK(p.pairs[0] == std::pair<std::size_t, std::size_t>{0, 1});
  CHECK(p.xdot.row(0) == Eigen::RowVector2d(-1, -1));
}

TEST_CASE("pairs: a 3-member class with room for 10 pairs gives all 3") {
  Rng rng(1);
  const DiffMatrix p = pairwise_differentiate(labelled(Eigen::MatrixXd::Random(3, 2), {0, 0, 0}), 10, rng);
  CHECK(p.rows() == 3);
  CHECK(p.candidate_pairs == 3.0);
}

TEST_CASE("pairs: two 50-point blobs with 100 pairs per class replay from their indices") {
  Rng gen(2);
  verify::BlobSpec spec;
  spec.n = 100;
  spec.d = 4;
  spec.classes = 2;
  const Dataset ds = verify::make_blobs(spec, gen);
  Rng rng(3);
  const DiffMatrix p = pairwise_differentiate(ds, 100, rng);
  REQUIRE(p.rows() == 200);
  CHECK(p.candidate_pairs == 2.0 * 1225.0);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t r = 0; r < p.rows(); ++r) {
    const auto [s, t] = p.pairs[r];
    REQUIRE(s < t);
    REQUIRE(ds.labels[s] == ds.labels[t]);
    REQUIRE(seen.insert(p.pairs[r]).second);
    const Eigen::RowVectorXd replay = ds.x.row(static_cast<Eigen::Index>(s)) - ds.x.row(static_cast<Eigen::Index>(t));
    REQUIRE(p.xdot.row(static_cast<Eigen::Index>(r)) == replay);
  }
}

TEST_CASE("pairs: the same seed draws the same subset") {
  const Prepared a = normalized_blobs(300, 3, 3, 9);
  const Prepared b = normalized_blobs(300, 3, 3, 9);
  CHECK(a.pairs.pairs == b.pairs.pairs);
}

TEST_CASE("pairs: a singleton class is named in the error") {
  Rng rng(1);
  try {
    pairwise_differentiate(labelled(Eigen::MatrixXd::Ones(3, 1), {1, 1, 7}), 10, rng);
    FAIL("expected InvalidInput");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("class 7") != std::string::npos);
  }
}

TEST_CASE("pairs: time series uses consecutive differences") {
  Eigen::MatrixXd x(3, 1);
  x << 1, 4, 9;
  Rng rng(1);
  const DiffMatrix p = pairwise_differentiate(series(x), 10, rng);
  REQUIRE(p.rows() == 2);
  CHECK(p.xdot(0, 0) == 3.0);
  CHECK(p.xdot(1, 0) == 5.0);
}

// ---------------------------------------------------------------- exact_sfa

TEST_CASE("exact_sfa: decoupled coordinates come out ordered by ascending difference scale") {
  // Orthogonal columns with |column|^2 = n, so B = I; the three pairs
  // differ along one axis each with scales 1.5, 0.5 and 1.0.
  const Eigen::Vector3d scale(1.5, 0.5, 1.0);
  const double n = 7.0;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(7, 3);
  for (Eigen::Index c = 0; c < 3; ++c) {
    x(1 + c, c) = scale(c);
    x(4 + c, c) = std::sqrt(n - scale(c) * scale(c));
  }
  DiffMatrix pairs;
  pairs.mode = DataMode::Classification;
  pairs.pairs = {{0, 1}, {0, 2}, {0, 3}};
  pairs.xdot = difference_rows(x, pairs);
  const SfaResult r = exact_sfa(x, pairs, 3);
  const std::array<Eigen::Index, 3> order{1, 2, 0};
  for (Eigen::Index j = 0; j < 3; ++j) {
    CHECK(std::abs(r.weights(order[static_cast<std::size_t>(j)], j)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.deltas(j) == doctest::Approx(std::pow(scale(order[static_cast<std::size_t>(j)]), 2) / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("exact_sfa: two separated blobs, J = 1, beats 100 random directions") {
  const Prepared p = normalized_blobs(400, 2, 2, 11);
  const SfaResult r = exact_sfa(p.data.x, p.pairs, 1);
  const Eigen::VectorXd y = r.y.col(0);
  // Class means sit far apart relative to the within-class spread.
  double mean[2] = {0, 0};
  double count[2] = {0, 0};
  for (std::size_t i = 0; i < p.data.rows(); ++i) {
    mean[p.data.labels[i]] += y(static_cast<Eigen::Index>(i));
    count[p.data.labels[i]] += 1;
  }
  const double margin = std::abs(mean[0] / count[0] - mean[1] / count[1]);
  CHECK(margin > 4.0 * std::sqrt(r.deltas(0)));
  Rng rng(12);
  for (int k = 0; k < 100; ++k) {
    const Eigen::VectorXd u = verify::gaussian_matrix(2, 1, rng).col(0);
    REQUIRE(delta_value(unit_signal(p.data.x, u), p.pairs) >= r.deltas(0) - 1e-9);
  }
}

TEST_CASE("property: each slow feature is optimal among B-orthogonal directions") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Prepared p = normalized_blobs(300, 5, 3, 20 + seed);
    const SfaResult r = exact_sfa(p.data.x, p.pairs, 3);
    Rng rng(30 + seed);
    for (Eigen::Index j = 0; j < 3; ++j) {
      for (int k = 0; k < 100; ++k) {
        Eigen::VectorXd u = verify::gaussian_matrix(5, 1, rng).col(0);
        for (Eigen::Index prev = 0; prev < j; ++prev) {
          const Eigen::VectorXd w = r.weights.col(prev);
          u -= (w.dot(r.b * u)) * w;  // w^T B w = 1
        }
        REQUIRE(delta_value(unit_signal(p.data.x, u), p.pairs) >= r.deltas(j) - 1e-9);
      }
    }
  }
}

TEST_CASE("property: output constraints hold") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Prepared p = normalized_blobs(240, 6, 3, 40 + seed);
    const SfaResult r = exact_sfa(p.data.x, p.pairs, 4);
    const Eigen::MatrixXd gram = r.weights.transpose() * r.b * r.weights;
    CHECK((gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-6);
    const Eigen::MatrixXd cov = r.y.transpose() * r.y / static_cast<double>(r.y.rows());
    CHECK((cov - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(r.y.colwise().mean().cwiseAbs().maxCoeff() <= 1e-8);
    for (Eigen::Index j = 0; j + 1 < 4; ++j) CHECK(r.deltas(j) <= r.deltas(j + 1));
  }
}

TEST_CASE("property: whitened data is orthonormal") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Prepared p = normalized_blobs(200, 7, 3, 50 + seed);
    const SfaResult r = exact_sfa(p.data.x, p.pairs, 2);
    const Eigen::MatrixXd z = p.data.x * r.b_inv_half / std::sqrt(200.0);
    CHECK((z.transpose() * z - Eigen::MatrixXd::Identity(7, 7)).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("property: whitening and differencing commute") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Prepared p = normalized_blobs(200, 5, 3, 60 + seed);
    const SfaResult r = exact_sfa(p.data.x, p.pairs, 2);
    const Eigen::MatrixXd diff_then_white = p.pairs.xdot * r.b_inv_half;
    const Eigen::MatrixXd white_then_diff = difference_rows(p.data.x * r.b_inv_half, p.pairs);
    CHECK((diff_then_white - white_then_diff).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("property: delta(y_j) equals sigma_j(Zdot)^2") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Prepared p = normalized_blobs(200, 5, 3, 70 + seed);
    const SfaResult r = exact_sfa(p.data.x, p.pairs, 3);
    const Eigen::Index d = r.zdot_singular.size();
    for (Eigen::Index j = 0; j < 3; ++j) {
      CHECK(std::abs(r.deltas(j) - std::pow(r.zdot_singular(d - 1 - j), 2)) <= 1e-8);
    }
    CHECK(r.gamma == r.zdot_singular(d - 1));
    CHECK(r.theta == r.x_singular(d - 1));
  }
}

TEST_CASE("exact_sfa: slow source of the two-frequency toy signal") {
  const std::size_t n = 2000;
  const Dataset raw = verify::make_wiskott_signal(n);
  const Dataset expanded = normalize(quadratic_expand(normalize(raw)));
  Rng rng(1);
  const DiffMatrix pairs = pairwise_differentiate(expanded, 1, rng);
  const SfaResult r = exact_sfa(expanded.x, pairs, 1);
  Eigen::VectorXd source(static_cast<Eigen::Index>(n));
  for (std::size_t t = 0; t < n; ++t) {
    source(static_cast<Eigen::Index>(t)) = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(n));
  }
  const Eigen::VectorXd centred = source.array() - source.mean();
  const double corr = r.y.col(0).dot(centred) / (r.y.col(0).norm() * centred.norm());
  CHECK(std::abs(corr) >= 0.95);
}

TEST_CASE("exact_sfa: rank deficiency and bad J") {
  Eigen::MatrixXd x(4, 2);
  x << 1, 2, 2, 4, -1, -2, -2, -4;
  Rng rng(1);
  const DiffMatrix pairs = pairwise_differentiate(series(x), 1, rng);
  try {
    exact_sfa(x, pairs, 1);
    FAIL("expected RankDeficient");
  } catch (const RankDeficient& e) {
    CHECK(e.theta() < 1e-10);
  }
  ExactSfaOptions opts;
  opts.pseudo_inverse = true;
  CHECK(exact_sfa(x, pairs, 1, opts).rank == 1);
  CHECK_THROWS_AS(exact_sfa(Eigen::MatrixXd::Identity(3, 3), pairwise_differentiate(series(Eigen::MatrixXd::Identity(3, 3)), 1, rng), 4),
                  InvalidInput);
}

// ------------------------------------------------------------- delta_value

TEST_CASE("delta_value examples") {
  DiffMatrix ctx;
  ctx.pairs = {{0, 1}, {2, 3}};
  CHECK(delta_value(Eigen::VectorXd::Constant(4, 2.5), ctx) == 0.0);
  // Classes {0, 1} and {2, 3}: ((1 - 3)^2 + (0 - 4)^2) / 2 = 10.
  CHECK(delta_value(Eigen::Vector4d(1, 3, 0, 4), ctx) == 10.0);
  // A coordinate constant within each class is perfectly slow.
  CHECK(delta_value(Eigen::Vector4d(-1, -1, 1, 1), ctx) == 0.0);
}

// ------------------------------------------------------------------ dataset

TEST_CASE("dataset CSV round trip keeps labels") {
  const auto path = std::filesystem::temp_directory_path() / "sketch_sfa_dataset_roundtrip.csv";
  Dataset ds = labelled(Eigen::MatrixXd::Random(5, 2), {0, 1, 0, 1, 2});
  ds.columns = {"a", "b"};
  save_dataset(path.string(), ds);
  const Dataset back = load_dataset(path.string(), "label");
  CHECK(back.mode == DataMode::Classification);
  CHECK(back.labels == ds.labels);
  CHECK((back.x - ds.x).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(class_ids(back) == std::vector<long>{0, 1, 2});
  std::filesystem::remove(path);
}
