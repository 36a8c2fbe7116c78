#include <doctest.h>

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

#include "sketch_sfa/sq_core/cost_ledger.hpp"
#include "sketch_sfa/sq_core/errors.hpp"
#include "sketch_sfa/sq_core/io.hpp"
#include "sketch_sfa/sq_core/matrix_sq.hpp"
#include "sketch_sfa/sq_core/rng.hpp"
#include "sketch_sfa/sq_core/serialization.hpp"
#include "sketch_sfa/sq_core/sq_handle.hpp"
#include "sketch_sfa/sq_core/weight_tree.hpp"
#include "sketch_sfa/verify/chi_square.hpp"
#include "sketch_sfa/verify/datagen.hpp"

using namespace sketch_sfa;

namespace {

std::vector<double> gaussian_values(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

double naive_squared_sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

// Every internal node equals the sum of its children.
void check_parent_sums(const WeightTree& t) {
  for (std::size_t k = 1; k < t.capacity(); ++k) {
    const double children = t.node(2 * k) + t.node(2 * k + 1);
    REQUIRE(t.node(k) == doctest::Approx(children).epsilon(1e-12));
  }
}

unsigned ceil_log2(std::size_t n) { return n <= 1 ? 0 : static_cast<unsigned>(std::bit_width(n - 1)); }

}  // namespace

TEST_CASE("build_vector: (3, 4) stores squares at the leaves and 25 at the root") {
  const std::vector<double> v{3.0, 4.0};
  const WeightTree t = build_vector(v);
  CHECK(t.squared_norm() == 25.0);
  CHECK(t.node(t.capacity()) == 9.0);
  CHECK(t.node(t.capacity() + 1) == 16.0);
  CHECK(t.norm() == 5.0);
  CHECK(t.query(1) == 4.0);
}

TEST_CASE("build_vector: (1, 0, 0, 0) has root 1") {
  const std::vector<double> v{1.0, 0.0, 0.0, 0.0};
  CHECK(build_vector(v).squared_norm() == 1.0);
}

TEST_CASE("build_vector: root of a random 1024-vector matches naive summation") {
  const auto v = gaussian_values(1024, 11);
  CHECK(build_vector(v).squared_norm() == doctest::Approx(naive_squared_sum(v)).epsilon(1e-9));
}

TEST_CASE("build_vector: empty input is rejected") {
  const std::vector<double> empty;
  CHECK_THROWS_AS(build_vector(empty), InvalidInput);
}

TEST_CASE("build_vector reads each entry once") {
  auto ledger = std::make_shared<CostLedger>();
  const auto v = gaussian_values(300, 3);
  build_vector(v, ledger);
  CHECK(ledger->snapshot().entry_reads == 300);
}

TEST_CASE("update: small cases") {
  SUBCASE("(3, 4), second entry set to 0") {
    const std::vector<double> v{3.0, 4.0};
    WeightTree t = build_vector(v);
    t.update(1, 0.0);
    CHECK(t.squared_norm() == 9.0);
  }
  SUBCASE("(1, 1, 1, 1), first entry set to 3") {
    const std::vector<double> v{1.0, 1.0, 1.0, 1.0};
    WeightTree t = build_vector(v);
    t.update(0, 3.0);
    CHECK(t.squared_norm() == 12.0);
  }
}

TEST_CASE("update: out-of-range index") {
  const std::vector<double> v{1.0, 2.0, 3.0};
  WeightTree t = build_vector(v);
  CHECK_THROWS_AS(t.update(3, 1.0), IndexError);
  CHECK_THROWS_AS(t.query(7), IndexError);
}

TEST_CASE("update: 500 random updates on a 256-vector match a rebuild") {
  auto v = gaussian_values(256, 5);
  WeightTree t = build_vector(v);
  Rng rng(6);
  for (int k = 0; k < 500; ++k) {
    const auto i = static_cast<std::size_t>(rng.below(v.size()));
    v[i] = rng.normal();
    t.update(i, v[i]);
  }
  CHECK(t.squared_norm() == doctest::Approx(build_vector(v).squared_norm()).epsilon(1e-8));
}

TEST_CASE("update touches at most ceil(log2 n) + 1 nodes") {
  for (std::size_t n : {2u, 5u, 64u, 1000u, 4097u}) {
    auto ledger = std::make_shared<CostLedger>();
    WeightTree t = build_vector(gaussian_values(n, n), ledger);
    ledger->reset();
    t.update(n - 1, 2.5);
    CHECK(ledger->snapshot().node_touches <= ceil_log2(n) + 1);
  }
}

TEST_CASE("property: parent sums hold after random interleavings of builds and updates") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const std::size_t n = 1 + static_cast<std::size_t>(rng.below(300));
    auto v = gaussian_values(n, seed + 100);
    WeightTree t = build_vector(v);
    const int steps = 1 + static_cast<int>(rng.below(400));
    for (int s = 0; s < steps; ++s) {
      if (rng.uniform() < 0.05) {
        t = build_vector(v);
      } else {
        const auto i = static_cast<std::size_t>(rng.below(n));
        // Include zeros and large magnitudes in the schedule.
        const double u = rng.uniform();
        v[i] = u < 0.2 ? 0.0 : (u < 0.3 ? 1e6 * rng.normal() : rng.normal());
        t.update(i, v[i]);
      }
    }
    check_parent_sums(t);
    for (std::size_t i = 0; i < n; ++i) REQUIRE(t.query(i) == v[i]);
  }
}

TEST_CASE("sample: (3, 4) has probabilities 0.36 and 0.64") {
  const std::vector<double> v{3.0, 4.0};
  const WeightTree t = build_vector(v);
  CHECK(t.probability(0) == doctest::Approx(0.36));
  CHECK(t.probability(1) == doctest::Approx(0.64));
}

TEST_CASE("sample: (1, 0, 0) always returns the first index") {
  const std::vector<double> v{1.0, 0.0, 0.0};
  const WeightTree t = build_vector(v);
  Rng rng(1);
  for (int k = 0; k < 10000; ++k) REQUIRE(t.sample(rng) == 0);
}

TEST_CASE("sample: never returns a zero-weight leaf") {
  std::vector<double> v(37, 0.0);
  v[3] = 1e-300;
  v[20] = 2.0;
  v[36] = 1.0;
  const WeightTree t = build_vector(v);
  Rng rng(2);
  for (int k = 0; k < 20000; ++k) {
    const std::size_t i = t.sample(rng);
    REQUIRE(v[i] != 0.0);
  }
}

TEST_CASE("sample: all-zero vector is degenerate") {
  const std::vector<double> v{0.0, 0.0, 0.0};
  const WeightTree t = build_vector(v);
  Rng rng(1);
  CHECK_THROWS_AS(t.sample(rng), DegenerateDistribution);
  CHECK_THROWS_AS(t.sample_counts(10, rng), DegenerateDistribution);
}

TEST_CASE("sample: uniform 4-vector passes chi-square at 1e6 draws") {
  const std::vector<double> v{1.0, 1.0, 1.0, 1.0};
  const SQHandle h = SQHandle::from_values(v);
  const std::vector<double> expected{0.25, 0.25, 0.25, 0.25};
  Rng rng(20240601);
  const auto report = verify::chi_square_test(h, expected, 1'000'000, rng);
  CHECK(report.pass);
}

TEST_CASE("property: total variation below 0.01 at 1e6 samples for n <= 100") {
  for (std::size_t n : {2u, 3u, 10u, 57u, 100u}) {
    const auto v = gaussian_values(n, 40 + n);
    const WeightTree t = build_vector(v);
    std::vector<std::uint64_t> counts(n, 0);
    Rng rng(n);
    const int draws = 1'000'000;
    for (int k = 0; k < draws; ++k) ++counts[t.sample(rng)];
    double tv = 0.0;
    for (std::size_t i = 0; i < n; ++i) tv += std::abs(static_cast<double>(counts[i]) / draws - t.probability(i));
    CHECK(tv / 2.0 < 0.01);
  }
}

TEST_CASE("property: per-sample node touches stay within 2 ceil(log2 n) + 2") {
  for (unsigned p = 4; p <= 20; p += 4) {
    const std::size_t n = std::size_t{1} << p;
    auto ledger = std::make_shared<CostLedger>();
    const WeightTree t = build_vector(gaussian_values(n, p), ledger);
    Rng rng(p);
    ledger->reset();
    const int draws = 1000;
    for (int k = 0; k < draws; ++k) t.sample(rng);
    const auto touches = ledger->snapshot().node_touches;
    CHECK(touches <= static_cast<std::uint64_t>(draws) * (2 * ceil_log2(n) + 2));
  }
}

TEST_CASE("sample_counts: aggregated draws are ascending, sum to the draw count and follow D_v") {
  const auto v = gaussian_values(200, 9);
  const WeightTree t = build_vector(v);
  Rng rng(10);
  const std::size_t draws = 1'000'000;
  const auto counts = t.sample_counts(draws, rng);
  std::vector<std::uint64_t> dense(v.size(), 0);
  std::size_t total = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (k > 0) REQUIRE(counts[k - 1].first < counts[k].first);
    dense[counts[k].first] = counts[k].second;
    total += counts[k].second;
  }
  CHECK(total == draws);
  std::vector<double> expected(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) expected[i] = t.probability(i);
  CHECK(verify::pearson_chi_square(dense, expected).p_value > 0.001);
}

TEST_CASE("norm of a stored vector is exact and ignores nu") {
  const std::vector<double> v{3.0, 4.0};
  const SQHandle h = SQHandle::from_values(v);
  Rng rng(1);
  CHECK(h.exact_norm());
  CHECK(h.norm(0.5, rng) == 5.0);
  CHECK(h.norm(1e-9, rng) == 5.0);
  CHECK(h.kind() == HandleKind::StoredVector);
}

TEST_CASE("reaggregate leaves an exact tree unchanged") {
  WeightTree t = build_vector(gaussian_values(100, 4));
  const double before = t.squared_norm();
  t.reaggregate();
  CHECK(t.squared_norm() == doctest::Approx(before).epsilon(1e-14));
  CHECK(t.updates_since_aggregation() == 0);
}

TEST_CASE("build_matrix: [[1, 0], [0, 2]]") {
  Eigen::MatrixXd a(2, 2);
  a << 1, 0, 0, 2;
  const MatrixSQ m = build_matrix(a);
  CHECK(m.row_squared_norm(0) == 1.0);
  CHECK(m.row_squared_norm(1) == 4.0);
  CHECK(m.frobenius_squared() == 5.0);
  CHECK(m.row_norm_tree().probability(1) == doctest::Approx(0.8));
  CHECK(m.entry(1, 1) == 2.0);
  CHECK_THROWS_AS(m.entry(2, 0), IndexError);
}

TEST_CASE("build_matrix: identity rows are sampled uniformly") {
  const MatrixSQ m = build_matrix(Eigen::MatrixXd::Identity(4, 4));
  Rng rng(3);
  std::vector<std::uint64_t> counts(4, 0);
  for (int k = 0; k < 1'000'000; ++k) ++counts[m.sample_row(rng)];
  const std::vector<double> expected(4, 0.25);
  CHECK(verify::pearson_chi_square(counts, expected).p_value > 0.001);
}

TEST_CASE("build_matrix: two-stage sampling of a random 128 x 16 matrix matches A(i,j)^2 / |A|_F^2") {
  Rng gen(12);
  const Eigen::MatrixXd a = verify::gaussian_matrix(128, 16, gen);
  const MatrixSQ m = build_matrix(a);
  std::vector<double> expected(static_cast<std::size_t>(a.size()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      expected[static_cast<std::size_t>(i * a.cols() + j)] = a(i, j) * a(i, j) / a.squaredNorm();
    }
  }
  Rng rng(13);
  const auto report = verify::chi_square_test(
      "two_stage",
      [&](Rng& r) {
        const std::size_t i = m.sample_row(r);
        return i * 16 + m.sample_in_row(i, r);
      },
      expected, 1'000'000, rng);
  CHECK(report.pass);
}

TEST_CASE("build_matrix: an all-zero matrix fails on the first sample") {
  const MatrixSQ m = build_matrix(Eigen::MatrixXd::Zero(3, 2));
  Rng rng(1);
  CHECK_THROWS_AS(m.sample_row(rng), DegenerateDistribution);
  CHECK_THROWS_AS(m.sample_row_counts(5, rng), DegenerateDistribution);
  CHECK_THROWS_AS(m.sample_in_row(0, rng), DegenerateDistribution);
}

TEST_CASE("MatrixSQ updates keep row trees and the row-norm tree consistent") {
  Rng rng(21);
  Eigen::MatrixXd a = verify::gaussian_matrix(20, 7, rng);
  MatrixSQ m = build_matrix(a);
  for (int k = 0; k < 300; ++k) {
    const auto i = static_cast<std::size_t>(rng.below(20));
    const auto j = static_cast<std::size_t>(rng.below(7));
    a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.uniform() < 0.2 ? 0.0 : rng.normal();
    m.update(i, j, a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  }
  for (std::size_t i = 0; i < 20; ++i) {
    const double row_sq = a.row(static_cast<Eigen::Index>(i)).squaredNorm();
    CHECK(m.row_squared_norm(i) == doctest::Approx(row_sq).epsilon(1e-12));
    CHECK(m.row_node(i, 1) == doctest::Approx(row_sq).epsilon(1e-12));
  }
  CHECK(m.frobenius_squared() == doctest::Approx(a.squaredNorm()).epsilon(1e-12));
  CHECK(m.materialize() == a);
}

TEST_CASE("MatrixSQ::sample_row_counts follows D_A-tilde") {
  Rng gen(30);
  const Eigen::MatrixXd a = verify::gaussian_matrix(64, 5, gen);
  const MatrixSQ m = build_matrix(a);
  Rng rng(31);
  const auto counts = m.sample_row_counts(500'000, rng);
  std::vector<std::uint64_t> dense(64, 0);
  for (auto [row, c] : counts) dense[row] = c;
  std::vector<double> expected(64);
  for (Eigen::Index i = 0; i < 64; ++i) expected[static_cast<std::size_t>(i)] = a.row(i).squaredNorm() / a.squaredNorm();
  CHECK(verify::pearson_chi_square(dense, expected).p_value > 0.001);
}

TEST_CASE("matrix_row handle exposes one row") {
  Eigen::MatrixXd a(2, 3);
  a << 1, 2, 2, 0, 3, 4;
  const auto m = std::make_shared<MatrixSQ>(build_matrix(a));
  const SQHandle h = SQHandle::matrix_row(m, 1);
  Rng rng(1);
  CHECK(h.size() == 3);
  CHECK(h.query(2) == 4.0);
  CHECK(h.norm(0.1, rng) == 5.0);
  CHECK(h.kind() == HandleKind::StoredMatrixRow);
  CHECK_THROWS_AS(SQHandle::matrix_row(m, 2), IndexError);
}

TEST_CASE("Rng: seeding and derived streams") {
  Rng a(42);
  Rng b(42);
  for (int k = 0; k < 100; ++k) REQUIRE(a() == b());
  const Rng root(42);
  Rng s1 = root.derive(1);
  Rng s1_again = root.derive(1);
  Rng s2 = root.derive(2);
  CHECK(s1.key() == s1_again.key());
  CHECK(s1.key() != s2.key());
  CHECK(s1() != s2());
  Rng u(7);
  for (int k = 0; k < 1000; ++k) {
    const double x = u.uniform();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    REQUIRE(u.below(13) < 13);
  }
}

TEST_CASE("splitmix64 reference values") {
  // First output of the reference generator started from state 0.
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("binary serialization round-trips trees and matrices") {
  const WeightTree t = build_vector(gaussian_values(77, 8));
  std::stringstream buf;
  write_binary(buf, t);
  const WeightTree back = read_weight_tree(buf);
  REQUIRE(back.size() == t.size());
  for (std::size_t k = 1; k < 2 * t.capacity(); ++k) REQUIRE(back.node(k) == t.node(k));

  Rng gen(9);
  const MatrixSQ m = build_matrix(verify::gaussian_matrix(9, 4, gen));
  std::stringstream mbuf;
  write_binary(mbuf, m);
  const MatrixSQ mback = read_matrix_sq(mbuf);
  CHECK(mback.materialize() == m.materialize());
  CHECK(mback.frobenius_squared() == m.frobenius_squared());
}

TEST_CASE("CSV round-trips doubles bit for bit") {
  Rng gen(14);
  Eigen::MatrixXd a = verify::gaussian_matrix(6, 3, gen);
  a(0, 0) = 1e-310;
  a(1, 1) = -0.1;
  std::stringstream buf;
  write_csv(buf, a, {"a", "b", "c"});
  const CsvTable back = read_csv(buf);
  CHECK(back.header == std::vector<std::string>{"a", "b", "c"});
  CHECK(back.values == a);
}

TEST_CASE("CSV without a header") {
  std::stringstream buf("1,2\n3,4\n");
  const CsvTable t = read_csv(buf);
  CHECK(t.header.empty());
  CHECK(t.values.rows() == 2);
  CHECK(t.values(1, 0) == 3.0);
}

TEST_CASE("CSV with ragged rows is rejected") {
  std::stringstream buf("a,b\n1,2\n3\n");
  CHECK_THROWS_AS(read_csv(buf), InvalidInput);
}

TEST_CASE("errors carry kind and step") {
  const RejectionStall e("too many trials", "step4");
  CHECK(e.kind() == ErrorKind::RejectionStall);
  CHECK(e.step() == "step4");
  CHECK(to_string(ErrorKind::BudgetExceeded) == "BudgetExceeded");
}
