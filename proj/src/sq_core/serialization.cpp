#include "sketch_sfa/sq_core/serialization.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <vector>

#include "sketch_sfa/sq_core/errors.hpp"

namespace sketch_sfa {

namespace {

constexpr std::array<char, 4> kVectorMagic{'S', 'Q', 'T', '1'};
constexpr std::array<char, 4> kMatrixMagic{'S', 'Q', 'M', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((v >> (8 * b)) & 0xFFu);
  out.write(bytes.data(), bytes.size());
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw InvalidInput("truncated binary stream");
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | bytes[b];
  return v;
}

void put_f64s(std::ostream& out, std::span<const double> values) {
  for (double v : values) put_u64(out, std::bit_cast<std::uint64_t>(v));
}

std::vector<double> get_f64s(std::istream& in, std::uint64_t count) {
  std::vector<double> values;
  values.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) values.push_back(std::bit_cast<double>(get_u64(in)));
  return values;
}

void expect_magic(std::istream& in, const std::array<char, 4>& magic) {
  std::array<char, 4> got{};
  in.read(got.data(), got.size());
  if (!in || got != magic) {
    throw InvalidInput(std::string("bad magic bytes, expected ") + std::string(magic.data(), magic.size()));
  }
}

std::uint64_t checked_count(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) throw InvalidInput("zero dimension in binary header");
  if (a > std::numeric_limits<std::uint64_t>::max() / b / 8) throw InvalidInput("binary header dimensions overflow");
  return a * b;
}

}  // namespace

void write_binary(std::ostream& out, const WeightTree& tree) {
  out.write(kVectorMagic.data(), kVectorMagic.size());
  put_u64(out, tree.size());
  put_f64s(out, tree.values());
}

void write_binary(std::ostream& out, const MatrixSQ& matrix) {
  out.write(kMatrixMagic.data(), kMatrixMagic.size());
  put_u64(out, matrix.rows());
  put_u64(out, matrix.cols());
  put_f64s(out, matrix.values());
}

WeightTree read_weight_tree(std::istream& in, std::shared_ptr<CostLedger> ledger) {
  expect_magic(in, kVectorMagic);
  const auto n = get_u64(in);
  const auto values = get_f64s(in, checked_count(n, 1));
  return WeightTree(values, std::move(ledger));
}

MatrixSQ read_matrix_sq(std::istream& in, std::shared_ptr<CostLedger> ledger) {
  expect_magic(in, kMatrixMagic);
  const auto n = get_u64(in);
  const auto d = get_u64(in);
  const auto values = get_f64s(in, checked_count(n, d));
  return MatrixSQ(n, d, values, std::move(ledger));
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot open " + path + " for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path + " for reading");
  return in;
}

}  // namespace

void save_binary(const std::string& path, const WeightTree& tree) {
  auto out = open_out(path);
  write_binary(out, tree);
}

void save_binary(const std::string& path, const MatrixSQ& matrix) {
  auto out = open_out(path);
  write_binary(out, matrix);
}

WeightTree load_weight_tree(const std::string& path, std::shared_ptr<CostLedger> ledger) {
  auto in = open_in(path);
  return read_weight_tree(in, std::move(ledger));
}

MatrixSQ load_matrix_sq(const std::string& path, std::shared_ptr<CostLedger> ledger) {
  auto in = open_in(path);
  return read_matrix_sq(in, std::move(ledger));
}

}  // namespace sketch_sfa
