#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include "sketch_sfa/sq_core/matrix_sq.hpp"
#include "sketch_sfa/sq_core/weight_tree.hpp"

namespace sketch_sfa {

// Versioned little-endian binary formats:
//   vector: "SQT1" | u64 n | f64[n]
//   matrix: "SQM1" | u64 n | u64 d | f64[n*d] (row-major)
// Only leaf values are stored; trees are rebuilt on load.

void write_binary(std::ostream& out, const WeightTree& tree);
void write_binary(std::ostream& out, const MatrixSQ& matrix);
WeightTree read_weight_tree(std::istream& in, std::shared_ptr<CostLedger> ledger = nullptr);
MatrixSQ read_matrix_sq(std::istream& in, std::shared_ptr<CostLedger> ledger = nullptr);

void save_binary(const std::string& path, const WeightTree& tree);
void save_binary(const std::string& path, const MatrixSQ& matrix);
WeightTree load_weight_tree(const std::string& path, std::shared_ptr<CostLedger> ledger = nullptr);
MatrixSQ load_matrix_sq(const std::string& path, std::shared_ptr<CostLedger> ledger = nullptr);

}  // namespace sketch_sfa
