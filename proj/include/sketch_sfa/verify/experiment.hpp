#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "sketch_sfa/sfa_exact/dataset.hpp"
#include "sketch_sfa/sfa_exact/exact_sfa.hpp"
#include "sketch_sfa/sfa_qi/model.hpp"
#include "sketch_sfa/sfa_qi/params.hpp"
#include "sketch_sfa/verify/datagen.hpp"

namespace sketch_sfa::verify {

/// Where select_parameters gets its spectrum: the dense oracle, or the
/// row-sampled estimate that keeps the whole pipeline sublinear.
enum class SpectraSource { Oracle, Estimated };

struct ExperimentConfig {
  BlobSpec blobs;
  std::size_t j = 2;
  double eps_target = 0.2;
  std::size_t max_pairs_per_class = 4096;
  SpectraSource spectra = SpectraSource::Oracle;
  std::size_t spectra_rows = 256;
  qi::QiConfig qi;
};

/// One seeded blob run: normalized data, pairs, dense oracle and sampled model.
struct BlobExperiment {
  std::uint64_t seed = 0;
  exact::Dataset data;
  exact::DiffMatrix diff;
  exact::SfaResult oracle;
  qi::PipelineParams params;
  qi::QiSfaModel model;
  /// X-entry reads spent estimating the spectrum (zero with the oracle source).
  LedgerSnapshot spectra_x_cost;

  /// X-entry reads of the sampled path: spectrum estimate plus all build steps.
  std::uint64_t x_entry_reads() const;
  /// Y / sqrt(n), the oracle on the model's output scale.
  Eigen::MatrixXd scaled_oracle_output() const;
  /// Aligned |Y - sqrt(n) Y_hat|_F / |Y|_F.
  double relative_output_error() const;
};

/// Streams of Rng(seed): 1 data, 2 pair sampling, 3 build, 4 spectrum estimate.
BlobExperiment run_blob_experiment(const ExperimentConfig& config, std::uint64_t seed);

}  // namespace sketch_sfa::verify
