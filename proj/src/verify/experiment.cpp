#include "sketch_sfa/verify/experiment.hpp"

#include <cmath>

#include "sketch_sfa/sfa_exact/preprocess.hpp"
#include "sketch_sfa/sfa_qi/spectra.hpp"
#include "sketch_sfa/verify/alignment.hpp"

namespace sketch_sfa::verify {

std::uint64_t BlobExperiment::x_entry_reads() const {
  std::uint64_t reads = spectra_x_cost.entry_reads;
  for (const auto& s : model.steps()) reads += s.x_cost.entry_reads;
  return reads;
}

Eigen::MatrixXd BlobExperiment::scaled_oracle_output() const {
  return oracle.y / std::sqrt(static_cast<double>(data.rows()));
}

double BlobExperiment::relative_output_error() const {
  const Eigen::MatrixXd y_hat = model.output_matrix() * std::sqrt(static_cast<double>(data.rows()));
  return aligned_distance(oracle.y, y_hat) / oracle.y.norm();
}

BlobExperiment run_blob_experiment(const ExperimentConfig& config, std::uint64_t seed) {
  const Rng root(seed);
  BlobExperiment e;
  e.seed = seed;
  Rng data_rng = root.derive(1);
  e.data = exact::normalize(make_blobs(config.blobs, data_rng));
  Rng pair_rng = root.derive(2);
  e.diff = exact::pairwise_differentiate(e.data, config.max_pairs_per_class, pair_rng);
  e.oracle = exact::exact_sfa(e.data.x, e.diff, config.j);

  qi::QiInputs inputs = qi::make_qi_inputs(e.data.x, e.diff);
  qi::SpectralSummary spectra;
  if (config.spectra == SpectraSource::Oracle) {
    spectra = qi::summarize(e.oracle);
  } else {
    Rng spectra_rng = root.derive(4);
    const LedgerSnapshot before = inputs.x.ledger->snapshot();
    spectra = qi::estimate_spectra(*inputs.x.a, *inputs.xdot.a, spectra_rng, config.spectra_rows);
    e.spectra_x_cost = inputs.x.ledger->snapshot() - before;
  }
  e.params = qi::select_parameters(config.eps_target, spectra, e.data.cols(), config.j, seed);
  Rng build_rng = root.derive(3);
  e.model = qi::build(std::move(inputs), e.params, build_rng, config.qi);
  return e;
}

}  // namespace sketch_sfa::verify
