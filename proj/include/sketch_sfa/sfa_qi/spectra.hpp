#pragma once

#include <cstddef>

#include "sketch_sfa/sfa_qi/params.hpp"
#include "sketch_sfa/sq_core/sq_matrix.hpp"

namespace sketch_sfa::qi {

/// Spectral summary from row samples only. X and Xdot (already scaled) are
/// each sketched with `rows` draws from D_Ã; the covariance estimates give
/// the singular values of X, |Xdot| and, through the estimated whitening,
/// gamma. Frobenius norms are read from the structures.
SpectralSummary estimate_spectra(const SQMatrix& x, const SQMatrix& xdot, Rng& rng, std::size_t rows = 256);

}  // namespace sketch_sfa::qi
