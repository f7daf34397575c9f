#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "paqreg/chem.hpp"
#include "paqreg/ingest.hpp"

namespace paqreg {

struct SynthOptions {
  std::size_t n_rows = 1000;
  std::size_t n_features = 186;
  std::size_t n_informative = 64;
  std::size_t n_latent = 8;
  double target_noise = 1.0;  ///< kcal/mol
  std::uint64_t seed = 0;
  /// Adds records for the curation step to act on: non-organic elements and
  /// stereoisomer pairs.
  bool curation_cases = true;
  std::size_t fingerprint_width = 167;
};

struct SynthData {
  ingest::Dataset dataset;
  chem::NamedFingerprints fingerprints;
  std::vector<std::string> informative_columns;
};

/// Seeded pseudo-descriptor table with a proton-affinity-like target in
/// [150, 260]. Informative columns are noisy views of a few latent factors;
/// the target is linear in the latents plus smooth nonlinear terms. The rest
/// are noise, constants, columns with missing values and near-duplicates.
SynthData make_synthetic(const SynthOptions& options);

}  // namespace paqreg
