#include <bit>
#include <cmath>
#include <cstdint>

#include "paqreg/chem.hpp"

namespace paqreg::chem {

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.width() != b.width())
    throw InputError("tanimoto: width mismatch (" + std::to_string(a.width()) + " vs " + std::to_string(b.width()) + ")");
  if (a.popcount() == 0 && b.popcount() == 0) throw InputError("tanimoto: both fingerprints are empty");
  std::size_t common = 0;
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) common += static_cast<std::size_t>(std::popcount(wa[i] & wb[i]));
  return static_cast<double>(common) / static_cast<double>(a.popcount() + b.popcount() - common);
}

namespace {

void require_pairs(std::span<const Fingerprint> fps) {
  if (fps.size() < 2) throw InputError("mean_pairwise_similarity: need at least 2 fingerprints");
}

}  // namespace

SimilarityStats mean_pairwise_similarity(std::span<const Fingerprint> fps) {
  require_pairs(fps);
  const auto n = static_cast<std::int64_t>(fps.size());
  // Per-row partial sums, reduced afterwards in row order so the result does
  // not depend on the thread count.
  std::vector<double> row_sum(fps.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::int64_t j = i + 1; j < n; ++j) s += tanimoto(fps[i], fps[j]);
    row_sum[i] = s;
  }
  const std::size_t pairs = fps.size() * (fps.size() - 1) / 2;
  double total = 0.0;
  for (double s : row_sum) total += s;
  const double mean = total / static_cast<double>(pairs);

  std::vector<double> row_ss(fps.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::int64_t j = i + 1; j < n; ++j) {
      const double d = tanimoto(fps[i], fps[j]) - mean;
      s += d * d;
    }
    row_ss[i] = s;
  }
  double ss = 0.0;
  for (double s : row_ss) ss += s;
  return {mean, std::sqrt(ss / static_cast<double>(pairs)), pairs};
}

namespace serial {

SimilarityStats mean_pairwise_similarity(std::span<const Fingerprint> fps) {
  require_pairs(fps);
  std::vector<double> sims;
  for (std::size_t i = 0; i < fps.size(); ++i)
    for (std::size_t j = i + 1; j < fps.size(); ++j) sims.push_back(tanimoto(fps[i], fps[j]));
  return {paqreg::mean(sims), paqreg::pstdev(sims), sims.size()};
}

}  // namespace serial

PotentialHardness derive_qc(double e_homo, double e_lumo) {
  return {(e_homo + e_lumo) / 2.0, (e_lumo - e_homo) / 2.0};
}

DerivedDescriptors make_descriptors(double e_homo, double e_lumo, double dipole, double q_mk, double q_cm5) {
  const auto [mu, eta] = derive_qc(e_homo, e_lumo);
  return {e_homo, e_lumo, mu, eta, dipole, q_mk, q_cm5};
}

}  // namespace paqreg::chem
