#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "paqreg/common.hpp"

namespace paqreg::chem {

/// Fixed-width bit vector with a cached popcount.
class Fingerprint {
 public:
  Fingerprint() = default;
  explicit Fingerprint(std::size_t width);
  static Fingerprint from_bits(std::size_t width, std::span<const std::size_t> set_bits);
  /// Hex digit k holds bits 4k..4k+3, most significant nibble bit first.
  static Fingerprint from_hex(std::size_t width, std::string_view hex);
  /// Byte k holds bits 8k..8k+7, most significant bit first.
  static Fingerprint from_base64(std::size_t width, std::string_view b64);

  std::size_t width() const { return width_; }
  std::size_t popcount() const { return popcount_; }
  bool test(std::size_t bit) const { return (words_[bit / 64] >> (bit % 64)) & 1U; }
  void set(std::size_t bit);
  std::span<const std::uint64_t> words() const { return words_; }
  std::string to_hex() const;

  bool operator==(const Fingerprint&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t popcount_ = 0;
  std::vector<std::uint64_t> words_;
};

struct NamedFingerprints {
  std::vector<std::string> ids;
  std::vector<Fingerprint> fps;
};

/// CSV with `id` and `fp_hex` (or `fp_b64`) columns; width from a leading
/// `# width=N` comment line.
NamedFingerprints read_fingerprints_csv(std::istream& in);
NamedFingerprints read_fingerprints_file(const std::string& path);
void write_fingerprints_csv(std::ostream& out, const NamedFingerprints& fps);

/// c / (a + b - c) over set-bit counts.
double tanimoto(const Fingerprint& a, const Fingerprint& b);

struct SimilarityStats {
  double mean = 0.0;
  double std = 0.0;  ///< population
  std::size_t pairs = 0;
};

/// Statistics over all n(n-1)/2 unordered pairs, evaluated in parallel.
SimilarityStats mean_pairwise_similarity(std::span<const Fingerprint> fps);
namespace serial {
SimilarityStats mean_pairwise_similarity(std::span<const Fingerprint> fps);
}

struct ClusterResult {
  std::vector<std::vector<std::size_t>> clusters;  ///< centroid first; descending size
  std::size_t singleton_count = 0;
  double threshold = 0.0;

  nlohmann::json to_json(const std::vector<std::string>* ids = nullptr) const;
};

/// Butina sphere exclusion: repeatedly take the unassigned item with the most
/// unassigned neighbours (similarity >= threshold, lowest index on ties) and
/// claim it together with those neighbours.
ClusterResult butina_cluster(std::span<const Fingerprint> fps, double threshold);

struct DerivedDescriptors {
  double e_homo = 0.0;  ///< hartree
  double e_lumo = 0.0;  ///< hartree
  double mu = 0.0;      ///< chemical potential
  double eta = 0.0;     ///< hardness
  double dipole = 0.0;  ///< debye
  double q_mk = 0.0;    ///< most negative Merz-Kollman charge
  double q_cm5 = 0.0;   ///< most negative CM5 charge
};

struct PotentialHardness {
  double mu;
  double eta;
};

/// mu = (homo + lumo) / 2, eta = (lumo - homo) / 2
PotentialHardness derive_qc(double e_homo, double e_lumo);
DerivedDescriptors make_descriptors(double e_homo, double e_lumo, double dipole, double q_mk, double q_cm5);

}  // namespace paqreg::chem
