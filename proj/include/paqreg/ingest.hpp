#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "paqreg/common.hpp"

namespace paqreg::ingest {

/// Thrown by scan_elements; `offset` is the byte position of the problem.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t offset) : InputError(what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

struct MoleculeRecord {
  std::string id;
  std::string smiles;
  double pa = 0.0;  ///< proton affinity, kcal/mol
  std::string group_key;
};

struct NormStats {
  std::vector<double> mean;
  std::vector<double> std;
};

struct FeatureMatrix {
  std::vector<std::string> column_names;
  Matrix values;
  std::optional<NormStats> norm_stats;

  std::size_t n_rows() const { return values.rows; }
  std::size_t n_cols() const { return values.cols; }
  /// Throws InputError on a name/width mismatch or duplicate names.
  void validate() const;
  std::size_t column_index(std::string_view name) const;
  FeatureMatrix select_columns(std::span<const std::size_t> idx) const;
  FeatureMatrix select_rows(std::span<const std::size_t> idx) const;
};

/// Records plus their feature rows, aligned by position.
struct Dataset {
  std::vector<MoleculeRecord> records;
  FeatureMatrix features;

  std::vector<double> targets() const;
};

/// Element symbols appearing as atoms in a SMILES string. Handles bracket
/// atoms, the organic subset (including Cl and Br) and aromatic lowercase
/// forms; bonds, rings, branches, charges and H counts are skipped.
std::set<std::string> scan_elements(std::string_view smiles);

// ---- CSV -------------------------------------------------------------------

/// Reads a dataset CSV: header row with reserved columns id, smiles,
/// group_key, pa; every other column is a feature. Empty cells and "nan"
/// become NaN. Errors carry the 1-based line number.
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv_file(const std::string& path);
void write_dataset_csv(std::ostream& out, const Dataset& data);

/// Splits one CSV line into fields (RFC 4180 quoting).
std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no);

// ---- curation --------------------------------------------------------------

struct CurationOptions {
  std::set<std::string> allowed_elements{"C", "H", "N", "O", "P", "S"};
  double stereo_tolerance = 1.0;  ///< kcal/mol
  double pa_min = 150.0;
  double pa_max = 260.0;
};

struct CurationReport {
  std::size_t input_records = 0;
  std::size_t removed_by_elements = 0;
  std::size_t removed_by_pa_range = 0;
  std::size_t removed_unparseable = 0;
  std::size_t stereo_groups_merged = 0;
  std::size_t records_merged_away = 0;
  std::size_t stereo_groups_kept = 0;  ///< groups whose spread reached the tolerance
  std::size_t output_records = 0;
  std::vector<std::string> removed_ids;

  nlohmann::json to_json() const;
};

struct CurationResult {
  Dataset data;
  CurationReport report;
};

/// Element filter, PA range filter, then stereoisomer handling: records that
/// share a group_key collapse to one record carrying the mean PA (and mean
/// features) when max - min < tolerance; otherwise all are kept.
CurationResult curate(const Dataset& data, const CurationOptions& options = {});
std::pair<std::vector<MoleculeRecord>, CurationReport> curate(const std::vector<MoleculeRecord>& records,
                                                              const CurationOptions& options = {});

// ---- feature filtering and normalisation ------------------------------------

enum class RemovalReason { Missing, LowVariance, Correlated };

struct RemovalEntry {
  std::string column;
  RemovalReason reason;
  std::string partner;  ///< kept column it correlated with
  double value = 0.0;   ///< variance or |r|
};

struct FilterResult {
  FeatureMatrix matrix;
  std::vector<std::size_t> kept;  ///< indices into the input columns
  std::vector<RemovalEntry> removed;

  nlohmann::json log_json() const;
};

/// Drops non-finite columns, then columns with population variance below
/// `var_threshold`, then the later column of every pair with
/// |Pearson r| >= `corr_threshold`.
FilterResult filter_features(const FeatureMatrix& m, double corr_threshold = 0.9, double var_threshold = 1e-8);

/// Per-column mean and population std over `rows`.
NormStats fit_normalizer(const FeatureMatrix& m, std::span<const std::size_t> rows);
NormStats fit_normalizer(const FeatureMatrix& m);
FeatureMatrix apply_normalizer(const FeatureMatrix& m, const NormStats& stats);
Matrix apply_normalizer(const Matrix& m, const NormStats& stats);
Matrix inverse_normalizer(const Matrix& m, const NormStats& stats);

// ---- folds -----------------------------------------------------------------

struct FoldPlan {
  std::size_t n_rows = 0;
  std::size_t n_folds = 0;
  std::size_t n_iterations = 0;
  std::uint64_t seed = 0;
  /// assignments[iteration][row] = fold id
  std::vector<std::vector<std::size_t>> assignments;

  std::vector<std::size_t> test_rows(std::size_t iteration, std::size_t fold) const;
  std::vector<std::size_t> train_rows(std::size_t iteration, std::size_t fold) const;
};

/// Independent seeded shuffle per iteration, cut into near-equal folds (the
/// first n_rows % n_folds folds get one extra row).
FoldPlan make_folds(std::size_t n_rows, std::size_t n_folds, std::size_t n_iterations, std::uint64_t seed);

}  // namespace paqreg::ingest
