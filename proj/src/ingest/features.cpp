#include <cmath>
#include <numeric>
#include <unordered_set>

#include "paqreg/ingest.hpp"

namespace paqreg::ingest {

void FeatureMatrix::validate() const {
  if (column_names.size() != values.cols)
    throw InputError("feature matrix: " + std::to_string(column_names.size()) + " names for " +
                     std::to_string(values.cols) + " columns");
  if (values.data.size() != values.rows * values.cols) throw InputError("feature matrix: storage size mismatch");
  std::unordered_set<std::string> seen;
  for (const auto& n : column_names)
    if (!seen.insert(n).second) throw InputError("feature matrix: duplicate column '" + n + "'");
  if (norm_stats && (norm_stats->mean.size() != values.cols || norm_stats->std.size() != values.cols))
    throw InputError("feature matrix: normalisation stats width mismatch");
}

std::size_t FeatureMatrix::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < column_names.size(); ++i)
    if (column_names[i] == name) return i;
  throw InputError("unknown feature column '" + std::string(name) + "'");
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::size_t> idx) const {
  FeatureMatrix out;
  for (std::size_t i : idx) out.column_names.push_back(column_names.at(i));
  out.values = values.select_cols(idx);
  if (norm_stats) {
    NormStats s;
    for (std::size_t i : idx) {
      s.mean.push_back(norm_stats->mean[i]);
      s.std.push_back(norm_stats->std[i]);
    }
    out.norm_stats = std::move(s);
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> idx) const {
  FeatureMatrix out{column_names, values.select_rows(idx), norm_stats};
  return out;
}

nlohmann::json FilterResult::log_json() const {
  nlohmann::json removed_json = nlohmann::json::array();
  for (const auto& r : removed) {
    nlohmann::json e{{"column", r.column}};
    switch (r.reason) {
      case RemovalReason::Missing:
        e["reason"] = "missing";
        break;
      case RemovalReason::LowVariance:
        e["reason"] = "low_variance";
        e["variance"] = r.value;
        break;
      case RemovalReason::Correlated:
        e["reason"] = "correlated";
        e["partner"] = r.partner;
        e["abs_r"] = r.value;
        break;
    }
    removed_json.push_back(std::move(e));
  }
  return {{"kept", matrix.column_names.size()}, {"removed_count", removed.size()}, {"removed", removed_json}};
}

FilterResult filter_features(const FeatureMatrix& m, double corr_threshold, double var_threshold) {
  m.validate();
  const std::size_t n = m.n_rows();
  if (n < 2) throw InputError("filter_features: need at least 2 rows");
  const auto dn = static_cast<double>(n);

  FilterResult result;
  std::vector<std::size_t> candidates;
  std::vector<double> col_mean(m.n_cols()), col_sd(m.n_cols());
  for (std::size_t c = 0; c < m.n_cols(); ++c) {
    bool finite = true;
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double v = m.values(r, c);
      if (!std::isfinite(v)) {
        finite = false;
        break;
      }
      s += v;
    }
    if (!finite) {
      result.removed.push_back({m.column_names[c], RemovalReason::Missing, {}, 0.0});
      continue;
    }
    const double mu = s / dn;
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) ss += (m.values(r, c) - mu) * (m.values(r, c) - mu);
    const double var = ss / dn;
    if (var < var_threshold) {
      result.removed.push_back({m.column_names[c], RemovalReason::LowVariance, {}, var});
      continue;
    }
    col_mean[c] = mu;
    col_sd[c] = std::sqrt(var);
    candidates.push_back(c);
  }

  // Greedy in column order: a column survives only if it is below the
  // threshold against every column kept before it.
  for (std::size_t c : candidates) {
    bool keep = true;
    for (std::size_t k : result.kept) {
      double cov = 0.0;
      for (std::size_t r = 0; r < n; ++r) cov += (m.values(r, c) - col_mean[c]) * (m.values(r, k) - col_mean[k]);
      const double corr = std::abs(cov / dn / (col_sd[c] * col_sd[k]));
      if (corr >= corr_threshold) {
        result.removed.push_back({m.column_names[c], RemovalReason::Correlated, m.column_names[k], corr});
        keep = false;
        break;
      }
    }
    if (keep) result.kept.push_back(c);
  }
  result.matrix = m.select_columns(result.kept);
  result.matrix.norm_stats.reset();
  return result;
}

NormStats fit_normalizer(const FeatureMatrix& m, std::span<const std::size_t> rows) {
  m.validate();
  if (rows.size() < 2) throw InputError("fit_normalizer: need at least 2 fitting rows");
  NormStats s;
  s.mean.resize(m.n_cols());
  s.std.resize(m.n_cols());
  const auto dn = static_cast<double>(rows.size());
  for (std::size_t c = 0; c < m.n_cols(); ++c) {
    double sum = 0.0;
    for (std::size_t r : rows) sum += m.values(r, c);
    const double mu = sum / dn;
    double ss = 0.0;
    for (std::size_t r : rows) ss += (m.values(r, c) - mu) * (m.values(r, c) - mu);
    const double sd = std::sqrt(ss / dn);
    if (!(sd > 0.0) || !std::isfinite(sd))
      throw InputError("fit_normalizer: column '" + m.column_names[c] + "' has zero or undefined spread");
    s.mean[c] = mu;
    s.std[c] = sd;
  }
  return s;
}

NormStats fit_normalizer(const FeatureMatrix& m) {
  std::vector<std::size_t> rows(m.n_rows());
  std::iota(rows.begin(), rows.end(), 0);
  return fit_normalizer(m, rows);
}

Matrix apply_normalizer(const Matrix& m, const NormStats& stats) {
  if (stats.mean.size() != m.cols || stats.std.size() != m.cols)
    throw InputError("apply_normalizer: stats width does not match matrix");
  Matrix out = m;
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.cols; ++c) out(r, c) = (m(r, c) - stats.mean[c]) / stats.std[c];
  return out;
}

FeatureMatrix apply_normalizer(const FeatureMatrix& m, const NormStats& stats) {
  FeatureMatrix out{m.column_names, apply_normalizer(m.values, stats), stats};
  return out;
}

Matrix inverse_normalizer(const Matrix& m, const NormStats& stats) {
  if (stats.mean.size() != m.cols || stats.std.size() != m.cols)
    throw InputError("inverse_normalizer: stats width does not match matrix");
  Matrix out = m;
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.cols; ++c) out(r, c) = m(r, c) * stats.std[c] + stats.mean[c];
  return out;
}

}  // namespace paqreg::ingest
