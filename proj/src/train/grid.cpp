#include <limits>

#include "paqreg/train/cv.hpp"

namespace paqreg::train {

void set_dotted(nlohmann::json& j, const std::string& path, const nlohmann::json& value) {
  nlohmann::json* cur = &j;
  std::size_t start = 0;
  for (;;) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw InputError("grid: empty key in path '" + path + "'");
    if (!cur->is_object()) *cur = nlohmann::json::object();
    if (dot == std::string::npos) {
      (*cur)[key] = value;
      return;
    }
    cur = &(*cur)[key];
    start = dot + 1;
  }
}

nlohmann::json GridResult::to_json() const {
  nlohmann::json table = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json row{{"config", r.config}, {"diverged", r.diverged}};
    if (r.diverged) {
      row["error"] = r.error;
      row["mae"] = nullptr;
    } else {
      row["cv"] = r.summary.to_json(false);
      row["mae"] = r.mae;
      row["rmse"] = r.rmse;
    }
    table.push_back(std::move(row));
  }
  return {{"best_index", best}, {"best_config", best_config()}, {"results", std::move(table)}};
}

GridResult grid_search(const std::function<std::unique_ptr<models::Regressor>(const nlohmann::json&)>& factory,
                       const nlohmann::json& base_spec, const ParamGrid& grid, const ingest::FeatureMatrix& X,
                       std::span<const double> y, const ingest::FoldPlan& plan, const CvOptions& options) {
  std::size_t total = 1;
  for (const auto& [key, values] : grid) {
    if (values.empty()) throw InputError("grid: key '" + key + "' has no candidate values");
    total *= values.size();
  }

  GridResult result;
  std::vector<std::size_t> idx(grid.size(), 0);
  for (std::size_t r = 0; r < total; ++r) {
    GridRow row;
    row.config = base_spec;
    for (std::size_t k = 0; k < grid.size(); ++k) set_dotted(row.config, grid[k].first, grid[k].second[idx[k]]);
    try {
      const nlohmann::json cfg = row.config;
      row.summary = cross_validate([&] { return factory(cfg); }, X, y, plan, options);
      row.mae = row.summary.mae.mean;
      row.rmse = row.summary.rmse.mean;
    } catch (const NumericError& e) {
      row.diverged = true;
      row.error = e.what();
      row.mae = row.rmse = std::numeric_limits<double>::infinity();
    }
    result.rows.push_back(std::move(row));
    for (std::size_t k = grid.size(); k-- > 0;) {
      if (++idx[k] < grid[k].second.size()) break;
      idx[k] = 0;
    }
  }

  for (std::size_t r = 1; r < result.rows.size(); ++r) {
    const auto& a = result.rows[r];
    const auto& b = result.rows[result.best];
    if (a.mae < b.mae || (a.mae == b.mae && a.rmse < b.rmse)) result.best = r;
  }
  return result;
}

}  // namespace paqreg::train
