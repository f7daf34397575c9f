#include <exception>

#include "paqreg/train/cv.hpp"

namespace paqreg::train {

namespace {

MeanStd summarize(const std::vector<Evaluation>& evals, double Metrics::*field, bool train_side) {
  std::vector<double> v;
  v.reserve(evals.size());
  for (const auto& e : evals) v.push_back((train_side ? e.train : e.test).*field);
  return {mean(v), pstdev(v)};
}

nlohmann::json ms_json(const MeanStd& m) { return {{"mean", m.mean}, {"std", m.std}}; }

}  // namespace

nlohmann::json CvSummary::to_json(bool with_evaluations) const {
  nlohmann::json j{{"n_folds", n_folds},
                   {"n_iterations", n_iterations},
                   {"n_evaluations", evaluations.size()},
                   {"test", {{"r2", ms_json(r2)}, {"mae", ms_json(mae)}, {"rmse", ms_json(rmse)}}},
                   {"train",
                    {{"r2", ms_json(train_r2)},
                     {"mae", ms_json(train_mae)},
                     {"rmse", ms_json(train_rmse)}}}};
  if (with_evaluations) {
    auto& arr = j["evaluations"] = nlohmann::json::array();
    for (const auto& e : evaluations)
      arr.push_back({{"iteration", e.iteration},
                     {"fold", e.fold},
                     {"test", train::to_json(e.test)},
                     {"train", train::to_json(e.train)}});
  }
  return j;
}

CvSummary cross_validate(const models::ModelFactory& factory, const ingest::FeatureMatrix& X,
                         std::span<const double> y, const ingest::FoldPlan& plan, const CvOptions& options) {
  if (plan.n_rows != X.n_rows()) throw InputError("cv: fold plan covers a different number of rows than X");
  if (y.size() != X.n_rows()) throw InputError("cv: target length does not match rows");

  struct Split {
    std::vector<std::size_t> train, test;
  };
  std::vector<Split> splits;
  std::vector<Evaluation> evals;
  for (std::size_t it = 0; it < plan.n_iterations; ++it)
    for (std::size_t f = 0; f < plan.n_folds; ++f) {
      Split s{plan.train_rows(it, f), plan.test_rows(it, f)};
      if (s.test.size() < 2)
        throw InputError("cv: iteration " + std::to_string(it) + " fold " + std::to_string(f) +
                         " has fewer than 2 test rows");
      splits.push_back(std::move(s));
      Evaluation e;
      e.iteration = it;
      e.fold = f;
      evals.push_back(std::move(e));
    }

  std::exception_ptr failure;
  const auto n_splits = static_cast<std::ptrdiff_t>(splits.size());
#pragma omp parallel for schedule(dynamic) if (options.parallel)
  for (std::ptrdiff_t i = 0; i < n_splits; ++i) {
    try {
      auto& ev = evals[static_cast<std::size_t>(i)];
      const auto& sp = splits[static_cast<std::size_t>(i)];
      Matrix Xtr = X.values.select_rows(sp.train);
      Matrix Xte = X.values.select_rows(sp.test);
      if (options.normalize) {
        ev.norm = ingest::fit_normalizer(X, sp.train);
        Xtr = ingest::apply_normalizer(Xtr, ev.norm);
        Xte = ingest::apply_normalizer(Xte, ev.norm);
      }
      std::vector<double> ytr, yte;
      for (auto r : sp.train) ytr.push_back(y[r]);
      for (auto r : sp.test) yte.push_back(y[r]);
      auto model = factory();
      model->fit(Xtr, ytr);
      ev.train = compute_metrics(ytr, model->predict(Xtr));
      ev.test = compute_metrics(yte, model->predict(Xte));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  CvSummary s;
  s.n_folds = plan.n_folds;
  s.n_iterations = plan.n_iterations;
  s.evaluations = std::move(evals);
  s.r2 = summarize(s.evaluations, &Metrics::r2, false);
  s.mae = summarize(s.evaluations, &Metrics::mae, false);
  s.rmse = summarize(s.evaluations, &Metrics::rmse, false);
  s.train_r2 = summarize(s.evaluations, &Metrics::r2, true);
  s.train_mae = summarize(s.evaluations, &Metrics::mae, true);
  s.train_rmse = summarize(s.evaluations, &Metrics::rmse, true);
  return s;
}

}  // namespace paqreg::train
