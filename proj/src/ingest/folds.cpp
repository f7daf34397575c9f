#include <numeric>

#include "paqreg/ingest.hpp"

namespace paqreg::ingest {

FoldPlan make_folds(std::size_t n_rows, std::size_t n_folds, std::size_t n_iterations, std::uint64_t seed) {
  if (n_folds < 2) throw InputError("make_folds: need at least 2 folds");
  if (n_rows < n_folds) throw InputError("make_folds: fewer rows than folds");
  if (n_iterations < 1) throw InputError("make_folds: need at least 1 iteration");

  FoldPlan plan{n_rows, n_folds, n_iterations, seed, {}};
  const std::size_t base = n_rows / n_folds;
  const std::size_t extra = n_rows % n_folds;
  for (std::size_t it = 0; it < n_iterations; ++it) {
    Rng rng(mix_seed(seed, it));
    std::vector<std::size_t> order(n_rows);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<std::size_t> fold_of(n_rows);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < n_folds; ++f) {
      const std::size_t size = base + (f < extra ? 1 : 0);
      for (std::size_t k = 0; k < size; ++k) fold_of[order[pos++]] = f;
    }
    plan.assignments.push_back(std::move(fold_of));
  }
  return plan;
}

std::vector<std::size_t> FoldPlan::test_rows(std::size_t iteration, std::size_t fold) const {
  std::vector<std::size_t> rows;
  const auto& a = assignments.at(iteration);
  for (std::size_t r = 0; r < a.size(); ++r)
    if (a[r] == fold) rows.push_back(r);
  return rows;
}

std::vector<std::size_t> FoldPlan::train_rows(std::size_t iteration, std::size_t fold) const {
  std::vector<std::size_t> rows;
  const auto& a = assignments.at(iteration);
  for (std::size_t r = 0; r < a.size(); ++r)
    if (a[r] != fold) rows.push_back(r);
  return rows;
}

}  // namespace paqreg::ingest
