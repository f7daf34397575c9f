#include <algorithm>
#include <cstdint>

#include "paqreg/chem.hpp"

namespace paqreg::chem {

ClusterResult butina_cluster(std::span<const Fingerprint> fps, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw InputError("butina_cluster: threshold must be in (0, 1]");
  ClusterResult result;
  result.threshold = threshold;
  const std::size_t n = fps.size();
  if (n == 0) return result;
  for (const auto& fp : fps)
    if (fp.width() != fps[0].width()) throw InputError("butina_cluster: fingerprint widths differ");

  // Neighbour lists are independent per row. An empty fingerprint has no
  // defined similarity and therefore no neighbours.
  std::vector<std::vector<std::size_t>> neighbours(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (fps[ui].popcount() == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == ui || fps[j].popcount() == 0) continue;
      if (tanimoto(fps[ui], fps[j]) >= threshold) neighbours[ui].push_back(j);
    }
  }

  std::vector<char> assigned(n, 0);
  std::vector<std::size_t> live(n);
  for (std::size_t i = 0; i < n; ++i) live[i] = neighbours[i].size();

  std::size_t remaining = n;
  while (remaining > 0) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!assigned[i] && (best == n || live[i] > live[best])) best = i;

    std::vector<std::size_t> cluster{best};
    for (std::size_t j : neighbours[best])
      if (!assigned[j]) cluster.push_back(j);
    for (std::size_t m : cluster) {
      assigned[m] = 1;
      --remaining;
      for (std::size_t k : neighbours[m]) --live[k];
    }
    result.clusters.push_back(std::move(cluster));
  }

  std::stable_sort(result.clusters.begin(), result.clusters.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
  for (const auto& c : result.clusters)
    if (c.size() == 1) ++result.singleton_count;
  return result;
}

nlohmann::json ClusterResult::to_json(const std::vector<std::string>* ids) const {
  nlohmann::json cl = nlohmann::json::array();
  for (const auto& c : clusters) {
    nlohmann::json members = nlohmann::json::array();
    for (std::size_t m : c) {
      if (ids)
        members.push_back(ids->at(m));
      else
        members.push_back(m);
    }
    cl.push_back(std::move(members));
  }
  return {{"threshold", threshold},
          {"n_clusters", clusters.size() - singleton_count},
          {"n_singletons", singleton_count},
          {"clusters", cl}};
}

}  // namespace paqreg::chem
