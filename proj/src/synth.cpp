#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "paqreg/synth.hpp"
#include "paqreg/text.hpp"

namespace paqreg {

namespace {

enum class ColKind { Informative, Constant, Missing, NearDuplicate, HomoLumo, Noise };

struct Column {
  ColKind kind;
  std::size_t ref = 0;  ///< latent factor, or informative column for duplicates
  double loading = 1.0;
  double noise = 0.5;
  double offset = 0.0;
  double scale = 1.0;
};

std::string random_smiles(Rng& rng) {
  static const char* atoms[] = {"C", "C", "C", "N", "O", "c1ccccc1", "C(=O)", "N(C)", "S", "P"};
  const std::size_t len = 2 + rng.below(8);
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s += atoms[rng.below(i == 0 ? 5 : 10)];
  return s;
}

}  // namespace

SynthData make_synthetic(const SynthOptions& o) {
  const std::size_t n_special = 6 + 4;  // constant, missing, duplicate pairs + homo/lumo/mu/eta
  if (o.n_informative < 1 || o.n_latent < 1) throw InputError("synth: need informative columns and latents");
  if (o.n_features < o.n_informative + n_special)
    throw InputError("synth: n_features must be at least n_informative + " + std::to_string(n_special));
  if (o.n_rows < 20) throw InputError("synth: need at least 20 rows");

  Rng rng(o.seed);
  std::vector<Column> cols;
  for (std::size_t j = 0; j < o.n_informative; ++j)
    cols.push_back({ColKind::Informative, j % o.n_latent, rng.uniform(0.8, 1.2), rng.uniform(0.35, 0.6),
                    rng.uniform(-5, 5), rng.uniform(0.5, 3.0)});
  for (int i = 0; i < 2; ++i) cols.push_back({ColKind::Constant, 0, 0, 0, rng.uniform(-1, 1), 1});
  for (int i = 0; i < 2; ++i) cols.push_back({ColKind::Missing, 0, 0, 1, 0, 1});
  for (int i = 0; i < 2; ++i) cols.push_back({ColKind::NearDuplicate, static_cast<std::size_t>(i), 1, 0.01, 1, 2});
  for (int i = 0; i < 4; ++i) cols.push_back({ColKind::HomoLumo, static_cast<std::size_t>(i), 0, 0, 0, 1});
  while (cols.size() < o.n_features) cols.push_back({ColKind::Noise, 0, 0, 1, rng.uniform(-3, 3), rng.uniform(0.2, 4)});

  // Column positions are shuffled so informative ones are not simply first.
  std::vector<std::size_t> pos(cols.size());
  std::iota(pos.begin(), pos.end(), 0);
  rng.shuffle(std::span<std::size_t>(pos));

  std::vector<double> coef(o.n_latent);
  for (std::size_t k = 0; k < o.n_latent; ++k) coef[k] = 8.0 / (1.0 + 0.45 * static_cast<double>(k));

  SynthData out;
  auto& ds = out.dataset;
  ds.features.column_names.resize(cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    std::string name;
    switch (cols[c].kind) {
      case ColKind::HomoLumo: {
        static const char* qc[] = {"e_homo", "e_lumo", "mu", "eta"};
        name = qc[cols[c].ref];
        break;
      }
      default: {
        char buf[16];
        std::snprintf(buf, sizeof buf, "desc_%03zu", pos[c]);
        name = buf;
      }
    }
    ds.features.column_names[pos[c]] = name;
    if (cols[c].kind == ColKind::Informative) out.informative_columns.push_back(name);
  }

  const std::size_t n_bad_elements = o.curation_cases ? 6 : 0;
  const std::size_t n_stereo_pairs = o.curation_cases ? 12 : 0;
  const std::size_t n_base = o.n_rows - n_bad_elements - n_stereo_pairs;

  ds.features.values = Matrix(o.n_rows, cols.size());
  std::vector<std::vector<double>> latents;
  std::size_t r = 0;
  std::vector<double> z(o.n_latent), row(cols.size());
  while (r < n_base + n_bad_elements) {
    for (double& v : z) v = rng.normal();
    double t = 0.0;
    for (std::size_t k = 0; k < o.n_latent; ++k) t += coef[k] * z[k];
    t += 4.0 * std::sin(1.5 * z[0]);
    if (o.n_latent >= 3) t += 1.5 * z[1] * z[2];
    const double pa = 205.0 + t + o.target_noise * rng.normal();
    // Draws that land outside the physical range are redrawn; the values of
    // rejected draws are discarded in full so later rows stay aligned.
    std::vector<double> eps(cols.size());
    for (double& e : eps) e = rng.normal();
    if (pa < 151.0 || pa > 259.0) continue;

    const double homo = -0.35 + 0.05 * eps[0];
    const double lumo = 0.02 + 0.05 * eps[1];
    const auto d = chem::make_descriptors(homo, lumo, 0.0, 0.0, 0.0);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto& col = cols[c];
      double v = 0.0;
      switch (col.kind) {
        case ColKind::Informative:
          v = col.offset + col.scale * (col.loading * z[col.ref] + col.noise * eps[c]);
          break;
        case ColKind::Constant:
          v = col.offset;
          break;
        case ColKind::Missing:
          v = (r % 37 == 5) ? std::nan("") : eps[c];
          break;
        case ColKind::NearDuplicate:
          v = 0.0;  // filled below from the source column
          break;
        case ColKind::HomoLumo: {
          const double vals[] = {d.e_homo, d.e_lumo, d.mu, d.eta};
          v = vals[col.ref];
          break;
        }
        case ColKind::Noise:
          v = col.offset + col.scale * eps[c];
          break;
      }
      row[c] = v;
    }
    for (std::size_t c = 0; c < cols.size(); ++c)
      if (cols[c].kind == ColKind::NearDuplicate)
        row[c] = cols[c].offset + cols[c].scale * row[cols[c].ref] + cols[c].noise * eps[c];
    for (std::size_t c = 0; c < cols.size(); ++c) ds.features.values(r, pos[c]) = row[c];

    ingest::MoleculeRecord rec;
    char id[16];
    std::snprintf(id, sizeof id, "mol%04zu", r);
    rec.id = id;
    rec.smiles = random_smiles(rng);
    if (r >= n_base) rec.smiles += (r % 2 == 0) ? "[Fe+2]" : "Cl";
    rec.pa = std::round(pa * 1000.0) / 1000.0;
    rec.group_key = "g" + rec.id.substr(3);
    ds.records.push_back(rec);
    ++r;
  }

  // Stereoisomer partners: copies of early records under the same group_key,
  // half within the merge tolerance and half outside it.
  for (std::size_t p = 0; p < n_stereo_pairs; ++p, ++r) {
    const std::size_t src = 3 * p + 1;
    auto rec = ds.records[src];
    rec.id += "b";
    rec.pa += (p % 2 == 0) ? 0.4 : 2.5;
    ds.records.push_back(rec);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const double v = ds.features.values(src, c);
      ds.features.values(r, c) = std::isfinite(v) ? v + 1e-3 * rng.normal() : v;
    }
  }

  // Fingerprints: a few scaffold families with per-molecule bit flips.
  const std::size_t w = o.fingerprint_width;
  std::vector<std::vector<std::size_t>> scaffolds(20);
  for (auto& s : scaffolds)
    for (std::size_t b = 0; b < w / 8; ++b) s.push_back(rng.below(w));
  for (const auto& rec : ds.records) {
    chem::Fingerprint fp(w);
    if (rng.uniform() < 0.3) {
      for (auto b : scaffolds[rng.below(scaffolds.size())])
        if (rng.uniform() < 0.95) fp.set(b);
    } else {
      for (std::size_t b = 0; b < w / 10; ++b) fp.set(rng.below(w));
    }
    if (fp.popcount() == 0) fp.set(0);
    out.fingerprints.ids.push_back(rec.id);
    out.fingerprints.fps.push_back(std::move(fp));
  }
  return out;
}

}  // namespace paqreg
