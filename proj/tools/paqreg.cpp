// paqreg: command-line front end for the proton-affinity regression toolkit.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <numbers>
#include <numeric>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "paqreg/chem.hpp"
#include "paqreg/ingest.hpp"
#include "paqreg/models/nn.hpp"
#include "paqreg/models/select.hpp"
#include "paqreg/models/trees.hpp"
#include "paqreg/qsim/qsim.hpp"
#include "paqreg/synth.hpp"
#include "paqreg/text.hpp"
#include "paqreg/train/cv.hpp"

using nlohmann::json;
using namespace paqreg;

namespace {

// ---- effective configuration ------------------------------------------------

// defaults < --config file < PAQREG_SEED < explicit flags
struct Command {
  std::string name;
  CLI::App* app = nullptr;
  json defaults;
  std::vector<std::function<void(json&)>> flag_overrides;
  std::function<int(const json&)> run;

  template <typename T>
  void flag(const std::string& spelling, const std::string& key, const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(spelling, *value, help);
    flag_overrides.push_back([value, opt, key](json& cfg) {
      if (opt->count() > 0) train::set_dotted(cfg, key, json(*value));
    });
  }
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("write to '" + path + "' failed");
}

void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

json effective_config(const Command& cmd, const std::string& config_path) {
  json cfg = cmd.defaults;
  if (!config_path.empty()) {
    json file = read_json_file(config_path);
    if (!file.is_object()) throw InputError("config file must hold a JSON object");
    // A file may carry one section per command.
    if (file.contains(cmd.name) && file.at(cmd.name).is_object()) file = file.at(cmd.name);
    cfg.merge_patch(file);
  }
  if (const char* env = std::getenv("PAQREG_SEED"); env && *env) {
    const auto v = text::parse_number(env);
    if (!v || !std::isfinite(*v) || *v < 0 || *v != std::floor(*v))
      throw InputError(std::string("PAQREG_SEED must be a non-negative integer, got '") + env + "'");
    cfg["seed"] = static_cast<std::uint64_t>(*v);
  }
  for (const auto& f : cmd.flag_overrides) f(cfg);
  return cfg;
}

std::string need_path(const json& cfg, const std::string& key) {
  const auto p = cfg.value(key, std::string());
  if (p.empty()) throw InputError("missing required setting '" + key + "'");
  return p;
}

// ---- shared data preparation -------------------------------------------------

struct Prepared {
  ingest::FeatureMatrix X;
  std::vector<double> y;
  std::vector<std::string> ids;
  json filter_log;
  json curation;
};

/// Copies the global seed into every seed field of a model spec.
void seed_model_spec(json& spec, std::uint64_t seed) {
  const auto kind = spec.value("kind", std::string());
  if (kind == "gbdt" || kind == "random_forest") {
    spec["seed"] = seed;
  } else if (kind == "mlp" || kind == "hybrid") {
    spec["train"]["seed"] = seed;
    if (kind == "hybrid") spec["circuit_seed"] = seed;
  } else if (kind == "voting" && spec.contains("members")) {
    std::uint64_t k = 0;
    for (auto& m : spec["members"])
      if (m.contains("model")) seed_model_spec(m["model"], mix_seed(seed, k++));
  }
}

json default_model_spec(const std::string& kind) {
  if (kind == "gbdt") return models::TreeEnsembleSpec::gbdt_defaults().to_json();
  if (kind == "random_forest") return models::TreeEnsembleSpec::random_forest_defaults().to_json();
  if (kind == "mlp") return {{"kind", "mlp"}, {"train", train::TrainConfig{}.to_json()}};
  if (kind == "hybrid") return models::make_model({{"kind", "hybrid"}})->spec_json();
  if (kind == "voting")
    return {{"kind", "voting"},
            {"members",
             {{{"weight", 1.5}, {"model", default_model_spec("gbdt")}},
              {{"weight", 1.0}, {"model", default_model_spec("random_forest")}}}}};
  throw InputError("unknown model kind '" + kind + "'");
}

/// Model spec from cfg["model"]: a kind name, a path to a spec file, or an
/// inline object. Defaults for the kind are filled in underneath.
json resolve_model_spec(const json& cfg) {
  json spec = cfg.value("model", json("gbdt"));
  if (spec.is_string()) {
    const auto s = spec.get<std::string>();
    spec = (s.ends_with(".json")) ? read_json_file(s) : json{{"kind", s}};
  }
  if (!spec.is_object() || !spec.contains("kind")) throw InputError("model spec needs a \"kind\"");
  json full = default_model_spec(spec.at("kind").get<std::string>());
  full.merge_patch(spec);
  seed_model_spec(full, cfg.value("seed", std::uint64_t{0}));
  return full;
}

std::vector<std::size_t> gbdt_ranking(const ingest::FeatureMatrix& X, std::span<const double> y,
                                      std::uint64_t seed) {
  auto spec = models::TreeEnsembleSpec::gbdt_defaults();
  spec.seed = seed;
  models::TreeEnsemble ens(spec);
  ens.fit(X.values, y);
  const auto imp = ens.feature_importance();
  std::vector<std::size_t> order(imp.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return imp[a] > imp[b]; });
  return order;
}

Prepared prepare(const json& cfg) {
  ingest::Dataset data = ingest::read_dataset_csv_file(need_path(cfg, "input"));
  Prepared p;
  if (cfg.value("curate", true)) {
    ingest::CurationOptions co;
    co.stereo_tolerance = cfg.value("stereo_tolerance", co.stereo_tolerance);
    auto res = ingest::curate(data, co);
    p.curation = res.report.to_json();
    data = std::move(res.data);
  }
  if (data.records.size() < 2) throw InputError("need at least 2 records after curation");
  auto fr = ingest::filter_features(data.features, cfg.value("corr_threshold", 0.9), cfg.value("var_threshold", 1e-8));
  p.filter_log = fr.log_json();
  p.y = data.targets();
  for (const auto& r : data.records) p.ids.push_back(r.id);

  std::vector<std::size_t> cols;
  const auto features_path = cfg.value("features", std::string());
  const auto n_features = cfg.value("n_features", std::size_t{0});
  if (!features_path.empty()) {
    const json sel = read_json_file(features_path);
    const json* list = nullptr;
    if (sel.contains("selection")) {
      const auto& s = sel.at("selection");
      list = n_features > 0 ? &s.at("ranking") : &s.at("retained");
    } else {
      list = &sel.at("columns");
    }
    for (const auto& item : *list) {
      const auto name = item.is_object() ? item.at("column").get<std::string>() : item.get<std::string>();
      cols.push_back(fr.matrix.column_index(name));
      if (n_features > 0 && cols.size() == n_features) break;
    }
  } else if (n_features > 0) {
    cols = gbdt_ranking(fr.matrix, p.y, cfg.value("seed", std::uint64_t{0}));
  } else {
    cols.resize(fr.matrix.n_cols());
    std::iota(cols.begin(), cols.end(), 0);
  }
  if (n_features > 0) {
    if (cols.size() < n_features)
      throw InputError("requested " + std::to_string(n_features) + " features, only " + std::to_string(cols.size()) +
                       " available");
    cols.resize(n_features);
  }
  p.X = fr.matrix.select_columns(cols);
  return p;
}

void print_config(const std::string& command, const json& cfg) {
  std::cout << "config " << json{{"command", command}, {"settings", cfg}}.dump() << "\n";
}

// ---- commands ----------------------------------------------------------------

int run_gen_data(const json& cfg) {
  SynthOptions o;
  o.n_rows = cfg.at("rows").get<std::size_t>();
  o.n_features = cfg.at("features").get<std::size_t>();
  o.n_informative = cfg.at("informative").get<std::size_t>();
  o.seed = cfg.at("seed").get<std::uint64_t>();
  o.curation_cases = cfg.at("curation_cases").get<bool>();
  o.fingerprint_width = cfg.at("fp_width").get<std::size_t>();
  const auto data = make_synthetic(o);

  std::ostringstream csv;
  ingest::write_dataset_csv(csv, data.dataset);
  write_text_file(need_path(cfg, "output"), csv.str());
  if (const auto fp = cfg.value("fingerprints", std::string()); !fp.empty()) {
    std::ostringstream f;
    chem::write_fingerprints_csv(f, data.fingerprints);
    write_text_file(fp, f.str());
  }
  if (const auto truth = cfg.value("truth", std::string()); !truth.empty())
    write_json_file(truth, {{"config", cfg}, {"informative_columns", data.informative_columns}});
  std::cout << "rows " << data.dataset.records.size() << "\nfeatures " << data.dataset.features.n_cols()
            << "\ninformative " << data.informative_columns.size() << "\n";
  return 0;
}

int run_curate(const json& cfg) {
  const auto data = ingest::read_dataset_csv_file(need_path(cfg, "input"));
  if (data.records.empty()) std::cerr << "warning: input has no records\n";
  ingest::CurationOptions co;
  co.stereo_tolerance = cfg.at("stereo_tolerance").get<double>();
  co.pa_min = cfg.at("pa_min").get<double>();
  co.pa_max = cfg.at("pa_max").get<double>();
  co.allowed_elements.clear();
  for (const auto& e : cfg.at("elements")) co.allowed_elements.insert(e.get<std::string>());
  if (!(co.stereo_tolerance > 0.0)) throw InputError("stereo_tolerance must be > 0");

  const auto res = ingest::curate(data, co);
  std::ostringstream csv;
  ingest::write_dataset_csv(csv, res.data);
  write_text_file(need_path(cfg, "output"), csv.str());
  if (const auto rp = cfg.value("report", std::string()); !rp.empty())
    write_json_file(rp, {{"config", cfg}, {"report", res.report.to_json()}});

  const auto& r = res.report;
  std::cout << "input_records " << r.input_records << "\nremoved_unparseable " << r.removed_unparseable
            << "\nremoved_by_elements " << r.removed_by_elements << "\nremoved_by_pa_range " << r.removed_by_pa_range
            << "\nstereo_groups_merged " << r.stereo_groups_merged << "\noutput_records " << r.output_records << "\n";
  return 0;
}

int run_cluster(const json& cfg) {
  const auto fps = chem::read_fingerprints_file(need_path(cfg, "input"));
  const double threshold = cfg.at("threshold").get<double>();
  if (!(threshold > 0.0 && threshold <= 1.0)) throw InputError("threshold must be in (0, 1]");
  const auto res = chem::butina_cluster(fps.fps, threshold);

  json summary{{"n_items", fps.fps.size()},
               {"n_clusters", res.clusters.size() - res.singleton_count},
               {"n_singletons", res.singleton_count}};
  if (fps.fps.size() >= 2) {
    const auto s = chem::mean_pairwise_similarity(fps.fps);
    summary["mean_similarity"] = s.mean;
    summary["std_similarity"] = s.std;
    summary["pairs"] = s.pairs;
  }
  if (const auto out = cfg.value("output", std::string()); !out.empty())
    write_json_file(out, {{"config", cfg}, {"summary", summary}, {"result", res.to_json(&fps.ids)}});
  for (const auto& [k, v] : summary.items()) std::cout << k << " " << v.dump() << "\n";
  return 0;
}

int run_select(const json& cfg) {
  const Prepared p = prepare(cfg);
  models::SelectionOptions so;
  so.tolerance = cfg.at("tolerance").get<double>();
  so.step = cfg.at("step").get<std::size_t>();
  so.n_folds = cfg.at("folds").get<std::size_t>();
  so.n_iterations = cfg.at("iterations").get<std::size_t>();
  so.seed = cfg.at("seed").get<std::uint64_t>();
  const auto res = models::select_features(p.X, p.y, so);

  write_json_file(need_path(cfg, "output"), {{"config", cfg},
                                            {"curation", p.curation},
                                            {"filter", p.filter_log},
                                            {"selection", res.to_json(p.X.column_names)}});
  std::cout << "n_features cv_mae\n";
  for (const auto& s : res.trace) std::cout << s.n_features << " " << text::format_number(s.mae) << "\n";
  std::cout << "retained " << res.retained.size() << "\n";
  return 0;
}

int run_train(const json& cfg) {
  const Prepared p = prepare(cfg);
  const json spec = resolve_model_spec(cfg);
  auto model = models::make_model(spec);
  const auto norm = ingest::fit_normalizer(p.X);
  const Matrix Xn = ingest::apply_normalizer(p.X.values, norm);
  model->fit(Xn, p.y);
  const auto m = train::compute_metrics(p.y, model->predict(Xn));

  json ckpt = models::save_checkpoint(*model);
  ckpt["preprocess"] = {{"columns", p.X.column_names}, {"mean", norm.mean}, {"std", norm.std}};
  ckpt["config"] = cfg;
  ckpt["train_metrics"] = train::to_json(m);
  write_json_file(need_path(cfg, "output"), ckpt);
  std::cout << "model " << model->kind() << "\nrows " << p.X.n_rows() << "\nfeatures " << p.X.n_cols()
            << "\ntrain_r2 " << text::format_number(m.r2) << "\ntrain_mae " << text::format_number(m.mae)
            << "\ntrain_rmse " << text::format_number(m.rmse) << "\n";
  return 0;
}

int run_predict(const json& cfg) {
  const json ckpt = read_json_file(need_path(cfg, "model"));
  auto model = models::load_checkpoint(ckpt);
  const auto data = ingest::read_dataset_csv_file(need_path(cfg, "input"));
  if (!ckpt.contains("preprocess")) throw InputError("checkpoint has no preprocess section");
  const auto& pre = ckpt.at("preprocess");
  std::vector<std::size_t> cols;
  for (const auto& c : pre.at("columns")) cols.push_back(data.features.column_index(c.get<std::string>()));
  ingest::NormStats norm{pre.at("mean").get<std::vector<double>>(), pre.at("std").get<std::vector<double>>()};
  const Matrix X = ingest::apply_normalizer(data.features.values.select_cols(cols), norm);
  const auto pred = model->predict(X);

  std::ostringstream csv;
  csv << "id,pa,pa_pred\n";
  for (std::size_t i = 0; i < pred.size(); ++i)
    csv << text::csv_quote(data.records[i].id) << ',' << text::format_number(data.records[i].pa) << ','
        << text::format_number(pred[i]) << "\n";
  write_text_file(need_path(cfg, "output"), csv.str());
  std::cout << "rows " << pred.size() << "\n";
  if (data.records.size() >= 2) {
    const auto y = data.targets();
    if (pstdev(y) > 0.0) {
      const auto m = train::compute_metrics(y, pred);
      std::cout << "r2 " << text::format_number(m.r2) << "\nmae " << text::format_number(m.mae) << "\nrmse "
                << text::format_number(m.rmse) << "\n";
    }
  }
  return 0;
}

std::string cv_table_row(const std::string& label, const train::CvSummary& s) {
  std::ostringstream o;
  o << text::csv_quote(label) << ',' << text::format_number(s.r2.mean) << ',' << text::format_number(s.r2.std) << ','
    << text::format_number(s.mae.mean) << ',' << text::format_number(s.mae.std) << ','
    << text::format_number(s.rmse.mean) << ',' << text::format_number(s.rmse.std) << ',' << s.evaluations.size()
    << "\n";
  return o.str();
}

int run_cv(const json& cfg) {
  const Prepared p = prepare(cfg);
  const json spec = resolve_model_spec(cfg);
  const auto plan = ingest::make_folds(p.X.n_rows(), cfg.at("folds").get<std::size_t>(),
                                       cfg.at("iterations").get<std::size_t>(), cfg.at("seed").get<std::uint64_t>());
  train::CvOptions opts;
  opts.parallel = cfg.value("parallel", true);
  const std::string header = "model,r2_mean,r2_std,mae_mean,mae_std,rmse_mean,rmse_std,n_evaluations\n";
  const auto kind = spec.at("kind").get<std::string>();

  json out{{"config", cfg}, {"curation", p.curation}, {"filter", p.filter_log}, {"columns", p.X.column_names}};
  std::string table = header;
  if (const auto grid_path = cfg.value("grid", std::string()); !grid_path.empty()) {
    const json g = read_json_file(grid_path);
    if (!g.is_array()) throw InputError("grid file must be a list of [key, [values...]] pairs");
    train::ParamGrid grid;
    for (const auto& entry : g) grid.emplace_back(entry.at(0).get<std::string>(), entry.at(1).get<std::vector<json>>());
    const auto res = train::grid_search(models::make_model, spec, grid, p.X, p.y, plan, opts);
    out["grid"] = res.to_json();
    for (const auto& row : res.rows)
      if (!row.diverged) table += cv_table_row(row.config.dump(), row.summary);
    std::cout << "grid_rows " << res.rows.size() << "\nbest " << res.best_config().dump() << "\nbest_mae "
              << text::format_number(res.rows[res.best].mae) << "\n";
  } else {
    const auto summary = train::cross_validate([&] { return models::make_model(spec); }, p.X, p.y, plan, opts);
    out["model"] = spec;
    out["cv"] = summary.to_json();
    table += cv_table_row(kind, summary);
    std::cout << "model " << kind << "\nevaluations " << summary.evaluations.size() << "\nr2 "
              << text::format_number(summary.r2.mean) << " +- " << text::format_number(summary.r2.std) << "\nmae "
              << text::format_number(summary.mae.mean) << " +- " << text::format_number(summary.mae.std) << "\nrmse "
              << text::format_number(summary.rmse.mean) << " +- " << text::format_number(summary.rmse.std) << "\n";
  }
  if (const auto o = cfg.value("output", std::string()); !o.empty()) write_json_file(o, out);
  if (const auto t = cfg.value("table", std::string()); !t.empty()) write_text_file(t, table);
  return 0;
}

int run_params(const json& cfg) {
  const auto q = cfg.at("qubits").get<std::size_t>();
  const auto k = cfg.at("sub_encoders").get<std::size_t>();
  const auto p = cfg.at("params_per_qc").get<std::size_t>();
  const auto total = models::hybrid_param_count(q, k, p);
  std::cout << "circuit_params " << k * p << "\nhead_params " << models::mlp_param_count(k * q) << "\nt_params "
            << total << "\n";
  return 0;
}

int run_gradcheck(const json& cfg) {
  const auto nq = cfg.at("qubits").get<unsigned>();
  const auto np = cfg.at("params").get<std::size_t>();
  const auto nf = cfg.value("features", std::size_t{0}) == 0 ? nq : cfg.at("features").get<std::size_t>();
  const auto seed = cfg.at("seed").get<std::uint64_t>();
  const double h = cfg.at("h").get<double>();
  const double tol = cfg.at("tolerance").get<double>();

  const auto circuit = qsim::generate_circuit(nq, nf, np, seed);
  Rng rng(mix_seed(seed, 1));
  std::vector<double> f(nf), p(np);
  for (double& v : f) v = rng.uniform(-std::numbers::pi, std::numbers::pi);
  for (double& v : p) v = rng.uniform(-std::numbers::pi, std::numbers::pi);

  const Matrix ps = qsim::grad_param_shift(circuit, f, p);
  const auto adj = qsim::grad_adjoint(circuit, f, p, true);
  double dev_ps_fd = 0.0, dev_adj_ps = 0.0, dev_feat_fd = 0.0;
  auto fd = [&](std::vector<double>& v, std::size_t j, bool is_param) {
    const double keep = v[j];
    v[j] = keep + h;
    const auto up = qsim::run_circuit(circuit, f, p).values;
    v[j] = keep - h;
    const auto dn = qsim::run_circuit(circuit, f, p).values;
    v[j] = keep;
    std::vector<double> g(nq);
    for (unsigned q = 0; q < nq; ++q) g[q] = (up[q] - dn[q]) / (2.0 * h);
    (void)is_param;
    return g;
  };
  for (std::size_t j = 0; j < np; ++j) {
    const auto g = fd(p, j, true);
    for (unsigned q = 0; q < nq; ++q) {
      dev_ps_fd = std::max(dev_ps_fd, std::abs(ps(q, j) - g[q]));
      dev_adj_ps = std::max(dev_adj_ps, std::abs(adj.params(q, j) - ps(q, j)));
    }
  }
  for (std::size_t j = 0; j < nf; ++j) {
    const auto g = fd(f, j, false);
    for (unsigned q = 0; q < nq; ++q) dev_feat_fd = std::max(dev_feat_fd, std::abs(adj.features(q, j) - g[q]));
  }
  const double max_dev = std::max({dev_ps_fd, dev_adj_ps, dev_feat_fd});
  const bool ok = max_dev < tol;
  const json report{{"config", cfg},
                    {"param_shift_vs_finite_difference", dev_ps_fd},
                    {"adjoint_vs_param_shift", dev_adj_ps},
                    {"adjoint_features_vs_finite_difference", dev_feat_fd},
                    {"max_deviation", max_dev},
                    {"pass", ok}};
  if (const auto o = cfg.value("output", std::string()); !o.empty()) write_json_file(o, report);
  std::cout << "param_shift_vs_fd " << text::format_number(dev_ps_fd) << "\nadjoint_vs_param_shift "
            << text::format_number(dev_adj_ps) << "\nadjoint_features_vs_fd " << text::format_number(dev_feat_fd)
            << "\nmax_deviation " << text::format_number(max_dev) << "\n"
            << (ok ? "ok" : "FAILED") << "\n";
  return ok ? 0 : 3;
}

json data_defaults() {
  return {{"input", ""},
          {"curate", true},
          {"stereo_tolerance", 1.0},
          {"corr_threshold", 0.9},
          {"var_threshold", 1e-8},
          {"features", ""},
          {"n_features", 0},
          {"seed", 0}};
}

json with(json base, const json& extra) {
  base.merge_patch(extra);
  return base;
}

void data_flags(Command& c) {
  c.flag<std::string>("-i,--input", "input", "dataset CSV");
  c.flag<bool>("--curate", "curate", "apply curation before filtering (true/false)");
  c.flag<std::string>("--features", "features", "selection JSON whose retained columns are used, in rank order");
  c.flag<std::size_t>("--n-features", "n_features", "keep the top N ranked columns");
  c.flag<std::uint64_t>("--seed", "seed", "global seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"paqreg: hybrid quantum-classical proton affinity regression"};
  app.require_subcommand(1);
  std::string config_path;
  int threads = 0;
  app.add_option("--config", config_path, "JSON config file; flags override its values");
  app.add_option("--threads", threads, "worker threads (default: all cores)")->check(CLI::NonNegativeNumber);

  std::vector<std::unique_ptr<Command>> commands;
  auto add = [&](const std::string& name, const std::string& help, json defaults, std::function<int(const json&)> run) {
    auto c = std::make_unique<Command>();
    c->name = name;
    c->app = app.add_subcommand(name, help);
    c->defaults = std::move(defaults);
    c->run = std::move(run);
    commands.push_back(std::move(c));
    return commands.back().get();
  };

  {
    auto* c = add("gen-data", "write the bundled synthetic dataset",
                  {{"rows", 1000},
                   {"features", 186},
                   {"informative", 64},
                   {"seed", 0},
                   {"curation_cases", true},
                   {"fp_width", 167},
                   {"output", ""},
                   {"fingerprints", ""},
                   {"truth", ""}},
                  run_gen_data);
    c->flag<std::string>("-o,--output", "output", "dataset CSV to write");
    c->flag<std::string>("--fingerprints", "fingerprints", "also write a fingerprint CSV");
    c->flag<std::string>("--truth", "truth", "also write the list of informative columns");
    c->flag<std::size_t>("--rows", "rows", "number of rows");
    c->flag<std::uint64_t>("--seed", "seed", "generator seed");
  }
  {
    auto* c = add("curate", "element filter, PA range filter and stereoisomer merge",
                  {{"input", ""},
                   {"output", ""},
                   {"report", ""},
                   {"stereo_tolerance", 1.0},
                   {"pa_min", 150.0},
                   {"pa_max", 260.0},
                   {"elements", {"C", "H", "N", "O", "P", "S"}}},
                  run_curate);
    c->flag<std::string>("-i,--input", "input", "dataset CSV");
    c->flag<std::string>("-o,--output", "output", "curated CSV");
    c->flag<std::string>("--report", "report", "curation report JSON");
    c->flag<double>("--tolerance", "stereo_tolerance", "stereoisomer merge tolerance, kcal/mol");
  }
  {
    auto* c = add("cluster", "Butina clustering of fingerprints",
                  {{"input", ""}, {"output", ""}, {"threshold", 0.7}}, run_cluster);
    c->flag<std::string>("-i,--input", "input", "fingerprint CSV");
    c->flag<std::string>("-o,--output", "output", "clusters JSON");
    c->flag<double>("--threshold", "threshold", "similarity threshold");
  }
  {
    auto* c = add("select", "importance-ranked backward feature elimination",
                  with(data_defaults(),
                       {{"output", ""}, {"tolerance", 0.02}, {"step", 1}, {"folds", 5}, {"iterations", 1}}),
                  run_select);
    data_flags(*c);
    c->flag<std::string>("-o,--output", "output", "selection JSON");
    c->flag<double>("--tolerance", "tolerance", "relative MAE increase that stops elimination");
    c->flag<std::size_t>("--step", "step", "columns dropped per round");
  }
  {
    auto* c = add("train", "fit a model on all rows and write a checkpoint",
                  with(data_defaults(), {{"output", ""}, {"model", "gbdt"}}), run_train);
    data_flags(*c);
    c->flag<std::string>("-o,--output", "output", "checkpoint JSON");
    c->flag<std::string>("--model", "model", "model kind or spec JSON path");
  }
  {
    auto* c = add("cv", "repeated k-fold cross-validation (or grid search)",
                  with(data_defaults(), {{"output", ""},
                                         {"table", ""},
                                         {"model", "gbdt"},
                                         {"folds", 5},
                                         {"iterations", 20},
                                         {"grid", ""},
                                         {"parallel", true}}),
                  run_cv);
    data_flags(*c);
    c->flag<std::string>("-o,--output", "output", "CV JSON");
    c->flag<std::string>("--table", "table", "CV CSV table");
    c->flag<std::string>("--model", "model", "model kind or spec JSON path");
    c->flag<std::size_t>("--folds", "folds", "folds per iteration");
    c->flag<std::size_t>("--iterations", "iterations", "independent iterations");
    c->flag<std::string>("--grid", "grid", "grid JSON: [[key, [values...]], ...]");
  }
  {
    auto* c = add("predict", "predict with a checkpoint", {{"model", ""}, {"input", ""}, {"output", ""}}, run_predict);
    c->flag<std::string>("--model", "model", "checkpoint JSON");
    c->flag<std::string>("-i,--input", "input", "dataset CSV");
    c->flag<std::string>("-o,--output", "output", "predictions CSV");
  }
  {
    auto* c = add("params", "trainable parameter count of a hybrid model",
                  {{"qubits", 4}, {"sub_encoders", 4}, {"params_per_qc", 12}}, run_params);
    c->flag<std::size_t>("--qubits", "qubits", "qubits per circuit");
    c->flag<std::size_t>("--sub-encoders", "sub_encoders", "number of sub-encoders K");
    c->flag<std::size_t>("--params-per-qc", "params_per_qc", "trainable gates per circuit");
  }
  {
    auto* c = add("gradcheck", "compare adjoint, parameter-shift and finite-difference gradients",
                  {{"qubits", 4}, {"params", 12}, {"features", 0}, {"seed", 0}, {"h", 1e-4}, {"tolerance", 1e-6},
                   {"output", ""}},
                  run_gradcheck);
    c->flag<unsigned>("--qubits", "qubits", "qubits");
    c->flag<std::size_t>("--params", "params", "trainable gates");
    c->flag<std::size_t>("--features", "features", "encoding slots (default: one per qubit)");
    c->flag<std::uint64_t>("--seed", "seed", "circuit and angle seed");
    c->flag<std::string>("-o,--output", "output", "report JSON");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (threads > 0) omp_set_num_threads(threads);
    for (const auto& c : commands) {
      if (!c->app->parsed()) continue;
      const json cfg = effective_config(*c, config_path);
      print_config(c->name, cfg);
      const auto t0 = std::chrono::steady_clock::now();
      const int rc = c->run(cfg);
      const auto ms =
          std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
      std::cerr << c->name << ": " << ms << " ms\n";
      return rc;
    }
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: bad JSON value: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
