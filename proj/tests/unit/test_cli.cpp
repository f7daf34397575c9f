#include <filesystem>
#include <string>
#include <unistd.h>

#include "doctest.h"
#include "json.hpp"

#include "run_cli.hpp"

#include "paqreg/models/nn.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using clirun::field;
using clirun::Run;
using clirun::slurp;
using clirun::spit;

namespace {

Run cli(const std::string& args, const std::string& env = "") { return clirun::cli(PAQREG_CLI_PATH, args, env); }

std::string fixture(const std::string& name) { return std::string(PAQREG_FIXTURES) + "/" + name; }

json echoed_config(const std::string& out) { return json::parse(field(out, "config")); }

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("paqreg_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const TempDir& tmp() {
  static TempDir d;
  return d;
}

/// Small synthetic dataset shared by the data commands.
const std::string& dataset() {
  static const std::string path = [] {
    const auto p = tmp() / "data.csv";
    REQUIRE(cli("gen-data --rows 150 --seed 3 -o " + p).code == 0);
    return p;
  }();
  return path;
}

}  // namespace

TEST_CASE("cli curate") {
  const auto out = tmp() / "curated.csv";
  const auto r = cli("curate -i " + fixture("curate_small.csv") + " -o " + out);
  REQUIRE(r.code == 0);
  CHECK(field(r.out, "input_records") == "6");
  CHECK(field(r.out, "removed_by_elements") == "1");
  CHECK(field(r.out, "stereo_groups_merged") == "1");
  CHECK(field(r.out, "output_records") == "4");
  const auto text = slurp(out);
  CHECK(text.find("m2,") == std::string::npos);
  CHECK(text.find("180.25") != std::string::npos);

  const auto e = cli("curate -i " + fixture("empty.csv") + " -o " + (tmp() / "e.csv"));
  CHECK(e.code == 0);
  CHECK(field(e.out, "output_records") == "0");

  CHECK(cli("curate -i " + fixture("bad_header.csv") + " -o " + (tmp() / "b.csv")).code == 2);
  CHECK(cli("curate -i " + (tmp() / "missing.csv") + " -o " + (tmp() / "b.csv")).code == 2);
  CHECK(cli("curate --no-such-flag").code == 2);
  CHECK(cli("").code == 2);
}

TEST_CASE("cli cluster") {
  const auto r = cli("cluster -i " + fixture("clusters.fp.csv") + " --threshold 0.7 -o " + (tmp() / "c.json"));
  REQUIRE(r.code == 0);
  CHECK(field(r.out, "n_items") == "5");
  CHECK(field(r.out, "n_clusters") == "1");
  CHECK(field(r.out, "n_singletons") == "2");
  const auto j = json::parse(slurp(tmp() / "c.json"));
  CHECK(j.at("summary").at("n_clusters") == 1);
  CHECK(cli("cluster -i " + fixture("clusters.fp.csv") + " --threshold 1.5").code == 2);
}

TEST_CASE("cli params and gradcheck") {
  const auto r = cli("params --qubits 8 --sub-encoders 4 --params-per-qc 40");
  REQUIRE(r.code == 0);
  CHECK(field(r.out, "t_params") == std::to_string(paqreg::models::hybrid_param_count(8, 4, 40)));
  CHECK(field(r.out, "circuit_params") == "160");
  CHECK(cli("params --qubits 0").code == 2);

  const auto g = cli("gradcheck --qubits 3 --params 10 --seed 4 -o " + (tmp() / "g.json"));
  CHECK(g.code == 0);
  CHECK(json::parse(slurp(tmp() / "g.json")).at("pass") == true);
  CHECK(std::stod(field(g.out, "max_deviation")) < 1e-6);
}

TEST_CASE("cli cv, train and predict") {
  const auto spec = tmp() / "small_gbdt.json";
  spit(spec, R"({"kind": "gbdt", "n_trees": 20})");
  const auto r = cli("cv -i " + dataset() + " --n-features 16 --model " + spec + " --folds 5 --iterations 20 -o " +
                     (tmp() / "cv.json") + " --table " + (tmp() / "cv.csv"));
  REQUIRE(r.code == 0);
  CHECK(field(r.out, "evaluations") == "100");
  const auto cv = json::parse(slurp(tmp() / "cv.json"));
  CHECK(cv.at("cv").at("n_evaluations") == 100);
  CHECK(cv.at("columns").size() == 16);
  CHECK(cv.at("model").at("n_trees") == 20);
  const auto table = slurp(tmp() / "cv.csv");
  CHECK(table.rfind("model,r2_mean,r2_std,mae_mean,mae_std,rmse_mean,rmse_std,n_evaluations\ngbdt,", 0) == 0);

  const auto ck = tmp() / "model.json";
  REQUIRE(cli("train -i " + dataset() + " --n-features 16 --model " + spec + " -o " + ck).code == 0);
  const auto p = cli("predict --model " + ck + " -i " + dataset() + " -o " + (tmp() / "pred.csv"));
  REQUIRE(p.code == 0);
  CHECK(slurp(tmp() / "pred.csv").rfind("id,pa,pa_pred\n", 0) == 0);
  CHECK(std::stod(field(p.out, "r2")) > 0.5);

  auto bad = json::parse(slurp(ck));
  bad["format"] = 2;
  spit(tmp() / "bad_model.json", bad.dump());
  CHECK(cli("predict --model " + (tmp() / "bad_model.json") + " -i " + dataset() + " -o " + (tmp() / "x.csv")).code ==
        2);
  CHECK(cli("train -i " + dataset() + " --model svm -o " + (tmp() / "x.json")).code == 2);
}

TEST_CASE("cli grid search") {
  const auto grid = tmp() / "grid.json";
  spit(grid, R"([["n_trees", [5, 10]], ["max_depth", [2, 3]]])");
  const auto r = cli("cv -i " + dataset() + " --n-features 8 --folds 3 --iterations 1 --grid " + grid + " -o " +
                     (tmp() / "grid_out.json"));
  REQUIRE(r.code == 0);
  CHECK(field(r.out, "grid_rows") == "4");
  CHECK(json::parse(slurp(tmp() / "grid_out.json")).at("grid").at("results").size() == 4);
}

TEST_CASE("cli config precedence") {
  const auto cfg = tmp() / "cfg.json";
  spit(cfg, R"({"params": {"qubits": 8, "sub_encoders": 4, "params_per_qc": 40}})");
  const auto from_file = cli("--config " + cfg + " params");
  REQUIRE(from_file.code == 0);
  CHECK(echoed_config(from_file.out).at("settings").at("qubits") == 8);

  const auto flag_wins = cli("--config " + cfg + " params --qubits 2");
  CHECK(echoed_config(flag_wins.out).at("settings").at("qubits") == 2);
  CHECK(echoed_config(flag_wins.out).at("settings").at("params_per_qc") == 40);

  spit(cfg, R"({"seed": 5})");
  CHECK(echoed_config(cli("--config " + cfg + " gradcheck --qubits 2 --params 2").out).at("settings").at("seed") == 5);
  CHECK(echoed_config(cli("--config " + cfg + " gradcheck --qubits 2 --params 2", "PAQREG_SEED=9").out)
            .at("settings")
            .at("seed") == 9);
  CHECK(echoed_config(cli("--config " + cfg + " gradcheck --qubits 2 --params 2 --seed 1", "PAQREG_SEED=9").out)
            .at("settings")
            .at("seed") == 1);
  CHECK(cli("params", "PAQREG_SEED=abc").code == 2);
  spit(cfg, "{not json");
  CHECK(cli("--config " + cfg + " params").code == 2);
}

TEST_CASE("cli echoed config reproduces the run") {
  const auto first = cli("gen-data --rows 40 --seed 11 -o " + (tmp() / "a.csv"));
  REQUIRE(first.code == 0);
  auto settings = echoed_config(first.out).at("settings");
  settings["output"] = tmp() / "b.csv";
  spit(tmp() / "echo.json", settings.dump());
  REQUIRE(cli("--config " + (tmp() / "echo.json") + " gen-data").code == 0);
  CHECK(slurp(tmp() / "a.csv") == slurp(tmp() / "b.csv"));
}
