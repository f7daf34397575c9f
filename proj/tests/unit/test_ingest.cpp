#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"

#include "paqreg/ingest.hpp"

using namespace paqreg;
using namespace paqreg::ingest;

namespace {

Dataset parse(const std::string& csv) {
  std::istringstream in(csv);
  return read_dataset_csv(in);
}

FeatureMatrix make_matrix(std::vector<std::string> names, std::size_t rows, std::vector<double> data) {
  FeatureMatrix m;
  m.column_names = std::move(names);
  m.values = Matrix(rows, m.column_names.size());
  m.values.data = std::move(data);
  return m;
}

MoleculeRecord rec(std::string id, std::string smiles, double pa, std::string key) {
  return {std::move(id), std::move(smiles), pa, std::move(key)};
}

}  // namespace

TEST_CASE("scan_elements reads atoms") {
  CHECK(scan_elements("CCO") == std::set<std::string>{"C", "O"});
  CHECK(scan_elements("c1ccncc1") == std::set<std::string>{"C", "N"});
  CHECK(scan_elements("CCl") == std::set<std::string>{"C", "Cl"});
  CHECK(scan_elements("[Fe+2]") == std::set<std::string>{"Fe"});
  CHECK(scan_elements("C(=O)[O-].[NH4+]") == std::set<std::string>{"C", "O", "N"});
  CHECK(scan_elements("[13CH3]Br") == std::set<std::string>{"C", "Br"});
}

TEST_CASE("scan_elements reports the offset of an unclosed bracket") {
  try {
    scan_elements("CC[Fe");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 2);
  }
  CHECK_THROWS_AS(scan_elements(""), InputError);
}

TEST_CASE("dataset CSV parsing") {
  const auto d = parse("id,smiles,group_key,pa,f1,f2\nm1,CCO,g1,200.5,1.0,\nm2,CCN,g2,201,nan,3\n");
  REQUIRE(d.records.size() == 2);
  CHECK(d.records[1].pa == 201.0);
  CHECK(d.features.column_names == std::vector<std::string>{"f1", "f2"});
  CHECK(std::isnan(d.features.values(0, 1)));
  CHECK(std::isnan(d.features.values(1, 0)));
  CHECK(d.features.values(1, 1) == 3.0);

  std::ostringstream out;
  write_dataset_csv(out, d);
  const auto back = parse(out.str());
  CHECK(back.records.size() == 2);
  CHECK(back.features.values(1, 1) == 3.0);
}

TEST_CASE("dataset CSV errors carry line numbers") {
  auto message = [](const std::string& csv) {
    try {
      parse(csv);
    } catch (const InputError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("id,smiles,pa\nm1,C,200\n").find("line 1") != std::string::npos);
  CHECK(message("id,smiles,group_key,pa\nm1,C,g,200\nm2,C,g\n").find("line 3") != std::string::npos);
  CHECK(message("id,smiles,group_key,pa\nm1,C,g,200\nm1,C,g,201\n").find("line 3") != std::string::npos);
  CHECK(message("id,smiles,group_key,pa,x\nm1,C,g,abc,1\n").find("line 2") != std::string::npos);
  CHECK(parse("").records.empty());
}

TEST_CASE("curate: stereo groups and element filter") {
  SUBCASE("close pair merges to the mean") {
    auto [out, rep] = curate(std::vector{rec("a", "CC", 200.0, "k"), rec("b", "CC", 200.5, "k")});
    REQUIRE(out.size() == 1);
    CHECK(out[0].pa == doctest::Approx(200.25).epsilon(1e-15));
    CHECK(rep.stereo_groups_merged == 1);
  }
  SUBCASE("distant pair is kept") {
    auto [out, rep] = curate(std::vector{rec("a", "CC", 200.0, "k"), rec("b", "CC", 202.0, "k")});
    CHECK(out.size() == 2);
    CHECK(rep.stereo_groups_kept == 1);
  }
  SUBCASE("iron compound removed") {
    auto [out, rep] = curate(std::vector{rec("a", "[Fe+2]", 200.0, "k1"), rec("b", "CCO", 210.0, "k2")});
    REQUIRE(out.size() == 1);
    CHECK(out[0].id == "b");
    CHECK(rep.removed_by_elements == 1);
  }
  SUBCASE("out of range PA removed") {
    auto [out, rep] = curate(std::vector{rec("a", "C", 120.0, "k1"), rec("b", "C", 270.0, "k2")});
    CHECK(out.empty());
    CHECK(rep.removed_by_pa_range == 2);
  }
}

TEST_CASE("curate is idempotent") {
  std::vector<MoleculeRecord> rs;
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const char* smiles[] = {"CCO", "CCl", "c1ccccc1", "[Fe]", "CN"};
    rs.push_back(rec("m" + std::to_string(i), smiles[rng.below(5)], rng.uniform(140, 270),
                     "k" + std::to_string(rng.below(120))));
  }
  const auto once = curate(rs).first;
  const auto twice = curate(once).first;
  REQUIRE(once.size() == twice.size());
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(once[i].id == twice[i].id);
    CHECK(once[i].pa == twice[i].pa);
  }
}

TEST_CASE("filter_features drops missing, constant and correlated columns") {
  // x, 2x+1, constant, x with a NaN, independent
  const auto m = make_matrix({"x", "x2", "c", "nan", "z"}, 4,
                             {1, 3, 5, 1, 0,  //
                              2, 5, 5, NAN, 1,  //
                              3, 7, 5, 3, 0,  //
                              4, 9, 5, 4, 1});
  const auto r = filter_features(m);
  CHECK(r.matrix.column_names == std::vector<std::string>{"x", "z"});
  REQUIRE(r.removed.size() == 3);
  std::set<std::string> dropped;
  for (const auto& e : r.removed) dropped.insert(e.column);
  CHECK(dropped == std::set<std::string>{"x2", "c", "nan"});
  for (const auto& e : r.removed)
    if (e.column == "x2") {
      CHECK(e.reason == RemovalReason::Correlated);
      CHECK(e.partner == "x");
    }
  CHECK_THROWS_AS(filter_features(make_matrix({"a"}, 1, {1.0})), InputError);
}

TEST_CASE("filter_features leaves no highly correlated pair") {
  Rng rng(11);
  const std::size_t n = 60, k = 25;
  FeatureMatrix m;
  for (std::size_t c = 0; c < k; ++c) m.column_names.push_back("c" + std::to_string(c));
  m.values = Matrix(n, k);
  std::vector<double> base(n);
  for (auto& b : base) b = rng.normal();
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < k; ++c) m.values(r, c) = base[r] * (c % 3 == 0 ? 1.0 : 0.2) + rng.normal() * 0.3;
  const auto out = filter_features(m, 0.9);
  const auto& v = out.matrix.values;
  for (std::size_t a = 0; a < v.cols; ++a)
    for (std::size_t b = a + 1; b < v.cols; ++b) {
      const auto x = v.column(a), y = v.column(b);
      const double mx = mean(x), my = mean(y);
      double sxy = 0, sxx = 0, syy = 0;
      for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
      }
      CHECK(std::abs(sxy / std::sqrt(sxx * syy)) < 0.9);
    }
}

TEST_CASE("normalizer uses population statistics") {
  const auto m = make_matrix({"a"}, 3, {1, 2, 3});
  const auto stats = fit_normalizer(m);
  const auto z = apply_normalizer(m, stats);
  CHECK(z.values(0, 0) == doctest::Approx(-1.224744871391589).epsilon(1e-14));
  CHECK(z.values(1, 0) == doctest::Approx(0.0));
  CHECK(z.values(2, 0) == doctest::Approx(1.224744871391589).epsilon(1e-14));

  const auto again = apply_normalizer(z, fit_normalizer(z));
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(again.values(i, 0) - z.values(i, 0)) < 1e-12);

  const std::vector<std::size_t> fit_rows{0, 1};
  const auto held = apply_normalizer(m, fit_normalizer(m, fit_rows));
  CHECK(held.values(2, 0) == doctest::Approx((3.0 - 1.5) / 0.5));

  const auto constant = make_matrix({"flat"}, 3, {2, 2, 2});
  try {
    fit_normalizer(constant);
    FAIL("expected error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("flat") != std::string::npos);
  }
}

TEST_CASE("normalizer invariants and inverse") {
  Rng rng(3);
  FeatureMatrix m;
  const std::size_t n = 40, k = 6;
  for (std::size_t c = 0; c < k; ++c) m.column_names.push_back("f" + std::to_string(c));
  m.values = Matrix(n, k);
  for (auto& v : m.values.data) v = rng.uniform(-50, 300);
  const auto stats = fit_normalizer(m);
  const auto z = apply_normalizer(m, stats);
  for (std::size_t c = 0; c < k; ++c) {
    const auto col = z.values.column(c);
    CHECK(std::abs(mean(col)) <= 1e-9);
    CHECK(std::abs(pstdev(col) - 1.0) <= 1e-9);
  }
  const auto back = inverse_normalizer(z.values, stats);
  for (std::size_t i = 0; i < back.data.size(); ++i) CHECK(std::abs(back.data[i] - m.values.data[i]) < 1e-10);
}

TEST_CASE("make_folds partitions rows") {
  const auto p10 = make_folds(10, 5, 1, 42);
  for (std::size_t f = 0; f < 5; ++f) CHECK(p10.test_rows(0, f).size() == 2);

  const auto p11 = make_folds(11, 5, 1, 42);
  std::multiset<std::size_t> sizes;
  for (std::size_t f = 0; f < 5; ++f) sizes.insert(p11.test_rows(0, f).size());
  CHECK(sizes == std::multiset<std::size_t>{2, 2, 2, 2, 3});

  CHECK(make_folds(50, 5, 3, 7).assignments == make_folds(50, 5, 3, 7).assignments);
  CHECK(make_folds(50, 5, 3, 7).assignments != make_folds(50, 5, 3, 8).assignments);
  CHECK_THROWS_AS(make_folds(3, 5, 1, 0), InputError);
  CHECK_THROWS_AS(make_folds(10, 1, 1, 0), InputError);

  const auto p = make_folds(97, 5, 4, 1);
  for (std::size_t it = 0; it < 4; ++it) {
    std::multiset<std::size_t> all;
    for (std::size_t f = 0; f < 5; ++f) {
      const auto test = p.test_rows(it, f);
      const auto train = p.train_rows(it, f);
      CHECK(test.size() + train.size() == 97);
      all.insert(test.begin(), test.end());
    }
    REQUIRE(all.size() == 97);
    std::size_t expect = 0;
    for (auto r : all) CHECK(r == expect++);
  }
}
