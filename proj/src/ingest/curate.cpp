#include <algorithm>
#include <cctype>
#include <map>

#include "paqreg/ingest.hpp"

namespace paqreg::ingest {

namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }

std::string capitalise(std::string_view s) {
  std::string out(s);
  out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

// Element symbol at the start of a bracket atom body (isotope already skipped).
std::string bracket_symbol(std::string_view body, std::size_t offset) {
  if (body.empty()) throw ParseError("empty bracket atom at byte " + std::to_string(offset), offset);
  if (body[0] == '*') return {};
  if (is_upper(body[0])) {
    // Inside brackets nothing but a second element letter can be lowercase
    // directly after the first.
    if (body.size() > 1 && is_lower(body[1])) return std::string(body.substr(0, 2));
    return std::string(body.substr(0, 1));
  }
  if (is_lower(body[0])) {
    for (std::string_view two : {"se", "as", "te"})
      if (body.substr(0, 2) == two) return capitalise(two);
    if (std::string_view("bcnops").find(body[0]) != std::string_view::npos) return capitalise(body.substr(0, 1));
  }
  throw ParseError("bad bracket atom at byte " + std::to_string(offset), offset);
}

}  // namespace

std::set<std::string> scan_elements(std::string_view smiles) {
  if (smiles.empty()) throw ParseError("empty SMILES", 0);
  std::set<std::string> out;
  constexpr std::string_view skip = "-=#$:/\\().%+@*~0123456789";
  for (std::size_t i = 0; i < smiles.size(); ++i) {
    const char c = smiles[i];
    if (c == '[') {
      const std::size_t close = smiles.find(']', i + 1);
      if (close == std::string_view::npos)
        throw ParseError("unclosed '[' at byte " + std::to_string(i), i);
      std::size_t b = i + 1;
      while (b < close && std::isdigit(static_cast<unsigned char>(smiles[b]))) ++b;
      auto sym = bracket_symbol(smiles.substr(b, close - b), b);
      if (!sym.empty()) out.insert(std::move(sym));
      i = close;
    } else if (c == ']') {
      throw ParseError("unmatched ']' at byte " + std::to_string(i), i);
    } else if (c == 'C' && i + 1 < smiles.size() && smiles[i + 1] == 'l') {
      out.insert("Cl");
      ++i;
    } else if (c == 'B' && i + 1 < smiles.size() && smiles[i + 1] == 'r') {
      out.insert("Br");
      ++i;
    } else if (std::string_view("BCNOPSFIH").find(c) != std::string_view::npos) {
      out.insert(std::string(1, c));
    } else if (std::string_view("bcnops").find(c) != std::string_view::npos) {
      out.insert(std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(c)))));
    } else if (skip.find(c) == std::string_view::npos) {
      throw ParseError("unexpected character '" + std::string(1, c) + "' at byte " + std::to_string(i), i);
    }
  }
  return out;
}

nlohmann::json CurationReport::to_json() const {
  return {{"input_records", input_records},
          {"removed_by_elements", removed_by_elements},
          {"removed_by_pa_range", removed_by_pa_range},
          {"removed_unparseable", removed_unparseable},
          {"stereo_groups_merged", stereo_groups_merged},
          {"records_merged_away", records_merged_away},
          {"stereo_groups_kept", stereo_groups_kept},
          {"output_records", output_records},
          {"removed_ids", removed_ids}};
}

CurationResult curate(const Dataset& data, const CurationOptions& options) {
  if (!(options.stereo_tolerance > 0.0)) throw InputError("curate: stereo tolerance must be > 0");
  CurationReport report;
  report.input_records = data.records.size();
  const std::size_t n_cols = data.features.n_cols();

  std::vector<std::size_t> passing;
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    const auto& rec = data.records[i];
    std::set<std::string> elements;
    try {
      elements = scan_elements(rec.smiles);
    } catch (const ParseError&) {
      ++report.removed_unparseable;
      report.removed_ids.push_back(rec.id);
      continue;
    }
    const bool allowed = std::includes(options.allowed_elements.begin(), options.allowed_elements.end(),
                                       elements.begin(), elements.end());
    if (!allowed) {
      ++report.removed_by_elements;
      report.removed_ids.push_back(rec.id);
      continue;
    }
    if (rec.pa < options.pa_min || rec.pa > options.pa_max) {
      ++report.removed_by_pa_range;
      report.removed_ids.push_back(rec.id);
      continue;
    }
    passing.push_back(i);
  }

  // Groups in order of first appearance; an empty key never groups.
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i : passing)
    if (!data.records[i].group_key.empty()) groups[data.records[i].group_key].push_back(i);

  CurationResult result;
  result.data.features.column_names = data.features.column_names;
  std::vector<double> values;
  for (std::size_t i : passing) {
    const auto& rec = data.records[i];
    const auto g = rec.group_key.empty() ? groups.end() : groups.find(rec.group_key);
    if (g == groups.end() || g->second.size() == 1) {
      result.data.records.push_back(rec);
      for (std::size_t c = 0; c < n_cols; ++c) values.push_back(data.features.values(i, c));
      continue;
    }
    const auto& members = g->second;
    double lo = data.records[members[0]].pa, hi = lo;
    for (std::size_t m : members) {
      lo = std::min(lo, data.records[m].pa);
      hi = std::max(hi, data.records[m].pa);
    }
    if (hi - lo >= options.stereo_tolerance) {
      if (members.front() == i) ++report.stereo_groups_kept;
      result.data.records.push_back(rec);
      for (std::size_t c = 0; c < n_cols; ++c) values.push_back(data.features.values(i, c));
      continue;
    }
    if (members.front() != i) continue;  // merged into the first member
    MoleculeRecord merged = rec;
    double pa_sum = 0.0;
    for (std::size_t m : members) pa_sum += data.records[m].pa;
    merged.pa = pa_sum / static_cast<double>(members.size());
    for (std::size_t c = 0; c < n_cols; ++c) {
      double s = 0.0;
      for (std::size_t m : members) s += data.features.values(m, c);
      values.push_back(s / static_cast<double>(members.size()));
    }
    result.data.records.push_back(std::move(merged));
    ++report.stereo_groups_merged;
    report.records_merged_away += members.size() - 1;
  }
  result.data.features.values.rows = result.data.records.size();
  result.data.features.values.cols = n_cols;
  result.data.features.values.data = std::move(values);
  report.output_records = result.data.records.size();
  result.report = std::move(report);
  return result;
}

std::pair<std::vector<MoleculeRecord>, CurationReport> curate(const std::vector<MoleculeRecord>& records,
                                                              const CurationOptions& options) {
  Dataset d;
  d.records = records;
  d.features.values = Matrix(records.size(), 0);
  auto r = curate(d, options);
  return {std::move(r.data.records), std::move(r.report)};
}

}  // namespace paqreg::ingest
