#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_set>

#include "paqreg/ingest.hpp"
#include "paqreg/text.hpp"

namespace paqreg::ingest {

namespace {

constexpr std::array<std::string_view, 4> kReserved{"id", "smiles", "group_key", "pa"};

std::string at_line(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool field_was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      if (!cur.empty() || field_was_quoted) throw InputError(at_line(line_no) + "stray quote inside field");
      quoted = true;
      field_was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
      field_was_quoted = false;
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw InputError(at_line(line_no) + "unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

Dataset read_dataset_csv(std::istream& in) {
  Dataset data;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  // Skip leading blank lines; a file with no header at all is an empty dataset.
  while (std::getline(in, line)) {
    ++line_no;
    text::strip_cr(line);
    if (!text::is_blank(line)) {
      header = split_csv_line(line, line_no);
      break;
    }
  }
  if (header.empty()) return data;
  const std::size_t header_line = line_no;

  std::array<std::size_t, 4> reserved_pos;
  reserved_pos.fill(std::numeric_limits<std::size_t>::max());
  std::unordered_set<std::string> seen;
  std::vector<std::size_t> feature_pos;
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string name = text::trim(header[i]);
    if (name.empty()) throw InputError(at_line(header_line) + "empty column name at position " + std::to_string(i + 1));
    if (!seen.insert(name).second) throw InputError(at_line(header_line) + "duplicate column '" + name + "'");
    bool is_reserved = false;
    for (std::size_t r = 0; r < kReserved.size(); ++r) {
      if (name == kReserved[r]) {
        reserved_pos[r] = i;
        is_reserved = true;
      }
    }
    if (!is_reserved) {
      feature_pos.push_back(i);
      data.features.column_names.push_back(std::move(name));
    }
  }
  for (std::size_t r = 0; r < kReserved.size(); ++r)
    if (reserved_pos[r] == std::numeric_limits<std::size_t>::max())
      throw InputError(at_line(header_line) + "missing required column '" + std::string(kReserved[r]) + "'");

  std::vector<double> values;
  std::unordered_set<std::string> ids;
  while (std::getline(in, line)) {
    ++line_no;
    text::strip_cr(line);
    if (text::is_blank(line)) continue;
    auto fields = split_csv_line(line, line_no);
    if (fields.size() != header.size())
      throw InputError(at_line(line_no) + "expected " + std::to_string(header.size()) + " fields, found " +
                       std::to_string(fields.size()));
    MoleculeRecord rec;
    rec.id = text::trim(fields[reserved_pos[0]]);
    rec.smiles = text::trim(fields[reserved_pos[1]]);
    rec.group_key = text::trim(fields[reserved_pos[2]]);
    if (rec.id.empty()) throw InputError(at_line(line_no) + "empty id");
    if (!ids.insert(rec.id).second) throw InputError(at_line(line_no) + "duplicate id '" + rec.id + "'");
    const auto pa = text::parse_number(fields[reserved_pos[3]]);
    if (!pa || !std::isfinite(*pa)) throw InputError(at_line(line_no) + "pa must be a finite number");
    rec.pa = *pa;
    for (std::size_t p : feature_pos) {
      const auto v = text::parse_number(fields[p]);
      if (!v) throw InputError(at_line(line_no) + "column '" + header[p] + "': not a number: '" + fields[p] + "'");
      values.push_back(*v);
    }
    data.records.push_back(std::move(rec));
  }
  data.features.values.rows = data.records.size();
  data.features.values.cols = feature_pos.size();
  data.features.values.data = std::move(values);
  return data;
}

Dataset read_dataset_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  out << "id,smiles,group_key,pa";
  for (const auto& name : data.features.column_names) out << ',' << text::csv_quote(name);
  out << '\n';
  for (std::size_t r = 0; r < data.records.size(); ++r) {
    const auto& rec = data.records[r];
    out << text::csv_quote(rec.id) << ',' << text::csv_quote(rec.smiles) << ',' << text::csv_quote(rec.group_key)
        << ',' << text::format_number(rec.pa);
    for (std::size_t c = 0; c < data.features.n_cols(); ++c) out << ',' << text::format_number(data.features.values(r, c));
    out << '\n';
  }
}

std::vector<double> Dataset::targets() const {
  std::vector<double> y;
  y.reserve(records.size());
  for (const auto& r : records) y.push_back(r.pa);
  return y;
}

}  // namespace paqreg::ingest
