#include <bit>
#include <fstream>
#include <istream>
#include <ostream>

#include "paqreg/chem.hpp"
#include "paqreg/ingest.hpp"
#include "paqreg/text.hpp"

namespace paqreg::chem {

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

int b64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

std::vector<std::uint8_t> decode_base64(std::string_view s) {
  std::vector<std::uint8_t> out;
  std::uint32_t acc = 0;
  int bits = 0;
  for (char c : s) {
    if (c == '=') break;
    const int v = b64_value(c);
    if (v < 0) throw InputError("fingerprint: invalid base64 character");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xFFU));
    }
  }
  return out;
}

}  // namespace

Fingerprint::Fingerprint(std::size_t width) : width_(width), words_((width + 63) / 64, 0) {
  if (width == 0) throw InputError("fingerprint: width must be positive");
}

void Fingerprint::set(std::size_t bit) {
  if (bit >= width_) throw InputError("fingerprint: bit index out of range");
  const std::uint64_t mask = std::uint64_t{1} << (bit % 64);
  if (!(words_[bit / 64] & mask)) {
    words_[bit / 64] |= mask;
    ++popcount_;
  }
}

Fingerprint Fingerprint::from_bits(std::size_t width, std::span<const std::size_t> set_bits) {
  Fingerprint fp(width);
  for (std::size_t b : set_bits) fp.set(b);
  return fp;
}

Fingerprint Fingerprint::from_hex(std::size_t width, std::string_view hex) {
  if (hex.size() != (width + 3) / 4)
    throw InputError("fingerprint: hex length " + std::to_string(hex.size()) + " does not match width " +
                     std::to_string(width));
  Fingerprint fp(width);
  for (std::size_t k = 0; k < hex.size(); ++k) {
    const int v = hex_value(hex[k]);
    if (v < 0) throw InputError("fingerprint: invalid hex digit");
    for (int j = 0; j < 4; ++j) {
      if (v & (8 >> j)) {
        const std::size_t bit = 4 * k + static_cast<std::size_t>(j);
        if (bit >= width) throw InputError("fingerprint: bits set beyond declared width");
        fp.set(bit);
      }
    }
  }
  return fp;
}

Fingerprint Fingerprint::from_base64(std::size_t width, std::string_view b64) {
  const auto bytes = decode_base64(b64);
  if (bytes.size() != (width + 7) / 8) throw InputError("fingerprint: base64 payload does not match width");
  Fingerprint fp(width);
  for (std::size_t k = 0; k < bytes.size(); ++k)
    for (int j = 0; j < 8; ++j)
      if (bytes[k] & (0x80 >> j)) {
        const std::size_t bit = 8 * k + static_cast<std::size_t>(j);
        if (bit >= width) throw InputError("fingerprint: bits set beyond declared width");
        fp.set(bit);
      }
  return fp;
}

std::string Fingerprint::to_hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out((width_ + 3) / 4, '0');
  for (std::size_t k = 0; k < out.size(); ++k) {
    int v = 0;
    for (int j = 0; j < 4; ++j) {
      const std::size_t bit = 4 * k + static_cast<std::size_t>(j);
      if (bit < width_ && test(bit)) v |= 8 >> j;
    }
    out[k] = digits[v];
  }
  return out;
}

NamedFingerprints read_fingerprints_csv(std::istream& in) {
  NamedFingerprints out;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    text::strip_cr(line);
    if (text::is_blank(line)) continue;
    if (line[0] == '#') {
      const auto pos = line.find("width=");
      if (pos != std::string::npos) {
        const auto w = text::parse_number(line.substr(pos + 6));
        if (!w || !(*w >= 1) || *w != static_cast<double>(static_cast<std::size_t>(*w)))
          throw InputError("line " + std::to_string(line_no) + ": invalid width declaration");
        width = static_cast<std::size_t>(*w);
      }
      continue;
    }
    header = ingest::split_csv_line(line, line_no);
    break;
  }
  if (header.empty()) return out;
  if (width == 0) throw InputError("fingerprint file: missing '# width=N' header comment");
  std::size_t id_col = header.size(), fp_col = header.size();
  bool is_b64 = false;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto name = text::trim(header[i]);
    if (name == "id") id_col = i;
    if (name == "fp_hex") fp_col = i;
    if (name == "fp_b64") fp_col = i, is_b64 = true;
  }
  if (id_col == header.size() || fp_col == header.size())
    throw InputError("line " + std::to_string(line_no) + ": fingerprint header needs 'id' and 'fp_hex' columns");

  while (std::getline(in, line)) {
    ++line_no;
    text::strip_cr(line);
    if (text::is_blank(line) || line[0] == '#') continue;
    const auto fields = ingest::split_csv_line(line, line_no);
    if (fields.size() != header.size())
      throw InputError("line " + std::to_string(line_no) + ": wrong number of fields");
    try {
      const auto payload = text::trim(fields[fp_col]);
      out.fps.push_back(is_b64 ? Fingerprint::from_base64(width, payload) : Fingerprint::from_hex(width, payload));
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(line_no) + ": " + e.what());
    }
    out.ids.push_back(text::trim(fields[id_col]));
  }
  return out;
}

NamedFingerprints read_fingerprints_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_fingerprints_csv(in);
}

void write_fingerprints_csv(std::ostream& out, const NamedFingerprints& fps) {
  out << "# width=" << (fps.fps.empty() ? 0 : fps.fps.front().width()) << "\n";
  out << "id,fp_hex\n";
  for (std::size_t i = 0; i < fps.fps.size(); ++i) out << text::csv_quote(fps.ids[i]) << ',' << fps.fps[i].to_hex() << '\n';
}

}  // namespace paqreg::chem
