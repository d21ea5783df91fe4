#include "gglab/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gglab/error.hpp"

namespace gglab {

namespace {

std::string digest_hex(const EVP_MD* md, const std::string& data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, md, nullptr) != 1) throw IoError("digest failed");
  static const char* hex = "0123456789abcdef";
  std::string s;
  s.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    s.push_back(hex[out[i] >> 4]);
    s.push_back(hex[out[i] & 15]);
  }
  return s;
}

template <class T>
void put(std::string& out, T v) {
  static_assert(std::endian::native == std::endian::little, "snapshot encoding assumes a little-endian host");
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T get(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw IoError("snapshot truncated");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

constexpr char kMagic[4] = {'G', 'G', 'L', '1'};

}  // namespace

std::string format_number(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q.push_back('"');
    q.push_back(c);
  }
  q.push_back('"');
  return q;
}

std::string CsvTable::render() const {
  std::string out = "#";
  for (const auto& [k, v] : meta) {
    if (k.find_first_of("= \r\n") != std::string::npos || v.find_first_of(" \r\n") != std::string::npos)
      throw IoError("metadata pair " + k + " must not contain spaces or newlines");
    out += " " + k + "=" + v;
  }
  out += "\r\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out.push_back(',');
      out += csv_field(cells[i]);
    }
    out += "\r\n";
  };
  line(header);
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw IoError("CSV row width does not match the header");
    line(r);
  }
  return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !cell.empty()) {
        row.push_back(std::move(cell));
        out.push_back(std::move(row));
      }
      row.clear();
      cell.clear();
      any = false;
    } else {
      cell.push_back(c);
      any = true;
    }
  }
  if (quoted) throw IoError("unterminated quoted CSV field");
  if (any || !cell.empty()) {
    row.push_back(std::move(cell));
    out.push_back(std::move(row));
  }
  return out;
}

std::string sha256_hex(const std::string& data) { return digest_hex(EVP_sha256(), data); }
std::string sha256_file(const std::filesystem::path& p) { return sha256_hex(read_file(p)); }

std::string git_blob_id(const std::string& data) {
  std::string obj = "blob " + std::to_string(data.size());
  obj.push_back('\0');
  obj += data;
  return digest_hex(EVP_sha1(), obj);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& data) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  const auto tmp = std::filesystem::path(p.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, p);
}

Snapshot snapshot_of(const HeightField& phi) {
  const LatticeBox& b = phi.box();
  return {SnapshotKind::Field, b.dim(), b.half_side(), b.offset(), 0, 0, phi.values()};
}

Snapshot snapshot_of(const GradientField& eta) {
  const LatticeBox& b = eta.box();
  return {SnapshotKind::Gradient, b.dim(), b.half_side(), b.offset(), 0, 0, eta.edge_values()};
}

Snapshot snapshot_of(const DisorderSample& s) {
  const LatticeBox& b = *s.box;
  return {SnapshotKind::Disorder, b.dim(), b.half_side(), b.offset(), static_cast<std::uint8_t>(s.model), s.seed, s.values};
}

std::string encode_snapshot(const Snapshot& s) {
  std::string out(kMagic, 4);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(s.kind));
  put<std::uint8_t>(out, s.tag);
  put<std::int32_t>(out, s.d);
  put<std::int32_t>(out, s.n);
  for (int a = 0; a < kMaxDim; ++a) put<std::int32_t>(out, s.offset[a]);
  put<std::uint64_t>(out, s.seed);
  put<std::uint64_t>(out, s.values.size());
  std::string payload;
  payload.reserve(8 * s.values.size());
  for (double v : s.values) put<double>(payload, v);
  out += payload;
  out += sha256_hex(payload).substr(0, 16);
  return out;
}

Snapshot decode_snapshot(const std::string& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw IoError("not a snapshot (bad magic)");
  std::size_t pos = 4;
  Snapshot s;
  const auto kind = get<std::uint8_t>(bytes, pos);
  if (kind < 1 || kind > 3) throw IoError("unknown snapshot kind");
  s.kind = static_cast<SnapshotKind>(kind);
  s.tag = get<std::uint8_t>(bytes, pos);
  s.d = get<std::int32_t>(bytes, pos);
  s.n = get<std::int32_t>(bytes, pos);
  for (int a = 0; a < kMaxDim; ++a) s.offset[a] = get<std::int32_t>(bytes, pos);
  s.seed = get<std::uint64_t>(bytes, pos);
  const auto count = get<std::uint64_t>(bytes, pos);
  if (count > (bytes.size() - pos) / 8) throw IoError("snapshot truncated");
  const std::string payload = bytes.substr(pos, 8 * count);
  for (std::uint64_t k = 0; k < count; ++k) s.values.push_back(get<double>(bytes, pos));
  if (bytes.size() != pos + 16 || bytes.compare(pos, 16, sha256_hex(payload).substr(0, 16)) != 0)
    throw IoError("snapshot checksum mismatch");
  return s;
}

void write_snapshot(const std::filesystem::path& p, const Snapshot& s) { write_file(p, encode_snapshot(s)); }
Snapshot read_snapshot(const std::filesystem::path& p) { return decode_snapshot(read_file(p)); }

CsvTable energy_trace_table(const std::vector<EnergyPoint>& trace) {
  CsvTable t;
  t.header = {"step", "time", "energy"};
  for (const auto& p : trace) t.row(p.step, p.time, p.energy);
  return t;
}

CsvTable disorder_table(const DisorderSample& s) {
  const LatticeBox& box = *s.box;
  const int d = box.dim();
  CsvTable t;
  if (s.model == DisorderModel::A) {
    t.header = {"site", "xi"};
    for (std::size_t i = 0; i < box.interior_count(); ++i) t.row(to_string(box.site(i), d), s.values[i]);
  } else {
    t.header = {"site", "axis", "kappa"};
    for (std::size_t e = 0; e < box.edges().size(); ++e)
      t.row(to_string(box.site(box.edges()[e].lo), d), box.edges()[e].axis, s.values[e]);
  }
  return t;
}

}  // namespace gglab
