#pragma once

#include <concepts>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "gglab/disorder.hpp"
#include "gglab/gibbs.hpp"
#include "gglab/gradient.hpp"

namespace gglab {

// shortest decimal that round-trips
std::string format_number(double x);
template <std::integral T>
std::string format_number(T x) {
  return std::to_string(x);
}

// RFC 4180: quote when the field holds a comma, quote, CR or LF
std::string csv_field(const std::string& s);

// first line `# key=value key=value ...`, second line the header
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  template <class... T>
  void row(const T&... v) {
    rows.push_back({cell(v)...});
  }
  std::string render() const;

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  template <class T>
  static std::string cell(const T& v) {
    return format_number(v);
  }
};

std::vector<std::vector<std::string>> parse_csv(const std::string& text);

std::string sha256_hex(const std::string& data);
std::string sha256_file(const std::filesystem::path& p);
// SHA-1 of "blob <size>\0" + data, as git computes object ids
std::string git_blob_id(const std::string& data);

std::string read_file(const std::filesystem::path& p);
// write to a temporary sibling, then rename
void write_file(const std::filesystem::path& p, const std::string& data);

// Binary snapshot: "GGL1", kind, d, N, offset, seed, payload doubles, and the
// first 8 bytes of the payload SHA-256. Little-endian.
enum class SnapshotKind : std::uint8_t { Field = 1, Gradient = 2, Disorder = 3 };

struct Snapshot {
  SnapshotKind kind = SnapshotKind::Field;
  int d = 1;
  int n = 1;
  Site offset{};
  std::uint8_t tag = 0;  // disorder model for Disorder snapshots
  std::uint64_t seed = 0;
  std::vector<double> values;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

Snapshot snapshot_of(const HeightField& phi);
Snapshot snapshot_of(const GradientField& eta);
Snapshot snapshot_of(const DisorderSample& s);
std::string encode_snapshot(const Snapshot& s);
Snapshot decode_snapshot(const std::string& bytes);
void write_snapshot(const std::filesystem::path& p, const Snapshot& s);
Snapshot read_snapshot(const std::filesystem::path& p);

// CSV exports
CsvTable energy_trace_table(const std::vector<EnergyPoint>& trace);
CsvTable disorder_table(const DisorderSample& s);

}  // namespace gglab
