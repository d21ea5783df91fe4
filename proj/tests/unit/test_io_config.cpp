#include <gtest/gtest.h>

#include <filesystem>

#include "gglab/config.hpp"
#include "gglab/error.hpp"
#include "gglab/io.hpp"

using namespace gglab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gglab-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Io, NumbersRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, 123456789.0}) {
    const std::string s = format_number(x);
    EXPECT_EQ(std::stod(s), x) << s;
  }
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(std::size_t{42}), "42");
}

TEST(Io, CsvQuotingRoundTrip) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  CsvTable t;
  t.meta = {{"experiment", "x"}, {"seed", "3"}};
  t.header = {"name", "value"};
  t.row("a,b", 1.5);
  t.row("line\nbreak", std::size_t{7});
  t.row("quote\"d", -0.25);
  const std::string text = t.render();
  EXPECT_EQ(text.rfind("# experiment=x seed=3\r\n", 0), 0u);
  const auto rows = parse_csv(text.substr(text.find('\n') + 1));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], t.header);
  for (std::size_t i = 0; i < t.rows.size(); ++i) EXPECT_EQ(rows[i + 1], t.rows[i]);
}

TEST(Io, KnownDigests) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  // `printf 'hello\n' | git hash-object --stdin`
  EXPECT_EQ(git_blob_id("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST(Io, SnapshotRoundTripAndCorruption) {
  auto box = std::make_shared<const LatticeBox>(2, 3, make_site({1, 0}));
  DisorderLaw law;
  law.scale = 1.0;
  const auto xi = sample_disorder(DisorderModel::A, box, law, 42);
  const Snapshot s = snapshot_of(xi);
  EXPECT_EQ(s.kind, SnapshotKind::Disorder);
  EXPECT_EQ(s.seed, 42u);
  const std::string bytes = encode_snapshot(s);
  EXPECT_EQ(bytes.substr(0, 4), "GGL1");
  EXPECT_EQ(decode_snapshot(bytes), s);

  std::string flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x01;
  EXPECT_THROW(decode_snapshot(flipped), IoError);
  EXPECT_THROW(decode_snapshot(bytes.substr(0, bytes.size() - 3)), IoError);
  std::string magic = bytes;
  magic[0] = 'X';
  EXPECT_THROW(decode_snapshot(magic), IoError);

  const fs::path dir = scratch("snap");
  write_snapshot(dir / "xi.bin", s);
  EXPECT_EQ(read_snapshot(dir / "xi.bin"), s);
  EXPECT_EQ(sha256_file(dir / "xi.bin"), sha256_hex(bytes));
  fs::remove_all(dir);
}

TEST(Io, FieldAndGradientSnapshots) {
  auto box = std::make_shared<const LatticeBox>(1, 4);
  auto dom = std::make_shared<const Domain>(box);
  std::vector<double> v(box->site_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.5 * i;
  const HeightField phi(dom, v);
  const Snapshot a = snapshot_of(phi);
  EXPECT_EQ(a.values, v);
  const Snapshot b = snapshot_of(gradient_of(phi));
  EXPECT_EQ(b.kind, SnapshotKind::Gradient);
  EXPECT_EQ(b.values.size(), box->edges().size());
}

TEST(Config, RoundTrip) {
  ExperimentConfig c;
  c.experiment = "tilt";
  c.d = 3;
  c.n = 6;
  c.potential.kind = PotentialKind::PerturbedConvex;
  c.potential.eps = 0.5;
  c.law.scale = 1.0;
  c.tilt = {1.0, -0.5, 0.25};
  c.pinned = {make_site({0, 0, 0}), make_site({1, 2, -1})};
  c.dynamics.h = 0.01;
  c.dynamics.samples = 123;
  c.ensemble = 32;
  c.seed = 18446744073709551615ull;
  c.params["window"] = "2";
  c.params["list"] = "1,2,3";
  const std::string text = serialize_config(c);
  EXPECT_EQ(parse_config(text), c);
  EXPECT_EQ(serialize_config(parse_config(text)), text);
  EXPECT_NO_THROW(validate_config(c));
  EXPECT_EQ(c.param_int_list("list"), (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(c.param("missing", 2.5), 2.5);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("[lattice]\nd = 2\nbogus = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[nowhere]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[lattice]\nd = two\n"), ConfigError);
  EXPECT_THROW(parse_config("[model]\npotential = cubic\n"), ConfigError);
  ExperimentConfig c;
  c.experiment = "x";
  c.tilt = {1.0};
  EXPECT_THROW(validate_config(c), ConfigError);
  c.tilt = {};
  c.pinned = {make_site({9, 0})};
  EXPECT_THROW(validate_config(c), ConfigError);
  c.pinned = {};
  c.model = DisorderModel::B;
  EXPECT_THROW(validate_config(c), ConfigError);  // Gaussian law under model B
  c.params["k"] = "x";
  EXPECT_THROW(c.param("k", 0.0), ConfigError);
}
