#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "doctest.h"
#include "rollinf/errors.hpp"
#include "rollinf/io.hpp"
#include "support.hpp"

using namespace rollinf;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("rollinf_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_bytes(const fs::path& p, const std::vector<unsigned char>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<unsigned char> rom1_header(std::uint32_t version, std::uint64_t rows, std::uint64_t cols) {
  std::vector<unsigned char> b = {'R', 'O', 'M', '1'};
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<unsigned char>(version >> (8 * i)));
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<unsigned char>(rows >> (8 * i)));
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<unsigned char>(cols >> (8 * i)));
  return b;
}

void append_double(std::vector<unsigned char>& b, double v) {
  unsigned char raw[8];
  std::memcpy(raw, &v, 8);
  b.insert(b.end(), raw, raw + 8);
}

}  // namespace

TEST_CASE("ROM1 layout is row-major little-endian") {
  TempDir dir;
  auto bytes = rom1_header(1, 2, 2);
  for (double v : {1.0, 2.0, 3.0, 4.0}) append_double(bytes, v);
  write_bytes(dir.path / "m.rom", bytes);
  Matrix expected(2, 2);
  expected << 1, 2, 3, 4;
  CHECK(io::load_matrix(dir.path / "m.rom") == expected);

  io::save_matrix(dir.path / "again.rom", expected);
  std::ifstream in(dir.path / "again.rom", std::ios::binary);
  std::vector<unsigned char> back((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(back == bytes);
}

TEST_CASE("ROM1 round trip is bit exact") {
  TempDir dir;
  std::mt19937_64 rng(1);
  const Matrix m = testing::random_matrix(rng, 7, 3);
  io::save_matrix(dir.path / "r.rom", m);
  const Matrix back = io::load_matrix(dir.path / "r.rom");
  REQUIRE(back.rows() == 7);
  CHECK(std::memcmp(back.data(), m.data(), sizeof(double) * 21) == 0);
  io::save_matrix(dir.path / "empty.rom", Matrix(3, 0));
  CHECK(io::load_matrix(dir.path / "empty.rom").rows() == 3);
}

TEST_CASE("ROM1 errors carry byte offsets") {
  TempDir dir;
  write_bytes(dir.path / "magic.rom", {'X', 'O', 'M', '1', 1, 0, 0, 0});
  try {
    io::load_matrix(dir.path / "magic.rom");
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.kind() == ErrorKind::Format);
    CHECK(e.byte_offset() == 0);
  }
  write_bytes(dir.path / "version.rom", rom1_header(2, 1, 1));
  try {
    io::load_matrix(dir.path / "version.rom");
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.byte_offset() == 4);
  }
  auto short_payload = rom1_header(1, 2, 2);
  append_double(short_payload, 1.0);
  write_bytes(dir.path / "short.rom", short_payload);
  CHECK_THROWS_AS(io::load_matrix(dir.path / "short.rom"), FormatError);

  auto nan_payload = rom1_header(1, 1, 2);
  append_double(nan_payload, 1.0);
  append_double(nan_payload, std::numeric_limits<double>::quiet_NaN());
  write_bytes(dir.path / "nan.rom", nan_payload);
  try {
    io::load_matrix(dir.path / "nan.rom");
    FAIL("expected a data error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Data);
  }
  CHECK_THROWS_AS(io::load_matrix(dir.path / "missing.rom"), Error);
}

TEST_CASE("CSV parsing and round trip") {
  Matrix expected(2, 2);
  expected << 1.5, 2.0, 3.0, 4.0;
  CHECK(io::parse_csv("1.5,2.0\n3.0,4.0") == expected);
  CHECK(io::parse_csv("1.5,2.0\r\n3.0,4.0\n") == expected);
  CHECK_THROWS_AS(io::parse_csv("1,2\n3"), FormatError);
  CHECK_THROWS_AS(io::parse_csv("1;2"), FormatError);
  CHECK_THROWS_AS(io::parse_csv("1,nan"), Error);

  TempDir dir;
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = testing::random_matrix(rng, 1 + trial % 5, 1 + trial % 3, std::pow(10.0, trial - 10));
    io::save_csv(dir.path / "m.csv", m);
    CHECK(io::load_csv(dir.path / "m.csv") == m);
  }
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::load_any_matrix(dir.path / "m.csv").size() > 0);
}

TEST_CASE("key-value files with sections") {
  const auto kv = io::KeyValueFile::parse("a = 1\n# comment\n[train]\nlr=0.01\n\n[roll]\nR = 5\n");
  CHECK(kv.get("a") == "1");
  CHECK(kv.get_double("train.lr") == 0.01);
  CHECK(kv.get_count("roll.R") == 5);
  CHECK(kv.get_or("missing", "x") == "x");
  CHECK_THROWS_AS(kv.get("missing"), FormatError);
  CHECK_THROWS_AS(io::KeyValueFile::parse("novalue\n"), FormatError);
  CHECK(io::parse_vector("0.5, 1.5").size() == 2);
}

TEST_CASE("dataset manifests round trip") {
  TempDir dir;
  std::mt19937_64 rng(3);
  const TrajectoryDataset data = testing::random_dataset(rng, 3, 4, 2, 5, 0.01);
  io::save_dataset(dir.path / "d.manifest", data);
  const TrajectoryDataset back = io::load_dataset(dir.path / "d.manifest");
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.entry(i).param == data.entry(i).param);
    CHECK(back.entry(i).trajectory.states() == data.entry(i).trajectory.states());
    CHECK(back.entry(i).trajectory.controls() == data.entry(i).trajectory.controls());
  }
  CHECK(back.dt() == data.dt());
  try {
    io::load_dataset(dir.path / "nope.manifest");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("nope.manifest") != std::string::npos);
  }
}

TEST_CASE("model manifests round trip") {
  TempDir dir;
  std::mt19937_64 rng(4);
  for (auto scheme : {Scheme::ForwardEuler, Scheme::ImexLinearImplicit}) {
    const PolyModel m = testing::random_model(rng, 3, 3, 2, 0.05, scheme);
    io::save_model(dir.path / "m.manifest", m);
    const PolyModel back = io::load_model(dir.path / "m.manifest");
    CHECK(back.scheme() == scheme);
    CHECK(back.dt() == 0.05);
    CHECK(back.operators().flatten() == m.operators().flatten());
  }
}

TEST_CASE("basis and model sets round trip") {
  TempDir dir;
  Matrix V = Matrix::Identity(4, 2);
  Vector sv(3);
  sv << 3.0, 2.0, 1.0;
  io::save_basis(dir.path / "basis", ReducedBasis(V, sv));
  const ReducedBasis b = io::load_basis(dir.path / "basis");
  CHECK(b.V() == V);
  CHECK(b.singular_values() == sv);

  std::mt19937_64 rng(5);
  io::ModelSet set;
  for (int i = 0; i < 2; ++i) {
    Vector mu(2);
    mu << 0.1 * i, 1.0;
    set.params.push_back(mu);
    set.models.push_back(testing::random_model(rng, 2, 2, 0, 0.1, Scheme::ImexLinearImplicit));
  }
  io::save_model_set(dir.path / "models", set);
  const io::ModelSet back = io::load_model_set(dir.path / "models");
  REQUIRE(back.models.size() == 2);
  CHECK(back.params[1] == set.params[1]);
  CHECK(back.models[1].operators().flatten() == set.models[1].operators().flatten());
}
