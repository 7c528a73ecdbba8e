#include "rollinf/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "rollinf/errors.hpp"

namespace rollinf::io {

namespace {

constexpr std::array<char, 4> kMagic = {'R', 'O', 'M', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 4 + 8 + 8;

template <typename T>
void put_le(std::vector<char>& buf, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  buf.insert(buf.end(), bytes.begin(), bytes.end());
}

template <typename T>
T get_le(const std::vector<char>& buf, std::size_t offset) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), buf.data() + offset, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

std::vector<char> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Data, "cannot open file " + path.string());
  return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string read_text(const fs::path& path) {
  const auto bytes = read_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view token, std::size_t offset, const std::string& origin) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
    throw FormatError(origin + ": cannot parse number '" + std::string(token) + "'", offset);
  }
  return value;
}

fs::path resolve(const fs::path& base_dir, const std::string& rel) {
  const fs::path p(rel);
  return p.is_absolute() ? p : base_dir / p;
}

}  // namespace

void write_text_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Data, "cannot write file " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorKind::Data, "short write to " + path.string());
  }
  fs::rename(tmp, path);
}

void save_matrix(const fs::path& path, const Matrix& m) {
  std::vector<char> buf;
  buf.reserve(kHeaderBytes + static_cast<std::size_t>(m.size()) * 8);
  buf.insert(buf.end(), kMagic.begin(), kMagic.end());
  put_le<std::uint32_t>(buf, kVersion);
  put_le<std::uint64_t>(buf, static_cast<std::uint64_t>(m.rows()));
  put_le<std::uint64_t>(buf, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) put_le<double>(buf, m(i, j));
  }
  write_text_atomic(path, std::string(buf.begin(), buf.end()));
}

Matrix load_matrix(const fs::path& path) {
  const auto buf = read_bytes(path);
  const std::string origin = path.string();
  if (buf.size() < 4 || std::memcmp(buf.data(), kMagic.data(), 4) != 0) {
    throw FormatError(origin + ": missing ROM1 magic", 0);
  }
  if (buf.size() < kHeaderBytes) throw FormatError(origin + ": truncated header", buf.size());
  const auto version = get_le<std::uint32_t>(buf, 4);
  if (version != kVersion) {
    throw FormatError(origin + ": unsupported version " + std::to_string(version), 4);
  }
  const auto rows = get_le<std::uint64_t>(buf, 8);
  const auto cols = get_le<std::uint64_t>(buf, 16);
  const std::uint64_t payload = buf.size() - kHeaderBytes;
  std::uint64_t count = 0;
  if (__builtin_mul_overflow(rows, cols, &count) || count > payload / 8 ||
      count * 8 != payload) {
    throw FormatError(origin + ": dimension " + std::to_string(rows) + " x " +
                          std::to_string(cols) + " does not match payload of " +
                          std::to_string(payload) + " bytes",
                      8);
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::size_t offset = kHeaderBytes;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j, offset += 8) {
      const double v = get_le<double>(buf, offset);
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::Data, origin + ": non-finite entry at byte offset " +
                                         std::to_string(offset));
      }
      m(i, j) = v;
    }
  }
  return m;
}

Matrix load_any_matrix(const fs::path& path) {
  const auto buf = read_bytes(path);
  if (buf.size() >= 4 && std::memcmp(buf.data(), kMagic.data(), 4) == 0) return load_matrix(path);
  return load_csv(path);
}

std::string format_double(double v) {
  std::array<char, 64> out{};
  const auto res = std::to_chars(out.data(), out.data() + out.size(), v,
                                 std::chars_format::general, 17);
  return std::string(out.data(), res.ptr);
}

void save_csv(const fs::path& path, const Matrix& m) {
  std::string text;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) text += ',';
      text += format_double(m(i, j));
    }
    text += '\n';
  }
  write_text_atomic(path, text);
}

Matrix parse_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t offset = 0;
  std::size_t width = 0;
  while (offset < text.size()) {
    std::size_t end = text.find('\n', offset);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(offset, end - offset);
    if (!trim(line).empty()) {
      std::vector<double> row;
      std::size_t pos = 0;
      while (true) {
        const std::size_t comma = line.find(',', pos);
        const std::string_view tok =
            line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        const double v = parse_double(tok, offset + pos, "csv");
        if (!std::isfinite(v)) {
          throw Error(ErrorKind::Data,
                      "csv: non-finite entry at byte offset " + std::to_string(offset + pos));
        }
        row.push_back(v);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
      }
      if (rows.empty()) {
        width = row.size();
      } else if (row.size() != width) {
        throw FormatError("csv: row has " + std::to_string(row.size()) + " values, expected " +
                              std::to_string(width),
                          offset);
      }
      rows.push_back(std::move(row));
    }
    offset = end + 1;
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

Matrix load_csv(const fs::path& path) {
  try {
    return parse_csv(read_text(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.byte_offset());
  }
}

KeyValueFile KeyValueFile::parse(std::string_view text, const std::string& origin) {
  KeyValueFile kv;
  kv.origin_ = origin;
  std::string section;
  std::size_t offset = 0;
  while (offset < text.size()) {
    std::size_t end = text.find('\n', offset);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(offset, end - offset));
    if (!line.empty() && line.front() != '#' && line.front() != ';') {
      if (line.front() == '[') {
        if (line.back() != ']') throw FormatError(origin + ": unterminated section header", offset);
        section = std::string(trim(line.substr(1, line.size() - 2)));
      } else {
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
          throw FormatError(origin + ": expected key=value", offset);
        }
        std::string key(trim(line.substr(0, eq)));
        if (!section.empty()) key = section + "." + key;
        kv.values_[key] = std::string(trim(line.substr(eq + 1)));
      }
    }
    offset = end + 1;
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorKind::Data, "file not found: " + path.string());
  return parse(read_text(path), path.string());
}

const std::string& KeyValueFile::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw FormatError(origin_ + ": missing key '" + key + "'", 0);
  }
  return it->second;
}

std::string KeyValueFile::get_or(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueFile::get_double(const std::string& key) const {
  return parse_double(get(key), 0, origin_ + " key '" + key + "'");
}

std::size_t KeyValueFile::get_count(const std::string& key) const {
  const std::string& s = get(key);
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError(origin_ + ": key '" + key + "' is not a count", 0);
  }
  return value;
}

std::string KeyValueFile::to_string() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

void KeyValueFile::save(const fs::path& path) const { write_text_atomic(path, to_string()); }

Vector parse_vector(std::string_view text) {
  text = trim(text);
  if (text.empty()) return Vector(0);
  const Matrix m = parse_csv(text);
  return m.row(0).transpose();
}

std::string format_vector(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(v(i));
  }
  return out;
}

void save_dataset(const fs::path& manifest, const TrajectoryDataset& data) {
  const fs::path dir = manifest.has_parent_path() ? manifest.parent_path() : fs::path(".");
  const std::string stem = manifest.stem().string();
  KeyValueFile kv;
  kv.set("format", "rollinf-dataset");
  kv.set("version", "1");
  kv.set("num_entries", std::to_string(data.size()));
  kv.set("dt", format_double(data.dt()));
  kv.set("t0", format_double(data.entry(0).trajectory.grid().t0));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& e = data.entry(i);
    const std::string prefix = "entry." + std::to_string(i) + ".";
    const std::string states_file = stem + "_" + std::to_string(i) + "_states.rom";
    kv.set(prefix + "param", format_vector(e.param));
    kv.set(prefix + "states", states_file);
    save_matrix(dir / states_file, e.trajectory.states());
    if (e.trajectory.has_controls()) {
      const std::string controls_file = stem + "_" + std::to_string(i) + "_controls.rom";
      kv.set(prefix + "controls", controls_file);
      save_matrix(dir / controls_file, e.trajectory.controls());
    }
  }
  kv.save(manifest);
}

TrajectoryDataset load_dataset(const fs::path& manifest) {
  const KeyValueFile kv = KeyValueFile::load(manifest);
  if (kv.get_or("format", "") != "rollinf-dataset") {
    throw FormatError(manifest.string() + ": not a rollinf dataset manifest", 0);
  }
  const fs::path dir = manifest.has_parent_path() ? manifest.parent_path() : fs::path(".");
  const double dt = kv.get_double("dt");
  const double t0 = kv.has("t0") ? kv.get_double("t0") : 0.0;
  const std::size_t count = kv.get_count("num_entries");
  std::vector<DatasetEntry> entries;
  for (std::size_t i = 0; i < count; ++i) {
    const std::string prefix = "entry." + std::to_string(i) + ".";
    Matrix states = load_any_matrix(resolve(dir, kv.get(prefix + "states")));
    Matrix controls(0, 0);
    if (kv.has(prefix + "controls")) controls = load_any_matrix(resolve(dir, kv.get(prefix + "controls")));
    if (states.cols() < 2) {
      throw Error(ErrorKind::DegenerateData, "entry " + std::to_string(i) + " has fewer than two states");
    }
    const TimeGrid grid(t0, dt, static_cast<std::size_t>(states.cols() - 1));
    entries.push_back({parse_vector(kv.get_or(prefix + "param", "")),
                       Trajectory(std::move(states), std::move(controls), grid)});
  }
  return TrajectoryDataset(std::move(entries));
}

void save_model(const fs::path& manifest, const PolyModel& model) {
  const fs::path dir = manifest.has_parent_path() ? manifest.parent_path() : fs::path(".");
  const std::string stem = manifest.stem().string();
  KeyValueFile kv;
  kv.set("format", "rollinf-model");
  kv.set("version", "1");
  kv.set("degree", std::to_string(model.degree()));
  kv.set("state_dim", std::to_string(model.state_dim()));
  kv.set("control_dim", std::to_string(model.control_dim()));
  kv.set("dt", format_double(model.dt()));
  kv.set("scheme", to_string(model.scheme()));
  for (std::size_t l = 1; l <= model.degree(); ++l) {
    const std::string file = stem + "_A" + std::to_string(l) + ".rom";
    kv.set("operator." + std::to_string(l), file);
    save_matrix(dir / file, model.A(l));
  }
  if (model.control_dim() > 0) {
    const std::string file = stem + "_B.rom";
    kv.set("operator.B", file);
    save_matrix(dir / file, model.B());
  }
  kv.save(manifest);
}

PolyModel load_model(const fs::path& manifest) {
  const KeyValueFile kv = KeyValueFile::load(manifest);
  if (kv.get_or("format", "") != "rollinf-model") {
    throw FormatError(manifest.string() + ": not a rollinf model manifest", 0);
  }
  const fs::path dir = manifest.has_parent_path() ? manifest.parent_path() : fs::path(".");
  const std::size_t degree = kv.get_count("degree");
  const std::size_t n = kv.get_count("state_dim");
  const std::size_t p = kv.get_count("control_dim");
  OperatorSet ops;
  for (std::size_t l = 1; l <= degree; ++l) {
    ops.A.push_back(load_matrix(resolve(dir, kv.get("operator." + std::to_string(l)))));
  }
  ops.B = p > 0 ? load_matrix(resolve(dir, kv.get("operator.B")))
                : Matrix(static_cast<Eigen::Index>(n), 0);
  if (ops.state_dim() != n || ops.control_dim() != p) {
    throw FormatError(manifest.string() + ": operator shapes disagree with the manifest", 0);
  }
  return PolyModel(std::move(ops), kv.get_double("dt"), scheme_from_string(kv.get("scheme")));
}

void save_basis(const fs::path& dir, const ReducedBasis& basis) {
  fs::create_directories(dir);
  save_matrix(dir / "V.rom", basis.V());
  save_csv(dir / "singular_values.csv", basis.singular_values());
}

ReducedBasis load_basis(const fs::path& dir) {
  Matrix V = load_matrix(dir / "V.rom");
  const Matrix sv = load_csv(dir / "singular_values.csv");
  if (sv.cols() != 1) throw FormatError((dir / "singular_values.csv").string() + ": expected one column", 0);
  return ReducedBasis(std::move(V), sv.col(0));
}

void save_model_set(const fs::path& dir, const ModelSet& set) {
  if (set.params.size() != set.models.size()) throw_argument("one parameter per model required");
  fs::create_directories(dir);
  KeyValueFile kv;
  kv.set("format", "rollinf-model-set");
  kv.set("version", "1");
  kv.set("num_models", std::to_string(set.models.size()));
  for (std::size_t i = 0; i < set.models.size(); ++i) {
    const std::string file = "model_" + std::to_string(i) + ".manifest";
    save_model(dir / file, set.models[i]);
    kv.set("model." + std::to_string(i) + ".param", format_vector(set.params[i]));
    kv.set("model." + std::to_string(i) + ".path", file);
  }
  kv.save(dir / "models.manifest");
}

ModelSet load_model_set(const fs::path& dir) {
  const fs::path manifest = dir / "models.manifest";
  const KeyValueFile kv = KeyValueFile::load(manifest);
  if (kv.get_or("format", "") != "rollinf-model-set") {
    throw FormatError(manifest.string() + ": not a rollinf model-set manifest", 0);
  }
  ModelSet set;
  const std::size_t count = kv.get_count("num_models");
  for (std::size_t i = 0; i < count; ++i) {
    set.params.push_back(parse_vector(kv.get("model." + std::to_string(i) + ".param")));
    set.models.push_back(load_model(resolve(dir, kv.get("model." + std::to_string(i) + ".path"))));
  }
  return set;
}

}  // namespace rollinf::io
