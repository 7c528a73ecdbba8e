#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "rollinf/basis.hpp"
#include "rollinf/datamodel.hpp"
#include "rollinf/polymodel.hpp"

namespace rollinf::io {

namespace fs = std::filesystem;

// ROM1 layout (little-endian): "ROM1", u32 version = 1, u64 rows, u64 cols,
// rows * cols f64 values in row-major order.
void save_matrix(const fs::path& path, const Matrix& m);
Matrix load_matrix(const fs::path& path);
// Dispatches on the magic: ROM1 files are read as binary, anything else as CSV.
Matrix load_any_matrix(const fs::path& path);

// Comma-separated decimal floats, one row per line, no header; values written
// with 17 significant digits so they parse back to the same double.
void save_csv(const fs::path& path, const Matrix& m);
Matrix load_csv(const fs::path& path);
Matrix parse_csv(std::string_view text);
std::string format_double(double v);

// key=value text; "[section]" headers prefix following keys with "section.".
// '#' starts a comment line.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::string_view text, const std::string& origin = "<memory>");
  static KeyValueFile load(const fs::path& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  std::size_t get_count(const std::string& key) const;
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string to_string() const;
  void save(const fs::path& path) const;

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

Vector parse_vector(std::string_view text);
std::string format_vector(const Vector& v);

// Dataset manifest: key=value listing dt, t0 and per-entry parameter vectors
// with paths (relative to the manifest directory) of state/control matrices.
void save_dataset(const fs::path& manifest, const TrajectoryDataset& data);
TrajectoryDataset load_dataset(const fs::path& manifest);

// Model manifest: degree, dims, dt, scheme plus one ROM1 file per operator.
void save_model(const fs::path& manifest, const PolyModel& model);
PolyModel load_model(const fs::path& manifest);

// Directory with V.rom (N x n) and singular_values.csv (one column).
void save_basis(const fs::path& dir, const ReducedBasis& basis);
ReducedBasis load_basis(const fs::path& dir);

// One model per training parameter: dir/models.manifest plus model_<i> files.
struct ModelSet {
  std::vector<Vector> params;
  std::vector<PolyModel> models;
};
void save_model_set(const fs::path& dir, const ModelSet& set);
ModelSet load_model_set(const fs::path& dir);

// Writes to a sibling temporary file and renames it into place.
void write_text_atomic(const fs::path& path, const std::string& text);

}  // namespace rollinf::io
