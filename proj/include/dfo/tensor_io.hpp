#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dfo/errors.hpp"

namespace dfo {

enum class DType : std::uint8_t { kF32, kF64, kI64 };

/// NPY descr code for a dtype, e.g. "<f8".
std::string_view dtype_descr(DType dtype) noexcept;
std::size_t dtype_size(DType dtype) noexcept;

/// n-dimensional array in row-major order. The storage type is fixed by the
/// dtype, so an unsupported element type cannot be represented at all.
class Tensor {
 public:
  using Storage = std::variant<std::vector<float>, std::vector<double>, std::vector<std::int64_t>>;

  Tensor() : Tensor(std::vector<std::size_t>{0}, std::vector<double>{}) {}
  Tensor(std::vector<std::size_t> shape, std::vector<float> data);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);
  Tensor(std::vector<std::size_t> shape, std::vector<std::int64_t> data);

  DType dtype() const noexcept { return static_cast<DType>(storage_.index()); }
  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept;

  template <typename T>
  std::span<const T> values() const {
    return std::get<std::vector<T>>(storage_);
  }

  /// Elements widened to f64 (the internal compute type).
  std::vector<double> to_f64() const;

  /// Raw little-endian payload bytes.
  std::vector<std::uint8_t> payload() const;

  /// True when dtype, shape and every payload bit agree (NaN-safe).
  bool bit_equal(const Tensor& other) const;

 private:
  std::vector<std::size_t> shape_;
  Storage storage_;
};

class TensorIoError : public DataError {
 public:
  enum class Kind { kBadMagic, kUnsupportedVersion, kMalformedHeader, kUnsupportedDtype, kLengthMismatch, kIo };

  TensorIoError(Kind kind, std::size_t offset, const std::string& detail);

  Kind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// Parses an NPY v1.0 or v2.0 byte image. Fortran-ordered payloads are
/// transposed to row-major.
Tensor read_array(std::span<const std::uint8_t> bytes);
Tensor read_array_file(const std::filesystem::path& path);

/// Serializes as NPY v1.0. The header is laid out exactly as numpy's
/// np.save lays it out, so output is byte-identical to numpy for the same
/// array; the payload starts on a 64-byte boundary.
std::vector<std::uint8_t> write_array(const Tensor& tensor);
void write_array_file(const std::filesystem::path& path, const Tensor& tensor);

struct ManifestEntry {
  std::string sample_id;
  std::string label_name;
  std::string feature_path;  // as written, relative to the manifest directory
  std::string backbone;
  std::string stage;
  int label = -1;            // index into class_names

  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::vector<std::string> class_names;
  std::size_t feature_dim = 0;
  std::vector<ManifestEntry> entries;
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const ManifestEntry& entry) const { return base_dir / entry.feature_path; }
  bool operator==(const DatasetManifest&) const = default;
};

class ManifestError : public DataError {
 public:
  enum class Kind { kMalformed, kEmptyManifest, kDuplicateSampleId, kUnknownLabel, kMissingFeatureFile };

  ManifestError(Kind kind, const std::string& subject, const std::string& detail);

  Kind kind() const noexcept { return kind_; }
  /// The offending sample_id or label name.
  const std::string& subject() const noexcept { return subject_; }

 private:
  Kind kind_;
  std::string subject_;
};

/// Validates a manifest document. When check_files is set every referenced
/// feature file must exist relative to base_dir.
DatasetManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir,
                               bool check_files = true);
DatasetManifest load_manifest(const std::filesystem::path& path);

}  // namespace dfo
