#include "dfo/tensor_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <functional>
#include <numeric>
#include <optional>

#include "json.hpp"

#include "dfo/fs_util.hpp"

namespace dfo {

static_assert(std::endian::native == std::endian::little, "NPY payloads are read in place as little-endian");

namespace {

constexpr std::uint8_t kMagic[6] = {0x93, 'N', 'U', 'M', 'P', 'Y'};
constexpr std::size_t kArrayAlign = 64;
constexpr std::size_t kGrowthAxisMaxDigits = 21;

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

template <typename T>
void check_count(const std::vector<std::size_t>& shape, const std::vector<T>& data) {
  if (shape_product(shape) != data.size()) {
    throw std::invalid_argument("tensor shape product " + std::to_string(shape_product(shape)) +
                                " != element count " + std::to_string(data.size()));
  }
}

// Minimal reader for the Python dict literal numpy writes in the header.
class HeaderParser {
 public:
  HeaderParser(std::string_view text, std::size_t base) : text_(text), base_(base) {}

  struct Result {
    std::string descr;
    std::size_t descr_offset = 0;
    bool fortran_order = false;
    std::vector<std::size_t> shape;
  };

  Result parse() {
    Result out;
    bool have_descr = false, have_order = false, have_shape = false;
    skip_ws();
    expect('{');
    while (true) {
      skip_ws();
      if (peek() == '}') {
        ++pos_;
        break;
      }
      const std::string key = string_literal();
      skip_ws();
      expect(':');
      skip_ws();
      if (key == "descr") {
        out.descr_offset = base_ + pos_;
        out.descr = string_literal();
        have_descr = true;
      } else if (key == "fortran_order") {
        out.fortran_order = boolean();
        have_order = true;
      } else if (key == "shape") {
        out.shape = tuple();
        have_shape = true;
      } else {
        fail("unexpected header key '" + key + "'");
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != '}') {
        fail("expected ',' or '}'");
      }
    }
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters after header dict");
    if (!have_descr || !have_order || !have_shape) fail("header must define descr, fortran_order and shape");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw TensorIoError(TensorIoError::Kind::kMalformedHeader, base_ + pos_, what);
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\n' || text_[pos_] == '\t')) ++pos_;
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string string_literal() {
    const char quote = peek();
    if (quote != '\'' && quote != '"') fail("expected string literal");
    ++pos_;
    const auto end = text_.find(quote, pos_);
    if (end == std::string_view::npos) fail("unterminated string literal");
    std::string s(text_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return s;
  }
  bool boolean() {
    if (text_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    fail("expected True or False");
  }
  std::vector<std::size_t> tuple() {
    std::vector<std::size_t> dims;
    expect('(');
    while (true) {
      skip_ws();
      if (peek() == ')') {
        ++pos_;
        return dims;
      }
      if (peek() < '0' || peek() > '9') fail("expected non-negative integer extent");
      std::size_t v = 0;
      while (peek() >= '0' && peek() <= '9') {
        v = v * 10 + static_cast<std::size_t>(peek() - '0');
        ++pos_;
      }
      dims.push_back(v);
      skip_ws();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != ')') {
        fail("expected ',' or ')' in shape");
      }
    }
  }

  std::string_view text_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

std::optional<DType> dtype_from_descr(std::string_view descr) {
  if (descr == "<f4") return DType::kF32;
  if (descr == "<f8") return DType::kF64;
  if (descr == "<i8") return DType::kI64;
  return std::nullopt;
}

template <typename T>
std::vector<T> decode_payload(std::span<const std::uint8_t> bytes, std::size_t count) {
  std::vector<T> out(count);
  if (count > 0) std::memcpy(out.data(), bytes.data(), count * sizeof(T));
  return out;
}

// Reorders a column-major buffer into row-major for the given shape.
template <typename T>
std::vector<T> fortran_to_c(const std::vector<T>& src, const std::vector<std::size_t>& shape) {
  const std::size_t n = src.size();
  if (shape.size() < 2 || n == 0) return src;
  std::vector<std::size_t> f_stride(shape.size());
  std::size_t s = 1;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    f_stride[k] = s;
    s *= shape[k];
  }
  std::vector<T> dst(n);
  std::vector<std::size_t> idx(shape.size(), 0);
  for (std::size_t linear = 0; linear < n; ++linear) {
    std::size_t f = 0;
    for (std::size_t k = 0; k < shape.size(); ++k) f += idx[k] * f_stride[k];
    dst[linear] = src[f];
    for (std::size_t k = shape.size(); k-- > 0;) {
      if (++idx[k] < shape[k]) break;
      idx[k] = 0;
    }
  }
  return dst;
}

std::string shape_repr(const std::vector<std::size_t>& shape) {
  std::string s = "(";
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (k > 0) s += ", ";
    s += std::to_string(shape[k]);
  }
  if (shape.size() == 1) s += ",";
  return s + ")";
}

}  // namespace

std::string_view dtype_descr(DType dtype) noexcept {
  switch (dtype) {
    case DType::kF32: return "<f4";
    case DType::kF64: return "<f8";
    case DType::kI64: return "<i8";
  }
  return "";
}

std::size_t dtype_size(DType dtype) noexcept { return dtype == DType::kF32 ? 4 : 8; }

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<float> data)
    : shape_(std::move(shape)), storage_(std::move(data)) {
  check_count(shape_, std::get<0>(storage_));
}
Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), storage_(std::move(data)) {
  check_count(shape_, std::get<1>(storage_));
}
Tensor::Tensor(std::vector<std::size_t> shape, std::vector<std::int64_t> data)
    : shape_(std::move(shape)), storage_(std::move(data)) {
  check_count(shape_, std::get<2>(storage_));
}

std::size_t Tensor::size() const noexcept {
  return std::visit([](const auto& v) { return v.size(); }, storage_);
}

std::vector<double> Tensor::to_f64() const {
  return std::visit([](const auto& v) { return std::vector<double>(v.begin(), v.end()); }, storage_);
}

std::vector<std::uint8_t> Tensor::payload() const {
  return std::visit(
      [](const auto& v) {
        std::vector<std::uint8_t> out(v.size() * sizeof(v[0]));
        if (!out.empty()) std::memcpy(out.data(), v.data(), out.size());
        return out;
      },
      storage_);
}

bool Tensor::bit_equal(const Tensor& other) const {
  return dtype() == other.dtype() && shape_ == other.shape_ && payload() == other.payload();
}

TensorIoError::TensorIoError(Kind kind, std::size_t offset, const std::string& detail)
    : DataError("npy error at byte " + std::to_string(offset) + ": " + detail), kind_(kind), offset_(offset) {}

Tensor read_array(std::span<const std::uint8_t> bytes) {
  using K = TensorIoError::Kind;
  if (bytes.size() < 6 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw TensorIoError(K::kBadMagic, 0, "missing \\x93NUMPY magic");
  }
  if (bytes.size() < 10) throw TensorIoError(K::kLengthMismatch, bytes.size(), "truncated preamble");
  const std::uint8_t major = bytes[6];
  std::size_t header_len = 0;
  std::size_t header_start = 0;
  if (major == 1) {
    header_len = bytes[8] | (std::size_t{bytes[9]} << 8);
    header_start = 10;
  } else if (major == 2) {
    if (bytes.size() < 12) throw TensorIoError(K::kLengthMismatch, bytes.size(), "truncated preamble");
    header_len = bytes[8] | (std::size_t{bytes[9]} << 8) | (std::size_t{bytes[10]} << 16) |
                 (std::size_t{bytes[11]} << 24);
    header_start = 12;
  } else {
    throw TensorIoError(K::kUnsupportedVersion, 6,
                        "unsupported version " + std::to_string(major) + "." + std::to_string(bytes[7]));
  }
  const std::size_t payload_start = header_start + header_len;
  if (payload_start > bytes.size()) {
    throw TensorIoError(K::kLengthMismatch, header_start,
                        "declared header length " + std::to_string(header_len) + " exceeds file size");
  }
  const std::string_view header(reinterpret_cast<const char*>(bytes.data() + header_start), header_len);
  const auto parsed = HeaderParser(header, header_start).parse();
  const auto dtype = dtype_from_descr(parsed.descr);
  if (!dtype) throw TensorIoError(K::kUnsupportedDtype, parsed.descr_offset, "unsupported descr '" + parsed.descr + "'");

  const std::size_t count = shape_product(parsed.shape);
  const std::size_t expected = count * dtype_size(*dtype);
  const std::size_t available = bytes.size() - payload_start;
  if (available != expected) {
    throw TensorIoError(K::kLengthMismatch, payload_start,
                        "payload has " + std::to_string(available) + " bytes, header implies " +
                            std::to_string(expected));
  }
  const auto payload = bytes.subspan(payload_start);
  auto build = [&](auto tag) {
    using T = decltype(tag);
    auto data = decode_payload<T>(payload, count);
    if (parsed.fortran_order) data = fortran_to_c(data, parsed.shape);
    return Tensor(parsed.shape, std::move(data));
  };
  switch (*dtype) {
    case DType::kF32: return build(float{});
    case DType::kF64: return build(double{});
    case DType::kI64: return build(std::int64_t{});
  }
  throw TensorIoError(K::kUnsupportedDtype, parsed.descr_offset, "unreachable");
}

Tensor read_array_file(const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = read_file_bytes(path);
  } catch (const DataError& e) {
    throw TensorIoError(TensorIoError::Kind::kIo, 0, e.what());
  }
  return read_array(bytes);
}

std::vector<std::uint8_t> write_array(const Tensor& tensor) {
  std::string dict = "{'descr': '";
  dict += dtype_descr(tensor.dtype());
  dict += "', 'fortran_order': False, 'shape': ";
  dict += shape_repr(tensor.shape());
  dict += ", }";
  if (!tensor.shape().empty()) {
    const std::size_t digits = std::to_string(tensor.shape().front()).size();
    if (digits < kGrowthAxisMaxDigits) dict.append(kGrowthAxisMaxDigits - digits, ' ');
  }
  // numpy always pads with 1..64 spaces before the newline.
  const std::size_t unpadded = 10 + dict.size() + 1;
  const std::size_t pad = kArrayAlign - unpadded % kArrayAlign;
  dict.append(pad, ' ');
  dict += '\n';
  if (dict.size() > 0xFFFF) throw std::length_error("npy v1.0 header exceeds 65535 bytes");

  const auto payload = tensor.payload();
  std::vector<std::uint8_t> out;
  out.reserve(10 + dict.size() + payload.size());
  for (auto b : kMagic) out.push_back(b);
  out.push_back(1);
  out.push_back(0);
  out.push_back(static_cast<std::uint8_t>(dict.size() & 0xFF));
  out.push_back(static_cast<std::uint8_t>(dict.size() >> 8));
  out.insert(out.end(), dict.begin(), dict.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

void write_array_file(const std::filesystem::path& path, const Tensor& tensor) {
  write_file_atomic(path, write_array(tensor));
}

ManifestError::ManifestError(Kind kind, const std::string& subject, const std::string& detail)
    : DataError(detail), kind_(kind), subject_(subject) {}

DatasetManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir, bool check_files) {
  using K = ManifestError::Kind;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ManifestError(K::kMalformed, "", std::string("manifest is not valid JSON: ") + e.what());
  }

  DatasetManifest m;
  m.base_dir = base_dir;
  try {
    m.class_names = doc.at("class_names").get<std::vector<std::string>>();
    const auto dim = doc.at("feature_dim").get<std::int64_t>();
    if (dim <= 0) throw ManifestError(K::kMalformed, "", "feature_dim must be positive");
    m.feature_dim = static_cast<std::size_t>(dim);
    for (const auto& e : doc.at("entries")) {
      ManifestEntry entry;
      entry.sample_id = e.at("sample_id").get<std::string>();
      entry.label_name = e.at("label_name").get<std::string>();
      entry.feature_path = e.at("feature_path").get<std::string>();
      entry.backbone = e.value("backbone", "");
      entry.stage = e.value("stage", "");
      m.entries.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ManifestError(K::kMalformed, "", std::string("manifest schema violation: ") + e.what());
  }

  if (m.class_names.empty()) throw ManifestError(K::kMalformed, "", "class_names is empty");
  if (m.entries.empty()) throw ManifestError(K::kEmptyManifest, "", "manifest has no entries");

  std::vector<std::string> seen;
  seen.reserve(m.entries.size());
  for (auto& entry : m.entries) {
    const auto label_it = std::find(m.class_names.begin(), m.class_names.end(), entry.label_name);
    if (label_it == m.class_names.end()) {
      throw ManifestError(K::kUnknownLabel, entry.label_name,
                          "sample '" + entry.sample_id + "' has unknown label '" + entry.label_name + "'");
    }
    entry.label = static_cast<int>(label_it - m.class_names.begin());
    seen.push_back(entry.sample_id);
  }
  std::sort(seen.begin(), seen.end());
  if (auto dup = std::adjacent_find(seen.begin(), seen.end()); dup != seen.end()) {
    throw ManifestError(K::kDuplicateSampleId, *dup, "duplicate sample_id '" + *dup + "'");
  }
  if (check_files) {
    for (const auto& entry : m.entries) {
      if (!std::filesystem::is_regular_file(m.resolve(entry))) {
        throw ManifestError(K::kMissingFeatureFile, entry.sample_id,
                            "feature file for sample '" + entry.sample_id + "' not found: " + entry.feature_path);
      }
    }
  }
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file_text(path);
  } catch (const DataError& e) {
    throw ManifestError(ManifestError::Kind::kMalformed, "", e.what());
  }
  return parse_manifest(text, path.parent_path());
}

}  // namespace dfo
