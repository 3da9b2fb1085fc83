#include "doctest.h"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "dfo/fs_util.hpp"
#include "dfo/tensor_io.hpp"

namespace fs = std::filesystem;
using dfo::DType;
using dfo::ManifestError;
using dfo::Tensor;
using dfo::TensorIoError;

namespace {

const fs::path kNpyDir = fs::path(DFO_FIXTURE_DIR) / "npy";

DType dtype_of(const std::string& descr) {
  if (descr == "<f4") return DType::kF32;
  if (descr == "<f8") return DType::kF64;
  return DType::kI64;
}

TensorIoError::Kind error_kind(std::span<const std::uint8_t> bytes) {
  try {
    dfo::read_array(bytes);
  } catch (const TensorIoError& e) {
    return e.kind();
  }
  FAIL("expected TensorIoError");
  return TensorIoError::Kind::kIo;
}

std::vector<std::uint8_t> to_bytes(const std::string& s) { return {s.begin(), s.end()}; }

}  // namespace

TEST_CASE("reads every numpy-written fixture and re-writes it byte-identically") {
  const auto index = nlohmann::json::parse(dfo::read_file_text(kNpyDir / "index.json"));
  REQUIRE(index.size() >= 20);
  for (const auto& item : index) {
    const auto name = item["file"].get<std::string>();
    CAPTURE(name);
    const auto bytes = dfo::read_file_bytes(kNpyDir / name);
    const auto t = dfo::read_array(bytes);
    CHECK(t.dtype() == dtype_of(item["dtype"].get<std::string>()));
    CHECK(t.shape() == item["shape"].get<std::vector<std::size_t>>());
    const auto got = t.to_f64();
    REQUIRE(got.size() == item["values"].size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == item["values"][i].get<double>());
    if (item["numpy_writer"].get<bool>()) CHECK(dfo::write_array(t) == bytes);
  }
}

TEST_CASE("single f64 zero occupies a 128-byte header and 136 bytes total") {
  const Tensor t(std::vector<std::size_t>{1}, std::vector<double>{0.0});
  const auto bytes = dfo::write_array(t);
  CHECK(bytes.size() == 136);
  const std::uint16_t header_len = static_cast<std::uint16_t>(bytes[8] | (bytes[9] << 8));
  CHECK(10 + header_len == 128);
  CHECK(bytes[127] == '\n');
}

TEST_CASE("written payload is 64-byte aligned for many shapes") {
  for (std::size_t n = 0; n < 40; ++n) {
    for (std::size_t rank = 1; rank <= 4; ++rank) {
      std::vector<std::size_t> shape(rank, 1);
      shape[0] = n;
      const Tensor t(shape, std::vector<float>(n, 1.5f));
      const auto bytes = dfo::write_array(t);
      const std::size_t header_len = bytes[8] | (bytes[9] << 8);
      CHECK((10 + header_len) % 64 == 0);
      CHECK(bytes.size() == 10 + header_len + 4 * n);
      CHECK(dfo::read_array(bytes).bit_equal(t));
    }
  }
}

TEST_CASE("round trip preserves NaN and signed zero bits") {
  const Tensor t(std::vector<std::size_t>{4}, std::vector<double>{std::nan(""), -0.0, 1e-310, -1e308});
  CHECK(dfo::read_array(dfo::write_array(t)).bit_equal(t));
  const Tensor i(std::vector<std::size_t>{2, 2},
                 std::vector<std::int64_t>{INT64_MIN, INT64_MAX, 0, -1});
  CHECK(dfo::read_array(dfo::write_array(i)).bit_equal(i));
}

TEST_CASE("fortran order and v2.0 headers are accepted") {
  const auto f = dfo::read_array_file(kNpyDir / "fortran.npy");
  CHECK(f.shape() == std::vector<std::size_t>{2, 3, 4});
  CHECK(f.to_f64()[1] == -2.5);  // row-major element (0,0,1)
  const auto v2 = dfo::read_array_file(kNpyDir / "v2.npy");
  CHECK(v2.dtype() == DType::kF32);
  CHECK(v2.to_f64()[23] == 8.5);
}

TEST_CASE("unsupported dtypes are rejected with the descr offset") {
  for (const char* name : {"big_endian.npy", "int32.npy"}) {
    CAPTURE(name);
    const auto bytes = dfo::read_file_bytes(kNpyDir / name);
    const std::string text(bytes.begin(), bytes.end());
    try {
      dfo::read_array(bytes);
      FAIL("expected an error");
    } catch (const TensorIoError& e) {
      CHECK(e.kind() == TensorIoError::Kind::kUnsupportedDtype);
      const auto pos = text.find("'descr': '") + 10;
      CHECK(e.offset() >= pos - 1);
      CHECK(e.offset() <= pos);
    }
  }
}

TEST_CASE("malformed inputs map to distinct error kinds") {
  const Tensor t(std::vector<std::size_t>{3}, std::vector<double>{1, 2, 3});
  const auto good = dfo::write_array(t);

  auto bad_magic = good;
  bad_magic[1] = 'X';
  CHECK(error_kind(bad_magic) == TensorIoError::Kind::kBadMagic);

  auto bad_version = good;
  bad_version[6] = 3;
  CHECK(error_kind(bad_version) == TensorIoError::Kind::kUnsupportedVersion);

  auto truncated = good;
  truncated.pop_back();
  CHECK(error_kind(truncated) == TensorIoError::Kind::kLengthMismatch);

  auto extra = good;
  extra.push_back(0);
  CHECK(error_kind(extra) == TensorIoError::Kind::kLengthMismatch);

  auto garbled = good;
  const std::string key = "'shape'";
  auto it = std::search(garbled.begin(), garbled.end(), key.begin(), key.end());
  REQUIRE(it != garbled.end());
  *(it + 1) = 'x';
  CHECK(error_kind(garbled) == TensorIoError::Kind::kMalformedHeader);

  CHECK(error_kind(to_bytes("")) == TensorIoError::Kind::kBadMagic);
  CHECK(error_kind(to_bytes("\x93NUMPY")) == TensorIoError::Kind::kLengthMismatch);
}

TEST_CASE("missing file is an Io error") {
  try {
    dfo::read_array_file(kNpyDir / "does_not_exist.npy");
    FAIL("expected an error");
  } catch (const TensorIoError& e) {
    CHECK(e.kind() == TensorIoError::Kind::kIo);
  }
}

// ------------------------------------------------------------------ manifest

namespace {

const char* kThree = R"({"class_names":["Highly fresh","Fresh","Not fresh"],"feature_dim":4,"entries":[
 {"sample_id":"a","label_name":"Fresh","feature_path":"a.npy","backbone":"swin_t","stage":"high"},
 {"sample_id":"b","label_name":"Not fresh","feature_path":"b.npy","backbone":"swin_t","stage":"high"},
 {"sample_id":"c","label_name":"Highly fresh","feature_path":"c.npy","backbone":"swin_t","stage":"high"}]})";

ManifestError::Kind manifest_error(const std::string& text, std::string* subject = nullptr) {
  try {
    dfo::parse_manifest(text, ".", false);
  } catch (const ManifestError& e) {
    if (subject) *subject = e.subject();
    return e.kind();
  }
  FAIL("expected ManifestError");
  return ManifestError::Kind::kMalformed;
}

}  // namespace

TEST_CASE("manifest labels resolve against class_names order") {
  const auto m = dfo::parse_manifest(kThree, "/data", false);
  CHECK(m.class_names.size() == 3);
  REQUIRE(m.entries.size() == 3);
  CHECK(m.entries[0].label == 1);
  CHECK(m.entries[1].label == 2);
  CHECK(m.entries[2].label == 0);
  CHECK(m.resolve(m.entries[0]) == fs::path("/data/a.npy"));
  CHECK(dfo::parse_manifest(kThree, "/data", false) == m);
}

TEST_CASE("manifest validation errors") {
  std::string subject;
  std::string rotten = kThree;
  rotten.replace(rotten.find("\"Not fresh\",\"feature_path\""), 11, "\"Rotten\"");
  CHECK(manifest_error(rotten, &subject) == ManifestError::Kind::kUnknownLabel);
  CHECK(subject == "Rotten");

  std::string dup = kThree;
  dup.replace(dup.find("\"sample_id\":\"b\""), 15, "\"sample_id\":\"a\"");
  CHECK(manifest_error(dup, &subject) == ManifestError::Kind::kDuplicateSampleId);
  CHECK(subject == "a");

  CHECK(manifest_error(R"({"class_names":["x","y"],"feature_dim":4,"entries":[]})") ==
        ManifestError::Kind::kEmptyManifest);
  CHECK(manifest_error("{not json") == ManifestError::Kind::kMalformed);
  CHECK(manifest_error(R"({"class_names":["x"],"entries":[{"sample_id":"a"}]})") == ManifestError::Kind::kMalformed);
}

TEST_CASE("missing feature files are reported when checked") {
  try {
    dfo::parse_manifest(kThree, kNpyDir, true);
    FAIL("expected ManifestError");
  } catch (const ManifestError& e) {
    CHECK(e.kind() == ManifestError::Kind::kMissingFeatureFile);
    CHECK(e.subject() == "a");
  }
}

TEST_CASE("bundled mini manifest loads") {
  const auto m = dfo::load_manifest(fs::path(DFO_FIXTURE_DIR) / "mini" / "manifest.json");
  CHECK(m.entries.size() == 300);
  CHECK(m.feature_dim == 64);
  CHECK(m.class_names.size() == 3);
}
