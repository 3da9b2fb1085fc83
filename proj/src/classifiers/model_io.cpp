#include <bit>
#include <cstring>
#include <stdexcept>

#include "dfo/classifiers.hpp"

namespace dfo {

namespace {

constexpr char kMagic[4] = {'D', 'F', 'O', 'M'};
constexpr std::uint16_t kVersion = 1;

// Fields are copied in host order; the format is defined as little-endian.
static_assert(std::endian::native == std::endian::little, "model container assumes a little-endian host");

class Writer {
 public:
  template <typename T>
  void put(T v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put_doubles(std::span<const double> v) {
    put<std::uint64_t>(v.size());
    for (double x : v) put(x);
  }
  void put_ints(std::span<const int> v) {
    put<std::uint64_t>(v.size());
    for (int x : v) put<std::int32_t>(x);
  }
  void put_matrix(const Matrix& m) {
    put<std::uint64_t>(m.rows());
    put<std::uint64_t>(m.cols());
    for (double x : m.values()) put(x);
  }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::size_t get_count(std::size_t element_size) {
    const auto n = get<std::uint64_t>();
    if (element_size > 0 && n > (bytes_.size() - pos_) / element_size) fail("length field exceeds file size");
    return static_cast<std::size_t>(n);
  }
  std::vector<double> get_doubles() {
    std::vector<double> v(get_count(8));
    for (auto& x : v) x = get<double>();
    return v;
  }
  std::vector<int> get_ints() {
    std::vector<int> v(get_count(4));
    for (auto& x : v) x = get<std::int32_t>();
    return v;
  }
  Matrix get_matrix() {
    const auto rows = get_count(0);
    const auto cols = get_count(0);
    if (cols != 0 && rows > (bytes_.size() - pos_) / 8 / cols) fail("matrix exceeds file size");
    std::vector<double> data(rows * cols);
    for (auto& x : data) x = get<double>();
    return Matrix(rows, cols, std::move(data));
  }
  void finish() const {
    if (pos_ != bytes_.size()) fail("trailing bytes after model payload");
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("model container, byte " + std::to_string(pos_) + ": " + what);
  }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) fail("unexpected end of data");
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void write_payload(Writer& w, const LogisticModel& m) {
  w.put_matrix(m.weights);
  w.put_doubles(m.bias);
  w.put<std::int32_t>(m.iterations);
  w.put(m.gradient_norm);
}
void write_payload(Writer& w, const KnnModel& m) {
  w.put<std::int32_t>(m.k);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(m.metric));
  w.put_matrix(m.train_x);
  w.put_ints(m.train_y);
}
void write_payload(Writer& w, const SvmModel& m) {
  w.put<std::uint8_t>(static_cast<std::uint8_t>(m.kernel));
  w.put(m.gamma);
  w.put_matrix(m.basis);
  w.put_matrix(m.coef);
  w.put_doubles(m.bias);
  w.put_doubles(m.max_violation);
}
void write_payload(Writer& w, const MlpModel& m) {
  w.put_matrix(m.w1);
  w.put_doubles(m.b1);
  w.put_matrix(m.w2);
  w.put_doubles(m.b2);
  w.put<std::int32_t>(m.epochs_run);
  w.put_doubles(m.loss_history);
}
void write_payload(Writer& w, const ForestModel& m) {
  w.put<std::uint8_t>(m.bootstrap ? 1 : 0);
  w.put<std::uint64_t>(m.trees.size());
  for (const auto& tree : m.trees) {
    w.put<std::uint64_t>(tree.nodes().size());
    for (const auto& node : tree.nodes()) {
      w.put<std::int32_t>(node.feature);
      w.put(node.threshold);
      w.put<std::int32_t>(node.left);
      w.put<std::int32_t>(node.right);
      w.put(node.gain);
      w.put<std::uint64_t>(node.samples);
      w.put_doubles(node.distribution);
    }
  }
}
void write_payload(Writer& w, const GbdtModel& m) {
  w.put_doubles(m.init_score);
  w.put_doubles(m.train_loss);
  w.put<std::uint64_t>(m.trees.size());
  for (const auto& tree : m.trees) {
    w.put<std::uint64_t>(tree.size());
    for (const auto& node : tree) {
      w.put<std::int32_t>(node.feature);
      w.put(node.threshold);
      w.put<std::int32_t>(node.left);
      w.put<std::int32_t>(node.right);
      w.put(node.value);
      w.put(node.gain);
    }
  }
}

LogisticModel read_logistic(Reader& r) {
  LogisticModel m;
  m.weights = r.get_matrix();
  m.bias = r.get_doubles();
  m.iterations = r.get<std::int32_t>();
  m.gradient_norm = r.get<double>();
  return m;
}
KnnModel read_knn(Reader& r) {
  KnnModel m;
  m.k = r.get<std::int32_t>();
  const auto metric = r.get<std::uint8_t>();
  if (metric > 1) r.fail("unknown KNN metric code");
  m.metric = static_cast<KnnModel::Metric>(metric);
  m.train_x = r.get_matrix();
  m.train_y = r.get_ints();
  return m;
}
SvmModel read_svm(Reader& r) {
  SvmModel m;
  const auto kernel = r.get<std::uint8_t>();
  if (kernel > 1) r.fail("unknown SVM kernel code");
  m.kernel = static_cast<SvmModel::Kernel>(kernel);
  m.gamma = r.get<double>();
  m.basis = r.get_matrix();
  m.coef = r.get_matrix();
  m.bias = r.get_doubles();
  m.max_violation = r.get_doubles();
  return m;
}
MlpModel read_mlp(Reader& r) {
  MlpModel m;
  m.w1 = r.get_matrix();
  m.b1 = r.get_doubles();
  m.w2 = r.get_matrix();
  m.b2 = r.get_doubles();
  m.epochs_run = r.get<std::int32_t>();
  m.loss_history = r.get_doubles();
  return m;
}
ForestModel read_forest(Reader& r, int k) {
  ForestModel m;
  m.bootstrap = r.get<std::uint8_t>() != 0;
  const auto n_trees = r.get_count(8);
  for (std::size_t t = 0; t < n_trees; ++t) {
    std::vector<TreeNode> nodes(r.get_count(8));
    for (auto& node : nodes) {
      node.feature = r.get<std::int32_t>();
      node.threshold = r.get<double>();
      node.left = r.get<std::int32_t>();
      node.right = r.get<std::int32_t>();
      node.gain = r.get<double>();
      node.samples = r.get<std::uint64_t>();
      node.distribution = r.get_doubles();
    }
    m.trees.emplace_back(k, std::move(nodes));
  }
  return m;
}
GbdtModel read_gbdt(Reader& r) {
  GbdtModel m;
  m.init_score = r.get_doubles();
  m.train_loss = r.get_doubles();
  m.trees.resize(r.get_count(8));
  for (auto& tree : m.trees) {
    tree.resize(r.get_count(8));
    for (auto& node : tree) {
      node.feature = r.get<std::int32_t>();
      node.threshold = r.get<double>();
      node.left = r.get<std::int32_t>();
      node.right = r.get<std::int32_t>();
      node.value = r.get<double>();
      node.gain = r.get<double>();
    }
  }
  return m;
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const TrainedModel& model) {
  Writer w;
  for (char c : kMagic) w.put(c);
  w.put(kVersion);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(model.kind()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(model.num_classes()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(model.input_dim()));
  w.put<std::uint64_t>(model.seed());
  std::visit([&](const auto& payload) { write_payload(w, payload); }, model.payload());
  return w.take();
}

TrainedModel deserialize_model(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  for (char c : kMagic) {
    if (r.get<char>() != c) r.fail("bad magic, expected DFOM");
  }
  if (const auto version = r.get<std::uint16_t>(); version != kVersion) {
    r.fail("unsupported version " + std::to_string(version));
  }
  const auto kind_code = r.get<std::uint8_t>();
  if (kind_code > static_cast<std::uint8_t>(ClassifierKind::kGBDT)) r.fail("unknown classifier kind");
  const auto kind = static_cast<ClassifierKind>(kind_code);
  const auto k = static_cast<int>(r.get<std::uint32_t>());
  const auto d = static_cast<std::size_t>(r.get<std::uint32_t>());
  const auto seed = r.get<std::uint64_t>();
  ModelPayload payload = [&]() -> ModelPayload {
    switch (kind) {
      case ClassifierKind::kLR: return read_logistic(r);
      case ClassifierKind::kKNN: return read_knn(r);
      case ClassifierKind::kSVM: return read_svm(r);
      case ClassifierKind::kMLP: return read_mlp(r);
      case ClassifierKind::kRF:
      case ClassifierKind::kET: return read_forest(r, k);
      case ClassifierKind::kGBDT: return read_gbdt(r);
    }
    r.fail("unknown classifier kind");
  }();
  r.finish();
  return TrainedModel(kind, k, d, seed, std::move(payload));
}

}  // namespace dfo
