#include "padpipe/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "padpipe/errors.hpp"
#include "padpipe/feature_layout.hpp"
#include "padpipe/rng.hpp"

namespace pad {

namespace {

constexpr char kMagic[8] = {'P', 'A', 'D', 'M', 'O', 'D', 'E', 'L'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
  }
  std::vector<std::uint8_t> out;

 private:
  void le(std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error("model file truncated");
  }
  std::size_t pos() const { return pos_; }
  std::span<const std::uint8_t> rest() const { return bytes_.subspan(pos_); }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }

 private:
  std::uint64_t le(int bytes) {
    need(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(bytes);
    return v;
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

nlohmann::json train_config_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"patience", c.patience},
          {"reduce_factor", c.reduce_factor},
          {"min_delta", c.min_delta},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"validation_fraction", c.validation_fraction},
          {"seed", c.seed},
          {"adam", {{"beta1", c.adam.beta1}, {"beta2", c.adam.beta2}, {"epsilon", c.adam.epsilon}}}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.patience = j.at("patience").get<int>();
  c.reduce_factor = j.at("reduce_factor").get<double>();
  c.min_delta = j.at("min_delta").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.validation_fraction = j.at("validation_fraction").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.adam.beta1 = j.at("adam").at("beta1").get<double>();
  c.adam.beta2 = j.at("adam").at("beta2").get<double>();
  c.adam.epsilon = j.at("adam").at("epsilon").get<double>();
  return c;
}

}  // namespace

ModelBundle fit_model(const std::vector<std::string>& feature_names, const LabeledData& raw, const TrainConfig& cfg,
                      const std::vector<int>& hidden, std::vector<EpochRecord>* history) {
  if (feature_names.size() != static_cast<std::size_t>(raw.features.cols())) {
    throw std::invalid_argument("fit_model: feature names do not match the data width");
  }
  ModelBundle model;
  model.feature_names = feature_names;
  model.layout_hash = layout_hash(feature_names);
  model.train_config = cfg;
  model.normalizer = fit_normalizer(raw.features);
  LabeledData norm{apply_normalizer(model.normalizer, raw.features), raw.labels};

  NetworkSpec spec;
  spec.layer_sizes.push_back(static_cast<int>(feature_names.size()));
  spec.layer_sizes.insert(spec.layer_sizes.end(), hidden.begin(), hidden.end());
  spec.layer_sizes.push_back(2);

  const auto [fit_rows, val_rows] =
      validation_split(norm.labels, cfg.validation_fraction, derive_seed(cfg.seed, 1000));
  TrainResult trained = train(spec, cfg, norm.subset(fit_rows), norm.subset(val_rows));
  model.network = std::move(trained.network);
  if (history) *history = std::move(trained.history);
  return model;
}

std::vector<double> predict(const ModelBundle& model, std::uint64_t layout, const Eigen::MatrixXd& raw) {
  if (layout != model.layout_hash) {
    throw LayoutMismatch("feature layout " + hex64(layout) + " does not match the model's " +
                         hex64(model.layout_hash));
  }
  if (raw.cols() != static_cast<Eigen::Index>(model.feature_names.size())) {
    throw LayoutMismatch("feature count does not match the model");
  }
  const Eigen::MatrixXd probs = model.network.forward(apply_normalizer(model.normalizer, raw).transpose());
  std::vector<double> scores(static_cast<std::size_t>(probs.cols()));
  for (Eigen::Index c = 0; c < probs.cols(); ++c) scores[static_cast<std::size_t>(c)] = probs(1, c);
  return scores;
}

std::vector<std::uint8_t> serialize_model(const ModelBundle& model) {
  Writer w;
  w.out.insert(w.out.end(), std::begin(kMagic), std::end(kMagic));
  w.u32(kVersion);
  w.u64(model.layout_hash);
  w.u64(model.config_hash);
  w.u32(static_cast<std::uint32_t>(model.feature_names.size()));
  for (const auto& n : model.feature_names) w.str(n);
  for (Eigen::Index i = 0; i < model.normalizer.mean.size(); ++i) w.f64(model.normalizer.mean(i));
  for (Eigen::Index i = 0; i < model.normalizer.stddev.size(); ++i) w.f64(model.normalizer.stddev(i));
  const auto& sizes = model.network.spec().layer_sizes;
  w.u32(static_cast<std::uint32_t>(sizes.size()));
  for (int s : sizes) w.u32(static_cast<std::uint32_t>(s));
  const auto& p = model.network.params();
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    for (Eigen::Index r = 0; r < p.weights[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < p.weights[l].cols(); ++c) w.f64(p.weights[l](r, c));
    }
    for (Eigen::Index r = 0; r < p.biases[l].size(); ++r) w.f64(p.biases[l](r));
  }
  w.str(train_config_json(model.train_config).dump());
  return std::move(w.out);
}

ModelBundle deserialize_model(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.need(sizeof(kMagic));
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) throw Error("not a padpipe model file");
  r.skip(sizeof(kMagic));
  const std::uint32_t version = r.u32();
  if (version != kVersion) throw Error("unsupported model version " + std::to_string(version));
  ModelBundle m;
  m.layout_hash = r.u64();
  m.config_hash = r.u64();
  const std::uint32_t n = r.u32();
  r.need(static_cast<std::size_t>(n) * 4);
  for (std::uint32_t i = 0; i < n; ++i) m.feature_names.push_back(r.str());
  if (layout_hash(m.feature_names) != m.layout_hash) throw Error("model layout hash does not match its names");
  m.normalizer.mean.resize(n);
  m.normalizer.stddev.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) m.normalizer.mean(i) = r.f64();
  for (std::uint32_t i = 0; i < n; ++i) m.normalizer.stddev(i) = r.f64();
  const std::uint32_t n_sizes = r.u32();
  if (n_sizes < 2 || n_sizes > 64) throw Error("model has an invalid layer count");
  NetworkSpec spec;
  for (std::uint32_t i = 0; i < n_sizes; ++i) {
    const std::uint32_t s = r.u32();
    if (s == 0 || s > (1u << 20)) throw Error("model has an invalid layer size");
    spec.layer_sizes.push_back(static_cast<int>(s));
  }
  if (spec.input_dim() != static_cast<int>(n)) throw Error("model input width does not match its feature names");
  Network net(spec);
  auto& p = net.params();
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    r.need(static_cast<std::size_t>(p.weights[l].size() + p.biases[l].size()) * 8);
    for (Eigen::Index row = 0; row < p.weights[l].rows(); ++row) {
      for (Eigen::Index c = 0; c < p.weights[l].cols(); ++c) p.weights[l](row, c) = r.f64();
    }
    for (Eigen::Index row = 0; row < p.biases[l].size(); ++row) p.biases[l](row) = r.f64();
  }
  m.network = std::move(net);
  try {
    m.train_config = train_config_from_json(nlohmann::json::parse(r.str()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("model config echo is malformed: ") + e.what());
  }
  if (!r.rest().empty()) throw Error("trailing bytes after model");
  return m;
}

void save_model(const std::filesystem::path& path, const ModelBundle& model) {
  const auto bytes = serialize_model(model);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing model file " + path.string());
}

ModelBundle load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace pad
