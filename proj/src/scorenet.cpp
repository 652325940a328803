#include "graphid/scorenet.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "graphid/error.hpp"

namespace graphid {

using nlohmann::json;

std::size_t ScoreNetWeights::hidden_dim() const {
  return layers.empty() ? 0 : static_cast<std::size_t>(layers.front().w_agg.cols());
}

void ScoreNetWeights::validate() const {
  auto fail = [](const std::string& tensor, const std::string& what) {
    throw FormatError("score network tensor " + tensor + ": " + what);
  };
  auto shape = [](Eigen::Index r, Eigen::Index c) {
    return std::to_string(r) + "x" + std::to_string(c);
  };
  if (version != kFormatVersion) {
    throw FormatError("score network format version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kFormatVersion) + ")");
  }
  if (layers.empty()) throw FormatError("score network needs at least one layer");
  const auto d = static_cast<Eigen::Index>(hidden_dim());
  if (d == 0) fail("layers[0].W_a", "hidden dimension must be positive");
  Eigen::Index d_in = kInputFeatures;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    const std::string prefix = "layers[" + std::to_string(l) + "].";
    if (layer.w_agg.rows() != d_in || layer.w_agg.cols() != d) {
      fail(prefix + "W_a", "expected " + shape(d_in, d) + ", got " + shape(layer.w_agg.rows(), layer.w_agg.cols()));
    }
    if (layer.w_self.rows() != d_in || layer.w_self.cols() != d) {
      fail(prefix + "W_s",
           "expected " + shape(d_in, d) + ", got " + shape(layer.w_self.rows(), layer.w_self.cols()));
    }
    if (layer.bias.size() != d) fail(prefix + "b", "expected length " + std::to_string(d));
    if (!layer.w_agg.allFinite() || !layer.w_self.allFinite() || !layer.bias.allFinite()) {
      fail(prefix + "*", "non-finite entries");
    }
    d_in = d;
  }
  if (head_w1.rows() != d) {
    fail("W1", "expected " + std::to_string(d) + " rows (hidden_dim), got " + std::to_string(head_w1.rows()));
  }
  if (head_w1.cols() != 2 * d + 2) {
    fail("W1", "expected " + std::to_string(2 * d + 2) + " columns, got " + std::to_string(head_w1.cols()));
  }
  if (head_b1.size() != d) fail("b1", "expected length " + std::to_string(d));
  if (head_w2.size() != d) fail("w2", "expected length " + std::to_string(d));
  if (!head_w1.allFinite() || !head_b1.allFinite() || !head_w2.allFinite() || !std::isfinite(head_b2)) {
    fail("head", "non-finite entries");
  }
}

ScoreNetWeights ScoreNetWeights::zeros(std::size_t l_net, std::size_t hidden_dim) {
  const auto d = static_cast<Eigen::Index>(hidden_dim);
  ScoreNetWeights w;
  Eigen::Index d_in = kInputFeatures;
  for (std::size_t l = 0; l < l_net; ++l) {
    w.layers.push_back({Matrix::Zero(d_in, d), Matrix::Zero(d_in, d), Vector::Zero(d)});
    d_in = d;
  }
  w.head_w1 = Matrix::Zero(d, 2 * d + 2);
  w.head_b1 = Vector::Zero(d);
  w.head_w2 = Vector::Zero(d);
  return w;
}

ScoreNetWeights ScoreNetWeights::random(std::size_t l_net, std::size_t hidden_dim, std::uint64_t seed,
                                        double scale) {
  ScoreNetWeights w = zeros(l_net, hidden_dim);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  auto fill = [&](auto& m) {
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = normal(rng);
  };
  for (auto& layer : w.layers) {
    fill(layer.w_agg);
    fill(layer.w_self);
    fill(layer.bias);
  }
  fill(w.head_w1);
  fill(w.head_b1);
  fill(w.head_w2);
  w.head_b2 = normal(rng);
  return w;
}

HalfVector scorenet_forward(const ScoreNetWeights& weights, const Matrix& noisy_adjacency, double sigma) {
  if (!(sigma > 0.0)) throw ArgumentError("score network: sigma must be positive");
  require_symmetric_hollow(noisy_adjacency, 1e-12);
  const auto n = noisy_adjacency.rows();
  const auto d = static_cast<Eigen::Index>(weights.hidden_dim());
  if (weights.head_w1.rows() != d || weights.head_w1.cols() != 2 * d + 2) weights.validate();

  Matrix h(n, ScoreNetWeights::kInputFeatures);
  h.col(0).setOnes();
  h.col(1) = noisy_adjacency.rowwise().sum() / static_cast<double>(n);
  for (const auto& layer : weights.layers) {
    if (layer.w_agg.rows() != h.cols()) weights.validate();
    Matrix pre = noisy_adjacency * (h * layer.w_agg) + h * layer.w_self;
    pre.rowwise() += layer.bias.transpose();
    h = pre.array().tanh().matrix();
  }

  // W1 u = P (h_i * h_j) + Q (h_i + h_j) + c A_ij + e log(1/sigma)
  const auto p_block = weights.head_w1.leftCols(d);
  const auto q_block = weights.head_w1.middleCols(d, d);
  const Vector c = weights.head_w1.col(2 * d);
  const Vector offset = weights.head_b1 + weights.head_w1.col(2 * d + 1) * std::log(1.0 / sigma);
  const Matrix qh = h * q_block.transpose();  // row i: (Q h_i)^T

  HalfVector out(static_cast<std::size_t>(n));
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Vector prod = h.row(i).cwiseProduct(h.row(j)).transpose();
      const Vector z = (p_block * prod + qh.row(i).transpose() + qh.row(j).transpose() +
                        c * noisy_adjacency(i, j) + offset)
                           .array()
                           .tanh()
                           .matrix();
      out[k++] = (weights.head_w2.dot(z) + weights.head_b2) / sigma;
    }
  }
  return out;
}

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Matrix matrix_from_json(const json& j, const std::string& name) {
  if (!j.is_array()) throw FormatError("score network tensor " + name + ": expected a nested array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows ? static_cast<Eigen::Index>(j.front().size()) : 0;
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw FormatError("score network tensor " + name + ": ragged row " + std::to_string(r));
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& value = row[static_cast<std::size_t>(c)];
      if (!value.is_number()) throw FormatError("score network tensor " + name + ": non-numeric entry");
      m(r, c) = value.get<double>();
    }
  }
  return m;
}

Vector vector_from_json(const json& j, const std::string& name) {
  if (!j.is_array()) throw FormatError("score network tensor " + name + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw FormatError("score network tensor " + name + ": non-numeric entry");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

const json& field(const json& obj, const char* key, const std::string& source) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(source + ": missing field '" + key + "'");
  return *it;
}

}  // namespace

std::string serialize_weights(const ScoreNetWeights& weights) {
  weights.validate();
  json doc;
  doc["format"] = "graphid-scorenet";
  doc["version"] = weights.version;
  doc["l_net"] = weights.layers.size();
  doc["hidden_dim"] = weights.hidden_dim();
  json layers = json::array();
  for (const auto& layer : weights.layers) {
    layers.push_back({{"W_a", matrix_to_json(layer.w_agg)},
                      {"W_s", matrix_to_json(layer.w_self)},
                      {"b", vector_to_json(layer.bias)}});
  }
  doc["layers"] = std::move(layers);
  doc["W1"] = matrix_to_json(weights.head_w1);
  doc["b1"] = vector_to_json(weights.head_b1);
  doc["w2"] = vector_to_json(weights.head_w2);
  doc["b2"] = weights.head_b2;
  return doc.dump(1);
}

ScoreNetWeights parse_weights(const std::string& json_text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw FormatError(source + ": malformed weight file (" + e.what() + ")");
  }
  if (!doc.is_object()) throw FormatError(source + ": weight file must be a JSON object");
  try {
    ScoreNetWeights w;
    w.version = field(doc, "version", source).get<int>();
    if (w.version != ScoreNetWeights::kFormatVersion) {
      throw FormatError(source + ": weight format version " + std::to_string(w.version) +
                        " is not supported (expected " + std::to_string(ScoreNetWeights::kFormatVersion) + ")");
    }
    const auto l_net = field(doc, "l_net", source).get<std::size_t>();
    const auto hidden = field(doc, "hidden_dim", source).get<std::size_t>();
    const auto& layers = field(doc, "layers", source);
    if (!layers.is_array() || layers.size() != l_net) {
      throw FormatError(source + ": 'layers' must hold l_net=" + std::to_string(l_net) + " entries");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const std::string prefix = "layers[" + std::to_string(l) + "].";
      w.layers.push_back({matrix_from_json(field(layers[l], "W_a", source), prefix + "W_a"),
                          matrix_from_json(field(layers[l], "W_s", source), prefix + "W_s"),
                          vector_from_json(field(layers[l], "b", source), prefix + "b")});
    }
    w.head_w1 = matrix_from_json(field(doc, "W1", source), "W1");
    w.head_b1 = vector_from_json(field(doc, "b1", source), "b1");
    w.head_w2 = vector_from_json(field(doc, "w2", source), "w2");
    w.head_b2 = field(doc, "b2", source).get<double>();
    if (w.hidden_dim() != hidden) {
      throw FormatError("score network tensor layers[0].W_a: has " + std::to_string(w.hidden_dim()) +
                        " columns but hidden_dim is " + std::to_string(hidden));
    }
    w.validate();
    return w;
  } catch (const json::exception& e) {
    throw FormatError(source + ": malformed weight file (" + e.what() + ")");
  }
}

ScoreNetWeights load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open weight file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_weights(buf.str(), path.string());
}

void save_weights(const ScoreNetWeights& weights, const std::filesystem::path& path) {
  const std::string text = serialize_weights(weights);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write weight file " + tmp.string());
    out << text << '\n';
    if (!out) throw FormatError("failed writing weight file " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace graphid
