#include "critreg/network.hpp"

#include "critreg/random.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace critreg {

QuasiHomNetwork::QuasiHomNetwork(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw InvalidArgument("network: no layers");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& a = layers_[l].affine;
    if (a.weight.rows() < 1 || a.weight.cols() < 1) {
      throw InvalidArgument("network: empty weight in layer " + std::to_string(l));
    }
    if (a.bias.size() != a.weight.rows()) {
      throw DimensionError("network: bias length mismatch in layer " + std::to_string(l));
    }
    if (l > 0 && a.weight.cols() != layers_[l - 1].affine.weight.rows()) {
      throw DimensionError("network: dimension chain broken at layer " + std::to_string(l));
    }
    if (!a.weight.allFinite() || !a.bias.allFinite()) {
      throw NonFiniteError("network: non-finite parameter in layer " + std::to_string(l));
    }
    const Scalar slope = layers_[l].activation.negative_slope;
    if (!(slope >= 0.0 && slope < 1.0)) {
      throw InvalidArgument("network: prelu slope must be in [0, 1)");
    }
  }
}

Vector QuasiHomNetwork::forward(const Vector& x) const {
  require_length(x, input_dim(), "network input");
  Vector a = x;
  for (const auto& layer : layers_) {
    Vector pre = layer.affine.weight * a + layer.affine.bias;
    a = pre.unaryExpr([&](Scalar t) { return layer.activation(t); });
  }
  return a;
}

Matrix QuasiHomNetwork::quasi_derivative_matrix(const Vector& x) const {
  require_length(x, input_dim(), "network input");
  Vector a = x;
  Matrix product = Matrix::Identity(input_dim(), input_dim());
  for (const auto& layer : layers_) {
    const Vector pre = layer.affine.weight * a + layer.affine.bias;
    const Vector g = pre.unaryExpr([&](Scalar t) { return layer.activation.pattern(t); });
    product = g.asDiagonal() * (layer.affine.weight * product);
    a = pre.unaryExpr([&](Scalar t) { return layer.activation(t); });
  }
  return product;
}

LinearOperator QuasiHomNetwork::quasi_derivative(const Vector& x) const {
  return LinearOperator::dense(quasi_derivative_matrix(x));
}

Vector QuasiHomNetwork::quasi_remainder(const Vector& x) const {
  require_length(x, input_dim(), "network input");
  // L_N(x) x applied layer by layer in the forward pass's operation order, so
  // the remainder is exactly zero for bias-free networks.
  Vector a = x;
  Vector lin = x;
  for (const auto& layer : layers_) {
    const Vector pre = layer.affine.weight * a + layer.affine.bias;
    const Vector g = pre.unaryExpr([&](Scalar t) { return layer.activation.pattern(t); });
    lin = g.cwiseProduct(layer.affine.weight * lin);
    a = pre.unaryExpr([&](Scalar t) { return layer.activation(t); });
  }
  return a - lin;
}

Vector QuasiHomNetwork::backward(const Vector& x, const Vector& v) const {
  require_length(x, input_dim(), "network input");
  require_length(v, output_dim(), "network cotangent");
  std::vector<Vector> patterns;
  patterns.reserve(layers_.size());
  Vector a = x;
  for (const auto& layer : layers_) {
    const Vector pre = layer.affine.weight * a + layer.affine.bias;
    patterns.push_back(pre.unaryExpr([&](Scalar t) { return layer.activation.pattern(t); }));
    a = pre.unaryExpr([&](Scalar t) { return layer.activation(t); });
  }
  Vector grad = v;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    grad = layers_[l].affine.weight.transpose() * patterns[l].cwiseProduct(grad);
  }
  return grad;
}

Scalar QuasiHomNetwork::remainder_bound() const {
  Scalar bound = 0.0;
  Scalar tail = 1.0;  // prod_{j > l} ||W_j||
  for (std::size_t l = layers_.size(); l-- > 0;) {
    bound += tail * layers_[l].affine.bias.norm();
    Eigen::JacobiSVD<Matrix> svd(layers_[l].affine.weight);
    tail *= svd.singularValues()(0);
  }
  return bound;
}

QuasiHomNetwork QuasiHomNetwork::random(const std::vector<Index>& widths, std::uint64_t seed,
                                        Scalar bias_scale, Scalar negative_slope) {
  if (widths.size() < 2) throw InvalidArgument("network: need at least input and output width");
  Rng rng(seed);
  std::vector<Layer> layers;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const Index in = widths[l];
    const Index out = widths[l + 1];
    const Scalar scale = std::sqrt(2.0 / static_cast<Scalar>(in));
    Layer layer;
    layer.affine.weight = Matrix(out, in);
    for (Index j = 0; j < in; ++j) {
      for (Index i = 0; i < out; ++i) layer.affine.weight(i, j) = scale * rng.normal();
    }
    layer.affine.bias = bias_scale * rng.normal_vector(out);
    layer.activation.negative_slope = negative_slope;
    layers.push_back(std::move(layer));
  }
  return QuasiHomNetwork(std::move(layers));
}

Scalar NetworkRegularizer::value(const Vector& x) const { return 0.5 * net_.forward(x).squaredNorm(); }

Vector NetworkRegularizer::rel_subgradient(const Vector& x) const {
  return net_.backward(x, net_.forward(x));
}

// ---- JSON -----------------------------------------------------------------

namespace {

using nlohmann::json;

Vector vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw InvalidArgument(where + ": expected an array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InvalidArgument(where + ": expected numbers");
    v(static_cast<Index>(i)) = j[i].get<Scalar>();
  }
  return v;
}

}  // namespace

QuasiHomNetwork network_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("network json: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("format") || doc["format"] != 1) {
    throw InvalidArgument("network json: missing or unsupported \"format\" (expected 1)");
  }
  if (!doc.contains("layers") || !doc["layers"].is_array()) {
    throw InvalidArgument("network json: \"layers\" must be an array");
  }
  std::vector<Layer> layers;
  for (std::size_t l = 0; l < doc["layers"].size(); ++l) {
    const json& jl = doc["layers"][l];
    const std::string where = "network json: layers[" + std::to_string(l) + "]";
    if (!jl.contains("weight") || !jl["weight"].is_array() || jl["weight"].empty()) {
      throw InvalidArgument(where + ".weight: expected a non-empty array of rows");
    }
    const json& rows = jl["weight"];
    const Index out = static_cast<Index>(rows.size());
    const Index in = static_cast<Index>(rows[0].size());
    Layer layer;
    layer.affine.weight = Matrix(out, in);
    for (Index i = 0; i < out; ++i) {
      const Vector row = vector_from_json(rows[static_cast<std::size_t>(i)], where + ".weight");
      if (row.size() != in) throw DimensionError(where + ".weight: ragged rows");
      layer.affine.weight.row(i) = row.transpose();
    }
    layer.affine.bias = jl.contains("bias") ? vector_from_json(jl["bias"], where + ".bias")
                                            : Vector::Zero(out);
    const json act = jl.value("activation", json("relu"));
    if (act.is_string() && act.get<std::string>() == "relu") {
      layer.activation.negative_slope = 0.0;
    } else if (act.is_object() && act.contains("prelu") && act["prelu"].is_number()) {
      layer.activation.negative_slope = act["prelu"].get<Scalar>();
    } else {
      throw InvalidArgument(where + ".activation: expected \"relu\" or {\"prelu\": a}");
    }
    layers.push_back(std::move(layer));
  }
  return QuasiHomNetwork(std::move(layers));
}

QuasiHomNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open network file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return network_from_json(buf.str());
}

std::string network_to_json(const QuasiHomNetwork& net) {
  json doc;
  doc["format"] = 1;
  doc["layers"] = json::array();
  for (const auto& layer : net.layers()) {
    json jl;
    json rows = json::array();
    for (Index i = 0; i < layer.affine.weight.rows(); ++i) {
      json row = json::array();
      for (Index j = 0; j < layer.affine.weight.cols(); ++j) row.push_back(layer.affine.weight(i, j));
      rows.push_back(std::move(row));
    }
    jl["weight"] = std::move(rows);
    jl["bias"] = std::vector<Scalar>(layer.affine.bias.data(),
                                     layer.affine.bias.data() + layer.affine.bias.size());
    if (layer.activation.negative_slope == 0.0) {
      jl["activation"] = "relu";
    } else {
      jl["activation"] = json{{"prelu", layer.activation.negative_slope}};
    }
    doc["layers"].push_back(std::move(jl));
  }
  return doc.dump(2);
}

}  // namespace critreg
