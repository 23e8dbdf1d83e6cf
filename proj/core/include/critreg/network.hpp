// Quasi-homogeneous ReLU networks used as regularizers.
//
// A map f is quasi-homogeneous when there is a uniformly bounded family of
// linear maps L_f(x) with sup_x ||f(x) - L_f(x) x|| < inf. For
//
//     N = sigma_L o A_L o ... o sigma_1 o A_1
//
// with affine A_l and (parametric) ReLU sigma_l the quasi-derivative is the
// product M_{g_L} W_L ... M_{g_1} W_1, where g_l is the activation pattern
// at the l-th pre-activation. ReLU uses g(t) = 0 for t <= 0 and 1 otherwise.
#pragma once

#include "critreg/linear_operator.hpp"
#include "critreg/regularizer.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace critreg {

struct AffineLayer {
  Matrix weight;  // out_dim x in_dim
  Vector bias;    // out_dim
};

/// ReLU when `negative_slope` is 0, parametric ReLU otherwise.
struct Activation {
  Scalar negative_slope = 0.0;

  Scalar operator()(Scalar t) const { return t > 0.0 ? t : negative_slope * t; }
  /// Pattern value g(t); the breakpoint belongs to the negative side.
  Scalar pattern(Scalar t) const { return t > 0.0 ? 1.0 : negative_slope; }
};

struct Layer {
  AffineLayer affine;
  Activation activation;
};

class QuasiHomNetwork {
 public:
  explicit QuasiHomNetwork(std::vector<Layer> layers);

  Index input_dim() const { return layers_.front().affine.weight.cols(); }
  Index output_dim() const { return layers_.back().affine.weight.rows(); }
  const std::vector<Layer>& layers() const { return layers_; }

  Vector forward(const Vector& x) const;

  /// Dense quasi-derivative L_N(x) (output_dim x input_dim).
  Matrix quasi_derivative_matrix(const Vector& x) const;
  LinearOperator quasi_derivative(const Vector& x) const;

  /// N(x) - L_N(x) x.
  Vector quasi_remainder(const Vector& x) const;

  /// Chain-rule selection L_N(x)^T v computed by reverse accumulation.
  Vector backward(const Vector& x, const Vector& v) const;

  /// sum_l (prod_{j > l} ||W_j||) ||b_l||: an upper bound on the quasi
  /// remainder for every x. Spectral norms computed exactly via SVD.
  Scalar remainder_bound() const;

  /// Random network with He-scaled Gaussian weights and biases scaled by
  /// `bias_scale`. Deterministic per seed.
  static QuasiHomNetwork random(const std::vector<Index>& widths, std::uint64_t seed,
                                Scalar bias_scale = 0.1, Scalar negative_slope = 0.0);

 private:
  std::vector<Layer> layers_;
};

/// R(x) = ||N(x)||^2 / 2.
class NetworkRegularizer final : public Regularizer {
 public:
  explicit NetworkRegularizer(QuasiHomNetwork net) : net_(std::move(net)) {}

  const QuasiHomNetwork& network() const { return net_; }

  Scalar value(const Vector& x) const override;
  /// L_N(x)^T N(x), i.e. backpropagation with g(0) = 0.
  Vector rel_subgradient(const Vector& x) const override;
  std::string name() const override { return "relu-network"; }

 private:
  QuasiHomNetwork net_;
};

/// JSON weight format, version 1:
///   {"format": 1, "layers": [{"weight": [[...], ...], "bias": [...],
///                             "activation": "relu" | {"prelu": a}}, ...]}
QuasiHomNetwork network_from_json(const std::string& text);
QuasiHomNetwork load_network(const std::filesystem::path& path);
std::string network_to_json(const QuasiHomNetwork& net);

}  // namespace critreg
