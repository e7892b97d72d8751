#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "doa/types.hpp"

namespace doa {

enum class Activation : std::uint8_t { Tanh = 0, Relu = 1, Linear = 2 };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view name);

/// Dense layer sizes [n, h1, ..., J*n]. Hidden layers use `hidden_activation`,
/// the output layer is linear and splits into J decoder blocks of length n.
struct NetworkSpec {
  std::vector<int> layer_sizes;
  Activation hidden_activation = Activation::Tanh;
  int num_decoders = 6;

  /// Encoder n/2, then decoders n, 3n/2, 2n, 5n/2, then J*n outputs.
  /// For n = 380, J = 6: 380-190-380-570-760-950-2280.
  static NetworkSpec for_features(int n, int num_decoders = 6,
                                  Activation hidden = Activation::Tanh);

  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  int block_size() const { return input_size(); }
  int num_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }

  void validate() const;
  bool operator==(const NetworkSpec&) const = default;
};

struct DenseLayer {
  RMatrix weights;  // out x in
  RVector bias;     // out
};

struct NetworkParams {
  std::vector<DenseLayer> layers;

  std::size_t parameter_count() const;
  bool all_finite() const;
  /// Same shapes, every entry zero.
  NetworkParams zeros_like() const;
};

/// Glorot-uniform weights, zero biases.
NetworkParams init_network(const NetworkSpec& spec, Rng& rng);

/// Column-per-sample activations kept for backprop. `activations[0]` is the
/// input batch, `activations[l]` the output of layer l; `pre[l-1]` its affine
/// pre-activation.
struct ForwardCache {
  std::vector<RMatrix> activations;
  std::vector<RMatrix> pre;

  const RMatrix& output() const { return activations.back(); }
};

ForwardCache forward_batch(const NetworkParams& params, const NetworkSpec& spec,
                           const RMatrix& inputs);

RVector forward(const NetworkParams& params, const NetworkSpec& spec,
                const FeatureVector& input);

/// 1/2 ||expected - actual||^2.
double loss(const RVector& expected, const RVector& actual);

/// Mean of the per-column loss.
double batch_loss(const RMatrix& expected, const RMatrix& actual);

/// Gradient of batch_loss(expected, forward output) w.r.t. every parameter.
NetworkParams backward(const NetworkParams& params, const NetworkSpec& spec,
                       const ForwardCache& cache, const RMatrix& expected);

struct RmspropState {
  NetworkParams mean_square;
  double learning_rate = 1e-3;
  double rho = 0.9;
  double epsilon = 1e-8;

  static RmspropState for_params(const NetworkParams& params, double learning_rate = 1e-3,
                                 double rho = 0.9, double epsilon = 1e-8);
};

void rmsprop_step(NetworkParams& params, const NetworkParams& grads, RmspropState& state);

// Model file: "DOAAE001", u32 size count, u32 sizes..., u8 activation,
// u32 decoders, then per layer row-major f64 weights and f64 biases, then the
// CRC-32 of the body. All little-endian.

std::vector<std::uint8_t> serialize_model(const NetworkParams& params,
                                          const NetworkSpec& spec);

struct LoadedModel {
  NetworkSpec spec;
  NetworkParams params;
};

LoadedModel deserialize_model(const std::vector<std::uint8_t>& bytes);

void save_model(const NetworkParams& params, const NetworkSpec& spec,
                const std::filesystem::path& path);
LoadedModel load_model(const std::filesystem::path& path);

}  // namespace doa
