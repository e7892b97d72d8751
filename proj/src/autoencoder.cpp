#include "doa/autoencoder.hpp"

#include <cmath>
#include <string>

#include "binary_io.hpp"
#include "doa/kernels.hpp"

namespace doa {

namespace {

constexpr char kModelMagic[9] = "DOAAE001";

void activate(Activation a, const RMatrix& z, RMatrix& out) {
  switch (a) {
    case Activation::Tanh:
      out = z.array().tanh().matrix();
      break;
    case Activation::Relu:
      out = z.cwiseMax(0.0);
      break;
    case Activation::Linear:
      out = z;
      break;
  }
}

// delta *= f'(z), with f(z) already available as `fz`.
void apply_derivative(Activation a, const RMatrix& z, const RMatrix& fz, RMatrix& delta) {
  switch (a) {
    case Activation::Tanh:
      delta.array() *= (1.0 - fz.array().square());
      break;
    case Activation::Relu:
      delta.array() *= (z.array() > 0.0).cast<double>();
      break;
    case Activation::Linear:
      break;
  }
}

}  // namespace

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
    case Activation::Linear: return "linear";
  }
  return "unknown";
}

Activation activation_from_string(std::string_view name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "relu") return Activation::Relu;
  if (name == "linear") return Activation::Linear;
  throw ConfigError("unknown activation '" + std::string(name) + "' (tanh | relu | linear)");
}

NetworkSpec NetworkSpec::for_features(int n, int num_decoders, Activation hidden) {
  if (n < 2 || n % 2 != 0) throw DomainError("feature length must be even and >= 2");
  NetworkSpec spec;
  spec.layer_sizes = {n, n / 2, n, 3 * n / 2, 2 * n, 5 * n / 2, num_decoders * n};
  spec.hidden_activation = hidden;
  spec.num_decoders = num_decoders;
  spec.validate();
  return spec;
}

void NetworkSpec::validate() const {
  if (layer_sizes.size() < 2) throw DomainError("network needs at least input and output sizes");
  for (int s : layer_sizes) {
    if (s < 1) throw DomainError("layer sizes must be positive");
  }
  if (num_decoders < 1) throw DomainError("network needs at least one decoder");
  if (static_cast<long long>(output_size()) !=
      static_cast<long long>(num_decoders) * input_size()) {
    throw DomainError("output size must equal decoders x input size");
  }
}

std::size_t NetworkParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

bool NetworkParams::all_finite() const {
  for (const auto& l : layers) {
    if (!l.weights.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

NetworkParams NetworkParams::zeros_like() const {
  NetworkParams z;
  z.layers.reserve(layers.size());
  for (const auto& l : layers) {
    z.layers.push_back({RMatrix::Zero(l.weights.rows(), l.weights.cols()),
                        RVector::Zero(l.bias.size())});
  }
  return z;
}

NetworkParams init_network(const NetworkSpec& spec, Rng& rng) {
  spec.validate();
  NetworkParams p;
  for (int l = 0; l < spec.num_layers(); ++l) {
    const int in = spec.layer_sizes[l];
    const int out = spec.layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / (in + out));
    std::uniform_real_distribution<double> u(-limit, limit);
    DenseLayer layer{RMatrix(out, in), RVector::Zero(out)};
    // Row-major fill so the draw order matches the on-disk layout.
    for (int r = 0; r < out; ++r) {
      for (int c = 0; c < in; ++c) layer.weights(r, c) = u(rng);
    }
    p.layers.push_back(std::move(layer));
  }
  return p;
}

ForwardCache forward_batch(const NetworkParams& params, const NetworkSpec& spec,
                           const RMatrix& inputs) {
  if (static_cast<int>(params.layers.size()) != spec.num_layers()) {
    throw DomainError("parameter set does not match network spec");
  }
  if (inputs.rows() != spec.input_size()) {
    throw DomainError("input length " + std::to_string(inputs.rows()) + ", network expects " +
                      std::to_string(spec.input_size()));
  }
  const int nl = spec.num_layers();
  ForwardCache cache;
  cache.activations.resize(nl + 1);
  cache.pre.resize(nl);
  cache.activations[0] = inputs;
  for (int l = 0; l < nl; ++l) {
    const DenseLayer& layer = params.layers[l];
    RMatrix& z = cache.pre[l];
    z.noalias() = layer.weights * cache.activations[l];
    z.colwise() += layer.bias;
    if (l + 1 < nl) {
      activate(spec.hidden_activation, z, cache.activations[l + 1]);
    } else {
      cache.activations[l + 1] = z;
    }
  }
  return cache;
}

RVector forward(const NetworkParams& params, const NetworkSpec& spec,
                const FeatureVector& input) {
  ForwardCache cache = forward_batch(params, spec, input);
  return cache.output().col(0);
}

double loss(const RVector& expected, const RVector& actual) {
  if (expected.size() != actual.size()) throw DomainError("loss: length mismatch");
  return 0.5 * (expected - actual).squaredNorm();
}

double batch_loss(const RMatrix& expected, const RMatrix& actual) {
  if (expected.rows() != actual.rows() || expected.cols() != actual.cols()) {
    throw DomainError("loss: shape mismatch");
  }
  if (expected.cols() == 0) return 0.0;
  return 0.5 * (expected - actual).squaredNorm() / static_cast<double>(expected.cols());
}

NetworkParams backward(const NetworkParams& params, const NetworkSpec& spec,
                       const ForwardCache& cache, const RMatrix& expected) {
  const int nl = spec.num_layers();
  if (static_cast<int>(cache.activations.size()) != nl + 1 ||
      static_cast<int>(cache.pre.size()) != nl ||
      static_cast<int>(params.layers.size()) != nl) {
    throw DomainError("backward: cache does not match network depth");
  }
  const RMatrix& out = cache.output();
  if (out.rows() != expected.rows() || out.cols() != expected.cols()) {
    throw DomainError("backward: expected batch shape differs from cached output");
  }
  for (int l = 0; l < nl; ++l) {
    if (cache.activations[l].rows() != params.layers[l].weights.cols()) {
      throw DomainError("backward: stale cache, layer shapes differ");
    }
  }

  const double inv_batch = 1.0 / static_cast<double>(expected.cols());
  NetworkParams grads;
  grads.layers.resize(nl);

  RMatrix delta = (out - expected) * inv_batch;
  for (int l = nl - 1; l >= 0; --l) {
    DenseLayer& g = grads.layers[l];
    g.weights.noalias() = delta * cache.activations[l].transpose();
    g.bias = delta.rowwise().sum();
    if (l > 0) {
      RMatrix prev;
      prev.noalias() = params.layers[l].weights.transpose() * delta;
      apply_derivative(spec.hidden_activation, cache.pre[l - 1], cache.activations[l], prev);
      delta = std::move(prev);
    }
  }
  return grads;
}

RmspropState RmspropState::for_params(const NetworkParams& params, double learning_rate,
                                      double rho, double epsilon) {
  RmspropState s;
  s.mean_square = params.zeros_like();
  s.learning_rate = learning_rate;
  s.rho = rho;
  s.epsilon = epsilon;
  return s;
}

void rmsprop_step(NetworkParams& params, const NetworkParams& grads, RmspropState& state) {
  if (params.layers.size() != grads.layers.size() ||
      params.layers.size() != state.mean_square.layers.size()) {
    throw DomainError("rmsprop: layer count mismatch");
  }
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    DenseLayer& p = params.layers[l];
    const DenseLayer& g = grads.layers[l];
    DenseLayer& a = state.mean_square.layers[l];
    if (p.weights.size() != g.weights.size() || p.weights.size() != a.weights.size() ||
        p.bias.size() != g.bias.size() || p.bias.size() != a.bias.size()) {
      throw DomainError("rmsprop: parameter shapes differ");
    }
    kernels::rmsprop_update_parallel(p.weights.data(), a.weights.data(), g.weights.data(),
                                     static_cast<std::size_t>(p.weights.size()),
                                     state.learning_rate, state.rho, state.epsilon);
    kernels::rmsprop_update_parallel(p.bias.data(), a.bias.data(), g.bias.data(),
                                     static_cast<std::size_t>(p.bias.size()),
                                     state.learning_rate, state.rho, state.epsilon);
  }
}

std::vector<std::uint8_t> serialize_model(const NetworkParams& params,
                                          const NetworkSpec& spec) {
  spec.validate();
  if (static_cast<int>(params.layers.size()) != spec.num_layers()) {
    throw DomainError("parameter set does not match network spec");
  }
  detail::ByteWriter w;
  w.raw(kModelMagic, 8);
  w.u32(static_cast<std::uint32_t>(spec.layer_sizes.size()));
  for (int s : spec.layer_sizes) w.u32(static_cast<std::uint32_t>(s));
  w.u8(static_cast<std::uint8_t>(spec.hidden_activation));
  w.u32(static_cast<std::uint32_t>(spec.num_decoders));
  const std::size_t body_start = w.size();
  for (int l = 0; l < spec.num_layers(); ++l) {
    const DenseLayer& layer = params.layers[l];
    if (layer.weights.rows() != spec.layer_sizes[l + 1] ||
        layer.weights.cols() != spec.layer_sizes[l] ||
        layer.bias.size() != spec.layer_sizes[l + 1]) {
      throw DomainError("layer " + std::to_string(l) + " shape does not match spec");
    }
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) w.f64(layer.weights(r, c));
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) w.f64(layer.bias(r));
  }
  auto& bytes = w.bytes();
  const std::uint32_t crc = detail::crc32_of(bytes.data() + body_start, bytes.size() - body_start);
  w.u32(crc);
  return std::move(w.bytes());
}

LoadedModel deserialize_model(const std::vector<std::uint8_t>& bytes) {
  constexpr const char* what = "model file";
  detail::check_magic(bytes, kModelMagic, what);
  detail::ByteReader r(bytes, bytes.size(), what);
  char magic[8];
  r.raw(magic, 8);

  LoadedModel m;
  const std::uint32_t count = r.u32();
  if (count < 2 || count > 64) {
    throw FormatError("model file: corrupt header, layer count " + std::to_string(count));
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t s = r.u32();
    if (s == 0 || s > (1u << 24)) {
      throw FormatError("model file: corrupt header, layer size " + std::to_string(s));
    }
    m.spec.layer_sizes.push_back(static_cast<int>(s));
  }
  const std::uint8_t act = r.u8();
  if (act > static_cast<std::uint8_t>(Activation::Linear)) {
    throw FormatError("model file: corrupt header, activation id " + std::to_string(act));
  }
  m.spec.hidden_activation = static_cast<Activation>(act);
  m.spec.num_decoders = static_cast<int>(r.u32());
  try {
    m.spec.validate();
  } catch (const DomainError& e) {
    throw FormatError(std::string("model file: corrupt header, ") + e.what());
  }

  const std::size_t body_start = r.position();
  std::size_t body_len = 0;
  for (int l = 0; l < m.spec.num_layers(); ++l) {
    body_len += 8ull * (static_cast<std::size_t>(m.spec.layer_sizes[l]) + 1) *
                static_cast<std::size_t>(m.spec.layer_sizes[l + 1]);
  }
  if (bytes.size() < body_start + body_len + 4) {
    throw TruncatedError("model file: truncated, expected " +
                         std::to_string(body_start + body_len + 4) + " bytes, found " +
                         std::to_string(bytes.size()));
  }
  if (bytes.size() > body_start + body_len + 4) {
    throw FormatError("model file: trailing bytes after checksum");
  }

  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + body_start + body_len, 4);
  if (detail::crc32_of(bytes.data() + body_start, body_len) != stored) {
    throw ChecksumError("model file: CRC-32 mismatch, body is corrupt");
  }

  for (int l = 0; l < m.spec.num_layers(); ++l) {
    const int in = m.spec.layer_sizes[l];
    const int out = m.spec.layer_sizes[l + 1];
    DenseLayer layer{RMatrix(out, in), RVector(out)};
    for (int rr = 0; rr < out; ++rr) {
      for (int c = 0; c < in; ++c) layer.weights(rr, c) = r.f64();
    }
    for (int rr = 0; rr < out; ++rr) layer.bias(rr) = r.f64();
    m.params.layers.push_back(std::move(layer));
  }
  return m;
}

void save_model(const NetworkParams& params, const NetworkSpec& spec,
                const std::filesystem::path& path) {
  detail::write_file(path, serialize_model(params, spec));
}

LoadedModel load_model(const std::filesystem::path& path) {
  return deserialize_model(detail::read_file(path));
}

}  // namespace doa
