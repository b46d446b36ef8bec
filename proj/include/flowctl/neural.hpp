#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "flowctl/common.hpp"

namespace flowctl {

enum class Activation : std::uint8_t { Relu, Tanh, Linear };

struct LayerSpec {
  std::size_t in = 0;
  std::size_t out = 0;
  Activation act = Activation::Linear;
};

struct MlpCache {
  // acts[0] is the input; acts[k + 1] the post-activation output of layer k.
  std::vector<std::vector<double>> acts;
};

// A stack of dense layers laid out in a shared flat parameter vector starting
// at `offset`: per layer the row-major (out x in) weights, then the biases.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<LayerSpec> layers, std::size_t offset);

  std::size_t offset() const { return offset_; }
  std::size_t param_count() const { return count_; }
  std::size_t in_dim() const { return layers_.front().in; }
  std::size_t out_dim() const { return layers_.back().out; }
  const std::vector<LayerSpec>& layers() const { return layers_; }

  void init(std::span<double> params, Rng& rng) const;
  void forward(std::span<const double> params, std::span<const double> x, MlpCache& cache) const;
  // Accumulates parameter gradients into `grads` (full-size) and writes the
  // input gradient to `dx` when it is non-empty.
  void backward(std::span<const double> params, const MlpCache& cache, std::span<const double> dout,
                std::span<double> grads, std::span<double> dx) const;

 private:
  std::vector<LayerSpec> layers_;
  std::vector<std::size_t> weight_at_;
  std::size_t offset_ = 0;
  std::size_t count_ = 0;
};

struct BundleSpec {
  std::size_t action_dim = 6;
  std::size_t direct = 17;
  std::size_t indirect = 42;
  std::size_t indirect_hidden = 64;
  std::size_t feature = 12;
  std::size_t trunk = 128;
  std::size_t head_hidden = 64;

  std::size_t input_dim() const { return direct + indirect; }
  bool operator==(const BundleSpec&) const = default;
};

// Shared basement (indirect branch + trunk) feeding a value head and a
// Gaussian policy head with a free log-std vector.
class NetworkBundle {
 public:
  struct Cache {
    MlpCache indirect, trunk, value, policy;
  };
  struct Output {
    std::vector<double> mean;
    double value = 0.0;
  };

  explicit NetworkBundle(BundleSpec spec = {});

  const BundleSpec& spec() const { return spec_; }
  std::size_t size() const { return params.size(); }
  std::span<const double> logstd() const;
  std::size_t logstd_offset() const { return logstd_at_; }
  const Mlp& indirect_net() const { return indirect_; }
  const Mlp& trunk_net() const { return trunk_; }
  const Mlp& value_net() const { return value_; }
  const Mlp& policy_net() const { return policy_; }

  void init(Rng& rng);
  Output forward(std::span<const double> obs, Cache& cache) const;
  Output forward(std::span<const double> obs) const;
  // Accumulates into `grads` (same size as params).
  void backward(const Cache& cache, std::span<const double> dmean, double dvalue, std::span<const double> dlogstd,
                std::span<double> grads) const;

  std::vector<double> params;

 private:
  BundleSpec spec_;
  Mlp indirect_, trunk_, value_, policy_;
  std::size_t logstd_at_ = 0;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t steps = 0;
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  explicit AdamState(std::size_t n = 0, double lr_ = 1e-4) : m(n, 0.0), v(n, 0.0), lr(lr_) {}
};

// Throws Error("nan_gradient") on non-finite gradients, leaving params intact.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

// Little-endian binary encoding of a bundle: spec dimensions then parameters.
void write_bundle(std::ostream& os, const NetworkBundle& bundle);
NetworkBundle read_bundle(std::istream& is);

namespace io {
void put_u64(std::ostream& os, std::uint64_t x);
void put_f64(std::ostream& os, double x);
std::uint64_t get_u64(std::istream& is);
double get_f64(std::istream& is);
}  // namespace io

}  // namespace flowctl
