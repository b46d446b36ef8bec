#include "flowctl/neural.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>

#include "flowctl/kernels.hpp"

namespace flowctl {

Mlp::Mlp(std::vector<LayerSpec> layers, std::size_t offset) : layers_(std::move(layers)), offset_(offset) {
  if (layers_.empty()) throw Error("dimension", "network needs at least one layer");
  std::size_t at = offset;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    if (k > 0 && layers_[k].in != layers_[k - 1].out) throw Error("dimension", "layer widths do not chain");
    weight_at_.push_back(at);
    at += layers_[k].in * layers_[k].out + layers_[k].out;
  }
  count_ = at - offset;
}

void Mlp::init(std::span<double> params, Rng& rng) const {
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& l = layers_[k];
    const double fan_in = static_cast<double>(l.in);
    const double fan_out = static_cast<double>(l.out);
    const double limit =
        l.act == Activation::Relu ? std::sqrt(6.0 / fan_in) : std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> u(-limit, limit);
    double* w = params.data() + weight_at_[k];
    for (std::size_t i = 0; i < l.in * l.out; ++i) w[i] = u(rng);
    std::fill(w + l.in * l.out, w + l.in * l.out + l.out, 0.0);
  }
}

void Mlp::forward(std::span<const double> params, std::span<const double> x, MlpCache& cache) const {
  if (x.size() != in_dim()) throw Error("dimension", "network input width mismatch");
  const auto& kt = kernels::active();
  cache.acts.resize(layers_.size() + 1);
  cache.acts[0].assign(x.begin(), x.end());
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& l = layers_[k];
    const double* w = params.data() + weight_at_[k];
    const double* b = w + l.in * l.out;
    const double* in = cache.acts[k].data();
    auto& out = cache.acts[k + 1];
    out.resize(l.out);
    for (std::size_t j = 0; j < l.out; ++j) {
      const double z = b[j] + kt.dot(w + j * l.in, in, l.in);
      switch (l.act) {
        case Activation::Relu:
          out[j] = z > 0.0 ? z : 0.0;
          break;
        case Activation::Tanh:
          out[j] = std::tanh(z);
          break;
        case Activation::Linear:
          out[j] = z;
          break;
      }
    }
  }
}

void Mlp::backward(std::span<const double> params, const MlpCache& cache, std::span<const double> dout,
                   std::span<double> grads, std::span<double> dx) const {
  if (cache.acts.size() != layers_.size() + 1) throw Error("stale_cache", "backward needs a matching forward cache");
  if (dout.size() != out_dim()) throw Error("dimension", "output gradient width mismatch");
  const auto& kt = kernels::active();
  std::vector<double> delta(dout.begin(), dout.end());
  std::vector<double> prev;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const auto& l = layers_[k];
    const auto& y = cache.acts[k + 1];
    if (y.size() != l.out) throw Error("stale_cache", "cached activation width mismatch");
    for (std::size_t j = 0; j < l.out; ++j) {
      switch (l.act) {
        case Activation::Relu:
          if (y[j] <= 0.0) delta[j] = 0.0;
          break;
        case Activation::Tanh:
          delta[j] *= 1.0 - y[j] * y[j];
          break;
        case Activation::Linear:
          break;
      }
    }
    const double* w = params.data() + weight_at_[k];
    double* gw = grads.data() + weight_at_[k];
    double* gb = gw + l.in * l.out;
    const double* in = cache.acts[k].data();
    const bool need_dx = k > 0 || !dx.empty();
    if (need_dx) prev.assign(l.in, 0.0);
    for (std::size_t j = 0; j < l.out; ++j) {
      const double d = delta[j];
      if (d == 0.0) continue;
      gb[j] += d;
      kt.axpy(d, in, gw + j * l.in, l.in);
      if (need_dx) kt.axpy(d, w + j * l.in, prev.data(), l.in);
    }
    if (k == 0) {
      if (!dx.empty()) std::copy(prev.begin(), prev.end(), dx.begin());
    } else {
      delta.swap(prev);
    }
  }
}

NetworkBundle::NetworkBundle(BundleSpec spec) : spec_(spec) {
  std::size_t at = 0;
  indirect_ = Mlp({{spec.indirect, spec.indirect_hidden, Activation::Relu},
                   {spec.indirect_hidden, spec.feature, Activation::Relu}},
                  at);
  at += indirect_.param_count();
  const std::size_t trunk_in = spec.direct + spec.feature;
  trunk_ = Mlp({{trunk_in, spec.trunk, Activation::Relu}, {spec.trunk, spec.trunk, Activation::Relu}}, at);
  at += trunk_.param_count();
  value_ = Mlp({{spec.trunk, spec.head_hidden, Activation::Relu}, {spec.head_hidden, 1, Activation::Linear}}, at);
  at += value_.param_count();
  policy_ = Mlp({{spec.trunk, spec.head_hidden, Activation::Tanh},
                 {spec.head_hidden, spec.action_dim, Activation::Linear}},
                at);
  at += policy_.param_count();
  logstd_at_ = at;
  params.assign(at + spec.action_dim, 0.0);
}

std::span<const double> NetworkBundle::logstd() const {
  return std::span<const double>(params).subspan(logstd_at_, spec_.action_dim);
}

void NetworkBundle::init(Rng& rng) {
  indirect_.init(params, rng);
  trunk_.init(params, rng);
  value_.init(params, rng);
  policy_.init(params, rng);
  std::fill(params.begin() + static_cast<std::ptrdiff_t>(logstd_at_), params.end(), 0.0);
}

NetworkBundle::Output NetworkBundle::forward(std::span<const double> obs, Cache& c) const {
  if (obs.size() != spec_.input_dim()) throw Error("dimension", "observation width mismatch");
  indirect_.forward(params, obs.subspan(spec_.direct, spec_.indirect), c.indirect);
  std::vector<double> trunk_in(obs.begin(), obs.begin() + static_cast<std::ptrdiff_t>(spec_.direct));
  const auto& feature = c.indirect.acts.back();
  trunk_in.insert(trunk_in.end(), feature.begin(), feature.end());
  trunk_.forward(params, trunk_in, c.trunk);
  const auto& h = c.trunk.acts.back();
  value_.forward(params, h, c.value);
  policy_.forward(params, h, c.policy);
  return {c.policy.acts.back(), c.value.acts.back()[0]};
}

NetworkBundle::Output NetworkBundle::forward(std::span<const double> obs) const {
  Cache c;
  return forward(obs, c);
}

void NetworkBundle::backward(const Cache& c, std::span<const double> dmean, double dvalue,
                             std::span<const double> dlogstd, std::span<double> grads) const {
  if (grads.size() != params.size()) throw Error("dimension", "gradient buffer size mismatch");
  std::vector<double> dh(spec_.trunk, 0.0);
  std::vector<double> tmp(spec_.trunk, 0.0);
  const double dv[1] = {dvalue};
  value_.backward(params, c.value, dv, grads, dh);
  policy_.backward(params, c.policy, dmean, grads, tmp);
  for (std::size_t i = 0; i < dh.size(); ++i) dh[i] += tmp[i];
  std::vector<double> dtrunk_in(spec_.direct + spec_.feature, 0.0);
  trunk_.backward(params, c.trunk, dh, grads, dtrunk_in);
  indirect_.backward(params, c.indirect, std::span<const double>(dtrunk_in).subspan(spec_.direct), grads, {});
  for (std::size_t i = 0; i < dlogstd.size(); ++i) grads[logstd_at_ + i] += dlogstd[i];
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& s) {
  if (grads.size() != params.size() || s.m.size() != params.size() || s.v.size() != params.size()) {
    throw Error("dimension", "adam shapes do not match");
  }
  for (double g : grads) {
    if (!std::isfinite(g)) throw Error("nan_gradient", "non-finite gradient rejected");
  }
  ++s.steps;
  kernels::AdamCoeffs c;
  c.lr = s.lr;
  c.beta1 = s.beta1;
  c.beta2 = s.beta2;
  c.eps = s.eps;
  c.bias1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.steps));
  c.bias2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.steps));
  kernels::active().adam(params.data(), grads.data(), s.m.data(), s.v.data(), params.size(), c);
}

namespace io {

void put_u64(std::ostream& os, std::uint64_t x) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((x >> (8 * i)) & 0xffU);
  os.write(b, 8);
}

void put_f64(std::ostream& os, double x) { put_u64(os, std::bit_cast<std::uint64_t>(x)); }

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw Error("corrupt_checkpoint", "unexpected end of file");
  std::uint64_t x = 0;
  for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return x;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace io

void write_bundle(std::ostream& os, const NetworkBundle& b) {
  const auto& s = b.spec();
  for (std::size_t d : {s.action_dim, s.direct, s.indirect, s.indirect_hidden, s.feature, s.trunk, s.head_hidden}) {
    io::put_u64(os, d);
  }
  io::put_u64(os, b.params.size());
  for (double p : b.params) io::put_f64(os, p);
}

NetworkBundle read_bundle(std::istream& is) {
  BundleSpec s;
  s.action_dim = io::get_u64(is);
  s.direct = io::get_u64(is);
  s.indirect = io::get_u64(is);
  s.indirect_hidden = io::get_u64(is);
  s.feature = io::get_u64(is);
  s.trunk = io::get_u64(is);
  s.head_hidden = io::get_u64(is);
  for (std::size_t d : {s.action_dim, s.direct, s.indirect, s.indirect_hidden, s.feature, s.trunk, s.head_hidden}) {
    if (d == 0 || d > 4096) throw Error("corrupt_checkpoint", "implausible network dimension");
  }
  NetworkBundle b(s);
  const std::uint64_t n = io::get_u64(is);
  if (n != b.params.size()) throw Error("corrupt_checkpoint", "parameter count does not match architecture");
  for (auto& p : b.params) p = io::get_f64(is);
  return b;
}

}  // namespace flowctl
