#include "flowctl/agents.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

namespace flowctl {

namespace {

constexpr std::array<std::pair<AgentKind, std::string_view>, 6> kNames = {{
    {AgentKind::Empirical, "empirical"},
    {AgentKind::SFPN1, "sfpn1"},
    {AgentKind::SFPN2, "sfpn2"},
    {AgentKind::SWPN, "swpn"},
    {AgentKind::SMPN, "smpn"},
    {AgentKind::DPN, "dpn"},
}};

PolicyHead make_head(std::size_t first_dim, std::size_t dims, int preset, Rng& rng) {
  BundleSpec spec;
  spec.action_dim = dims;
  PolicyHead h{NetworkBundle(spec), first_dim, reward_preset(preset)};
  h.net.init(rng);
  return h;
}

}  // namespace

std::string_view to_string(AgentKind kind) {
  for (const auto& [k, n] : kNames) {
    if (k == kind) return n;
  }
  return "unknown";
}

AgentKind parse_agent_kind(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "sfpn") lower = "sfpn1";
  for (const auto& [k, n] : kNames) {
    if (lower == n) return k;
  }
  throw Error("unknown_agent", "unknown agent kind '" + std::string(text) + "'");
}

bool is_network(AgentKind kind) { return kind != AgentKind::Empirical; }

Triple empirical_work_hours(const ModelParams& p) {
  Triple wh{};
  for (std::size_t i = 0; i < kTrades; ++i) {
    const double rate = 3.0 * p.area_per_worker_hour[i] * p.workers[i];
    wh[i] = std::clamp(std::ceil(p.floor_area() / rate) + 1.0, p.min_work_hours, p.max_work_hours);
  }
  return wh;
}

double empirical_formwork_threshold(const ModelParams& p) {
  return std::ceil(p.floor_area() / (3.0 * p.area_per_material[kFormwork])) + 1.0;
}

Triple empirical_material_order(double formwork_stock, const ModelParams& p) {
  Triple b{};
  for (std::size_t i : {kRebar, kConcrete}) {
    b[i] = std::clamp(std::ceil(p.floor_area() / (3.0 * p.area_per_material[i])) + 1.0, 0.0, p.max_order[i]);
  }
  if (formwork_stock < empirical_formwork_threshold(p)) {
    b[kFormwork] = std::clamp(0.5 * p.storage_cap[1], 0.0, p.max_order[kFormwork]);
  }
  return b;
}

double log_prob(std::span<const double> a, std::span<const double> mean, std::span<const double> logstd) {
  if (a.size() != mean.size() || a.size() != logstd.size()) throw Error("dimension", "log_prob size mismatch");
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - mean[i];
    s += -half_log_2pi - logstd[i] - d * d / (2.0 * std::exp(2.0 * logstd[i]));
  }
  return s;
}

double gaussian_entropy(std::span<const double> logstd) {
  const double c = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
  double s = 0.0;
  for (double l : logstd) s += l + c;
  return s;
}

Agent Agent::make(AgentKind kind, Rng& rng) {
  Agent a;
  a.kind_ = kind;
  switch (kind) {
    case AgentKind::Empirical:
      break;
    case AgentKind::SFPN1:
      a.heads.push_back(make_head(0, 6, 1, rng));
      break;
    case AgentKind::SFPN2:
      a.heads.push_back(make_head(0, 6, 2, rng));
      break;
    case AgentKind::SWPN:
      a.heads.push_back(make_head(0, 3, 3, rng));
      break;
    case AgentKind::SMPN:
      a.heads.push_back(make_head(3, 3, 4, rng));
      break;
    case AgentKind::DPN:
      a.heads.push_back(make_head(0, 3, 3, rng));
      a.heads.push_back(make_head(3, 3, 4, rng));
      break;
  }
  return a;
}

RewardWeights Agent::report_weights() const { return heads.empty() ? reward_preset(1) : heads.front().weights; }

Decision Agent::act(std::span<const double> obs, const ModelParams& p, Rng* rng, ActMode mode) const {
  if (obs.size() != kObservationSize) throw Error("dimension", "observation must have 59 entries");
  Decision d;
  const Triple rule_hours = empirical_work_hours(p);
  const Triple rule_orders = empirical_material_order(obs[7 + kFormwork], p);
  if (heads.empty()) {
    d.action = {rule_hours, rule_orders};
    return d;
  }

  d.normalized_obs = stats.normalized(obs);
  std::vector<double> full(kActionSize, 0.0);
  std::vector<bool> controlled(kActionSize, false);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (const auto& h : heads) {
    const auto out = h.net.forward(d.normalized_obs);
    PolicyOutput po;
    po.mean = out.mean;
    po.v = out.value;
    const auto ls = h.net.logstd();
    po.logstd.assign(ls.begin(), ls.end());
    po.a = po.mean;
    if (mode == ActMode::Sample) {
      if (rng == nullptr) throw Error("rng_required", "sampling needs a random source");
      for (std::size_t k = 0; k < po.a.size(); ++k) po.a[k] += std::exp(po.logstd[k]) * gauss(*rng);
    }
    po.logp = log_prob(po.a, po.mean, po.logstd);
    for (std::size_t k = 0; k < po.a.size(); ++k) {
      full[h.first_dim + k] = po.a[k];
      controlled[h.first_dim + k] = true;
    }
    d.outputs.push_back(std::move(po));
  }

  d.action = denormalize_action(full, p);
  for (std::size_t i = 0; i < kTrades; ++i) {
    if (!controlled[i]) d.action.hours[i] = rule_hours[i];
    if (!controlled[kTrades + i]) d.action.orders[i] = rule_orders[i];
  }
  return d;
}

}  // namespace flowctl
