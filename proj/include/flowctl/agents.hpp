#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flowctl/neural.hpp"
#include "flowctl/observe.hpp"
#include "flowctl/reward.hpp"

namespace flowctl {

// SFPN: one network controls all six action dims (reward preset 1 or 2).
// SWPN: network sets work hours, rules order materials. SMPN: the reverse.
// DPN: two networks, one per half.
enum class AgentKind { Empirical, SFPN1, SFPN2, SWPN, SMPN, DPN };

std::string_view to_string(AgentKind kind);
// Accepts the names above case-insensitively; throws Error("unknown_agent").
AgentKind parse_agent_kind(std::string_view text);
bool is_network(AgentKind kind);

Triple empirical_work_hours(const ModelParams& params);
Triple empirical_material_order(double formwork_stock, const ModelParams& params);
inline Triple empirical_material_order(const State& s, const ModelParams& p) {
  return empirical_material_order(s.stock[kFormwork], p);
}
// Formwork stock below which the rule replenishes.
double empirical_formwork_threshold(const ModelParams& params);

double log_prob(std::span<const double> a, std::span<const double> mean, std::span<const double> logstd);
double gaussian_entropy(std::span<const double> logstd);

enum class ActMode { Sample, Mean };

struct PolicyOutput {
  std::vector<double> mean;
  std::vector<double> logstd;
  std::vector<double> a;  // sampled (pre-clamp) normalized action
  double v = 0.0;
  double logp = 0.0;
};

// A network and the contiguous slice of the 6-dim action it controls.
struct PolicyHead {
  NetworkBundle net;
  std::size_t first_dim = 0;
  RewardWeights weights;
};

struct Decision {
  Action action;
  std::vector<double> normalized_obs;  // empty for the empirical agent
  std::vector<PolicyOutput> outputs;   // one per head
};

class Agent {
 public:
  // Network heads are initialized from `rng`.
  static Agent make(AgentKind kind, Rng& rng);

  AgentKind kind() const { return kind_; }
  // Weights used for reporting episode reward (the first head's, or agent 1's
  // for the empirical policy).
  RewardWeights report_weights() const;

  // Throws Error("dimension") for a wrong observation length.
  Decision act(std::span<const double> observation, const ModelParams& params, Rng* rng, ActMode mode) const;

  std::vector<PolicyHead> heads;
  NormStats stats{kObservationSize};

 private:
  AgentKind kind_ = AgentKind::Empirical;
};

}  // namespace flowctl
