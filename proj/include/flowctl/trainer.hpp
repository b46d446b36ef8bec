#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowctl/agents.hpp"
#include "flowctl/episode.hpp"

namespace flowctl {

struct TrainConfig {
  std::size_t horizon = 1024;  // steps per update
  std::size_t batch = 128;     // minibatch size
  std::size_t epochs = 16;
  std::size_t minibatches_per_epoch = 1;
  double gamma = 0.99;
  double lambda = 0.95;
  double lr = 1e-4;
  double clip = 0.2;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  bool normalize_advantages = false;
  int updates = 500;
  int checkpoint_every = 20;
  std::uint64_t seed = 1;

  // Throws Error("invalid_parameter") naming the offending field.
  void validate() const;
};

struct HeadSamples {
  std::vector<std::vector<double>> a;
  std::vector<double> v;
  std::vector<double> logp;
  std::vector<double> r;
  double bootstrap = 0.0;  // value of the state after the last step if it was not terminal
};

struct RolloutBuffer {
  std::vector<std::vector<double>> obs;  // normalized
  std::vector<int> episode;
  std::vector<char> terminal;
  std::vector<HeadSamples> heads;

  std::size_t size() const { return obs.size(); }
  void clear();
};

struct GaeResult {
  std::vector<double> targets;
  std::vector<double> advantages;
};

// Generalized advantage estimation. A terminal step contributes no
// next-state value; the final step bootstraps from `bootstrap` unless it is
// terminal.
GaeResult gae(std::span<const double> rewards, std::span<const double> values, std::span<const char> terminal,
              double bootstrap, double gamma, double lambda);

struct EpisodeSummary {
  std::uint64_t seed = 0;
  StepStatus status = StepStatus::Running;
  int duration = 0;
  double reward = 0.0;
  double npv = 0.0;
  double labor_cost = 0.0;
  double material_cost = 0.0;
};

// Runs episodes back to back, keeping the unfinished episode across calls.
class Collector {
 public:
  Collector(const Scenario& scenario, std::uint64_t seed);

  // Appends `steps` transitions to `buffer` and returns the episodes that
  // finished meanwhile. Observation statistics are updated online.
  std::vector<EpisodeSummary> collect(Agent& agent, std::size_t steps, RolloutBuffer& buffer, Rng& rng);

 private:
  void start_episode();

  const Scenario* scenario_;
  std::uint64_t seed_;
  std::uint64_t episodes_ = 0;
  std::uint64_t episode_seed_ = 0;
  std::unique_ptr<Episode> episode_;
  std::optional<Observation> pending_;
  double running_reward_ = 0.0;
};

struct UpdateDiagnostics {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
};

UpdateDiagnostics ppo_update(PolicyHead& head, AdamState& adam, const RolloutBuffer& buffer, std::size_t head_index,
                             const GaeResult& estimates, const TrainConfig& config, Rng& rng);

struct CurvePoint {
  int update = 0;
  double mean_reward = 0.0;
  double mean_duration = 0.0;
  double completion_rate = 0.0;
  int episodes = 0;
};

struct TrainResult {
  Agent agent;
  std::vector<CurvePoint> curve;
  std::vector<std::string> checkpoints;
};

// `out_dir` may be empty to skip writing checkpoints and the reward curve.
TrainResult train(const Scenario& scenario, AgentKind kind, const TrainConfig& config, const std::string& out_dir,
                  const std::function<void(const CurvePoint&)>& progress = {});

std::string reward_curve_csv(const std::vector<CurvePoint>& curve);

struct Checkpoint {
  Agent agent;
  std::uint64_t updates = 0;
};

void save_checkpoint(const std::string& path, const Agent& agent, std::uint64_t updates);
// Throws Error("missing_checkpoint") or Error("corrupt_checkpoint").
Checkpoint load_checkpoint(const std::string& path);

}  // namespace flowctl
