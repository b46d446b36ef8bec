#include "flowctl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace flowctl {

namespace {

constexpr char kMagic[8] = {'F', 'L', 'O', 'W', 'C', 'K', 'P', 'T'};
constexpr std::uint64_t kFormatVersion = 1;
constexpr std::uint64_t kTrainingStream = 100;

void invalid(const std::string& field, const std::string& message) {
  throw Error("invalid_parameter", field + ": " + message);
}

std::string checkpoint_name(int update) {
  std::ostringstream os;
  os << "ckpt_";
  os.width(6);
  os.fill('0');
  os << update << ".bin";
  return os.str();
}

}  // namespace

void TrainConfig::validate() const {
  if (horizon == 0) invalid("horizon", "must be positive");
  if (batch == 0 || batch > horizon) invalid("batch", "must be in 1..horizon");
  if (epochs == 0) invalid("epochs", "must be positive");
  if (minibatches_per_epoch == 0) invalid("minibatches_per_epoch", "must be positive");
  if (gamma < 0.0 || gamma > 1.0) invalid("gamma", "must be in [0, 1]");
  if (lambda < 0.0 || lambda > 1.0) invalid("lambda", "must be in [0, 1]");
  if (!(clip > 0.0)) invalid("clip", "must be positive");
  if (!(lr > 0.0)) invalid("lr", "must be positive");
  if (value_coef < 0.0 || entropy_coef < 0.0) invalid("coefficients", "must be non-negative");
  if (updates < 0) invalid("updates", "must be non-negative");
  if (checkpoint_every <= 0) invalid("checkpoint_every", "must be positive");
}

void RolloutBuffer::clear() {
  obs.clear();
  episode.clear();
  terminal.clear();
  for (auto& h : heads) h = HeadSamples{};
}

GaeResult gae(std::span<const double> r, std::span<const double> v, std::span<const char> terminal,
              double bootstrap, double gamma, double lambda) {
  const std::size_t n = r.size();
  if (v.size() != n || terminal.size() != n) throw Error("dimension", "gae inputs differ in length");
  GaeResult out;
  out.targets.resize(n);
  out.advantages.resize(n);
  double running = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    double next_value = 0.0;
    double carry = 0.0;
    if (!terminal[k]) {
      next_value = k + 1 < n ? v[k + 1] : bootstrap;
      carry = k + 1 < n ? running : 0.0;
    }
    const double delta = r[k] + gamma * next_value - v[k];
    running = delta + gamma * lambda * carry;
    out.advantages[k] = running;
    out.targets[k] = v[k] + running;
  }
  return out;
}

Collector::Collector(const Scenario& scenario, std::uint64_t seed) : scenario_(&scenario), seed_(seed) {}

void Collector::start_episode() {
  episode_seed_ = derive_seed(seed_, kTrainingStream, episodes_++);
  episode_ = std::make_unique<Episode>(*scenario_, episode_seed_);
  pending_.reset();
  running_reward_ = 0.0;
}

std::vector<EpisodeSummary> Collector::collect(Agent& agent, std::size_t steps, RolloutBuffer& buffer, Rng& rng) {
  const std::size_t nh = agent.heads.size();
  if (nh == 0) throw Error("invalid_agent", "only network agents can be trained");
  if (buffer.heads.size() != nh) buffer.heads.resize(nh);
  std::vector<EpisodeSummary> finished;
  const ModelParams& p = scenario_->model;

  for (std::size_t s = 0; s < steps; ++s) {
    if (!episode_ || episode_->done()) start_episode();
    Observation obs = pending_ ? *pending_ : episode_->observation();
    pending_.reset();
    agent.stats.update(obs);
    Decision d = agent.act(obs, p, &rng, ActMode::Sample);

    const State before = episode_->state();
    const StepResult res = episode_->step(d.action);

    buffer.obs.push_back(std::move(d.normalized_obs));
    buffer.episode.push_back(static_cast<int>(episodes_ - 1));
    buffer.terminal.push_back(is_terminal(res.status) ? 1 : 0);
    for (std::size_t h = 0; h < nh; ++h) {
      auto& hs = buffer.heads[h];
      hs.a.push_back(d.outputs[h].a);
      hs.v.push_back(d.outputs[h].v);
      hs.logp.push_back(d.outputs[h].logp);
      hs.r.push_back(reward(before, res.next, res.status, agent.heads[h].weights, p).total);
    }
    running_reward_ += reward(before, res.next, res.status, agent.report_weights(), p).total;

    if (is_terminal(res.status)) {
      const State& st = episode_->state();
      finished.push_back({episode_seed_, res.status, st.t - 1, running_reward_, st.cash - p.initial_cash,
                          st.labor_cost, st.material_cost});
    }
  }

  // Bootstrap a horizon-truncated episode from the next observation, which is
  // kept so the following collect starts from the same draw.
  for (auto& hs : buffer.heads) hs.bootstrap = 0.0;
  if (episode_ && !episode_->done()) {
    pending_ = episode_->observation();
    const auto x = agent.stats.normalized(*pending_);
    for (std::size_t h = 0; h < nh; ++h) buffer.heads[h].bootstrap = agent.heads[h].net.forward(x).value;
  }
  return finished;
}

UpdateDiagnostics ppo_update(PolicyHead& head, AdamState& adam, const RolloutBuffer& buffer, std::size_t hi,
                             const GaeResult& est, const TrainConfig& cfg, Rng& rng) {
  const std::size_t n = buffer.size();
  const HeadSamples& hs = buffer.heads.at(hi);
  if (n == 0 || est.advantages.size() != n) throw Error("dimension", "update needs estimates for every sample");
  NetworkBundle& net = head.net;
  const std::size_t dims = net.spec().action_dim;
  const std::size_t batch = std::min(cfg.batch, n);

  std::vector<double> adv = est.advantages;
  if (cfg.normalize_advantages && n > 1) {
    const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double x : adv) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / static_cast<double>(n)) + 1e-8;
    for (double& x : adv) x = (x - mean) / sd;
  }

  std::vector<std::size_t> order(n);
  std::vector<double> grads(net.size());
  std::vector<double> dmean(dims);
  std::vector<double> dlogstd(dims);
  NetworkBundle::Cache cache;
  UpdateDiagnostics diag;
  std::size_t seen = 0;
  std::size_t clipped = 0;
  const double inv_b = 1.0 / static_cast<double>(batch);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t mb = 0; mb < cfg.minibatches_per_epoch; ++mb) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      // Partial Fisher-Yates: the first `batch` entries are a uniform draw
      // without replacement.
      for (std::size_t i = 0; i < batch; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(order[i], order[pick(rng)]);
      }
      std::fill(grads.begin(), grads.end(), 0.0);
      const auto ls = net.logstd();
      std::vector<double> logstd(ls.begin(), ls.end());
      std::vector<double> inv_var(dims);
      for (std::size_t k = 0; k < dims; ++k) inv_var[k] = std::exp(-2.0 * logstd[k]);

      double policy_loss = 0.0;
      double value_loss = 0.0;
      for (std::size_t bi = 0; bi < batch; ++bi) {
        const std::size_t i = order[bi];
        const auto out = net.forward(buffer.obs[i], cache);
        const auto& a = hs.a[i];
        const double logp = log_prob(a, out.mean, logstd);
        const double log_ratio = logp - hs.logp[i];
        const double ratio = std::exp(log_ratio);
        const double clipped_ratio = std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip);
        const double s1 = ratio * adv[i];
        const double s2 = clipped_ratio * adv[i];
        policy_loss -= std::min(s1, s2) * inv_b;
        const double verr = out.value - est.targets[i];
        value_loss += verr * verr * inv_b;
        diag.approx_kl += (ratio - 1.0) - log_ratio;
        ++seen;

        // d(loss)/d(logp): the surrogate only passes gradient when the
        // unclipped branch is the active minimum.
        double dlogp = 0.0;
        if (s1 <= s2) {
          dlogp = -adv[i] * ratio * inv_b;
        } else {
          ++clipped;
        }
        for (std::size_t k = 0; k < dims; ++k) {
          const double diff = a[k] - out.mean[k];
          dmean[k] = dlogp * diff * inv_var[k];
          dlogstd[k] = dlogp * (diff * diff * inv_var[k] - 1.0);
        }
        const double dvalue = 2.0 * cfg.value_coef * verr * inv_b;
        net.backward(cache, dmean, dvalue, dlogstd, grads);
      }
      // Entropy bonus: d/dlogstd of -c2 * mean entropy.
      for (std::size_t k = 0; k < dims; ++k) grads[net.logstd_offset() + k] -= cfg.entropy_coef;

      const double entropy = gaussian_entropy(logstd);
      const double loss = policy_loss + cfg.value_coef * value_loss - cfg.entropy_coef * entropy;
      if (!std::isfinite(loss)) {
        throw Error("nan_loss", "non-finite PPO loss (policy " + std::to_string(policy_loss) + ", value " +
                                    std::to_string(value_loss) + ")");
      }
      diag.policy_loss += policy_loss;
      diag.value_loss += value_loss;
      diag.entropy += entropy;
      adam_step(net.params, grads, adam);
    }
  }
  const double rounds = static_cast<double>(cfg.epochs * cfg.minibatches_per_epoch);
  diag.policy_loss /= rounds;
  diag.value_loss /= rounds;
  diag.entropy /= rounds;
  diag.clip_fraction = static_cast<double>(clipped) / static_cast<double>(std::max<std::size_t>(seen, 1));
  diag.approx_kl /= static_cast<double>(std::max<std::size_t>(seen, 1));
  return diag;
}

std::string reward_curve_csv(const std::vector<CurvePoint>& curve) {
  std::ostringstream os;
  os.precision(12);
  os << "update,mean_reward,mean_duration,completion_rate,episodes\n";
  for (const auto& c : curve) {
    os << c.update << ',' << c.mean_reward << ',' << c.mean_duration << ',' << c.completion_rate << ','
       << c.episodes << '\n';
  }
  return os.str();
}

TrainResult train(const Scenario& scenario, AgentKind kind, const TrainConfig& cfg, const std::string& out_dir,
                  const std::function<void(const CurvePoint&)>& progress) {
  cfg.validate();
  if (!is_network(kind)) throw Error("invalid_agent", "the empirical policy has nothing to train");
  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error("io", "cannot create output directory " + out_dir + ": " + ec.message());
  }

  Rng init_rng(derive_seed(cfg.seed, 1));
  Rng policy_rng(derive_seed(cfg.seed, 2));
  Rng batch_rng(derive_seed(cfg.seed, 3));
  TrainResult result{Agent::make(kind, init_rng), {}, {}};
  Agent& agent = result.agent;
  std::vector<AdamState> adam;
  for (const auto& h : agent.heads) adam.emplace_back(h.net.size(), cfg.lr);

  Collector collector(scenario, cfg.seed);
  RolloutBuffer buffer;
  CurvePoint last;
  for (int u = 1; u <= cfg.updates; ++u) {
    buffer.clear();
    const auto episodes = collector.collect(agent, cfg.horizon, buffer, policy_rng);
    for (std::size_t h = 0; h < agent.heads.size(); ++h) {
      const auto& hs = buffer.heads[h];
      const GaeResult est = gae(hs.r, hs.v, buffer.terminal, hs.bootstrap, cfg.gamma, cfg.lambda);
      ppo_update(agent.heads[h], adam[h], buffer, h, est, cfg, batch_rng);
    }
    buffer.clear();

    CurvePoint point;
    point.update = u;
    if (episodes.empty()) {
      point = last;
      point.update = u;
      point.episodes = 0;
    } else {
      double completed = 0.0;
      for (const auto& e : episodes) {
        point.mean_reward += e.reward;
        point.mean_duration += e.duration;
        if (e.status == StepStatus::Completed) completed += 1.0;
      }
      const double m = static_cast<double>(episodes.size());
      point.mean_reward /= m;
      point.mean_duration /= m;
      point.completion_rate = completed / m;
      point.episodes = static_cast<int>(episodes.size());
    }
    last = point;
    result.curve.push_back(point);
    if (progress) progress(point);

    if (!out_dir.empty() && (u % cfg.checkpoint_every == 0 || u == cfg.updates)) {
      const std::string path = (std::filesystem::path(out_dir) / checkpoint_name(u)).string();
      save_checkpoint(path, agent, static_cast<std::uint64_t>(u));
      result.checkpoints.push_back(path);
    }
  }
  if (!out_dir.empty()) {
    if (cfg.updates == 0) {
      const std::string path = (std::filesystem::path(out_dir) / checkpoint_name(0)).string();
      save_checkpoint(path, agent, 0);
      result.checkpoints.push_back(path);
    }
    std::ofstream os(std::filesystem::path(out_dir) / "reward_curve.csv");
    if (!os) throw Error("io", "cannot write reward curve in " + out_dir);
    os << reward_curve_csv(result.curve);
  }
  return result;
}

void save_checkpoint(const std::string& path, const Agent& agent, std::uint64_t updates) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("io", "cannot write checkpoint " + path);
  os.write(kMagic, sizeof kMagic);
  io::put_u64(os, kFormatVersion);
  io::put_u64(os, static_cast<std::uint64_t>(agent.kind()));
  io::put_u64(os, updates);
  io::put_u64(os, agent.heads.size());
  for (const auto& h : agent.heads) {
    io::put_u64(os, h.first_dim);
    const auto& w = h.weights;
    for (double x : {w.progress, w.labor_dense, w.material_dense, w.duration_dense, w.labor_sparse, w.material_sparse,
                     w.duration_sparse, w.failure}) {
      io::put_f64(os, x);
    }
    write_bundle(os, h.net);
  }
  const auto& st = agent.stats;
  io::put_u64(os, st.dim());
  io::put_f64(os, st.count());
  for (double x : st.mean()) io::put_f64(os, x);
  for (double x : st.m2()) io::put_f64(os, x);
  if (!os) throw Error("io", "failed writing checkpoint " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("missing_checkpoint", "cannot open checkpoint " + path);
  char magic[8];
  if (!is.read(magic, 8) || !std::equal(magic, magic + 8, kMagic)) {
    throw Error("corrupt_checkpoint", path + " is not a checkpoint file");
  }
  if (io::get_u64(is) != kFormatVersion) throw Error("corrupt_checkpoint", "unsupported checkpoint version");
  const std::uint64_t kind = io::get_u64(is);
  if (kind > static_cast<std::uint64_t>(AgentKind::DPN)) throw Error("corrupt_checkpoint", "unknown agent kind");
  Checkpoint ck;
  Rng unused(0);
  ck.agent = Agent::make(static_cast<AgentKind>(kind), unused);
  ck.updates = io::get_u64(is);
  const std::uint64_t nh = io::get_u64(is);
  if (nh != ck.agent.heads.size()) throw Error("corrupt_checkpoint", "head count does not match agent kind");
  for (auto& h : ck.agent.heads) {
    h.first_dim = io::get_u64(is);
    auto& w = h.weights;
    for (double* x : {&w.progress, &w.labor_dense, &w.material_dense, &w.duration_dense, &w.labor_sparse,
                      &w.material_sparse, &w.duration_sparse, &w.failure}) {
      *x = io::get_f64(is);
    }
    NetworkBundle net = read_bundle(is);
    if (net.spec().action_dim != h.net.spec().action_dim) {
      throw Error("corrupt_checkpoint", "head width does not match agent kind");
    }
    h.net = std::move(net);
  }
  const std::uint64_t dim = io::get_u64(is);
  if (dim != kObservationSize) throw Error("corrupt_checkpoint", "observation statistics width mismatch");
  const double count = io::get_f64(is);
  std::vector<double> mean(dim), m2(dim);
  for (auto& x : mean) x = io::get_f64(is);
  for (auto& x : m2) x = io::get_f64(is);
  ck.agent.stats.assign(count, std::move(mean), std::move(m2));
  return ck;
}

}  // namespace flowctl
