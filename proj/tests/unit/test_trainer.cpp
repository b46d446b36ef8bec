#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "flowctl/trainer.hpp"

using namespace flowctl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("flowctl_unit_" + name);
  fs::remove_all(p);
  return p;
}

TrainConfig tiny_config() {
  TrainConfig c;
  c.horizon = 64;
  c.batch = 32;
  c.epochs = 2;
  c.updates = 3;
  c.seed = 11;
  return c;
}

}  // namespace

TEST_CASE("GAE hand cases") {
  SUBCASE("single terminal step") {
    const std::vector<double> r{1.0}, v{0.0};
    const std::vector<char> term{1};
    const auto g = gae(r, v, term, 123.0, 0.99, 0.95);
    CHECK(g.targets[0] == 1.0);
    CHECK(g.advantages[0] == 1.0);
  }
  SUBCASE("zero discount gives the immediate reward as target") {
    const std::vector<double> r{1.0, -2.0, 0.5, 3.0}, v{0.3, 0.1, -0.4, 2.0};
    const std::vector<char> term{0, 0, 1, 0};
    const auto g = gae(r, v, term, 5.0, 0.0, 0.95);
    for (std::size_t k = 0; k < r.size(); ++k) CHECK(g.targets[k] == doctest::Approx(r[k]).epsilon(1e-15));
  }
  SUBCASE("truncated horizon bootstraps from the next state's value") {
    const std::vector<double> r{0.0}, v{1.0};
    const std::vector<char> term{0};
    const auto g = gae(r, v, term, 2.0, 0.5, 1.0);
    CHECK(g.targets[0] == doctest::Approx(1.0));
    CHECK(g.advantages[0] == doctest::Approx(0.0));
  }
}

TEST_CASE("GAE with lambda 1 equals the discounted return") {
  Rng rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> r(10), v(10);
    for (auto& x : r) x = u(rng);
    for (auto& x : v) x = u(rng);
    std::vector<char> term(10, 0);
    term[9] = 1;
    const double gamma = 0.9;
    const auto g = gae(r, v, term, 0.0, gamma, 1.0);
    for (std::size_t t = 0; t < 10; ++t) {
      double ret = 0.0;
      double disc = 1.0;
      for (std::size_t k = t; k < 10; ++k) {
        ret += disc * r[k];
        disc *= gamma;
      }
      CHECK(std::abs(g.targets[t] - ret) <= 1e-12);
      CHECK(std::abs(g.advantages[t] - (ret - v[t])) <= 1e-12);
    }
  }
}

TEST_CASE("GAE never leaks credit across episodes") {
  Rng rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  // Three complete episodes of lengths 3, 5, 2.
  const std::vector<std::size_t> len{3, 5, 2};
  std::vector<std::vector<double>> er, ev;
  for (std::size_t L : len) {
    er.emplace_back(L);
    ev.emplace_back(L);
    for (auto& x : er.back()) x = u(rng);
    for (auto& x : ev.back()) x = u(rng);
  }
  auto run = [&](const std::vector<std::size_t>& order) {
    std::vector<double> r, v;
    std::vector<char> term;
    for (std::size_t e : order) {
      for (std::size_t k = 0; k < len[e]; ++k) {
        r.push_back(er[e][k]);
        v.push_back(ev[e][k]);
        term.push_back(k + 1 == len[e] ? 1 : 0);
      }
    }
    const auto g = gae(r, v, term, 0.0, 0.99, 0.95);
    std::vector<std::vector<double>> per(len.size());
    std::size_t at = 0;
    for (std::size_t e : order) {
      per[e].assign(g.targets.begin() + static_cast<std::ptrdiff_t>(at),
                    g.targets.begin() + static_cast<std::ptrdiff_t>(at + len[e]));
      at += len[e];
    }
    return per;
  };
  CHECK(run({0, 1, 2}) == run({2, 0, 1}));
}

TEST_CASE("collector packs whole horizons and records consistent samples") {
  const Scenario sc = load_scenario({"0", {}});
  Rng init(1), rng(2);
  Agent agent = Agent::make(AgentKind::SFPN1, init);
  Collector col(sc, 3);
  RolloutBuffer buf;
  const auto finished = col.collect(agent, 1024, buf, rng);
  CHECK(buf.size() == 1024);
  CHECK(buf.heads.size() == 1);
  CHECK(buf.heads[0].r.size() == 1024);
  CHECK(finished.size() >= 7);
  // Episode ids form contiguous runs, and a terminal flag closes each run.
  for (std::size_t i = 1; i < buf.size(); ++i) {
    CHECK(buf.episode[i] >= buf.episode[i - 1]);
    if (buf.episode[i] != buf.episode[i - 1]) CHECK(buf.terminal[i - 1] == 1);
  }
  CHECK(agent.stats.count() == doctest::Approx(1024.0));
  buf.clear();
  CHECK(buf.size() == 0);
  CHECK(buf.heads[0].r.empty());
}

TEST_CASE("collected log densities match the sampling distribution") {
  const Scenario sc = load_scenario({"0", {}});
  Rng init(1), rng(2);
  Agent agent = Agent::make(AgentKind::SFPN1, init);
  agent.stats.assign(1.0, std::vector<double>(59, 0.0), std::vector<double>(59, 0.0));
  // Freeze statistics by checking each sample right after it is drawn.
  Episode ep(sc, 9);
  for (int k = 0; k < 20 && !ep.done(); ++k) {
    const Observation obs = ep.observation();
    const Decision d = agent.act(obs, sc.model, &rng, ActMode::Sample);
    const auto out = agent.heads[0].net.forward(d.normalized_obs);
    CHECK(std::abs(d.outputs[0].logp - log_prob(d.outputs[0].a, out.mean, agent.heads[0].net.logstd())) <= 1e-12);
    ep.step(d.action);
  }
}

TEST_CASE("first epoch starts at ratio one with the clip inactive") {
  const Scenario sc = load_scenario({"0", {}});
  Rng init(1), rng(2), brng(3);
  Agent agent = Agent::make(AgentKind::SFPN1, init);
  Collector col(sc, 3);
  RolloutBuffer buf;
  col.collect(agent, 128, buf, rng);
  // Re-normalize with frozen statistics so stored logp matches the network.
  for (std::size_t i = 0; i < buf.size(); ++i) {
    const auto out = agent.heads[0].net.forward(buf.obs[i]);
    buf.heads[0].logp[i] = log_prob(buf.heads[0].a[i], out.mean, agent.heads[0].net.logstd());
  }
  const auto est = gae(buf.heads[0].r, buf.heads[0].v, buf.terminal, buf.heads[0].bootstrap, 0.99, 0.95);
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch = 128;
  AdamState adam(agent.heads[0].net.size(), cfg.lr);
  const auto diag = ppo_update(agent.heads[0], adam, buf, 0, est, cfg, brng);
  CHECK(diag.clip_fraction == 0.0);
  CHECK(std::abs(diag.approx_kl) < 1e-12);
}

TEST_CASE("zero advantages, exact targets and no entropy leave the parameters still") {
  const Scenario sc = load_scenario({"0", {}});
  Rng init(1), rng(2), brng(3);
  Agent agent = Agent::make(AgentKind::SFPN1, init);
  Collector col(sc, 3);
  RolloutBuffer buf;
  col.collect(agent, 64, buf, rng);
  GaeResult est;
  for (std::size_t i = 0; i < buf.size(); ++i) {
    est.targets.push_back(agent.heads[0].net.forward(buf.obs[i]).value);
    est.advantages.push_back(0.0);
  }
  TrainConfig cfg;
  cfg.entropy_coef = 0.0;
  cfg.batch = 32;
  cfg.epochs = 3;
  const auto before = agent.heads[0].net.params;
  AdamState adam(before.size(), cfg.lr);
  ppo_update(agent.heads[0], adam, buf, 0, est, cfg, brng);
  CHECK(agent.heads[0].net.params == before);
}

TEST_CASE("PPO solves a two-context bandit") {
  BundleSpec spec;
  spec.action_dim = 1;
  spec.direct = 1;
  spec.indirect = 1;
  spec.indirect_hidden = 8;
  spec.feature = 4;
  spec.trunk = 16;
  spec.head_hidden = 16;
  PolicyHead head{NetworkBundle(spec), 0, reward_preset(1)};
  Rng rng(21);
  head.net.init(rng);
  const std::vector<std::vector<double>> contexts{{1.0, 1.0}, {-1.0, -1.0}};
  const std::vector<double> best{0.5, -0.5};

  TrainConfig cfg;
  cfg.lr = 1e-3;
  cfg.batch = 128;
  cfg.epochs = 16;
  AdamState adam(head.net.size(), cfg.lr);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int u = 0; u < 300; ++u) {
    RolloutBuffer buf;
    buf.heads.resize(1);
    for (int i = 0; i < 128; ++i) {
      const std::size_t c = static_cast<std::size_t>(i % 2);
      const auto out = head.net.forward(contexts[c]);
      const double sd = std::exp(head.net.logstd()[0]);
      const std::vector<double> a{out.mean[0] + sd * gauss(rng)};
      buf.obs.push_back(contexts[c]);
      buf.episode.push_back(i);
      buf.terminal.push_back(1);
      buf.heads[0].a.push_back(a);
      buf.heads[0].v.push_back(out.value);
      buf.heads[0].logp.push_back(log_prob(a, out.mean, head.net.logstd()));
      buf.heads[0].r.push_back(-(a[0] - best[c]) * (a[0] - best[c]));
    }
    const auto est = gae(buf.heads[0].r, buf.heads[0].v, buf.terminal, 0.0, cfg.gamma, cfg.lambda);
    ppo_update(head, adam, buf, 0, est, cfg, rng);
  }
  for (std::size_t c = 0; c < 2; ++c) {
    CHECK(std::abs(head.net.forward(contexts[c]).mean[0] - best[c]) <= 0.05 * 2.0);
  }
}

TEST_CASE("training config validation") {
  TrainConfig c;
  c.batch = 2048;
  CHECK_THROWS_AS(c.validate(), Error);
  c = TrainConfig{};
  c.gamma = 1.5;
  CHECK_THROWS_AS(c.validate(), Error);
  c = TrainConfig{};
  c.clip = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK_NOTHROW(TrainConfig{}.validate());
}

TEST_CASE("training writes a curve, a forced final checkpoint, and is bit-reproducible") {
  const Scenario sc = load_scenario({"0", {}});
  const TrainConfig cfg = tiny_config();
  const fs::path a = scratch("train_a"), b = scratch("train_b");
  const TrainResult ra = train(sc, AgentKind::SFPN1, cfg, a.string());
  const TrainResult rb = train(sc, AgentKind::SFPN1, cfg, b.string());
  CHECK(ra.curve.size() == 3);
  REQUIRE(ra.checkpoints.size() == 1);
  CHECK(fs::path(ra.checkpoints[0]).filename() == "ckpt_000003.bin");
  CHECK(slurp(ra.checkpoints[0]) == slurp(rb.checkpoints[0]));
  CHECK(slurp((a / "reward_curve.csv").string()) == slurp((b / "reward_curve.csv").string()));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("checkpoint cadence") {
  const Scenario sc = load_scenario({"0", {}});
  TrainConfig cfg = tiny_config();
  cfg.updates = 5;
  cfg.checkpoint_every = 2;
  cfg.epochs = 1;
  const fs::path dir = scratch("cadence");
  const TrainResult r = train(sc, AgentKind::SWPN, cfg, dir.string());
  CHECK(r.checkpoints.size() == 3);
  fs::remove_all(dir);
}

TEST_CASE("checkpoint round trip for every network agent") {
  const fs::path dir = scratch("ckpt");
  fs::create_directories(dir);
  for (auto kind : {AgentKind::SFPN1, AgentKind::SFPN2, AgentKind::SWPN, AgentKind::SMPN, AgentKind::DPN}) {
    Rng rng(static_cast<std::uint64_t>(kind) + 1);
    Agent a = Agent::make(kind, rng);
    a.stats.update(std::vector<double>(59, 1.0));
    a.stats.update(std::vector<double>(59, 3.0));
    const std::string path = (dir / "x.bin").string();
    save_checkpoint(path, a, 42);
    const Checkpoint ck = load_checkpoint(path);
    CHECK(ck.updates == 42);
    CHECK(ck.agent.kind() == kind);
    REQUIRE(ck.agent.heads.size() == a.heads.size());
    for (std::size_t h = 0; h < a.heads.size(); ++h) {
      CHECK(ck.agent.heads[h].net.params == a.heads[h].net.params);
      CHECK(ck.agent.heads[h].first_dim == a.heads[h].first_dim);
      CHECK(ck.agent.heads[h].weights == a.heads[h].weights);
    }
    CHECK(ck.agent.stats == a.stats);
  }
  CHECK(load_checkpoint((dir / "x.bin").string()).agent.heads.size() == 2);
  fs::remove_all(dir);
}

TEST_CASE("checkpoint errors") {
  auto code_of = [](const std::string& path) {
    try {
      load_checkpoint(path);
    } catch (const Error& e) {
      return e.code();
    }
    return std::string("none");
  };
  const fs::path dir = scratch("ckpt_err");
  fs::create_directories(dir);
  CHECK(code_of((dir / "absent.bin").string()) == "missing_checkpoint");
  {
    std::ofstream f(dir / "junk.bin", std::ios::binary);
    f << "not a checkpoint at all";
  }
  CHECK(code_of((dir / "junk.bin").string()) == "corrupt_checkpoint");
  Rng rng(1);
  save_checkpoint((dir / "ok.bin").string(), Agent::make(AgentKind::SFPN1, rng), 1);
  const std::string bytes = slurp((dir / "ok.bin").string());
  {
    std::ofstream f(dir / "cut.bin", std::ios::binary);
    f << bytes.substr(0, bytes.size() - 100);
  }
  CHECK(code_of((dir / "cut.bin").string()) == "corrupt_checkpoint");
  fs::remove_all(dir);
}
