#include "flowctl/baseline_ga.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "flowctl/episode.hpp"

namespace flowctl {

namespace {

constexpr std::array<double, 4> kHourLevels = {4.0, 8.0, 10.0, 12.0};
constexpr std::uint64_t kGaStream = 200;

unsigned read_bits(std::span<const std::uint8_t> bits, std::size_t at, std::size_t width) {
  unsigned v = 0;
  for (std::size_t i = 0; i < width; ++i) v = (v << 1U) | (bits[at + i] & 1U);
  return v;
}

void write_bits(Chromosome& c, std::size_t at, std::size_t width, unsigned v) {
  for (std::size_t i = 0; i < width; ++i) c[at + i] = static_cast<std::uint8_t>((v >> (width - 1 - i)) & 1U);
}

double order_level(unsigned code, unsigned levels, double hi) { return hi * code / (levels - 1); }

unsigned nearest_code(double value, unsigned levels, double hi) {
  const double x = std::round(value / hi * (levels - 1));
  return static_cast<unsigned>(std::clamp(x, 0.0, static_cast<double>(levels - 1)));
}

void invalid(const std::string& field, const std::string& message) {
  throw Error("invalid_parameter", field + ": " + message);
}

}  // namespace

void GaConfig::validate() const {
  if (population < 2) invalid("population", "must be at least 2");
  if (generations < 0) invalid("generations", "must be non-negative");
  if (crossover < 0.0 || crossover > 1.0) invalid("crossover", "must be in [0, 1]");
  if (mutation > 1.0) invalid("mutation", "must be at most 1");
  if (tournament < 1) invalid("tournament", "must be positive");
  if (elites < 0 || elites >= population) invalid("elites", "must be in [0, population)");
  if (repetitions < 1) invalid("repetitions", "must be positive");
}

std::size_t chromosome_length(const ModelParams& p) { return static_cast<std::size_t>(p.max_days) * kBitsPerDay; }

Action decode_day(std::span<const std::uint8_t> bits, const ModelParams& p) {
  if (bits.size() < kBitsPerDay) throw Error("dimension", "day slice shorter than 14 bits");
  Action a;
  for (std::size_t i = 0; i < kTrades; ++i) {
    a.hours[i] = std::clamp(kHourLevels[read_bits(bits, 2 * i, 2)], p.min_work_hours, p.max_work_hours);
  }
  a.orders[kRebar] = order_level(read_bits(bits, 6, 3), 8, p.max_order[kRebar]);
  a.orders[kFormwork] = order_level(read_bits(bits, 9, 3), 8, p.max_order[kFormwork]);
  a.orders[kConcrete] = order_level(read_bits(bits, 12, 2), 4, p.max_order[kConcrete]);
  return a;
}

std::vector<Action> decode(const Chromosome& c, const ModelParams& p) {
  if (c.size() != chromosome_length(p)) throw Error("dimension", "chromosome length does not match the horizon");
  std::vector<Action> plan;
  plan.reserve(static_cast<std::size_t>(p.max_days));
  const std::span<const std::uint8_t> all(c);
  for (std::size_t d = 0; d < static_cast<std::size_t>(p.max_days); ++d) {
    plan.push_back(decode_day(all.subspan(d * kBitsPerDay, kBitsPerDay), p));
  }
  return plan;
}

Chromosome encode(const std::vector<Action>& plan, const ModelParams& p) {
  if (plan.size() != static_cast<std::size_t>(p.max_days)) throw Error("dimension", "plan length must equal horizon");
  Chromosome c(chromosome_length(p), 0);
  for (std::size_t d = 0; d < plan.size(); ++d) {
    const std::size_t at = d * kBitsPerDay;
    for (std::size_t i = 0; i < kTrades; ++i) {
      const double h = plan[d].hours[i];
      std::size_t best = 0;
      for (std::size_t k = 1; k < kHourLevels.size(); ++k) {
        if (std::abs(kHourLevels[k] - h) < std::abs(kHourLevels[best] - h)) best = k;
      }
      write_bits(c, at + 2 * i, 2, static_cast<unsigned>(best));
    }
    write_bits(c, at + 6, 3, nearest_code(plan[d].orders[kRebar], 8, p.max_order[kRebar]));
    write_bits(c, at + 9, 3, nearest_code(plan[d].orders[kFormwork], 8, p.max_order[kFormwork]));
    write_bits(c, at + 12, 2, nearest_code(plan[d].orders[kConcrete], 4, p.max_order[kConcrete]));
  }
  return c;
}

PlanOutcome run_plan(const std::vector<Action>& plan, const Scenario& scenario, const RewardWeights& weights,
                     std::uint64_t seed, const AnnualCurves* curves) {
  Episode ep = curves ? Episode(scenario, seed, *curves) : Episode(scenario, seed);
  const ModelParams& p = scenario.model;
  PlanOutcome out;
  while (!ep.done()) {
    const auto day = static_cast<std::size_t>(ep.state().t - 1);
    if (day >= plan.size()) break;
    const State before = ep.state();
    const StepResult r = ep.step(plan[day]);
    out.reward += reward(before, r.next, r.status, weights, p).total;
  }
  out.status = ep.status();
  out.duration = ep.state().t - 1;
  out.progress = ep.state().area[kConcrete] / p.total_area();
  out.cash = ep.state().cash;
  return out;
}

double evaluate(const Chromosome& c, const Scenario& scenario, const RewardWeights& weights,
                std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw Error("invalid_parameter", "seeds: evaluation needs at least one seed");
  const auto plan = decode(c, scenario.model);
  double total = 0.0;
  for (std::uint64_t s : seeds) total += run_plan(plan, scenario, weights, s).reward;
  return total / static_cast<double>(seeds.size());
}

GaResult evolve(const GaConfig& cfg, const Scenario& scenario,
                const std::function<void(const GenerationStats&)>& progress) {
  cfg.validate();
  const ModelParams& p = scenario.model;
  const std::size_t len = chromosome_length(p);
  const auto pop_size = static_cast<std::size_t>(cfg.population);
  const double mutation = cfg.mutation < 0.0 ? 1.0 / static_cast<double>(len) : cfg.mutation;
  const RewardWeights weights = reward_preset(1);
  Rng rng(derive_seed(cfg.seed, kGaStream));
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Chromosome> pop(pop_size, Chromosome(len));
  for (auto& c : pop) {
    for (auto& b : c) b = coin(rng) ? 1 : 0;
  }
  std::vector<double> fitness(pop_size);

  // All individuals of a generation share the same exogenous draws.
  auto score = [&](int generation) {
    std::vector<std::uint64_t> seeds;
    std::vector<AnnualCurves> curves;
    for (int r = 0; r < cfg.repetitions; ++r) {
      seeds.push_back(derive_seed(cfg.seed, kGaStream + 1 + static_cast<std::uint64_t>(generation),
                                  static_cast<std::uint64_t>(r)));
      curves.push_back(Episode::sample_curves(scenario, seeds.back()));
    }
    for (std::size_t i = 0; i < pop_size; ++i) {
      const auto plan = decode(pop[i], p);
      double total = 0.0;
      for (std::size_t r = 0; r < seeds.size(); ++r) total += run_plan(plan, scenario, weights, seeds[r], &curves[r]).reward;
      fitness[i] = total / static_cast<double>(seeds.size());
    }
  };

  GaResult result;
  result.best_fitness = -std::numeric_limits<double>::infinity();
  auto record = [&](int generation) {
    const auto it = std::max_element(fitness.begin(), fitness.end());
    const auto idx = static_cast<std::size_t>(it - fitness.begin());
    if (*it > result.best_fitness) {
      result.best_fitness = *it;
      result.best = pop[idx];
    }
    GenerationStats g;
    g.generation = generation;
    g.best = result.best_fitness;
    g.current = *it;
    g.mean = std::accumulate(fitness.begin(), fitness.end(), 0.0) / static_cast<double>(pop_size);
    result.history.push_back(g);
    if (progress) progress(g);
  };

  score(0);
  record(0);

  std::uniform_int_distribution<std::size_t> pick(0, pop_size - 1);
  std::uniform_int_distribution<std::size_t> cut(1, len - 1);
  auto tournament = [&]() -> const Chromosome& {
    std::size_t best = pick(rng);
    for (int k = 1; k < cfg.tournament; ++k) {
      const std::size_t other = pick(rng);
      if (fitness[other] > fitness[best]) best = other;
    }
    return pop[best];
  };

  std::vector<std::size_t> rank(pop_size);
  for (int gen = 1; gen <= cfg.generations; ++gen) {
    std::iota(rank.begin(), rank.end(), std::size_t{0});
    std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });
    std::vector<Chromosome> next;
    next.reserve(pop_size);
    for (int e = 0; e < cfg.elites; ++e) next.push_back(pop[rank[static_cast<std::size_t>(e)]]);
    while (next.size() < pop_size) {
      Chromosome a = tournament();
      Chromosome b = tournament();
      if (unit(rng) < cfg.crossover) {
        const std::size_t at = cut(rng);
        std::swap_ranges(a.begin() + static_cast<std::ptrdiff_t>(at), a.end(),
                         b.begin() + static_cast<std::ptrdiff_t>(at));
      }
      for (Chromosome* child : {&a, &b}) {
        for (auto& bit : *child) {
          if (unit(rng) < mutation) bit ^= 1U;
        }
        if (next.size() < pop_size) next.push_back(std::move(*child));
      }
    }
    pop = std::move(next);
    score(gen);
    record(gen);
  }
  return result;
}

std::string ga_history_csv(const std::vector<GenerationStats>& history) {
  std::ostringstream os;
  os.precision(12);
  os << "generation,best,current_best,mean\n";
  for (const auto& g : history) os << g.generation << ',' << g.best << ',' << g.current << ',' << g.mean << '\n';
  return os.str();
}

}  // namespace flowctl
