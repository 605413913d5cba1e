#include "framepbo/abc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

#include "framepbo/csvio.hpp"

namespace framepbo {
namespace {

int round_clamped(double v, const Bound& b) {
  double r = static_cast<double>(std::llround(v));
  r = std::max(b.lo, std::min(b.hi, r));
  return static_cast<int>(std::llround(r));
}

std::vector<double> fresh_draw(const ABCConfig& config, Rng& rng) {
  std::vector<double> x(static_cast<std::size_t>(config.dimension()));
  for (std::size_t j = 0; j < x.size(); ++j)
    x[j] = rng.uniform(config.bounds[j].lo, config.bounds[j].hi);
  return x;
}

// Evaluates decoded candidates, optionally on several workers. Results land
// at their issue index, so the merge order never depends on thread timing.
void evaluate_batch(const std::vector<std::vector<double>>& xs,
                    const ABCConfig& config, const Evaluator& evaluator,
                    std::vector<FoodSource>& out) {
  out.assign(xs.size(), FoodSource{});
  std::vector<std::string> errors(xs.size());
  std::vector<char> failed(xs.size(), 0);
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < xs.size(); i += step) {
      FoodSource& s = out[i];
      s.x = xs[i];
      DesignVector design = decode(s.x, config);
      try {
        s.report = evaluator(design);
        s.f = s.report.phi;
      } catch (const std::exception& e) {
        failed[i] = 1;
        errors[i] = e.what();
      }
    }
  };
  int workers = std::min<int>(config.threads, static_cast<int>(xs.size()));
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back(work, static_cast<std::size_t>(w),
                        static_cast<std::size_t>(workers));
    for (std::thread& t : pool) t.join();
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (failed[i])
      throw EvaluationError("evaluator failed: " + errors[i],
                            decode(xs[i], config));
  }
}

struct BestSoFar {
  bool set = false;
  double phi = 0.0;
  DesignVector design;
  PenaltyReport report;

  void offer(const FoodSource& s, const ABCConfig& config) {
    if (!set || s.f < phi) {
      set = true;
      phi = s.f;
      design = decode(s.x, config);
      report = s.report;
    }
  }
};

IterationStat snapshot(int iteration, const BestSoFar& best,
                       const std::vector<FoodSource>& sources) {
  IterationStat stat;
  stat.iteration = iteration;
  stat.best_phi = best.phi;
  stat.best_weight = best.report.F;
  stat.best_C = best.report.C;
  for (const FoodSource& s : sources)
    if (s.report.C == 0.0) ++stat.feasible_count;
  return stat;
}

}  // namespace

void ABCConfig::validate() const {
  if (colony_size < 2 || colony_size % 2 != 0)
    throw std::runtime_error("abc: colony_size must be an even number >= 2");
  if (abandonment_limit < 1)
    throw std::runtime_error("abc: abandonment_limit must be >= 1");
  if (max_iterations < 0)
    throw std::runtime_error("abc: max_iterations must be >= 0");
  if (!(vcp > 0.0) || vcp > 1.0)
    throw std::runtime_error("abc: vcp must lie in (0, 1]");
  if (runs < 1) throw std::runtime_error("abc: runs must be >= 1");
  if (bounds.empty()) throw std::runtime_error("abc: bounds are empty");
  for (const Bound& b : bounds)
    if (!(b.lo <= b.hi))
      throw std::runtime_error("abc: bound with lo > hi");
  if (beam_dims < 0 || column_dims < 0 || wall_dims < 0 ||
      beam_dims + column_dims + wall_dims != dimension())
    throw std::runtime_error(
        "abc: beam/column/wall dimension split does not match bounds");
  if (!(divergence_window > 0.0) || divergence_window > 1.0)
    throw std::runtime_error("abc: divergence_window must lie in (0, 1]");
  if (threads < 1) throw std::runtime_error("abc: threads must be >= 1");
}

DesignVector decode(const std::vector<double>& x, const ABCConfig& config) {
  DesignVector d;
  std::size_t j = 0;
  auto take = [&](int n, std::vector<int>& out) {
    out.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k, ++j)
      out.push_back(round_clamped(x[j], config.bounds[j]));
  };
  take(config.beam_dims, d.beam_group_ids);
  take(config.column_dims, d.column_group_ids);
  take(config.wall_dims, d.wall_group_ids);
  return d;
}

std::vector<FoodSource> init_population(const ABCConfig& config, Rng& rng) {
  std::vector<FoodSource> sources(
      static_cast<std::size_t>(config.n_sources()));
  for (FoodSource& s : sources) s.x = fresh_draw(config, rng);
  return sources;
}

std::vector<double> neighbor_move(const FoodSource& source,
                                  const FoodSource& partner,
                                  const ABCConfig& config, Rng& rng) {
  const int D = config.dimension();
  int n_perturb = static_cast<int>(std::lround(config.vcp * D));
  n_perturb = std::max(1, std::min(D, n_perturb));

  // Partial Fisher-Yates pick of the perturbed dimensions.
  std::vector<int> order(static_cast<std::size_t>(D));
  std::iota(order.begin(), order.end(), 0);
  for (int t = 0; t < n_perturb; ++t)
    std::swap(order[static_cast<std::size_t>(t)],
              order[static_cast<std::size_t>(rng.uniform_int(t, D - 1))]);
  std::sort(order.begin(), order.begin() + n_perturb);

  std::vector<double> v = source.x;
  for (int t = 0; t < n_perturb; ++t) {
    auto j = static_cast<std::size_t>(order[static_cast<std::size_t>(t)]);
    double phi = rng.uniform(-1.0, 1.0);
    double moved = source.x[j] + phi * (source.x[j] - partner.x[j]);
    v[j] = std::max(config.bounds[j].lo,
                    std::min(config.bounds[j].hi, moved));
  }
  return v;
}

FoodSource greedy_select(const FoodSource& old_source,
                         const FoodSource& candidate) {
  if (candidate.f <= old_source.f) {
    FoodSource survivor = candidate;
    survivor.trial = 0;
    return survivor;
  }
  FoodSource survivor = old_source;
  survivor.trial += 1;
  return survivor;
}

double onlooker_probability(double f_i, double f_min) {
  if (!(f_min > 0.0) || !(f_i > 0.0))
    throw std::runtime_error("abc: onlooker probability needs positive fitness");
  return 0.9 * f_min / f_i + 0.1;
}

int scout_index(const std::vector<FoodSource>& sources,
                int abandonment_limit) {
  int best = -1;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (sources[i].trial < abandonment_limit) continue;
    if (best < 0 || sources[i].trial > sources[static_cast<std::size_t>(best)].trial)
      best = static_cast<int>(i);
  }
  return best;
}

bool scout_replace(FoodSource& source, const ABCConfig& config, Rng& rng) {
  if (source.trial < config.abandonment_limit) return false;
  source.x = fresh_draw(config, rng);
  source.trial = 0;
  source.f = 0.0;
  source.report = PenaltyReport{};
  return true;
}

RunResult run_abc(const ABCConfig& config, const Evaluator& evaluator,
                  std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  RunResult result;
  result.seed = seed;

  std::vector<FoodSource> sources = init_population(config, rng);
  {
    std::vector<std::vector<double>> xs;
    xs.reserve(sources.size());
    for (const FoodSource& s : sources) xs.push_back(s.x);
    std::vector<FoodSource> evaluated;
    evaluate_batch(xs, config, evaluator, evaluated);
    for (std::size_t i = 0; i < sources.size(); ++i) {
      sources[i].f = evaluated[i].f;
      sources[i].report = evaluated[i].report;
    }
    result.evaluations += static_cast<long>(sources.size());
  }

  BestSoFar best;
  for (const FoodSource& s : sources) best.offer(s, config);
  result.history.push_back(snapshot(0, best, sources));

  const auto n_s = static_cast<std::size_t>(config.n_sources());
  const int divergence_iter = static_cast<int>(
      std::ceil(config.divergence_window * config.max_iterations));

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    // Employed phase: one pre-drawn move per source, batch-evaluated, then
    // merged by source index.
    std::vector<std::vector<double>> xs(n_s);
    auto partner_of = [&](std::size_t i) -> std::size_t {
      if (n_s < 2) return i;  // degenerate colony: zero-difference move
      int k = rng.uniform_int(0, static_cast<int>(n_s) - 2);
      if (k >= static_cast<int>(i)) ++k;
      return static_cast<std::size_t>(k);
    };
    for (std::size_t i = 0; i < n_s; ++i)
      xs[i] = neighbor_move(sources[i], sources[partner_of(i)], config, rng);
    std::vector<FoodSource> candidates;
    evaluate_batch(xs, config, evaluator, candidates);
    result.evaluations += static_cast<long>(candidates.size());
    for (std::size_t i = 0; i < n_s; ++i) {
      best.offer(candidates[i], config);
      sources[i] = greedy_select(sources[i], candidates[i]);
    }

    // Onlooker phase: fitness-proportional roulette (with
    // a vanishing-fitness guard), one move per onlooker.
    double f_min = sources[0].f;
    for (const FoodSource& s : sources) f_min = std::min(f_min, s.f);
    double f_min_safe = std::max(f_min, 1e-12);
    std::vector<double> cdf(n_s);
    double total = 0.0;
    for (std::size_t i = 0; i < n_s; ++i) {
      total += 0.9 * f_min_safe / std::max(sources[i].f, 1e-12) + 0.1;
      cdf[i] = total;
    }
    std::vector<std::size_t> picks(n_s);
    for (std::size_t o = 0; o < n_s; ++o) {
      double u = rng.uniform01() * total;
      picks[o] = static_cast<std::size_t>(
          std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      picks[o] = std::min(picks[o], n_s - 1);
    }
    for (std::size_t o = 0; o < n_s; ++o) {
      std::size_t i = picks[o];
      xs[o] = neighbor_move(sources[i], sources[partner_of(i)], config, rng);
    }
    evaluate_batch(xs, config, evaluator, candidates);
    result.evaluations += static_cast<long>(candidates.size());
    for (std::size_t o = 0; o < n_s; ++o) {
      best.offer(candidates[o], config);
      sources[picks[o]] = greedy_select(sources[picks[o]], candidates[o]);
    }

    // Scout phase: at most one abandonment per iteration.
    int scout = scout_index(sources, config.abandonment_limit);
    if (scout >= 0) {
      FoodSource& s = sources[static_cast<std::size_t>(scout)];
      scout_replace(s, config, rng);
      std::vector<FoodSource> evaluated;
      evaluate_batch({s.x}, config, evaluator, evaluated);
      s.f = evaluated[0].f;
      s.report = evaluated[0].report;
      result.evaluations += 1;
      best.offer(s, config);
    }

    result.history.push_back(snapshot(iter, best, sources));

    if (iter == divergence_iter) {
      bool any_feasible = false;
      for (const FoodSource& s : sources)
        if (s.report.C == 0.0) any_feasible = true;
      if (!any_feasible) {
        result.diverged = true;
        if (config.abort_on_divergence) break;
      }
    }
  }

  result.best_design = best.design;
  result.best_report = best.report;
  result.final_population = std::move(sources);
  return result;
}

MultiRunResult run_abc_multi(const ABCConfig& config,
                             const Evaluator& evaluator) {
  config.validate();
  MultiRunResult multi;
  multi.runs.reserve(static_cast<std::size_t>(config.runs));
  for (int r = 0; r < config.runs; ++r)
    multi.runs.push_back(
        run_abc(config, evaluator, derive_seed(config.seed, static_cast<std::uint64_t>(r))));

  multi.best_run = 0;
  double sum = 0.0;
  for (std::size_t r = 0; r < multi.runs.size(); ++r) {
    sum += multi.runs[r].best_report.phi;
    if (multi.runs[r].best_report.phi <
        multi.runs[static_cast<std::size_t>(multi.best_run)].best_report.phi)
      multi.best_run = static_cast<int>(r);
  }
  multi.mean_phi = sum / static_cast<double>(multi.runs.size());
  double ss = 0.0;
  for (const RunResult& r : multi.runs) {
    double d = r.best_report.phi - multi.mean_phi;
    ss += d * d;
  }
  multi.stddev_phi = std::sqrt(ss / static_cast<double>(multi.runs.size()));
  return multi;
}

void write_history_csv(const std::string& path, const RunResult& result) {
  CsvTable table;
  table.header = {"iteration", "best_phi", "best_weight_kg", "best_C",
                  "feasible_count"};
  for (const IterationStat& s : result.history) {
    table.rows.push_back({std::to_string(s.iteration),
                          format_double(s.best_phi),
                          format_double(s.best_weight),
                          format_double(s.best_C),
                          std::to_string(s.feasible_count)});
  }
  write_csv(path, table);
}

}  // namespace framepbo
