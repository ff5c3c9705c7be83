#include "qcoord/fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>

#include "qcoord/errors.hpp"
#include "qcoord/tolerances.hpp"

namespace qcoord {

namespace {

constexpr double kEarlyStopDistance = 1e-12;
constexpr double kSweepStall = 1e-14;
constexpr int kGoldenIters = 28;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t s) : engine(s) {}
  // (0,1], safe for log
  double uniform01() { return static_cast<double>((engine() >> 11) + 1) * 0x1.0p-53; }
};

// Digits and labels of every tuple at every stage, flattened row-major.
struct TupleCache {
  int stages = 0;
  std::size_t total = 0;
  std::vector<int> digit;
  std::vector<int> label;
  // tuples whose stage-k label is y, per (k, y)
  std::vector<std::vector<std::vector<std::size_t>>> affected;

  int d(std::size_t i, int k) const { return digit[i * static_cast<std::size_t>(stages) + static_cast<std::size_t>(k)]; }
  int y(std::size_t i, int k) const { return label[i * static_cast<std::size_t>(stages) + static_cast<std::size_t>(k)]; }
};

TupleCache build_cache(const ProcessSpec& proc) {
  TupleCache c;
  c.stages = proc.stages();
  c.total = proc.outcome_count();
  c.digit.resize(c.total * static_cast<std::size_t>(c.stages));
  c.label.resize(c.total * static_cast<std::size_t>(c.stages));
  c.affected.resize(static_cast<std::size_t>(c.stages));
  for (int k = 0; k < c.stages; ++k) {
    c.affected[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(proc.label_count(k)));
  }
  const MixedRadix& ix = proc.outcome_indexer();
  for (std::size_t i = 0; i < c.total; ++i) {
    std::size_t prefix = 0;
    for (int k = 0; k < c.stages; ++k) {
      const int x = ix.digit(i, static_cast<std::size_t>(k));
      const int y = proc.label_of(k, prefix);
      c.digit[i * static_cast<std::size_t>(c.stages) + static_cast<std::size_t>(k)] = x;
      c.label[i * static_cast<std::size_t>(c.stages) + static_cast<std::size_t>(k)] = y;
      c.affected[static_cast<std::size_t>(k)][static_cast<std::size_t>(y)].push_back(i);
      prefix = extend_prefix(prefix, proc.alphabet_size(k), x);
    }
  }
  return c;
}

double kl_term(double t, double m) {
  const double tt = t + tol::kKlEpsilon;
  return tt * std::log(tt / (m + tol::kKlEpsilon));
}

double full_metric(Metric metric, const std::vector<double>& target,
                   const std::vector<double>& model) {
  double acc = 0.0;
  switch (metric) {
    case Metric::TotalVariation:
      for (std::size_t i = 0; i < target.size(); ++i) acc += std::abs(model[i] - target[i]);
      return 0.5 * acc;
    case Metric::L2:
      for (std::size_t i = 0; i < target.size(); ++i) {
        const double d = model[i] - target[i];
        acc += d * d;
      }
      return std::sqrt(acc);
    case Metric::KL:
      for (std::size_t i = 0; i < target.size(); ++i) acc += kl_term(target[i], model[i]);
      return acc;
  }
  return acc;
}

void recompute_model(const TupleCache& cache, const LocalModel& tables,
                     std::vector<double>& model) {
  model.assign(cache.total, 1.0);
  for (std::size_t i = 0; i < cache.total; ++i) {
    double w = 1.0;
    for (int k = 0; k < cache.stages; ++k) {
      w *= tables.tables[static_cast<std::size_t>(k)][static_cast<std::size_t>(cache.y(i, k))]
                        [static_cast<std::size_t>(cache.d(i, k))];
    }
    model[i] = w;
  }
}

// Objective restricted to one row: affected tuples contribute through
// rest * row[x], everything else enters via a fixed accumulator.
struct RowObjective {
  Metric metric;
  const std::vector<double>* target;
  const std::vector<std::size_t>* affected;
  std::vector<double> rest;       // per affected tuple
  std::vector<int> digit;         // stage digit per affected tuple
  std::vector<double> tvals;      // target per affected tuple
  double base = 0.0;              // unaffected accumulator (metric-specific)

  double value(const std::vector<double>& row) const {
    double acc = base;
    switch (metric) {
      case Metric::TotalVariation:
        for (std::size_t j = 0; j < rest.size(); ++j) {
          acc += std::abs(rest[j] * row[static_cast<std::size_t>(digit[j])] - tvals[j]);
        }
        return 0.5 * acc;
      case Metric::L2:
        for (std::size_t j = 0; j < rest.size(); ++j) {
          const double d = rest[j] * row[static_cast<std::size_t>(digit[j])] - tvals[j];
          acc += d * d;
        }
        return std::sqrt(acc);
      case Metric::KL:
        for (std::size_t j = 0; j < rest.size(); ++j) {
          acc += kl_term(tvals[j], rest[j] * row[static_cast<std::size_t>(digit[j])]);
        }
        return acc;
    }
    return acc;
  }
};

RowObjective make_row_objective(Metric metric, const TupleCache& cache,
                                const std::vector<double>& target, const LocalModel& tables,
                                const std::vector<double>& model, int k, int y) {
  RowObjective ro;
  ro.metric = metric;
  ro.target = &target;
  ro.affected = &cache.affected[static_cast<std::size_t>(k)][static_cast<std::size_t>(y)];
  const auto& aff = *ro.affected;
  ro.rest.resize(aff.size());
  ro.digit.resize(aff.size());
  ro.tvals.resize(aff.size());
  for (std::size_t j = 0; j < aff.size(); ++j) {
    const std::size_t i = aff[j];
    double rest = 1.0;
    for (int kk = 0; kk < cache.stages; ++kk) {
      if (kk == k) continue;
      rest *= tables.tables[static_cast<std::size_t>(kk)]
                           [static_cast<std::size_t>(cache.y(i, kk))]
                           [static_cast<std::size_t>(cache.d(i, kk))];
    }
    ro.rest[j] = rest;
    ro.digit[j] = cache.d(i, k);
    ro.tvals[j] = target[i];
  }
  // accumulate the unaffected part
  double acc = 0.0;
  std::vector<char> is_aff(cache.total, 0);
  for (std::size_t i : aff) is_aff[i] = 1;
  for (std::size_t i = 0; i < cache.total; ++i) {
    if (is_aff[i]) continue;
    switch (metric) {
      case Metric::TotalVariation:
        acc += std::abs(model[i] - target[i]);
        break;
      case Metric::L2: {
        const double d = model[i] - target[i];
        acc += d * d;
        break;
      }
      case Metric::KL:
        acc += kl_term(target[i], model[i]);
        break;
    }
  }
  ro.base = acc;
  return ro;
}

std::vector<double> blend(const std::vector<double>& row, std::size_t vertex, double t) {
  std::vector<double> out(row.size());
  for (std::size_t x = 0; x < row.size(); ++x) out[x] = (1.0 - t) * row[x];
  out[vertex] += t;
  return out;
}

// Convex 1-d minimization over t in [0,1]: coarse grid, then golden-section
// inside the bracketing cells.
std::pair<double, double> line_search(const RowObjective& ro, const std::vector<double>& row,
                                      std::size_t vertex, double grid_step) {
  const int cells = std::max(2, static_cast<int>(std::ceil(1.0 / grid_step)));
  double best_t = 0.0;
  double best_v = ro.value(row);
  int best_j = 0;
  for (int j = 1; j <= cells; ++j) {
    const double t = static_cast<double>(j) / cells;
    const double v = ro.value(blend(row, vertex, t));
    if (v < best_v) {
      best_v = v;
      best_t = t;
      best_j = j;
    }
  }
  double lo = static_cast<double>(std::max(0, best_j - 1)) / cells;
  double hi = static_cast<double>(std::min(cells, best_j + 1)) / cells;
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = ro.value(blend(row, vertex, x1));
  double f2 = ro.value(blend(row, vertex, x2));
  for (int it = 0; it < kGoldenIters; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = ro.value(blend(row, vertex, x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = ro.value(blend(row, vertex, x2));
    }
  }
  const double tm = 0.5 * (a + b);
  const double fm = ro.value(blend(row, vertex, tm));
  if (fm < best_v) {
    best_v = fm;
    best_t = tm;
  }
  return {best_t, best_v};
}

LocalModel random_model(const ProcessSpec& proc, Rng& rng) {
  LocalModel m;
  m.tables.resize(static_cast<std::size_t>(proc.stages()));
  for (int k = 0; k < proc.stages(); ++k) {
    m.tables[k].resize(static_cast<std::size_t>(proc.label_count(k)));
    for (auto& row : m.tables[k]) {
      row.resize(static_cast<std::size_t>(proc.alphabet_size(k)));
      double sum = 0.0;
      for (double& p : row) {
        p = -std::log(rng.uniform01());
        sum += p;
      }
      for (double& p : row) p /= sum;
    }
  }
  return m;
}

struct RestartOutcome {
  LocalModel model;
  double distance = 0.0;
  long sweeps = 0;
};

RestartOutcome run_restart(const JointDistribution& target, const ProcessSpec& proc,
                           Metric metric, const SearchParams& params, const TupleCache& cache,
                           const LocalModel& informed, int restart_index) {
  LocalModel tables;
  if (restart_index == 0) {
    tables = informed;
  } else if (restart_index == 1) {
    tables = LocalModel::uniform(proc);
  } else {
    Rng rng(splitmix64(params.seed + static_cast<std::uint64_t>(restart_index)));
    tables = random_model(proc, rng);
  }

  std::vector<double> model;
  recompute_model(cache, tables, model);
  double objective = full_metric(metric, target.probs(), model);

  long sweeps = 0;
  for (int sweep = 0; sweep < params.max_sweeps; ++sweep) {
    ++sweeps;
    const double before = objective;
    for (int k = 0; k < proc.stages(); ++k) {
      for (int y = 0; y < proc.label_count(k); ++y) {
        auto ro = make_row_objective(metric, cache, target.probs(), tables, model, k, y);
        if (ro.rest.empty()) continue;  // label unreached by any tuple
        auto& row = tables.tables[static_cast<std::size_t>(k)][static_cast<std::size_t>(y)];
        const double current = ro.value(row);
        double best_v = current;
        double best_t = 0.0;
        std::size_t best_vertex = 0;
        for (std::size_t vertex = 0; vertex < row.size(); ++vertex) {
          const auto [t, v] = line_search(ro, row, vertex, params.grid_step);
          if (v < best_v) {
            best_v = v;
            best_t = t;
            best_vertex = vertex;
          }
        }
        if (best_v < current) {
          row = blend(row, best_vertex, best_t);
          for (std::size_t j = 0; j < ro.rest.size(); ++j) {
            model[(*ro.affected)[j]] = ro.rest[j] * row[static_cast<std::size_t>(ro.digit[j])];
          }
          objective = best_v;
        }
      }
    }
    if (before - objective < kSweepStall || objective < 1e-13) break;
  }

  RestartOutcome out;
  out.distance = distribution_distance(target, eval_classical_serial(tables, proc), metric);
  out.model = std::move(tables);
  out.sweeps = sweeps;
  return out;
}

FitReport fit_impl(const JointDistribution& target, const ProcessSpec& proc, Metric metric,
                   const SearchParams& params, bool parallel) {
  target.require_matching(proc);
  if (params.restarts < 1) throw PreconditionError("restarts must be >= 1");
  if (!(params.grid_step > 0.0 && params.grid_step <= 0.5)) {
    throw PreconditionError("grid step must lie in (0, 0.5]");
  }
  if (params.max_sweeps < 1) throw PreconditionError("iteration cap must be >= 1");

  const TupleCache cache = build_cache(proc);
  const LocalModel informed = conditional_average_model(target, proc);

  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(params.restarts));
  outcomes[0] = run_restart(target, proc, metric, params, cache, informed, 0);

  int used = 1;
  if (outcomes[0].distance > kEarlyStopDistance && params.restarts > 1) {
    used = params.restarts;
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
      for (int r = 1; r < params.restarts; ++r) {
        outcomes[static_cast<std::size_t>(r)] =
            run_restart(target, proc, metric, params, cache, informed, r);
      }
    } else {
      for (int r = 1; r < params.restarts; ++r) {
        outcomes[static_cast<std::size_t>(r)] =
            run_restart(target, proc, metric, params, cache, informed, r);
      }
    }
  }

  int best = 0;
  for (int r = 1; r < used; ++r) {
    if (outcomes[static_cast<std::size_t>(r)].distance < outcomes[static_cast<std::size_t>(best)].distance) {
      best = r;
    }
  }

  FitReport report;
  report.best_model = std::move(outcomes[static_cast<std::size_t>(best)].model);
  report.distance = outcomes[static_cast<std::size_t>(best)].distance;
  report.metric = metric;
  report.restarts_used = used;
  for (int r = 0; r < used; ++r) report.iterations += outcomes[static_cast<std::size_t>(r)].sweeps;
  return report;
}

}  // namespace

Metric metric_from_name(const std::string& name) {
  if (name == "tv" || name == "total-variation") return Metric::TotalVariation;
  if (name == "l2") return Metric::L2;
  if (name == "kl") return Metric::KL;
  throw UsageError("unknown metric '" + name + "', expected tv|l2|kl");
}

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::TotalVariation: return "tv";
    case Metric::L2: return "l2";
    case Metric::KL: return "kl";
  }
  return "?";
}

double distribution_distance(const JointDistribution& a, const JointDistribution& b, Metric m) {
  if (a.alphabet_sizes() != b.alphabet_sizes()) {
    throw StructuralError("distributions live on different outcome spaces");
  }
  return full_metric(m, a.probs(), b.probs());
}

FitReport fit_local_model(const JointDistribution& target, const ProcessSpec& proc, Metric m,
                          const SearchParams& params) {
  return fit_impl(target, proc, m, params, true);
}

FitReport fit_local_model_serial(const JointDistribution& target, const ProcessSpec& proc,
                                 Metric m, const SearchParams& params) {
  return fit_impl(target, proc, m, params, false);
}

}  // namespace qcoord
