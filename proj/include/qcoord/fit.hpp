#pragma once

#include <cstdint>
#include <string>

#include "qcoord/classical.hpp"
#include "qcoord/distribution.hpp"
#include "qcoord/local_model.hpp"
#include "qcoord/process.hpp"

namespace qcoord {

enum class Metric { TotalVariation, L2, KL };

Metric metric_from_name(const std::string& name);  // "tv" | "l2" | "kl"
const char* metric_name(Metric m);

// Distance between two distributions on the same outcome space. KL is
// KL(a || b) with 1e-12 smoothing added to both arguments, so boundary
// support never produces infinities.
double distribution_distance(const JointDistribution& a, const JointDistribution& b, Metric m);

struct SearchParams {
  std::uint64_t seed = 0;
  int restarts = 32;            // restart 0 starts from label-averaged conditionals,
                                // restart 1 from uniform rows, the rest at random
  double grid_step = 1.0 / 32;  // line-search sampling step along each direction
  int max_sweeps = 60;          // per-restart cap on full coordinate sweeps
};

struct FitReport {
  LocalModel best_model;
  double distance = 0.0;
  Metric metric = Metric::TotalVariation;
  int restarts_used = 0;
  long iterations = 0;  // total coordinate sweeps across executed restarts
};

// Best local model found by deterministic multistart coordinate descent.
// Rows are visited stage-major, label-minor; each visit line-searches along
// the segments toward the simplex vertices and keeps the best improvement.
// The result is an upper bound on the true gap; no global-optimality claim.
// Restarts run concurrently in the parallel entry point; the winner is chosen
// by (distance, restart index), so both entry points agree bit-for-bit.
FitReport fit_local_model(const JointDistribution& target, const ProcessSpec& proc, Metric m,
                          const SearchParams& params);
FitReport fit_local_model_serial(const JointDistribution& target, const ProcessSpec& proc,
                                 Metric m, const SearchParams& params);

}  // namespace qcoord
