#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qcoord/distribution.hpp"
#include "qcoord/local_model.hpp"
#include "qcoord/process.hpp"

namespace qcoord {

// Joint distribution induced by per-stage local rules,
// P(x_1..x_n) = prod_k tables[k][y_k][x_k] with y_k the stage-k label of the
// prefix. The parallel entry point and the serial reference produce
// bit-identical results.
JointDistribution eval_classical(const LocalModel& model, const ProcessSpec& proc);
JointDistribution eval_classical_serial(const LocalModel& model, const ProcessSpec& proc);

// Latent-variable evaluation, P(x) = sum_s p(s) prod_k tables[k][s][y_k][x_k].
JointDistribution eval_latent(const LatentModel& model, const ProcessSpec& proc);
JointDistribution eval_latent_serial(const LatentModel& model, const ProcessSpec& proc);

// Conditional rows P(x_k | h) for every positive-probability prefix h of
// length k. Prefixes with mass <= 1e-12 are omitted.
struct ConditionalTable {
  int stage = 0;
  std::vector<std::size_t> prefixes;        // ascending flat prefix indices
  std::vector<double> prefix_mass;          // P(h), aligned with prefixes
  std::vector<std::vector<double>> rows;    // conditional rows, aligned

  const std::vector<double>* row_for(std::size_t prefix_index) const;
};

ConditionalTable conditionals(const JointDistribution& target, const ProcessSpec& proc,
                              int stage);

// Kuhn conversion: conditional rules recovered from a joint distribution
// under perfect recall. Verifies each stage's info map is injective on all
// prefixes; unreached labels get uniform rows.
LocalModel behavioral_from_joint(const JointDistribution& target, const ProcessSpec& proc);

struct Witness {
  int stage = 0;            // 0-based
  int label = 0;
  std::size_t prefix_a = 0; // flat prefix indices with equal label
  std::size_t prefix_b = 0;
  double gap = 0.0;         // max-abs difference of the two conditional rows
};

struct ImplementabilityReport {
  bool feasible = false;
  std::optional<LocalModel> certificate;  // present iff feasible
  std::optional<Witness> witness;         // present iff infeasible
};

// Exact decision: a target factorizes over the information structure iff all
// positive-probability prefixes sharing a label have equal conditional rows
// (within 1e-9). Zero-probability prefixes impose no constraint.
ImplementabilityReport check_classical_implementable(const JointDistribution& target,
                                                     const ProcessSpec& proc);

// Mass-weighted average of the conditional rows over each label's
// positive-probability prefixes; uniform rows on unreached labels. Equals the
// factorizing rules whenever the target is implementable.
LocalModel conditional_average_model(const JointDistribution& target, const ProcessSpec& proc);

}  // namespace qcoord
