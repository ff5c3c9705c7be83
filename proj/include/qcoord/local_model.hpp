#pragma once

#include <vector>

#include "qcoord/process.hpp"

namespace qcoord {

// Per-stage conditional rules: tables[k][y] is a probability row over the
// stage-k alphabet, one row per info label including unreached ones.
struct LocalModel {
  std::vector<std::vector<std::vector<double>>> tables;

  void require_matching(const ProcessSpec& proc) const;
  static LocalModel uniform(const ProcessSpec& proc);
};

// Latent-variable rules: a distribution over a hidden alphabet S plus
// per-stage rows conditioned on both the latent value and the info label.
// The latent value is never part of any stage's information.
struct LatentModel {
  std::vector<double> latent_probs;
  // tables[k][s][y] -> probability row over the stage-k alphabet
  std::vector<std::vector<std::vector<std::vector<double>>>> tables;

  int latent_size() const { return static_cast<int>(latent_probs.size()); }
  void require_matching(const ProcessSpec& proc) const;

  // Point-mass shorthand: stage k always outputs outcomes[s] when the latent
  // value is s, whatever the label.
  static std::vector<std::vector<std::vector<double>>> deterministic_stage(
      const ProcessSpec& proc, int stage, const std::vector<int>& outcomes);
};

}  // namespace qcoord
