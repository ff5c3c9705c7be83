#include "qcoord/distribution.hpp"

#include <cmath>
#include <string>

#include "qcoord/errors.hpp"
#include "qcoord/tolerances.hpp"

namespace qcoord {

JointDistribution::JointDistribution(std::vector<int> alphabet_sizes,
                                     std::vector<double> probs)
    : alphabet_sizes_(std::move(alphabet_sizes)),
      probs_(std::move(probs)),
      indexer_(alphabet_sizes_) {
  if (alphabet_sizes_.empty()) throw StructuralError("distribution needs at least one stage");
  for (int a : alphabet_sizes_) {
    if (a < 1) throw StructuralError("alphabet sizes must be >= 1");
  }
  if (probs_.size() != indexer_.total()) {
    throw StructuralError("probability vector has " + std::to_string(probs_.size()) +
                          " entries, expected " + std::to_string(indexer_.total()));
  }
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) {
      throw StructuralError("probabilities must be nonnegative, found " + std::to_string(p));
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol::kProbSum) {
    throw StructuralError("probabilities sum to " + std::to_string(sum) +
                          ", expected 1 within 1e-12");
  }
}

void JointDistribution::require_matching(const ProcessSpec& proc) const {
  if (proc.alphabet_sizes() != alphabet_sizes_) {
    throw StructuralError("distribution alphabets disagree with process alphabets");
  }
}

std::vector<std::vector<double>> JointDistribution::prefix_marginals() const {
  const int n = static_cast<int>(alphabet_sizes_.size());
  std::vector<std::vector<double>> levels(static_cast<std::size_t>(n) + 1);
  levels[static_cast<std::size_t>(n)] = probs_;
  for (int k = n - 1; k >= 0; --k) {
    const auto base = static_cast<std::size_t>(alphabet_sizes_[static_cast<std::size_t>(k)]);
    const auto& fine = levels[static_cast<std::size_t>(k) + 1];
    std::vector<double> coarse(fine.size() / base, 0.0);
    for (std::size_t h = 0; h < coarse.size(); ++h) {
      double s = 0.0;
      for (std::size_t x = 0; x < base; ++x) s += fine[h * base + x];
      coarse[h] = s;
    }
    levels[static_cast<std::size_t>(k)] = std::move(coarse);
  }
  return levels;
}

double max_abs_difference(const JointDistribution& a, const JointDistribution& b) {
  if (a.alphabet_sizes() != b.alphabet_sizes()) {
    throw StructuralError("distributions live on different outcome spaces");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

}  // namespace qcoord
