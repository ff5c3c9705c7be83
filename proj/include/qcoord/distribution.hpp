#pragma once

#include <cstddef>
#include <vector>

#include "qcoord/indexing.hpp"
#include "qcoord/process.hpp"

namespace qcoord {

// Dense joint distribution over complete outcome tuples, stored
// lexicographically with stage 1 most significant. Entries are nonnegative
// and sum to 1 within 1e-12.
class JointDistribution {
 public:
  JointDistribution(std::vector<int> alphabet_sizes, std::vector<double> probs);

  const std::vector<int>& alphabet_sizes() const { return alphabet_sizes_; }
  const std::vector<double>& probs() const { return probs_; }
  const MixedRadix& indexer() const { return indexer_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  double at(const std::vector<int>& tuple) const { return probs_[indexer_.index(tuple)]; }

  void require_matching(const ProcessSpec& proc) const;

  // prefix mass tables, one per prefix length 0..n; level n is the
  // distribution itself, level 0 the single empty prefix with mass 1.
  std::vector<std::vector<double>> prefix_marginals() const;

 private:
  std::vector<int> alphabet_sizes_;
  std::vector<double> probs_;
  MixedRadix indexer_;
};

double max_abs_difference(const JointDistribution& a, const JointDistribution& b);

}  // namespace qcoord
