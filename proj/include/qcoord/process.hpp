#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qcoord/indexing.hpp"

namespace qcoord {

// A sequential process: n stages, per-stage outcome alphabets, and per-stage
// information maps sending each outcome prefix to the label the stage is
// allowed to condition on. Stage k's map is defined on every prefix of length
// k-1; stage 1's map is the constant map on the empty prefix. Labels may be
// declared but unreached.
class ProcessSpec {
 public:
  ProcessSpec(std::vector<int> alphabet_sizes,
              std::vector<std::vector<int>> info_maps,
              std::vector<int> info_label_counts);

  int stages() const { return static_cast<int>(alphabet_sizes_.size()); }
  const std::vector<int>& alphabet_sizes() const { return alphabet_sizes_; }
  int alphabet_size(int stage) const { return alphabet_sizes_[stage]; }
  int label_count(int stage) const { return info_label_counts_[stage]; }

  std::size_t outcome_count() const { return outcomes_.total(); }
  const MixedRadix& outcome_indexer() const { return outcomes_; }

  // Number of distinct prefixes feeding stage `stage` (0-based).
  std::size_t prefix_count(int stage) const { return info_maps_[stage].size(); }

  int label_of(int stage, std::size_t prefix_index) const {
    return info_maps_[stage][prefix_index];
  }

  const std::vector<int>& info_map(int stage) const { return info_maps_[stage]; }

  bool stage_is_constant(int stage) const;
  bool stage_is_injective(int stage) const;

  // Named generators. "constant" gives every prefix the same label (an
  // oblivious stage); "perfect-recall" gives each prefix its own label.
  static ProcessSpec oblivious(std::vector<int> alphabet_sizes);
  static ProcessSpec perfect_recall(std::vector<int> alphabet_sizes);

  enum class StageKind { Constant, PerfectRecall, Explicit };
  struct StageInfo {
    StageKind kind = StageKind::Constant;
    std::vector<int> map;  // used when kind == Explicit
    int labels = 1;        // used when kind == Explicit
  };
  static ProcessSpec from_stages(std::vector<int> alphabet_sizes,
                                 const std::vector<StageInfo>& stages);

 private:
  void validate() const;

  std::vector<int> alphabet_sizes_;
  std::vector<std::vector<int>> info_maps_;  // [stage][prefix index] -> label
  std::vector<int> info_label_counts_;
  MixedRadix outcomes_;
};

// Flat index of the length-(k+1) prefix obtained by appending `outcome` to the
// length-k prefix `prefix`. Prefix indices are lexicographic with stage 1 most
// significant, matching MixedRadix.
inline std::size_t extend_prefix(std::size_t prefix, int alphabet_size, int outcome) {
  return prefix * static_cast<std::size_t>(alphabet_size) + static_cast<std::size_t>(outcome);
}

std::string format_prefix(const ProcessSpec& proc, int stage, std::size_t prefix_index);
std::vector<int> decode_prefix(const ProcessSpec& proc, int stage, std::size_t prefix_index);

}  // namespace qcoord
