#include "qcoord/process.hpp"

#include <algorithm>
#include <sstream>

#include "qcoord/errors.hpp"

namespace qcoord {

ProcessSpec::ProcessSpec(std::vector<int> alphabet_sizes,
                         std::vector<std::vector<int>> info_maps,
                         std::vector<int> info_label_counts)
    : alphabet_sizes_(std::move(alphabet_sizes)),
      info_maps_(std::move(info_maps)),
      info_label_counts_(std::move(info_label_counts)),
      outcomes_(alphabet_sizes_) {
  validate();
}

void ProcessSpec::validate() const {
  const int n = stages();
  if (n < 1) throw StructuralError("process needs at least one stage");
  if (static_cast<int>(info_maps_.size()) != n ||
      static_cast<int>(info_label_counts_.size()) != n) {
    throw StructuralError("per-stage field lengths disagree with stage count");
  }
  std::size_t prefixes = 1;
  for (int k = 0; k < n; ++k) {
    if (alphabet_sizes_[k] < 1) {
      throw StructuralError("stage " + std::to_string(k + 1) + " alphabet must be >= 1");
    }
    if (info_label_counts_[k] < 1) {
      throw StructuralError("stage " + std::to_string(k + 1) + " needs at least one label");
    }
    if (info_maps_[k].size() != prefixes) {
      throw StructuralError("stage " + std::to_string(k + 1) + " info map covers " +
                            std::to_string(info_maps_[k].size()) + " prefixes, expected " +
                            std::to_string(prefixes));
    }
    for (std::size_t h = 0; h < info_maps_[k].size(); ++h) {
      const int y = info_maps_[k][h];
      if (y < 0 || y >= info_label_counts_[k]) {
        throw StructuralError("stage " + std::to_string(k + 1) + " prefix " +
                              std::to_string(h) + " has label " + std::to_string(y) +
                              " outside [0, " + std::to_string(info_label_counts_[k]) + ")");
      }
    }
    prefixes *= static_cast<std::size_t>(alphabet_sizes_[k]);
  }
}

bool ProcessSpec::stage_is_constant(int stage) const {
  const auto& m = info_maps_[stage];
  return std::all_of(m.begin(), m.end(), [&](int y) { return y == m.front(); });
}

bool ProcessSpec::stage_is_injective(int stage) const {
  std::vector<char> seen(static_cast<std::size_t>(info_label_counts_[stage]), 0);
  for (int y : info_maps_[stage]) {
    if (seen[static_cast<std::size_t>(y)]) return false;
    seen[static_cast<std::size_t>(y)] = 1;
  }
  return true;
}

ProcessSpec ProcessSpec::oblivious(std::vector<int> alphabet_sizes) {
  std::vector<StageInfo> stages(alphabet_sizes.size());
  return from_stages(std::move(alphabet_sizes), stages);
}

ProcessSpec ProcessSpec::perfect_recall(std::vector<int> alphabet_sizes) {
  std::vector<StageInfo> stages(alphabet_sizes.size());
  for (auto& s : stages) s.kind = StageKind::PerfectRecall;
  return from_stages(std::move(alphabet_sizes), stages);
}

ProcessSpec ProcessSpec::from_stages(std::vector<int> alphabet_sizes,
                                     const std::vector<StageInfo>& stages) {
  const int n = static_cast<int>(alphabet_sizes.size());
  if (static_cast<int>(stages.size()) != n) {
    throw StructuralError("stage info list length disagrees with alphabet list");
  }
  std::vector<std::vector<int>> maps(static_cast<std::size_t>(n));
  std::vector<int> counts(static_cast<std::size_t>(n));
  std::size_t prefixes = 1;
  for (int k = 0; k < n; ++k) {
    const StageInfo& s = stages[static_cast<std::size_t>(k)];
    switch (s.kind) {
      case StageKind::Constant:
        maps[k].assign(prefixes, 0);
        counts[k] = 1;
        break;
      case StageKind::PerfectRecall:
        maps[k].resize(prefixes);
        for (std::size_t h = 0; h < prefixes; ++h) maps[k][h] = static_cast<int>(h);
        counts[k] = static_cast<int>(prefixes);
        break;
      case StageKind::Explicit:
        maps[k] = s.map;
        counts[k] = s.labels;
        break;
    }
    if (alphabet_sizes[k] < 1) {
      throw StructuralError("stage " + std::to_string(k + 1) + " alphabet must be >= 1");
    }
    prefixes *= static_cast<std::size_t>(alphabet_sizes[k]);
  }
  return ProcessSpec(std::move(alphabet_sizes), std::move(maps), std::move(counts));
}

std::vector<int> decode_prefix(const ProcessSpec& proc, int stage, std::size_t prefix_index) {
  std::vector<int> prefix(static_cast<std::size_t>(stage));
  for (int j = stage - 1; j >= 0; --j) {
    const auto base = static_cast<std::size_t>(proc.alphabet_size(j));
    prefix[static_cast<std::size_t>(j)] = static_cast<int>(prefix_index % base);
    prefix_index /= base;
  }
  return prefix;
}

std::string format_prefix(const ProcessSpec& proc, int stage, std::size_t prefix_index) {
  const auto prefix = decode_prefix(proc, stage, prefix_index);
  std::ostringstream out;
  out << '(';
  for (std::size_t j = 0; j < prefix.size(); ++j) {
    if (j) out << ',';
    out << prefix[j];
  }
  out << ')';
  return out.str();
}

}  // namespace qcoord
