#pragma once

#include <cstddef>
#include <vector>

namespace qcoord {

// Mixed-radix indexing for outcome tuples. Stage 1 is the most significant
// digit, so flat indices enumerate tuples lexicographically.
class MixedRadix {
 public:
  MixedRadix() = default;

  explicit MixedRadix(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    strides_.assign(sizes_.size(), 1);
    total_ = 1;
    for (std::size_t k = sizes_.size(); k-- > 0;) {
      strides_[k] = total_;
      total_ *= static_cast<std::size_t>(sizes_[k]);
    }
  }

  std::size_t total() const { return total_; }
  int size(std::size_t k) const { return sizes_[k]; }
  std::size_t stride(std::size_t k) const { return strides_[k]; }
  std::size_t digits() const { return sizes_.size(); }

  int digit(std::size_t index, std::size_t k) const {
    return static_cast<int>((index / strides_[k]) % static_cast<std::size_t>(sizes_[k]));
  }

  std::size_t index(const std::vector<int>& tuple) const {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < sizes_.size(); ++k) {
      idx += static_cast<std::size_t>(tuple[k]) * strides_[k];
    }
    return idx;
  }

  std::vector<int> decode(std::size_t index) const {
    std::vector<int> tuple(sizes_.size());
    for (std::size_t k = 0; k < sizes_.size(); ++k) tuple[k] = digit(index, k);
    return tuple;
  }

 private:
  std::vector<int> sizes_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 1;
};

}  // namespace qcoord
