#pragma once

#include <optional>
#include <vector>

#include "qcoord/distribution.hpp"
#include "qcoord/linalg.hpp"
#include "qcoord/process.hpp"

namespace qcoord {

// Validated quantum state: Hermitian, unit trace, PSD (within 1e-10).
class DensityMatrix {
 public:
  int dim() const { return static_cast<int>(matrix_.rows()); }
  const CMatrix& matrix() const { return matrix_; }

  // Skips the eigenvalue check; for states that are PSD by construction
  // (convex combinations of projectors).
  static DensityMatrix trusted(CMatrix m);

  friend DensityMatrix validate_state(const CMatrix& m);

 private:
  explicit DensityMatrix(CMatrix m) : matrix_(std::move(m)) {}
  CMatrix matrix_;
};

// Distinct failures name the violated check ("hermiticity", "trace",
// "positivity") and its magnitude.
DensityMatrix validate_state(const CMatrix& m);

// Measurement: PSD elements summing to the identity, one per outcome.
class Povm {
 public:
  int dim() const { return static_cast<int>(elements_.front().rows()); }
  int outcomes() const { return static_cast<int>(elements_.size()); }
  const std::vector<CMatrix>& elements() const { return elements_; }
  const CMatrix& element(int x) const { return elements_[static_cast<std::size_t>(x)]; }

  static Povm trusted(std::vector<CMatrix> elements);
  friend Povm validate_povm(const std::vector<CMatrix>& elements, int dim);

 private:
  explicit Povm(std::vector<CMatrix> elements) : elements_(std::move(elements)) {}
  std::vector<CMatrix> elements_;
};

Povm validate_povm(const std::vector<CMatrix>& elements, int dim);

// Explicit convex combination of product states: weights[s] with one factor
// state per subsystem. Kept alongside constructed models so separability is
// inspectable rather than asserted.
struct SeparableDecomposition {
  std::vector<double> weights;
  std::vector<std::vector<CMatrix>> factors;  // [s][subsystem]

  CMatrix assemble() const;
};

// Shared state plus one POVM per (stage, info label). The stage-k POVM acts
// on subsystem k alone, so a stage can only condition on its label.
struct QuantumModel {
  std::vector<int> subsystem_dims;
  DensityMatrix state;
  std::vector<std::vector<Povm>> measurements;  // [stage][label]
  std::optional<SeparableDecomposition> decomposition;

  void require_matching(const ProcessSpec& proc) const;
};

// Born-rule joint distribution,
//   P(x) = Tr[(M^1_{x_1}(y_1) (x) ... (x) M^n_{x_n}(y_n)) rho].
// Probabilities are clamped to [0,1]; imaginary residue beyond 1e-10 or
// normalization drift beyond 1e-12 raises a validation error instead of being
// silently repaired. Parallel and serial entry points agree bit-for-bit.
JointDistribution born_joint(const QuantumModel& q, const ProcessSpec& proc);
JointDistribution born_joint_serial(const QuantumModel& q, const ProcessSpec& proc);

}  // namespace qcoord
