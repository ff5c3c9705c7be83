#include "qcoord/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qcoord/errors.hpp"
#include "qcoord/tolerances.hpp"

namespace qcoord {

DensityMatrix DensityMatrix::trusted(CMatrix m) { return DensityMatrix(std::move(m)); }

DensityMatrix validate_state(const CMatrix& m) {
  if (m.rows() != m.cols()) throw StructuralError("state matrix must be square");
  const double herm = hermiticity_gap(m);
  if (herm > tol::kHermitian) {
    throw ValidationError("hermiticity", herm,
                          "state is not Hermitian, max deviation " + std::to_string(herm));
  }
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > tol::kHermitian) {
    throw ValidationError("trace", tr, "state trace is " + std::to_string(tr) + ", expected 1");
  }
  const Eigen::VectorXd ev = hermitian_eigenvalues(0.5 * (m + m.adjoint()));
  if (ev.minCoeff() < tol::kPsdFloor) {
    throw ValidationError("positivity", ev.minCoeff(),
                          "state has eigenvalue " + std::to_string(ev.minCoeff()));
  }
  return DensityMatrix::trusted(m);
}

Povm Povm::trusted(std::vector<CMatrix> elements) { return Povm(std::move(elements)); }

Povm validate_povm(const std::vector<CMatrix>& elements, int dim) {
  if (elements.empty()) throw StructuralError("a measurement needs at least one element");
  for (std::size_t x = 0; x < elements.size(); ++x) {
    const CMatrix& e = elements[x];
    if (e.rows() != dim || e.cols() != dim) {
      throw StructuralError("measurement element " + std::to_string(x) + " is not " +
                            std::to_string(dim) + "x" + std::to_string(dim));
    }
    const double herm = hermiticity_gap(e);
    if (herm > tol::kHermitian) {
      throw ValidationError("hermiticity", herm,
                            "element " + std::to_string(x) + " is not Hermitian (deviation " +
                                std::to_string(herm) + ")");
    }
    const Eigen::VectorXd ev = hermitian_eigenvalues(0.5 * (e + e.adjoint()));
    if (ev.minCoeff() < tol::kPsdFloor) {
      throw ValidationError("positivity", ev.minCoeff(),
                            "element " + std::to_string(x) + " has eigenvalue " +
                                std::to_string(ev.minCoeff()));
    }
  }
  CMatrix sum = CMatrix::Zero(dim, dim);
  for (const auto& e : elements) sum += e;
  const double dev = (sum - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (dev > tol::kHermitian) {
    throw ValidationError("completeness", dev,
                          "elements sum to identity only within " + std::to_string(dev));
  }
  return Povm::trusted(elements);
}

CMatrix SeparableDecomposition::assemble() const {
  if (weights.empty() || factors.size() != weights.size()) {
    throw StructuralError("decomposition weights and factor lists disagree");
  }
  CMatrix out;
  for (std::size_t s = 0; s < weights.size(); ++s) {
    CMatrix term = CMatrix::Identity(1, 1);
    for (const auto& f : factors[s]) term = kron(term, f);
    if (s == 0) {
      out = weights[s] * term;
    } else {
      out += weights[s] * term;
    }
  }
  return out;
}

void QuantumModel::require_matching(const ProcessSpec& proc) const {
  const int n = proc.stages();
  if (static_cast<int>(subsystem_dims.size()) != n) {
    throw StructuralError("model has " + std::to_string(subsystem_dims.size()) +
                          " subsystems, process has " + std::to_string(n) + " stages");
  }
  long long total = 1;
  for (int d : subsystem_dims) {
    if (d < 1) throw StructuralError("subsystem dimensions must be >= 1");
    total *= d;
  }
  if (total != state.dim()) {
    throw StructuralError("state dimension " + std::to_string(state.dim()) +
                          " does not equal the product of subsystem dimensions (" +
                          std::to_string(total) + ")");
  }
  if (static_cast<int>(measurements.size()) != n) {
    throw StructuralError("measurements cover " + std::to_string(measurements.size()) +
                          " stages, expected " + std::to_string(n));
  }
  for (int k = 0; k < n; ++k) {
    if (static_cast<int>(measurements[k].size()) != proc.label_count(k)) {
      throw StructuralError("stage " + std::to_string(k + 1) + " has " +
                            std::to_string(measurements[k].size()) +
                            " measurements, expected one per label (" +
                            std::to_string(proc.label_count(k)) + ")");
    }
    for (const auto& povm : measurements[k]) {
      if (povm.dim() != subsystem_dims[k]) {
        throw StructuralError("stage " + std::to_string(k + 1) +
                              " measurement dimension disagrees with its subsystem");
      }
      if (povm.outcomes() != proc.alphabet_size(k)) {
        throw StructuralError("stage " + std::to_string(k + 1) + " measurement has " +
                              std::to_string(povm.outcomes()) + " outcomes, expected " +
                              std::to_string(proc.alphabet_size(k)));
      }
    }
  }
}

namespace {

// One tuple's Born probability via a chain of subsystem contractions.
Cplx born_amplitude(const QuantumModel& q, const ProcessSpec& proc, std::size_t idx) {
  const MixedRadix& ix = proc.outcome_indexer();
  CMatrix partial = q.state.matrix();
  std::size_t prefix = 0;
  for (int k = 0; k < proc.stages(); ++k) {
    const int x = ix.digit(idx, static_cast<std::size_t>(k));
    const int y = proc.label_of(k, prefix);
    const Povm& povm = q.measurements[static_cast<std::size_t>(k)][static_cast<std::size_t>(y)];
    partial = contract_first(partial, povm.element(x), q.subsystem_dims[static_cast<std::size_t>(k)]);
    prefix = extend_prefix(prefix, proc.alphabet_size(k), x);
  }
  return partial(0, 0);
}

JointDistribution finalize_born(const ProcessSpec& proc, std::vector<Cplx> raw) {
  double max_imag = 0.0;
  std::vector<double> probs(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    max_imag = std::max(max_imag, std::abs(raw[i].imag()));
    probs[i] = std::clamp(raw[i].real(), 0.0, 1.0);
  }
  if (max_imag > tol::kBornImag) {
    throw ValidationError("imaginary-residue", max_imag,
                          "Born probabilities carry imaginary residue " +
                              std::to_string(max_imag));
  }
  double sum = 0.0;
  for (double p : probs) sum += p;
  const double drift = std::abs(sum - 1.0);
  if (drift > tol::kBornDrift) {
    throw ValidationError("normalization-drift", drift,
                          "Born probabilities sum to " + std::to_string(sum) +
                              "; the model does not normalize");
  }
  return JointDistribution(proc.alphabet_sizes(), std::move(probs));
}

}  // namespace

JointDistribution born_joint_serial(const QuantumModel& q, const ProcessSpec& proc) {
  q.require_matching(proc);
  std::vector<Cplx> raw(proc.outcome_count());
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = born_amplitude(q, proc, i);
  return finalize_born(proc, std::move(raw));
}

JointDistribution born_joint(const QuantumModel& q, const ProcessSpec& proc) {
  q.require_matching(proc);
  const std::size_t total = proc.outcome_count();
  std::vector<Cplx> raw(total);
#pragma omp parallel for schedule(dynamic) if (total > 1)
  for (long long i = 0; i < static_cast<long long>(total); ++i) {
    raw[static_cast<std::size_t>(i)] = born_amplitude(q, proc, static_cast<std::size_t>(i));
  }
  return finalize_born(proc, std::move(raw));
}

}  // namespace qcoord
