#include "qcoord/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qcoord/diagnostics.hpp"
#include "qcoord/errors.hpp"
#include "qcoord/tolerances.hpp"

namespace qcoord {

namespace {

CMatrix basis_projector(int dim, int s) {
  CMatrix p = CMatrix::Zero(dim, dim);
  p(s, s) = Cplx(1.0, 0.0);
  return p;
}

CVector ket(std::initializer_list<Cplx> entries) {
  CVector v(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (const Cplx& c : entries) v(i++) = c;
  return v;
}

CMatrix projector(const CVector& v) { return v * v.adjoint(); }

}  // namespace

QuantumModel build_diagonal_encoding(const LatentModel& model, const ProcessSpec& proc) {
  model.require_matching(proc);
  const int n = proc.stages();
  const int latent = model.latent_size();

  // Diagonal state with weight p(s) on the tuple (s, s, ..., s).
  long long dim = 1;
  for (int k = 0; k < n; ++k) dim *= latent;
  CMatrix rho = CMatrix::Zero(dim, dim);
  SeparableDecomposition decomp;
  decomp.weights = model.latent_probs;
  decomp.factors.resize(static_cast<std::size_t>(latent));
  for (int s = 0; s < latent; ++s) {
    long long idx = 0;
    for (int k = 0; k < n; ++k) idx = idx * latent + s;
    rho(idx, idx) = Cplx(model.latent_probs[static_cast<std::size_t>(s)], 0.0);
    decomp.factors[static_cast<std::size_t>(s)].assign(static_cast<std::size_t>(n),
                                                       basis_projector(latent, s));
  }

  QuantumModel q{std::vector<int>(static_cast<std::size_t>(n), latent),
                 DensityMatrix::trusted(std::move(rho)),
                 {},
                 std::move(decomp)};
  q.measurements.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    q.measurements[static_cast<std::size_t>(k)].reserve(
        static_cast<std::size_t>(proc.label_count(k)));
    for (int y = 0; y < proc.label_count(k); ++y) {
      std::vector<CMatrix> elems(static_cast<std::size_t>(proc.alphabet_size(k)),
                                 CMatrix::Zero(latent, latent));
      for (int s = 0; s < latent; ++s) {
        const auto& row = model.tables[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)]
                                      [static_cast<std::size_t>(y)];
        for (int x = 0; x < proc.alphabet_size(k); ++x) {
          elems[static_cast<std::size_t>(x)](s, s) = Cplx(row[static_cast<std::size_t>(x)], 0.0);
        }
      }
      q.measurements[static_cast<std::size_t>(k)].push_back(Povm::trusted(std::move(elems)));
    }
  }
  return q;
}

QuantumModel build_diagonal_universal(const JointDistribution& target, const ProcessSpec& proc) {
  target.require_matching(proc);
  const int n = proc.stages();
  const auto tuples = static_cast<int>(target.size());
  const MixedRadix& ix = target.indexer();

  LatentModel latent;
  latent.latent_probs = target.probs();
  latent.tables.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    std::vector<int> outcomes(static_cast<std::size_t>(tuples));
    for (int s = 0; s < tuples; ++s) {
      outcomes[static_cast<std::size_t>(s)] =
          ix.digit(static_cast<std::size_t>(s), static_cast<std::size_t>(k));
    }
    latent.tables[static_cast<std::size_t>(k)] =
        LatentModel::deterministic_stage(proc, k, outcomes);
  }
  return build_diagonal_encoding(latent, proc);
}

DiscordantBuildResult build_discordant_two_stage(const DiscordantTwoStageSpec& spec) {
  const auto latent = spec.latent_probs.size();
  if (latent == 0) throw StructuralError("latent alphabet must be nonempty");
  if (spec.g.size() != latent || spec.h.size() != latent) {
    throw StructuralError("g and h must assign an outcome to every latent value");
  }
  double psum = 0.0;
  for (double p : spec.latent_probs) {
    if (!(p >= 0.0)) throw StructuralError("latent probabilities must be nonnegative");
    psum += p;
  }
  if (std::abs(psum - 1.0) > tol::kProbSum) {
    throw StructuralError("latent probabilities sum to " + std::to_string(psum));
  }

  const int dim_a = static_cast<int>(spec.basis_a.rows());
  if (spec.basis_a.cols() != static_cast<Eigen::Index>(latent) || dim_a < static_cast<int>(latent)) {
    throw StructuralError("basis_a needs one column per latent value and at least that many rows");
  }
  const CMatrix gram_a = spec.basis_a.adjoint() * spec.basis_a;
  const double ortho_a =
      (gram_a - CMatrix::Identity(gram_a.rows(), gram_a.cols())).cwiseAbs().maxCoeff();
  if (ortho_a > tol::kOrtho) {
    throw ValidationError("orthonormality", ortho_a,
                          "basis_a columns are not orthonormal (deviation " +
                              std::to_string(ortho_a) + ")");
  }

  if (spec.states_b.size() != latent) {
    throw StructuralError("states_b needs one vector per latent value");
  }
  const int dim_b = static_cast<int>(spec.states_b.front().size());
  for (std::size_t s = 0; s < latent; ++s) {
    if (spec.states_b[s].size() != dim_b) {
      throw StructuralError("states_b vectors have mixed dimensions");
    }
    const double norm_gap = std::abs(spec.states_b[s].norm() - 1.0);
    if (norm_gap > tol::kOrtho) {
      throw ValidationError("unit-norm", norm_gap,
                            "states_b[" + std::to_string(s) + "] is not normalized");
    }
  }

  int x1_count = 0, x2_count = 0;
  for (std::size_t s = 0; s < latent; ++s) {
    if (spec.g[s] < 0 || spec.h[s] < 0) throw StructuralError("outcomes must be nonnegative");
    x1_count = std::max(x1_count, spec.g[s] + 1);
    x2_count = std::max(x2_count, spec.h[s] + 1);
  }

  // A single fixed measurement can report h(s) with certainty iff states in
  // different h-classes are orthogonal.
  for (std::size_t s = 0; s < latent; ++s) {
    for (std::size_t s2 = s + 1; s2 < latent; ++s2) {
      if (spec.h[s] == spec.h[s2]) continue;
      const double overlap = std::abs(Cplx(spec.states_b[s].adjoint() * spec.states_b[s2]));
      if (overlap > tol::kOrtho) {
        throw ConstructionError(
            "no fixed second-stage measurement distinguishes states " + std::to_string(s) +
            " and " + std::to_string(s2) + " (h-classes differ, overlap " +
            std::to_string(overlap) + ")");
      }
    }
  }

  ProcessSpec proc = ProcessSpec::oblivious({x1_count, x2_count});

  // State and its separable decomposition.
  SeparableDecomposition decomp;
  decomp.weights = spec.latent_probs;
  decomp.factors.resize(latent);
  for (std::size_t s = 0; s < latent; ++s) {
    decomp.factors[s] = {projector(spec.basis_a.col(static_cast<Eigen::Index>(s))),
                         projector(spec.states_b[s])};
  }
  CMatrix rho = decomp.assemble();

  // Stage 1: projective in basis_a, coarse-grained by g; any residual of an
  // incomplete basis goes to outcome 0.
  std::vector<CMatrix> stage1(static_cast<std::size_t>(x1_count),
                              CMatrix::Zero(dim_a, dim_a));
  CMatrix span_a = CMatrix::Zero(dim_a, dim_a);
  for (std::size_t s = 0; s < latent; ++s) {
    const CMatrix p = projector(spec.basis_a.col(static_cast<Eigen::Index>(s)));
    stage1[static_cast<std::size_t>(spec.g[s])] += p;
    span_a += p;
  }
  stage1[0] += CMatrix::Identity(dim_a, dim_a) - span_a;

  // Stage 2: one projector per h-class span; residual to outcome 0.
  std::vector<CMatrix> stage2(static_cast<std::size_t>(x2_count),
                              CMatrix::Zero(dim_b, dim_b));
  CMatrix span_b = CMatrix::Zero(dim_b, dim_b);
  for (int x = 0; x < x2_count; ++x) {
    std::vector<CVector> basis;
    for (std::size_t s = 0; s < latent; ++s) {
      if (spec.h[s] != x) continue;
      CVector v = spec.states_b[s];
      for (const auto& q : basis) v -= (q.adjoint() * v)(0, 0) * q;
      const double norm = v.norm();
      if (norm > 1e-8) basis.push_back(v / norm);
    }
    for (const auto& q : basis) stage2[static_cast<std::size_t>(x)] += projector(q);
    span_b += stage2[static_cast<std::size_t>(x)];
  }
  stage2[0] += CMatrix::Identity(dim_b, dim_b) - span_b;

  QuantumModel model{{dim_a, dim_b},
                     DensityMatrix::trusted(std::move(rho)),
                     {{validate_povm(stage1, dim_a)}, {validate_povm(stage2, dim_b)}},
                     std::move(decomp)};

  // Target induced by (g, h).
  std::vector<double> probs(static_cast<std::size_t>(x1_count) * static_cast<std::size_t>(x2_count),
                            0.0);
  for (std::size_t s = 0; s < latent; ++s) {
    probs[static_cast<std::size_t>(spec.g[s]) * static_cast<std::size_t>(x2_count) +
          static_cast<std::size_t>(spec.h[s])] += spec.latent_probs[s];
  }

  DiscordantBuildResult result{std::move(model),
                               std::move(proc),
                               JointDistribution({x1_count, x2_count}, std::move(probs)),
                               0.0,
                               0.0,
                               false};

  std::vector<CMatrix> phis;
  phis.reserve(latent);
  for (const auto& v : spec.states_b) phis.push_back(projector(v));
  result.commutation = commutation_witness(phis);

  if (spec.declared_basis_b.rows() != dim_b || spec.declared_basis_b.cols() != dim_b) {
    throw StructuralError("declared_basis_b must be a square basis on subsystem B");
  }
  const CMatrix gram_d = spec.declared_basis_b.adjoint() * spec.declared_basis_b;
  const double ortho_d =
      (gram_d - CMatrix::Identity(dim_b, dim_b)).cwiseAbs().maxCoeff();
  if (ortho_d > tol::kOrtho) {
    throw ValidationError("orthonormality", ortho_d, "declared_basis_b is not orthonormal");
  }
  double offdiag = 0.0;
  for (const auto& p : phis) {
    const CMatrix t = spec.declared_basis_b.adjoint() * p * spec.declared_basis_b;
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      for (Eigen::Index j = 0; j < t.cols(); ++j) {
        if (i != j) offdiag = std::max(offdiag, std::abs(t(i, j)));
      }
    }
  }
  result.max_offdiagonal = offdiag;
  result.diagonal_in_declared_basis = offdiag <= tol::kOrtho;
  return result;
}

const std::vector<std::string>& builtin_example_names() {
  static const std::vector<std::string> names = {"illex2", "diagonal-flip", "three-stage"};
  return names;
}

ExampleBundle builtin_example(std::string_view name) {
  const double half = 0.5;
  const double r = 1.0 / std::sqrt(2.0);
  const CVector k0 = ket({Cplx(1, 0), Cplx(0, 0)});
  const CVector k1 = ket({Cplx(0, 0), Cplx(1, 0)});
  const CVector kplus = ket({Cplx(r, 0), Cplx(r, 0)});
  const CVector kminus = ket({Cplx(r, 0), Cplx(-r, 0)});

  auto povm = [](std::vector<CMatrix> elems) { return Povm::trusted(std::move(elems)); };
  const CMatrix p0 = projector(k0), p1 = projector(k1);
  const CMatrix pplus = projector(kplus), pminus = projector(kminus);

  if (name == "illex2") {
    SeparableDecomposition decomp{{half, half}, {{p0, pplus}, {p1, pminus}}};
    CMatrix rho = decomp.assemble();
    QuantumModel model{{2, 2},
                       DensityMatrix::trusted(std::move(rho)),
                       // second stage reads + as 1 and - as 0
                       {{povm({p0, p1})}, {povm({pminus, pplus})}},
                       std::move(decomp)};
    return ExampleBundle{"illex2", std::move(model), ProcessSpec::oblivious({2, 2}),
                         JointDistribution({2, 2}, {0.0, half, half, 0.0})};
  }
  if (name == "diagonal-flip") {
    SeparableDecomposition decomp{{half, half}, {{p0, p0}, {p1, p1}}};
    CMatrix rho = decomp.assemble();
    QuantumModel model{{2, 2},
                       DensityMatrix::trusted(std::move(rho)),
                       // second stage outputs the flipped computational result
                       {{povm({p0, p1})}, {povm({p1, p0})}},
                       std::move(decomp)};
    return ExampleBundle{"diagonal-flip", std::move(model), ProcessSpec::oblivious({2, 2}),
                         JointDistribution({2, 2}, {0.0, half, half, 0.0})};
  }
  if (name == "three-stage") {
    SeparableDecomposition decomp{{half, half}, {{p0, pplus, p0}, {p1, pminus, p1}}};
    CMatrix rho = decomp.assemble();
    QuantumModel model{{2, 2, 2},
                       DensityMatrix::trusted(std::move(rho)),
                       {{povm({p0, p1})}, {povm({pminus, pplus})}, {povm({p0, p1})}},
                       std::move(decomp)};
    std::vector<double> probs(8, 0.0);
    probs[2] = half;  // (0,1,0)
    probs[5] = half;  // (1,0,1)
    return ExampleBundle{"three-stage", std::move(model), ProcessSpec::oblivious({2, 2, 2}),
                         JointDistribution({2, 2, 2}, std::move(probs))};
  }

  std::string valid;
  for (const auto& n : builtin_example_names()) {
    if (!valid.empty()) valid += ", ";
    valid += n;
  }
  throw UsageError("unknown example '" + std::string(name) + "', valid names: " + valid);
}

VerificationReport verify_model(const QuantumModel& q, const ProcessSpec& proc,
                                const JointDistribution& target, double tolerance) {
  target.require_matching(proc);
  const JointDistribution actual = born_joint(q, proc);
  VerificationReport report;
  report.tolerance = tolerance;
  report.residuals.resize(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    report.residuals[i] = std::abs(actual[i] - target[i]);
    report.max_abs_error = std::max(report.max_abs_error, report.residuals[i]);
  }
  report.pass = report.max_abs_error <= tolerance;
  return report;
}

}  // namespace qcoord
