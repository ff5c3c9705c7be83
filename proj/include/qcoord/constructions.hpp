#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qcoord/distribution.hpp"
#include "qcoord/local_model.hpp"
#include "qcoord/process.hpp"
#include "qcoord/quantum.hpp"

namespace qcoord {

// Latent-variable rules realized as a quantum model: the shared state encodes
// the latent value s in a fixed orthonormal basis on every subsystem,
//   rho = sum_s p(s) |s..s><s..s|,
// and stage k measures M^k_x(y) = sum_s P_k(x|s,y)|s><s|. The induced
// distribution equals the latent evaluation, yet no stage can read s.
QuantumModel build_diagonal_encoding(const LatentModel& model, const ProcessSpec& proc);

// Specialization with one latent value per complete outcome tuple and
// point-mass rules, so any fixed joint distribution is realized under any
// information structure.
QuantumModel build_diagonal_universal(const JointDistribution& target, const ProcessSpec& proc);

// Two-stage separable construction whose second subsystem carries pure states
// that need not commute. Stage 1 reads g(s) from a projective measurement in
// basis_a; stage 2 applies one fixed measurement distinguishing the phi_s
// across h-classes.
struct DiscordantTwoStageSpec {
  std::vector<double> latent_probs;
  std::vector<int> g;                  // s -> first-stage outcome
  std::vector<int> h;                  // s -> second-stage outcome
  CMatrix basis_a;                     // columns |s>, orthonormal
  std::vector<CVector> states_b;       // |phi_s>, unit norm
  CMatrix declared_basis_b;            // reference basis for the diagonality diagnostic
};

struct DiscordantBuildResult {
  QuantumModel model;
  ProcessSpec process;
  JointDistribution target;
  double commutation = 0.0;             // witness over the phi_s projectors
  double max_offdiagonal = 0.0;         // of the phi_s projectors in the declared basis
  bool diagonal_in_declared_basis = false;
};

// Requires cross-class orthogonality: states in different h-classes must be
// orthogonal, or no fixed measurement can distinguish them perfectly.
DiscordantBuildResult build_discordant_two_stage(const DiscordantTwoStageSpec& spec);

// Built-in worked examples: "illex2", "diagonal-flip", "three-stage".
struct ExampleBundle {
  std::string name;
  QuantumModel model;
  ProcessSpec process;
  JointDistribution target;
};

ExampleBundle builtin_example(std::string_view name);
const std::vector<std::string>& builtin_example_names();

struct VerificationReport {
  bool pass = false;
  double max_abs_error = 0.0;
  double tolerance = 0.0;
  std::vector<double> residuals;  // per-tuple |born - target|
};

VerificationReport verify_model(const QuantumModel& q, const ProcessSpec& proc,
                                const JointDistribution& target, double tolerance);

}  // namespace qcoord
