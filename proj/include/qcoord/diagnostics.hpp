#pragma once

#include <vector>

#include "qcoord/linalg.hpp"
#include "qcoord/quantum.hpp"

namespace qcoord {

// Max over pairs of the spectral norm of the commutator [rho_i, rho_j].
// Zero (within 1e-12) exactly when the Hermitian family is jointly
// diagonalizable.
double commutation_witness(const std::vector<CMatrix>& states);

enum class MeasuredSide { A, B };

struct DiscordResult {
  double discord = 0.0;             // clamped at 0
  double mutual_information = 0.0;
  double min_conditional_entropy = 0.0;  // min over measurements of sum_b p_b S(rho_{U|b})
  double theta = 0.0;               // minimizing measurement direction
  double phi = 0.0;
  int resolution = 0;
};

// One-sided measured discord D = I(A:B) - max_Pi J for rank-1 projective
// measurements on the measured side (which must be a qubit). The maximization
// scans a deterministic (theta, phi) grid of the given resolution, theta_i =
// pi(i+1/2)/res, phi_j = 2pi j/res, then runs 20 golden-section rounds per
// angle around the grid minimum. Parallel and serial scans agree bit-for-bit:
// ties in the grid minimum resolve by flat index.
DiscordResult discord_one_sided(const DensityMatrix& rho, int dim_a, int dim_b,
                                MeasuredSide measured, int resolution);
DiscordResult discord_one_sided_serial(const DensityMatrix& rho, int dim_a, int dim_b,
                                       MeasuredSide measured, int resolution);

}  // namespace qcoord
