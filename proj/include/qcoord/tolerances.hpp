#pragma once

// Numeric tolerances used across the library. Values are chosen to sit well
// above double-precision accumulation noise and well below any modeled effect.

namespace qcoord::tol {

inline constexpr double kProbSum = 1e-12;    // distribution / row normalization
inline constexpr double kSupport = 1e-12;    // prefix counts as reached above this mass
inline constexpr double kRowAgree = 1e-9;    // conditional-row agreement for feasibility
inline constexpr double kCertificate = 1e-9; // certificate must reproduce target this closely
inline constexpr double kHermitian = 1e-10;  // entrywise Hermiticity / POVM completeness
inline constexpr double kPsdFloor = -1e-10;  // eigenvalue floor for PSD checks
inline constexpr double kBornImag = 1e-10;   // tolerated imaginary residue of Born probabilities
inline constexpr double kBornDrift = 1e-12;  // normalization drift before born_joint flags
inline constexpr double kOrtho = 1e-10;      // orthonormality / cross-class overlap
inline constexpr double kKlEpsilon = 1e-12;  // smoothing added to both KL arguments
inline constexpr double kCommute = 1e-12;    // commutation witness zero threshold

}  // namespace qcoord::tol
