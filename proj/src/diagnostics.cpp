#include "qcoord/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qcoord/errors.hpp"
#include "qcoord/tolerances.hpp"

namespace qcoord {

double commutation_witness(const std::vector<CMatrix>& states) {
  if (states.empty()) throw StructuralError("commutation witness needs at least one state");
  const Eigen::Index dim = states.front().rows();
  for (std::size_t i = 0; i < states.size(); ++i) {
    const CMatrix& s = states[i];
    if (s.rows() != s.cols() || s.rows() != dim) {
      throw StructuralError("state " + std::to_string(i) + " has mismatched dimensions");
    }
    const double herm = hermiticity_gap(s);
    if (herm > tol::kHermitian) {
      throw ValidationError("hermiticity", herm,
                            "state " + std::to_string(i) + " is not Hermitian (deviation " +
                                std::to_string(herm) + ")");
    }
  }
  double witness = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      // i[A,B] is Hermitian for Hermitian A, B, so the spectral norm of the
      // commutator is its largest absolute eigenvalue.
      const CMatrix k = Cplx(0.0, 1.0) * (states[i] * states[j] - states[j] * states[i]);
      const Eigen::VectorXd ev = hermitian_eigenvalues(0.5 * (k + k.adjoint()));
      witness = std::max(witness, std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff())));
    }
  }
  return witness;
}

namespace {

double entropy2x2(Cplx k00, Cplx k01, Cplx k11, double p) {
  const double tr = (k00.real() + k11.real()) / p;
  const double det = (k00 * k11 - k01 * std::conj(k01)).real() / (p * p);
  const double disc = std::max(0.0, 0.25 * tr * tr - det);
  const double root = std::sqrt(disc);
  double s = 0.0;
  for (double lam : {0.5 * tr + root, 0.5 * tr - root}) {
    if (lam > 1e-15) s -= lam * std::log2(lam);
  }
  return s;
}

// W holds the state with the unmeasured subsystem first and the measured
// qubit last. Returns sum_b p_b S(rho_{U|b}) for the projective measurement
// along (theta, phi).
double conditional_entropy(const CMatrix& w, int du, double theta, double phi) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const Cplx e(std::cos(phi), std::sin(phi));
  const Cplx v0[2] = {Cplx(c, 0.0), e * s};
  const Cplx v1[2] = {-std::conj(e) * s, Cplx(c, 0.0)};

  double acc = 0.0;
  for (const Cplx* v : {v0, v1}) {
    if (du == 2) {
      Cplx k00(0, 0), k01(0, 0), k11(0, 0);
      for (int m = 0; m < 2; ++m) {
        for (int m2 = 0; m2 < 2; ++m2) {
          const Cplx coeff = std::conj(v[m]) * v[m2];
          k00 += coeff * w(m, m2);
          k01 += coeff * w(m, 2 + m2);
          k11 += coeff * w(2 + m, 2 + m2);
        }
      }
      const double p = k00.real() + k11.real();
      if (p > 1e-15) acc += p * entropy2x2(k00, k01, k11, p);
    } else {
      CMatrix kb = CMatrix::Zero(du, du);
      for (int u = 0; u < du; ++u) {
        for (int u2 = 0; u2 < du; ++u2) {
          Cplx sum(0, 0);
          for (int m = 0; m < 2; ++m) {
            for (int m2 = 0; m2 < 2; ++m2) {
              sum += std::conj(v[m]) * w(u * 2 + m, u2 * 2 + m2) * v[m2];
            }
          }
          kb(u, u2) = sum;
        }
      }
      const double p = kb.trace().real();
      if (p > 1e-15) acc += p * vn_entropy_bits(kb / p);
    }
  }
  return acc;
}

struct GridBest {
  double value = std::numeric_limits<double>::infinity();
  std::size_t index = 0;
  double theta = 0.0;
  double phi = 0.0;
};

void consider(GridBest& best, double value, std::size_t index, double theta, double phi) {
  if (value < best.value || (value == best.value && index < best.index)) {
    best.value = value;
    best.index = index;
    best.theta = theta;
    best.phi = phi;
  }
}

// golden-section over one angle, tracking the best point seen
void refine_angle(const CMatrix& w, int du, double& theta, double& phi, bool refine_theta,
                  double half_width, double& best_value) {
  constexpr double invphi = 0.6180339887498949;
  const double center = refine_theta ? theta : phi;
  double a = center - half_width;
  double b = center + half_width;
  if (refine_theta) {
    a = std::max(0.0, a);
    b = std::min(std::numbers::pi, b);
  }
  auto eval = [&](double t) {
    return refine_theta ? conditional_entropy(w, du, t, phi)
                        : conditional_entropy(w, du, theta, t);
  };
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = eval(x1);
  double f2 = eval(x2);
  for (int it = 0; it < 20; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = eval(x2);
    }
  }
  const double tm = 0.5 * (a + b);
  const double fm = eval(tm);
  if (fm < best_value) {
    best_value = fm;
    (refine_theta ? theta : phi) = tm;
  }
}

DiscordResult discord_impl(const DensityMatrix& rho, int dim_a, int dim_b, MeasuredSide measured,
                           int resolution, bool parallel) {
  if (dim_a < 1 || dim_b < 1 || static_cast<long long>(dim_a) * dim_b != rho.dim()) {
    throw StructuralError("subsystem dimensions do not factor the state dimension");
  }
  const int measured_dim = (measured == MeasuredSide::A) ? dim_a : dim_b;
  if (measured_dim != 2) {
    throw PreconditionError("unsupported dimension: measured side must be a qubit, got " +
                            std::to_string(measured_dim));
  }
  if (resolution < 2) throw PreconditionError("grid resolution must be >= 2");

  // Reorder so the measured qubit is the trailing factor.
  const int du = (measured == MeasuredSide::A) ? dim_b : dim_a;
  const CMatrix w = (measured == MeasuredSide::A)
                        ? swap_bipartite(rho.matrix(), dim_a, dim_b)
                        : rho.matrix();

  const double s_joint = vn_entropy_bits(w);
  const double s_measured = vn_entropy_bits(partial_trace_first(w, du));
  const double s_unmeasured = vn_entropy_bits(partial_trace_last(w, 2));
  const double mutual = s_unmeasured + s_measured - s_joint;

  const std::size_t res = static_cast<std::size_t>(resolution);
  const std::size_t points = res * res;
  const double theta_step = std::numbers::pi / static_cast<double>(res);
  const double phi_step = 2.0 * std::numbers::pi / static_cast<double>(res);

  auto point_value = [&](std::size_t idx, double& theta, double& phi) {
    const std::size_t i = idx / res;
    const std::size_t j = idx % res;
    theta = theta_step * (static_cast<double>(i) + 0.5);
    phi = phi_step * static_cast<double>(j);
    return conditional_entropy(w, du, theta, phi);
  };

  GridBest best;
  if (parallel) {
#pragma omp parallel
    {
      GridBest local;
#pragma omp for schedule(static) nowait
      for (long long idx = 0; idx < static_cast<long long>(points); ++idx) {
        double theta, phi;
        const double v = point_value(static_cast<std::size_t>(idx), theta, phi);
        consider(local, v, static_cast<std::size_t>(idx), theta, phi);
      }
#pragma omp critical
      consider(best, local.value, local.index, local.theta, local.phi);
    }
  } else {
    for (std::size_t idx = 0; idx < points; ++idx) {
      double theta, phi;
      const double v = point_value(idx, theta, phi);
      consider(best, v, idx, theta, phi);
    }
  }

  double theta = best.theta;
  double phi = best.phi;
  double value = best.value;
  refine_angle(w, du, theta, phi, /*refine_theta=*/true, theta_step, value);
  refine_angle(w, du, theta, phi, /*refine_theta=*/false, phi_step, value);

  DiscordResult out;
  out.mutual_information = mutual;
  out.min_conditional_entropy = value;
  out.discord = std::max(0.0, s_measured - s_joint + value);
  out.theta = theta;
  out.phi = phi;
  out.resolution = resolution;
  return out;
}

}  // namespace

DiscordResult discord_one_sided(const DensityMatrix& rho, int dim_a, int dim_b,
                                MeasuredSide measured, int resolution) {
  return discord_impl(rho, dim_a, dim_b, measured, resolution, true);
}

DiscordResult discord_one_sided_serial(const DensityMatrix& rho, int dim_a, int dim_b,
                                       MeasuredSide measured, int resolution) {
  return discord_impl(rho, dim_a, dim_b, measured, resolution, false);
}

}  // namespace qcoord
