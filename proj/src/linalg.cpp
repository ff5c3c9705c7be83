#include "qcoord/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qcoord/errors.hpp"

namespace qcoord {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double hermiticity_gap(const CMatrix& a) {
  if (a.rows() != a.cols()) throw StructuralError("hermiticity check needs a square matrix");
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

HermitianEigen hermitian_eigen(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(a);
  if (solver.info() != Eigen::Success) {
    throw StructuralError("eigendecomposition failed to converge");
  }
  HermitianEigen out{solver.eigenvalues(), solver.eigenvectors()};

  // Ascending already; break exact ties lexicographically by eigenvector.
  const Eigen::Index n = out.values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  auto vec_less = [&](Eigen::Index i, Eigen::Index j) {
    for (Eigen::Index r = 0; r < n; ++r) {
      const Cplx u = out.vectors(r, i), v = out.vectors(r, j);
      if (u.real() != v.real()) return u.real() < v.real();
      if (u.imag() != v.imag()) return u.imag() < v.imag();
    }
    return false;
  };
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    if (out.values[i] != out.values[j]) return out.values[i] < out.values[j];
    return vec_less(i, j);
  });
  HermitianEigen sorted;
  sorted.values.resize(n);
  sorted.vectors.resize(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    sorted.values[c] = out.values[order[static_cast<std::size_t>(c)]];
    sorted.vectors.col(c) = out.vectors.col(order[static_cast<std::size_t>(c)]);
  }
  return sorted;
}

Eigen::VectorXd hermitian_eigenvalues(const CMatrix& a) { return hermitian_eigen(a).values; }

double spectral_norm(const CMatrix& a) {
  // eigenvalues of A^H A are the squared singular values
  const CMatrix gram = a.adjoint() * a;
  const Eigen::VectorXd ev = hermitian_eigenvalues(gram);
  return std::sqrt(std::max(0.0, ev.maxCoeff()));
}

CMatrix partial_trace_first(const CMatrix& rho, int d_first) {
  const Eigen::Index rest = rho.rows() / d_first;
  CMatrix out = CMatrix::Zero(rest, rest);
  for (int a = 0; a < d_first; ++a) {
    out += rho.block(a * rest, a * rest, rest, rest);
  }
  return out;
}

CMatrix partial_trace_last(const CMatrix& rho, int d_last) {
  const Eigen::Index first = rho.rows() / d_last;
  CMatrix out(first, first);
  for (Eigen::Index i = 0; i < first; ++i) {
    for (Eigen::Index j = 0; j < first; ++j) {
      out(i, j) = rho.block(i * d_last, j * d_last, d_last, d_last).trace();
    }
  }
  return out;
}

CMatrix swap_bipartite(const CMatrix& rho, int d_first, int d_rest) {
  CMatrix out(rho.rows(), rho.cols());
  for (int a = 0; a < d_first; ++a) {
    for (int b = 0; b < d_rest; ++b) {
      for (int a2 = 0; a2 < d_first; ++a2) {
        for (int b2 = 0; b2 < d_rest; ++b2) {
          out(b * d_first + a, b2 * d_first + a2) = rho(a * d_rest + b, a2 * d_rest + b2);
        }
      }
    }
  }
  return out;
}

CMatrix contract_first(const CMatrix& rho, const CMatrix& op, int d_first) {
  if (rho.rows() != rho.cols() || op.rows() != op.cols() || op.rows() != d_first ||
      rho.rows() % d_first != 0) {
    throw StructuralError("contraction dimensions disagree");
  }
  const Eigen::Index rest = rho.rows() / d_first;
  CMatrix out = CMatrix::Zero(rest, rest);
  for (int a = 0; a < d_first; ++a) {
    for (int a2 = 0; a2 < d_first; ++a2) {
      const Cplx c = op(a, a2);
      if (c == Cplx(0.0, 0.0)) continue;
      out.noalias() += c * rho.block(a2 * rest, a * rest, rest, rest);
    }
  }
  return out;
}

double entropy_bits(const Eigen::VectorXd& eigenvalues) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const double p = eigenvalues[i];
    if (p > 1e-15) s -= p * std::log2(p);
  }
  return s;
}

double vn_entropy_bits(const CMatrix& hermitian) {
  return entropy_bits(hermitian_eigenvalues(hermitian));
}

}  // namespace qcoord
