#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace qcoord {

using Cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

CMatrix kron(const CMatrix& a, const CMatrix& b);

// max_ij |A_ij - conj(A_ji)|
double hermiticity_gap(const CMatrix& a);

// Eigenvalues of a Hermitian matrix, ascending; exact ties broken by
// lexicographic eigenvector comparison so reports are stable.
struct HermitianEigen {
  Eigen::VectorXd values;
  CMatrix vectors;  // columns, aligned with values
};
HermitianEigen hermitian_eigen(const CMatrix& a);
Eigen::VectorXd hermitian_eigenvalues(const CMatrix& a);

// Largest singular value. For Hermitian or anti-Hermitian input this equals
// the largest absolute eigenvalue.
double spectral_norm(const CMatrix& a);

// Bipartite helpers on a (d_first * d_rest) x (d_first * d_rest) matrix with
// the first factor most significant.
CMatrix partial_trace_first(const CMatrix& rho, int d_first);
CMatrix partial_trace_last(const CMatrix& rho, int d_last);
CMatrix swap_bipartite(const CMatrix& rho, int d_first, int d_rest);

// sigma[b',b] = sum_{a,a'} op(a,a') rho[(a',b'),(a,b)], the subsystem
// contraction satisfying Tr[(op (x) N) rho] = Tr[N sigma]. Exact-zero op
// entries are skipped, which leaves the result bit-identical.
CMatrix contract_first(const CMatrix& rho, const CMatrix& op, int d_first);

// Shannon entropy (base 2) of an eigenvalue list; values below 1e-15 are
// treated as zero.
double entropy_bits(const Eigen::VectorXd& eigenvalues);
double vn_entropy_bits(const CMatrix& hermitian);

}  // namespace qcoord
