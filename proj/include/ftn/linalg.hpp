#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "ftn/errors.hpp"

namespace ftn {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using cplx = std::complex<double>;

// Hermitian eigen-decomposition with a deterministic presentation:
// eigenvalues sorted descending, each eigenvector phase-normalized so its
// first component of non-negligible magnitude is real positive, and
// numerically degenerate groups re-orthonormalized by column-pivoted QR so
// the basis inside an eigenspace does not depend on solver internals.
template <typename Matrix>
struct HermitianEig {
  Matrix vectors;         // columns are eigenvectors
  VectorXd values;        // descending
};

namespace detail {

template <typename Matrix>
void phase_normalize(Matrix& v) {
  const double tol = 1e-12 * v.norm();
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      const auto x = v(r, c);
      if (std::abs(x) > tol) {
        v.col(c) *= Eigen::numext::conj(x) / std::abs(x);
        break;
      }
    }
  }
}

template <typename Matrix>
void fix_degenerate_groups(Matrix& v, const VectorXd& w) {
  const double scale = std::max(std::abs(w(0)), std::abs(w(w.size() - 1)));
  const double gap = 1e-10 * std::max(scale, 1e-300);
  Eigen::Index i = 0;
  while (i < w.size()) {
    Eigen::Index j = i + 1;
    while (j < w.size() && std::abs(w(j) - w(i)) <= gap) ++j;
    if (j - i > 1) {
      // Re-span the eigenspace with a pivoted-QR basis of the same columns.
      Eigen::ColPivHouseholderQR<Matrix> qr(v.middleCols(i, j - i));
      Matrix q = qr.householderQ() * Matrix::Identity(v.rows(), j - i);
      v.middleCols(i, j - i) = q;
    }
    i = j;
  }
}

}  // namespace detail

template <typename Matrix>
HermitianEig<Matrix> hermitian_eig(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) throw Error("eigendecomposition failed");
  const Eigen::Index n = a.rows();
  HermitianEig<Matrix> out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {  // ascending -> descending
    out.values(i) = es.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  if (n > 1) detail::fix_degenerate_groups(out.vectors, out.values);
  detail::phase_normalize(out.vectors);
  return out;
}

inline VectorXd hermitian_eigenvalues_desc(const MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("eigendecomposition failed");
  return es.eigenvalues().reverse();
}

inline MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// A * B with A real and B complex, multiplying the real and imaginary parts
// separately (two real GEMMs beat one promoted complex GEMM).
inline MatrixXcd real_times_complex(const MatrixXd& a, const MatrixXcd& b) {
  MatrixXd re = a * b.real();
  MatrixXd im = a * b.imag();
  MatrixXcd out(a.rows(), b.cols());
  out.real() = re;
  out.imag() = im;
  return out;
}

// B * A with B complex and A real, same split.
inline MatrixXcd complex_times_real(const MatrixXcd& b, const MatrixXd& a) {
  MatrixXd re = b.real() * a;
  MatrixXd im = b.imag() * a;
  MatrixXcd out(b.rows(), a.cols());
  out.real() = re;
  out.imag() = im;
  return out;
}

// log2 det(I + A) for Hermitian PSD A, via Cholesky of I+A; falls back to an
// eigenvalue sum if the factorization stalls near singularity.
inline double log2det_identity_plus(const MatrixXcd& a) {
  MatrixXcd m = MatrixXcd::Identity(a.rows(), a.cols()) + a;
  Eigen::LLT<MatrixXcd> llt(m);
  if (llt.info() == Eigen::Success) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      acc += std::log2(std::real(llt.matrixL()(i, i)));
    return 2.0 * acc;
  }
  VectorXd w = hermitian_eigenvalues_desc(a);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    acc += std::log2(std::max(1.0 + w(i), 1e-300));
  return acc;
}

// Midpoint grid over [-1/2, 1/2]: M points, endpoints excluded.
inline VectorXd midpoint_grid(int m) {
  VectorXd f(m);
  for (int i = 0; i < m; ++i) f(i) = -0.5 + (i + 0.5) / m;
  return f;
}

}  // namespace ftn
