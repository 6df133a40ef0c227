#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "passivity/core.hpp"

namespace passivity::linalg {

inline Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

inline Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) / 2.0; }

inline bool all_finite(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

/// Singular values in decreasing order; empty for empty input.
inline RealVector singular_values(const Matrix& m) {
  if (m.size() == 0) return RealVector();
  return Eigen::JacobiSVD<Matrix>(m).singularValues();
}

inline double norm2(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m)(0);
}

inline double sigma_min(const Matrix& m) {
  if (m.size() == 0) return kInfinity;
  const RealVector s = singular_values(m);
  return s(s.size() - 1);
}

/// Numerical rank with cut-off rel * sigma_max.
inline int rank(const Matrix& m, double rel = tol::kRank) {
  if (m.size() == 0) return 0;
  const RealVector s = singular_values(m);
  if (s(0) == 0.0) return 0;
  return static_cast<int>((s.array() > rel * s(0)).count());
}

/// True when sigma_min <= kSingular * sigma_max (a zero matrix is singular).
inline bool is_singular(const Matrix& m) {
  if (m.rows() == 0) return false;
  const RealVector s = singular_values(m);
  return s(s.size() - 1) <= tol::kSingular * s(0);
}

inline double condition_number(const Matrix& m) {
  if (m.rows() == 0) return 1.0;
  const RealVector s = singular_values(m);
  if (s(s.size() - 1) == 0.0) return kInfinity;
  return s(0) / s(s.size() - 1);
}

inline bool is_hermitian(const Matrix& m, double rel = tol::kHermitian) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= rel * scale;
}

/// Ascending eigenvalues of the Hermitian part of m.
inline RealVector hermitian_eigenvalues(const Matrix& m) {
  if (m.size() == 0) return RealVector();
  return Eigen::SelfAdjointEigenSolver<Matrix>(hermitian_part(m), Eigen::EigenvaluesOnly).eigenvalues();
}

/// +inf for an empty matrix, so that empty blocks never refute positivity.
inline double min_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return kInfinity;
  return hermitian_eigenvalues(m)(0);
}

inline double max_abs_entry(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// Replaces every eigenvalue below floor by floor.
inline Matrix clip_below(const Matrix& m, double floor) {
  if (m.size() == 0) return m;
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
  const RealVector w = es.eigenvalues().cwiseMax(floor);
  return es.eigenvectors() * w.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

/// Hermitian square root, eigenvalues clipped at floor.
inline Matrix sqrt_psd(const Matrix& m, double floor = 0.0) {
  if (m.size() == 0) return m;
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
  const RealVector w = es.eigenvalues().cwiseMax(floor).cwiseSqrt();
  return es.eigenvectors() * w.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

inline Matrix inverse_sqrt_psd(const Matrix& m, double floor) {
  if (m.size() == 0) return m;
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
  const RealVector w = es.eigenvalues().cwiseMax(floor).cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * w.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

inline Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

/// Orthonormal basis of the real vector space of n x n Hermitian matrices under
/// the Frobenius inner product: E_ii, (E_ij + E_ji)/sqrt2, i(E_ij - E_ji)/sqrt2.
class HermitianCoordinates {
 public:
  explicit HermitianCoordinates(Eigen::Index n) : n_(n) {}

  Eigen::Index size() const { return n_; }
  Eigen::Index dimension() const { return n_ * n_; }

  RealVector to_vector(const Matrix& h) const {
    RealVector v(dimension());
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n_; ++i) v(k++) = h(i, i).real();
    for (Eigen::Index i = 0; i < n_; ++i) {
      for (Eigen::Index j = i + 1; j < n_; ++j) {
        const Complex s = (h(i, j) + std::conj(h(j, i))) / 2.0;
        v(k++) = std::sqrt(2.0) * s.real();
        v(k++) = -std::sqrt(2.0) * s.imag();
      }
    }
    return v;
  }

  Matrix to_matrix(const RealVector& v) const {
    Matrix h = Matrix::Zero(n_, n_);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n_; ++i) h(i, i) = v(k++);
    const double r = 1.0 / std::sqrt(2.0);
    for (Eigen::Index i = 0; i < n_; ++i) {
      for (Eigen::Index j = i + 1; j < n_; ++j) {
        const double re = v(k++) * r;
        const double im = v(k++) * r;
        h(i, j) = Complex(re, -im);
        h(j, i) = Complex(re, im);
      }
    }
    return h;
  }

  Matrix basis(Eigen::Index k) const {
    RealVector e = RealVector::Zero(dimension());
    e(k) = 1.0;
    return to_matrix(e);
  }

 private:
  Eigen::Index n_;
};

/// Complex matrix with i.i.d. standard complex Gaussian entries.
template <class Rng>
Matrix complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(2.0));
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = Complex(normal(rng), normal(rng));
  return m;
}

/// rows x cols matrix with orthonormal columns (rows >= cols).
template <class Rng>
Matrix random_column_isometry(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const Matrix g = complex_gaussian(rows, cols, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  // Fix the phase so the factorization is unique.
  const Matrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0.0) q.col(j) *= r(j, j) / a;
  }
  return q;
}

template <class Rng>
Matrix random_unitary(Eigen::Index n, Rng& rng) {
  return random_column_isometry(n, n, rng);
}

}  // namespace passivity::linalg
