#pragma once

#include <string>
#include <utility>

#include "passivity/core.hpp"
#include "passivity/linalg.hpp"

namespace passivity {

/// State-space realization array [A B; C D] of F(z) = C (zI - A)^{-1} B + D.
///
/// n is the state dimension (may be zero, giving the constant F(z) = D) and m the
/// common input/output dimension. Blocks are validated on construction and the
/// object is immutable afterwards.
class Realization {
 public:
  Realization(Matrix a, Matrix b, Matrix c, Matrix d)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
    const auto n = a_.rows();
    const auto m = d_.rows();
    require(a_.cols() == n, ErrorCode::dimension_mismatch, "A must be square");
    require(d_.cols() == m && m > 0, ErrorCode::dimension_mismatch, "D must be square with m >= 1");
    require(b_.rows() == n && b_.cols() == m, ErrorCode::dimension_mismatch, "B must be n x m");
    require(c_.rows() == m && c_.cols() == n, ErrorCode::dimension_mismatch, "C must be m x n");
    require(linalg::all_finite(a_) && linalg::all_finite(b_) && linalg::all_finite(c_) &&
                linalg::all_finite(d_),
            ErrorCode::non_finite, "realization entries must be finite");
  }

  /// Splits an (n+m) x (n+m) array after its first n rows and columns.
  static Realization from_array(const Matrix& r, Eigen::Index n) {
    require(r.rows() == r.cols(), ErrorCode::dimension_mismatch, "realization array must be square");
    require(n >= 0 && n < r.rows(), ErrorCode::dimension_mismatch, "state dimension out of range");
    const auto m = r.rows() - n;
    return Realization(r.topLeftCorner(n, n), r.topRightCorner(n, m), r.bottomLeftCorner(m, n),
                       r.bottomRightCorner(m, m));
  }

  /// The constant function F(z) = D.
  static Realization constant(Matrix d) {
    const auto m = d.rows();
    return Realization(Matrix(0, 0), Matrix(0, m), Matrix(m, 0), std::move(d));
  }

  Eigen::Index n() const { return a_.rows(); }
  Eigen::Index m() const { return d_.rows(); }
  const Matrix& A() const { return a_; }
  const Matrix& B() const { return b_; }
  const Matrix& C() const { return c_; }
  const Matrix& D() const { return d_; }

  Matrix array() const {
    Matrix r(n() + m(), n() + m());
    r << a_, b_, c_, d_;
    return r;
  }

 private:
  Matrix a_, b_, c_, d_;
};

struct TransferSample {
  Complex z;
  Matrix value;
};

/// F(z). Throws PoleAt when zI - A is numerically singular.
inline TransferSample evaluate(const Realization& r, Complex z) {
  if (r.n() == 0) return {z, r.D()};
  const Matrix shifted = z * linalg::identity(r.n()) - r.A();
  if (linalg::is_singular(shifted))
    fail(ErrorCode::pole_at, "zI - A is singular at z = (" + std::to_string(z.real()) + ", " +
                                 std::to_string(z.imag()) + ")");
  return {z, r.C() * shifted.partialPivLu().solve(r.B()) + r.D()};
}

struct MinimalityReport {
  bool minimal;
  int rank_ctrb;
  int rank_obsv;
};

inline Matrix controllability_matrix(const Realization& r) {
  const auto n = r.n();
  const auto m = r.m();
  Matrix k(n, n * m);
  Matrix block = r.B();
  for (Eigen::Index i = 0; i < n; ++i) {
    k.middleCols(i * m, m) = block;
    block = r.A() * block;
  }
  return k;
}

inline Matrix observability_matrix(const Realization& r) {
  const auto n = r.n();
  const auto m = r.m();
  Matrix o(n * m, n);
  Matrix block = r.C();
  for (Eigen::Index i = 0; i < n; ++i) {
    o.middleRows(i * m, m) = block;
    block = block * r.A();
  }
  return o;
}

/// Kalman rank test; ranks use an SVD cut-off of tol::kRank * sigma_max.
inline MinimalityReport is_minimal(const Realization& r) {
  if (r.n() == 0) return {true, 0, 0};
  const int rc = linalg::rank(controllability_matrix(r));
  const int ro = linalg::rank(observability_matrix(r));
  return {rc == r.n() && ro == r.n(), rc, ro};
}

/// diag(T^{-1}, I) R diag(T, I).
inline Realization change_coordinates(const Realization& r, const Matrix& t) {
  require(t.rows() == r.n() && t.cols() == r.n(), ErrorCode::dimension_mismatch, "T must be n x n");
  if (r.n() == 0) return r;
  require(linalg::condition_number(t) <= tol::kCondMax, ErrorCode::singular_t,
          "coordinate change is singular or too ill-conditioned");
  const auto lu = t.partialPivLu();
  return Realization(lu.solve(r.A() * t), lu.solve(r.B()), r.C() * t, r.D());
}

/// The matrix inverse of the whole (n+m) x (n+m) array, keeping the n/m split.
inline Realization invert_array(const Realization& r) {
  const Matrix arr = r.array();
  require(!linalg::is_singular(arr), ErrorCode::singular_array, "realization array is singular");
  return Realization::from_array(arr.partialPivLu().inverse(), r.n());
}

/// Realization of F(z)^{-1}; needs D nonsingular so the inverse stays proper.
inline Realization invert_function(const Realization& r) {
  require(!linalg::is_singular(r.D()), ErrorCode::singular_d, "D is singular; F^{-1} has a pole at infinity");
  const Matrix d_inv = r.D().partialPivLu().inverse();
  return Realization(r.A() - r.B() * d_inv * r.C(), r.B() * d_inv, -d_inv * r.C(), d_inv);
}

/// Series interconnection realizing F1(z) F2(z).
inline Realization cascade(const Realization& r1, const Realization& r2) {
  require(r1.m() == r2.m(), ErrorCode::dimension_mismatch, "cascade needs equal m");
  const auto n1 = r1.n();
  const auto n2 = r2.n();
  const auto m = r1.m();
  Matrix a = Matrix::Zero(n1 + n2, n1 + n2);
  a.topLeftCorner(n1, n1) = r1.A();
  a.topRightCorner(n1, n2) = r1.B() * r2.C();
  a.bottomRightCorner(n2, n2) = r2.A();
  Matrix b(n1 + n2, m);
  b << r1.B() * r2.D(), r2.B();
  Matrix c(m, n1 + n2);
  c << r1.C(), r1.D() * r2.C();
  return Realization(std::move(a), std::move(b), std::move(c), r1.D() * r2.D());
}

}  // namespace passivity
