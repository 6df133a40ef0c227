#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "passivity/core.hpp"
#include "passivity/linalg.hpp"

namespace passivity {

/// Hermitian nonsingular H selecting the Lyapunov set L_H and the Stein set S_H;
/// strict picks the open set instead of its closure. H may be indefinite.
class ConeParameter {
 public:
  explicit ConeParameter(Matrix h, bool strict = false) : h_(std::move(h)), strict_(strict) {
    require(linalg::is_hermitian(h_), ErrorCode::dimension_mismatch, "H must be square Hermitian");
    require(h_.rows() > 0 && !linalg::is_singular(h_), ErrorCode::bad_params, "H must be nonsingular");
  }

  static ConeParameter identity(Eigen::Index n, bool strict = false) {
    return ConeParameter(linalg::identity(n), strict);
  }

  const Matrix& H() const { return h_; }
  bool strict() const { return strict_; }

 private:
  Matrix h_;
  bool strict_;
};

namespace detail {
inline bool psd_test(const Matrix& m, bool strict, std::optional<double> tol_psd) {
  const double t = tol_psd.value_or(tol::psd(linalg::norm2(m)));
  const double lo = linalg::min_eigenvalue(m);
  return strict ? lo > t : lo >= -t;
}
}  // namespace detail

/// HA + A^*H >= 0 (> 0 when strict).
inline bool in_L(const ConeParameter& h, const Matrix& a, std::optional<double> tol_psd = std::nullopt) {
  require(a.rows() == h.H().rows() && a.cols() == h.H().rows(), ErrorCode::dimension_mismatch,
          "A must match H");
  return detail::psd_test(h.H() * a + a.adjoint() * h.H(), h.strict(), tol_psd);
}

/// H - A^*HA >= 0 (> 0 when strict).
inline bool in_S(const ConeParameter& h, const Matrix& a, std::optional<double> tol_psd = std::nullopt) {
  require(a.rows() == h.H().rows() && a.cols() == h.H().rows(), ErrorCode::dimension_mismatch,
          "A must match H");
  return detail::psd_test(h.H() - a.adjoint() * h.H() * a, h.strict(), tol_psd);
}

/// (I - A)(I + A)^{-1}. Involutive wherever defined.
inline Matrix cayley_matrix(const Matrix& a) {
  require(a.rows() == a.cols(), ErrorCode::dimension_mismatch, "A must be square");
  const Matrix id = linalg::identity(a.rows());
  require(!linalg::is_singular(id + a), ErrorCode::minus_one_in_spectrum, "-1 is an eigenvalue of A");
  return (id - a) * (id + a).partialPivLu().inverse();
}

/// Blocks Upsilon_j (eta_j x nu, eta_j <= nu) with sum Upsilon_j^* Upsilon_j = I_nu.
class IsometryTuple {
 public:
  explicit IsometryTuple(std::vector<Matrix> blocks) : blocks_(std::move(blocks)) {
    require(!blocks_.empty(), ErrorCode::dimension_mismatch, "isometry tuple needs at least one block");
    const auto nu = blocks_.front().cols();
    for (const auto& b : blocks_) {
      require(b.cols() == nu, ErrorCode::dimension_mismatch, "all blocks need nu columns");
      require(b.rows() >= 1 && b.rows() <= nu, ErrorCode::dimension_mismatch, "block rows must lie in [1, nu]");
    }
  }

  Eigen::Index nu() const { return blocks_.front().cols(); }
  std::size_t size() const { return blocks_.size(); }
  const std::vector<Matrix>& blocks() const { return blocks_; }

  /// ||sum Upsilon_j^* Upsilon_j - I||_2.
  double defect() const {
    Matrix gram = Matrix::Zero(nu(), nu());
    for (const auto& b : blocks_) gram += b.adjoint() * b;
    return linalg::norm2(gram - linalg::identity(nu()));
  }

 private:
  std::vector<Matrix> blocks_;
};

/// Orthonormalizes a (sum rows) x nu complex Gaussian draw and slices it.
template <class Rng>
IsometryTuple random_isometry_tuple(Eigen::Index nu, const std::vector<Eigen::Index>& rows, Rng& rng) {
  Eigen::Index total = 0;
  for (auto r : rows) total += r;
  require(total >= nu, ErrorCode::dimension_mismatch, "not enough rows for an isometry");
  const Matrix v = linalg::random_column_isometry(total, nu, rng);
  std::vector<Matrix> blocks;
  Eigen::Index offset = 0;
  for (auto r : rows) {
    blocks.push_back(v.middleRows(offset, r));
    offset += r;
  }
  return IsometryTuple(std::move(blocks));
}

template <class Rng>
IsometryTuple random_isometry_tuple(Eigen::Index nu, std::size_t k, Rng& rng) {
  return random_isometry_tuple(nu, std::vector<Eigen::Index>(k, nu), rng);
}

/// sum_j Upsilon_j^* A_j Upsilon_j.
inline Matrix matrix_convex_combine(const std::vector<Matrix>& matrices, const IsometryTuple& iso) {
  require(matrices.size() == iso.size(), ErrorCode::dimension_mismatch, "one matrix per isometry block");
  require(iso.defect() <= tol::kIsometry, ErrorCode::not_an_isometry_family,
          "sum of Upsilon^* Upsilon deviates from the identity");
  Matrix out = Matrix::Zero(iso.nu(), iso.nu());
  for (std::size_t j = 0; j < matrices.size(); ++j) {
    const Matrix& u = iso.blocks()[j];
    require(matrices[j].rows() == u.rows() && matrices[j].cols() == u.rows(), ErrorCode::dimension_mismatch,
            "matrix j must be eta_j x eta_j");
    out += u.adjoint() * matrices[j] * u;
  }
  return out;
}

}  // namespace passivity
