#pragma once

#include <string>
#include <utility>
#include <vector>

#include "passivity/cones.hpp"
#include "passivity/core.hpp"
#include "passivity/linalg.hpp"
#include "passivity/qmi.hpp"
#include "passivity/realization.hpp"

namespace passivity {

/// Block-diagonal isometries diag(Upsilon_{j,n}, Upsilon_{j,m}), j = 1..k, with
/// sum Upsilon_{j,n}^* Upsilon_{j,n} = I_n and the same for the m tier.
struct IsometryFamily {
  std::vector<Matrix> state_blocks;
  std::vector<Matrix> io_blocks;

  std::size_t k() const { return state_blocks.size(); }
};

struct IsometryCheck {
  bool ok;
  double defect_n;
  double defect_m;
};

inline IsometryCheck validate_isometry(const IsometryFamily& fam, Eigen::Index n, Eigen::Index m) {
  require(!fam.io_blocks.empty() && fam.state_blocks.size() == fam.io_blocks.size(),
          ErrorCode::dimension_mismatch, "need one state and one io block per term");
  Matrix gram_n = Matrix::Zero(n, n);
  Matrix gram_m = Matrix::Zero(m, m);
  for (std::size_t j = 0; j < fam.k(); ++j) {
    const Matrix& un = fam.state_blocks[j];
    const Matrix& um = fam.io_blocks[j];
    require(un.rows() == n && un.cols() == n, ErrorCode::dimension_mismatch, "state block must be n x n");
    require(um.rows() == m && um.cols() == m, ErrorCode::dimension_mismatch, "io block must be m x m");
    gram_n += un.adjoint() * un;
    gram_m += um.adjoint() * um;
  }
  const double dn = linalg::norm2(gram_n - linalg::identity(n));
  const double dm = linalg::norm2(gram_m - linalg::identity(m));
  return {dn <= tol::kIsometry && dm <= tol::kIsometry, dn, dm};
}

/// Dimensions are read off the first block of each tier.
inline IsometryCheck validate_isometry(const IsometryFamily& fam) {
  require(!fam.io_blocks.empty() && !fam.state_blocks.empty(), ErrorCode::dimension_mismatch,
          "empty isometry family");
  return validate_isometry(fam, fam.state_blocks.front().rows(), fam.io_blocks.front().rows());
}

/// Independent random tiers for n and m, each sliced from one orthonormalized draw.
template <class Rng>
IsometryFamily random_isometry_family(Eigen::Index n, Eigen::Index m, std::size_t k, Rng& rng) {
  IsometryFamily fam;
  if (n > 0) {
    fam.state_blocks = random_isometry_tuple(n, k, rng).blocks();
  } else {
    fam.state_blocks.assign(k, Matrix(0, 0));
  }
  fam.io_blocks = random_isometry_tuple(m, k, rng).blocks();
  return fam;
}

/// sum_j diag(Upsilon_{j,n}, Upsilon_{j,m})^* R_j diag(Upsilon_{j,n}, Upsilon_{j,m}).
inline Realization combine_realizations(const std::vector<Realization>& rs, const IsometryFamily& fam) {
  require(!rs.empty() && rs.size() == fam.k(), ErrorCode::dimension_mismatch, "one realization per term");
  const auto n = rs.front().n();
  const auto m = rs.front().m();
  for (const auto& r : rs)
    require(r.n() == n && r.m() == m, ErrorCode::dimension_mismatch, "realizations must share (n, m)");
  const IsometryCheck check = validate_isometry(fam, n, m);
  require(check.ok, ErrorCode::not_an_isometry_family,
          "tier defects " + std::to_string(check.defect_n) + ", " + std::to_string(check.defect_m));
  Matrix a = Matrix::Zero(n, n), b = Matrix::Zero(n, m), c = Matrix::Zero(m, n), d = Matrix::Zero(m, m);
  for (std::size_t j = 0; j < rs.size(); ++j) {
    const Matrix& un = fam.state_blocks[j];
    const Matrix& um = fam.io_blocks[j];
    a += un.adjoint() * rs[j].A() * un;
    b += un.adjoint() * rs[j].B() * um;
    c += um.adjoint() * rs[j].C() * un;
    d += um.adjoint() * rs[j].D() * um;
  }
  return Realization(std::move(a), std::move(b), std::move(c), std::move(d));
}

struct PreservationResult {
  Realization combined;
  Certificate certificate;
  std::vector<Certificate> per_input;
  // Inputs after balancing; equal to the originals when they were already balanced.
  std::vector<Realization> balanced_inputs;
};

namespace detail {
inline PreservationResult combine_balanced(std::vector<Realization> balanced, std::vector<Certificate> per_input,
                                           const IsometryFamily& fam, const FamilyTag& tag) {
  Realization combined = combine_realizations(balanced, fam);
  Certificate cert = verify_kyp(combined, linalg::identity(combined.n()), tag);
  return {std::move(combined), std::move(cert), std::move(per_input), std::move(balanced)};
}
}  // namespace detail

/// Certifies each input against the balanced weight (P = I), then certifies
/// their combination. Throws InputNotCertified naming the first failing input.
inline PreservationResult verify_preservation(const std::vector<Realization>& rs, const IsometryFamily& fam,
                                              const FamilyTag& tag) {
  std::vector<Certificate> per_input;
  for (std::size_t j = 0; j < rs.size(); ++j) {
    Certificate c = verify_kyp(rs[j], linalg::identity(rs[j].n()), tag);
    require(c.verified(), ErrorCode::input_not_certified,
            "input " + std::to_string(j) + " fails the balanced QMI (min eig Q = " + std::to_string(c.min_eig_Q) +
                ")");
    per_input.push_back(std::move(c));
  }
  return detail::combine_balanced(rs, std::move(per_input), fam, tag);
}

/// As above, but each input arrives with its own verified certificate; inputs
/// with P != I are balanced first.
inline PreservationResult verify_preservation(const std::vector<Realization>& rs,
                                              const std::vector<Certificate>& certs, const IsometryFamily& fam,
                                              const FamilyTag& tag) {
  require(rs.size() == certs.size(), ErrorCode::dimension_mismatch, "one certificate per input");
  std::vector<Realization> balanced;
  std::vector<Certificate> per_input;
  for (std::size_t j = 0; j < rs.size(); ++j) {
    require(certs[j].verified(), ErrorCode::input_not_certified,
            "input " + std::to_string(j) + " carries an unverified certificate");
    auto [rb, cb] = balance(rs[j], certs[j]);
    require(cb.verified(), ErrorCode::input_not_certified,
            "input " + std::to_string(j) + " fails the balanced QMI after balancing");
    balanced.push_back(std::move(rb));
    per_input.push_back(std::move(cb));
  }
  return detail::combine_balanced(std::move(balanced), std::move(per_input), fam, tag);
}

}  // namespace passivity
