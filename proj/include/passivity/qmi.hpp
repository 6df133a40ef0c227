#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "passivity/core.hpp"
#include "passivity/linalg.hpp"
#include "passivity/realization.hpp"

namespace passivity {

/// The four passivity families: positive-real (alpha), bounded-real (beta),
/// discrete-time positive-real (gamma) and discrete-time bounded-real (delta).
enum class Family { alpha, beta, gamma, delta };

constexpr std::string_view to_string(Family f) {
  switch (f) {
    case Family::alpha: return "alpha";
    case Family::beta: return "beta";
    case Family::gamma: return "gamma";
    case Family::delta: return "delta";
  }
  return "?";
}

constexpr bool is_continuous(Family f) { return f == Family::alpha || f == Family::beta; }
constexpr bool is_positive_type(Family f) { return f == Family::alpha || f == Family::gamma; }

/// Family selector. eta is only meaningful for beta, where a finite eta > 1
/// selects the eta-hyper-bounded weight; eta = +inf is the plain beta weight.
class FamilyTag {
 public:
  FamilyTag(Family family, std::optional<double> eta = std::nullopt) : family_(family), eta_(eta) {
    if (eta_) {
      require(family_ == Family::beta, ErrorCode::eta_out_of_range, "eta is only defined for the beta family");
      require(!std::isnan(*eta_) && *eta_ > 1.0, ErrorCode::eta_out_of_range, "eta must lie in (1, inf]");
    }
  }

  Family family() const { return family_; }
  std::optional<double> eta() const { return eta_; }
  bool hyper() const { return eta_.has_value() && std::isfinite(*eta_); }

  /// Coefficient of the output-row block of the beta weight: -1, or (1+eta)/(1-eta).
  double output_weight() const { return hyper() ? (1.0 + *eta_) / (1.0 - *eta_) : -1.0; }

  friend bool operator==(const FamilyTag&, const FamilyTag&) = default;

 private:
  Family family_;
  std::optional<double> eta_;
};

struct WMatrix {
  FamilyTag family;
  Eigen::Index n;
  Eigen::Index m;
  Matrix entries;
  Matrix p_used;
};

namespace detail {

// Block offsets inside the 2(n+m) weight: [state | output | state | input].
inline Matrix weight_entries(const FamilyTag& tag, const Matrix& p, Eigen::Index m) {
  const auto n = p.rows();
  const auto size = 2 * (n + m);
  const Eigen::Index s0 = 0, o0 = n, s1 = n + m, i1 = 2 * n + m;
  const Matrix im = linalg::identity(m);
  Matrix w = Matrix::Zero(size, size);
  switch (tag.family()) {
    case Family::delta:
      w.block(s0, s0, n, n) = -p;
      w.block(o0, o0, m, m) = -im;
      w.block(s1, s1, n, n) = p;
      w.block(i1, i1, m, m) = im;
      break;
    case Family::beta:
      w.block(s0, s1, n, n) = -p;
      w.block(s1, s0, n, n) = -p;
      w.block(o0, o0, m, m) = tag.output_weight() * im;
      w.block(i1, i1, m, m) = im;
      break;
    case Family::alpha:
      w.block(s0, s1, n, n) = -p;
      w.block(s1, s0, n, n) = -p;
      w.block(o0, i1, m, m) = im;
      w.block(i1, o0, m, m) = im;
      break;
    case Family::gamma:
      w.block(s0, s0, n, n) = -p;
      w.block(s1, s1, n, n) = p;
      w.block(o0, i1, m, m) = im;
      w.block(i1, o0, m, m) = im;
      break;
  }
  return w;
}

inline void require_square(const Matrix& p, Eigen::Index n, const char* what) {
  require(p.rows() == n && p.cols() == n, ErrorCode::dimension_mismatch, what);
}

}  // namespace detail

/// The structured weight W_l(P) for family l.
inline WMatrix build_W(const FamilyTag& tag, const Matrix& p, Eigen::Index m) {
  require(p.rows() == p.cols(), ErrorCode::dimension_mismatch, "P must be square");
  require(m > 0, ErrorCode::dimension_mismatch, "m must be positive");
  require(linalg::is_hermitian(p), ErrorCode::not_positive_definite, "P must be Hermitian");
  require(linalg::min_eigenvalue(p) > 0.0, ErrorCode::not_positive_definite, "P must be positive definite");
  return {tag, p.rows(), m, detail::weight_entries(tag, p, m), p};
}

/// The balanced weight, i.e. build_W with P = I_n.
inline WMatrix build_W_balanced(const FamilyTag& tag, Eigen::Index n, Eigen::Index m) {
  return build_W(tag, linalg::identity(n), m);
}

/// [R; I]^* W [R; I] for an explicit 2(n+m) weight.
inline Matrix assemble_Q(const Realization& r, const Matrix& w) {
  const auto k = r.n() + r.m();
  require(w.rows() == 2 * k && w.cols() == 2 * k, ErrorCode::dimension_mismatch,
          "weight does not match realization dimensions");
  Matrix stacked(2 * k, k);
  stacked.topRows(k) = r.array();
  stacked.bottomRows(k) = linalg::identity(k);
  return linalg::hermitian_part(stacked.adjoint() * w * stacked);
}

inline Matrix assemble_Q(const Realization& r, const WMatrix& w) {
  require(w.n == r.n() && w.m == r.m(), ErrorCode::dimension_mismatch, "W dimensions do not match R");
  return assemble_Q(r, w.entries);
}

enum class CertificateStatus { verified, refuted, inconclusive };

constexpr std::string_view to_string(CertificateStatus s) {
  switch (s) {
    case CertificateStatus::verified: return "verified";
    case CertificateStatus::refuted: return "refuted";
    case CertificateStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

/// A candidate P together with the resulting Q = [R; I]^* W_l(P) [R; I].
/// `refuted` refers to this P only, never to membership of the function.
struct Certificate {
  FamilyTag family;
  Matrix P;
  Matrix Q;
  double min_eig_Q;
  double min_eig_P;
  double tol_psd;
  CertificateStatus status;

  bool verified() const { return status == CertificateStatus::verified; }
};

/// Checks the QMI for the given P. tol_psd defaults to 1e-9 (1 + ||Q||_2).
inline Certificate verify_kyp(const Realization& r, const Matrix& p, const FamilyTag& tag,
                              std::optional<double> tol_psd = std::nullopt) {
  detail::require_square(p, r.n(), "P must be n x n");
  const Matrix ph = linalg::hermitian_part(p);
  const Matrix q = assemble_Q(r, detail::weight_entries(tag, ph, r.m()));
  const double min_q = linalg::min_eigenvalue(q);
  const double min_p = linalg::min_eigenvalue(ph);
  const double tol = tol_psd.value_or(tol::psd(linalg::norm2(q)));
  CertificateStatus status = CertificateStatus::inconclusive;
  if (!(min_p > 0.0) || min_q < -1e3 * tol)
    status = CertificateStatus::refuted;
  else if (min_q >= -tol)
    status = CertificateStatus::verified;
  return {tag, ph, q, min_q, min_p, tol, status};
}

struct SolveOptions {
  int max_iter = 5000;
  std::optional<double> tol_psd;
  // Lower bound enforced on eig(P); defaults to 1e-6 ||R||_2.
  std::optional<double> margin;
  // Every polish_every projection sweeps a damped semismooth Newton polish is tried.
  int polish_every = 50;
  int polish_steps = 40;
};

struct SolveResult {
  std::optional<Certificate> certificate;
  int iterations = 0;
  // Smallest infeasibility seen: max(0, -min eig Q) + max(0, margin - min eig P).
  double best_residual = kInfinity;

  bool found() const { return certificate.has_value(); }
};

namespace detail {

// Q(P) = offset + sum_k p_k * column_k, all in Hermitian coordinates.
struct AffineQmi {
  linalg::HermitianCoordinates p_coords;
  linalg::HermitianCoordinates q_coords;
  RealVector offset;
  RealMatrix jacobian;

  AffineQmi(const Realization& r, const FamilyTag& tag)
      : p_coords(r.n()), q_coords(r.n() + r.m()) {
    const Matrix zero = Matrix::Zero(r.n(), r.n());
    offset = q_coords.to_vector(assemble_Q(r, weight_entries(tag, zero, r.m())));
    jacobian.resize(q_coords.dimension(), p_coords.dimension());
    for (Eigen::Index k = 0; k < p_coords.dimension(); ++k) {
      const Matrix qk = assemble_Q(r, weight_entries(tag, p_coords.basis(k), r.m()));
      jacobian.col(k) = q_coords.to_vector(qk) - offset;
    }
  }

  RealVector q_of(const RealVector& p) const { return offset + jacobian * p; }
};

// Derivative of X -> min(X - floor I, 0) at X applied to the Hermitian direction H.
inline Matrix negative_part_derivative(const Eigen::SelfAdjointEigenSolver<Matrix>& es, double floor,
                                       const Matrix& h) {
  const RealVector w = es.eigenvalues().array() - floor;
  const Matrix& v = es.eigenvectors();
  Matrix hv = v.adjoint() * h * v;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    for (Eigen::Index j = 0; j < w.size(); ++j) {
      const double ni = std::min(w(i), 0.0);
      const double nj = std::min(w(j), 0.0);
      double g;
      if (std::abs(w(i) - w(j)) <= 1e-14 * (1.0 + std::abs(w(i))))
        g = w(i) < 0.0 ? 1.0 : 0.0;
      else
        g = (ni - nj) / (w(i) - w(j));
      hv(i, j) *= g;
    }
  }
  return v * hv * v.adjoint();
}

inline Matrix negative_part(const Eigen::SelfAdjointEigenSolver<Matrix>& es, double floor) {
  const RealVector w = (es.eigenvalues().array() - floor).min(0.0);
  return es.eigenvectors() * w.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Searches for P with P >= margin I and Q_l(P) >= 0.
///
/// The main loop is Dykstra's alternating projection between the PSD pair
/// {P >= margin I, Q >= 0} and the affine graph {Q = Q_l(P)}. Feasible sets that
/// touch the PSD boundary tangentially (lossless-like instances, where the
/// feasible P is isolated) make plain projections sublinear, so the loop
/// periodically tries a damped semismooth Newton polish of
/// f(P) = 1/2 ||min(Q_l(P), 0)||^2 + 1/2 ||min(P - margin, 0)||^2.
/// Newton steps count towards max_iter. An empty result is not a proof of
/// non-membership.
inline SolveResult solve_P(const Realization& r, const FamilyTag& tag, const SolveOptions& opts = {}) {
  SolveResult result;
  const auto n = r.n();
  if (n == 0) {
    Certificate c = verify_kyp(r, Matrix(0, 0), tag, opts.tol_psd);
    result.best_residual = std::max(0.0, -c.min_eig_Q);
    if (c.verified()) result.certificate = std::move(c);
    return result;
  }

  const double margin = opts.margin.value_or(std::max(1e-6 * linalg::norm2(r.array()), 1e-12));
  const detail::AffineQmi qmi(r, tag);
  const auto& pc = qmi.p_coords;
  const auto& qc = qmi.q_coords;
  const RealMatrix& jac = qmi.jacobian;
  const Eigen::LLT<RealMatrix> normal(RealMatrix::Identity(pc.dimension(), pc.dimension()) +
                                      jac.transpose() * jac);

  auto try_certificate = [&](const RealVector& p) -> std::optional<Certificate> {
    Certificate c = verify_kyp(r, pc.to_matrix(p), tag, opts.tol_psd);
    result.best_residual =
        std::min(result.best_residual, std::max(0.0, -c.min_eig_Q) + std::max(0.0, margin - c.min_eig_P));
    if (c.verified()) return c;
    return std::nullopt;
  };

  // f and its gradient for the polish phase.
  auto objective = [&](const RealVector& p, RealVector* grad) {
    const Eigen::SelfAdjointEigenSolver<Matrix> eq(qc.to_matrix(qmi.q_of(p)));
    const Eigen::SelfAdjointEigenSolver<Matrix> ep(pc.to_matrix(p));
    const RealVector nq = qc.to_vector(detail::negative_part(eq, 0.0));
    const RealVector np = pc.to_vector(detail::negative_part(ep, margin));
    if (grad) *grad = jac.transpose() * nq + np;
    return 0.5 * (nq.squaredNorm() + np.squaredNorm());
  };

  int used = 0;
  auto polish = [&](RealVector p) -> std::optional<Certificate> {
    double lambda = 1e-4;
    for (int step = 0; step < opts.polish_steps && used < opts.max_iter; ++step, ++used) {
      if (auto c = try_certificate(p)) return c;
      RealVector grad;
      const double f = objective(p, &grad);
      const Eigen::SelfAdjointEigenSolver<Matrix> eq(qc.to_matrix(qmi.q_of(p)));
      const Eigen::SelfAdjointEigenSolver<Matrix> ep(pc.to_matrix(p));
      RealMatrix hess(pc.dimension(), pc.dimension());
      for (Eigen::Index k = 0; k < pc.dimension(); ++k) {
        const Matrix dq = detail::negative_part_derivative(eq, 0.0, qc.to_matrix(jac.col(k)));
        const Matrix dp = detail::negative_part_derivative(ep, margin, pc.basis(k));
        hess.col(k) = jac.transpose() * qc.to_vector(dq) + pc.to_vector(dp);
      }
      lambda = std::clamp(std::min(lambda, grad.norm()), 1e-12, 1e-4);
      bool improved = false;
      for (int attempt = 0; attempt < 8; ++attempt) {
        const RealMatrix damped = hess + lambda * RealMatrix::Identity(hess.rows(), hess.cols());
        const RealVector trial = p + damped.ldlt().solve(-grad);
        if (trial.allFinite() && objective(trial, nullptr) < f) {
          p = trial;
          improved = true;
          break;
        }
        lambda *= 10.0;
      }
      if (!improved) break;
    }
    return try_certificate(p);
  };

  RealVector p = pc.to_vector(linalg::identity(n));
  RealVector q = qmi.q_of(p);
  RealVector inc_p = RealVector::Zero(p.size());
  RealVector inc_q = RealVector::Zero(q.size());

  while (used < opts.max_iter) {
    if (auto c = try_certificate(p)) {
      result.certificate = std::move(c);
      break;
    }
    // Cone step with Dykstra increments; the affine step needs none.
    const RealVector yp = pc.to_vector(linalg::clip_below(pc.to_matrix(p + inc_p), margin));
    const RealVector yq = qc.to_vector(linalg::clip_below(qc.to_matrix(q + inc_q), 0.0));
    inc_p = p + inc_p - yp;
    inc_q = q + inc_q - yq;
    const RealVector next = normal.solve(yp + jac.transpose() * (yq - qmi.offset));
    const double change = (next - p).norm();
    const double scale = std::max(1.0, next.norm());
    p = next;
    q = qmi.q_of(p);
    ++used;

    const bool stalled = change < 1e-10 * scale;
    if (stalled || (opts.polish_every > 0 && used % opts.polish_every == 0)) {
      if (auto c = polish(p)) {
        result.certificate = std::move(c);
        break;
      }
      if (stalled) break;
    }
  }
  result.iterations = used;
  return result;
}

/// Moves a verified certificate to P = I via T = P^{-1/2}.
inline std::pair<Realization, Certificate> balance(const Realization& r, const Certificate& cert) {
  require(cert.verified(), ErrorCode::certificate_not_verified, "balance needs a verified certificate");
  detail::require_square(cert.P, r.n(), "certificate P does not match R");
  require(cert.min_eig_P >= 1e-10, ErrorCode::not_positive_definite, "P is too close to singular to balance");
  const Matrix t = linalg::inverse_sqrt_psd(cert.P, 1e-10);
  Realization balanced = change_coordinates(r, t);
  Certificate c = verify_kyp(balanced, linalg::identity(r.n()), cert.family);
  return {std::move(balanced), std::move(c)};
}

/// True iff ||Q_l(P)||_2 <= tol, the lossless condition Q = 0 (alpha or beta only).
inline bool check_lossless(const Realization& r, const Matrix& p, const FamilyTag& tag, double tol) {
  require(tag.family() == Family::alpha || tag.family() == Family::beta, ErrorCode::bad_family,
          "losslessness is defined for alpha and beta");
  detail::require_square(p, r.n(), "P must be n x n");
  require(r.n() == 0 || linalg::min_eigenvalue(p) > 0.0, ErrorCode::not_positive_definite,
          "P must be positive definite");
  return linalg::norm2(assemble_Q(r, detail::weight_entries(tag, linalg::hermitian_part(p), r.m()))) <= tol;
}

}  // namespace passivity
