#pragma once

// Reference values written independently of the library code paths: the
// block formulas for Q, closed forms of the fixtures, the U matrices, and
// generators of instances with a known certificate.

#include <cmath>
#include <random>

#include "passivity/passivity.hpp"

namespace oracle {

using passivity::Complex;
using passivity::Matrix;
using passivity::Realization;

inline Matrix eye(Eigen::Index n) { return Matrix::Identity(n, n); }

inline Matrix blocks(const Matrix& tl, const Matrix& tr, const Matrix& bl, const Matrix& br) {
  Matrix out(tl.rows() + bl.rows(), tl.cols() + tr.cols());
  out.topLeftCorner(tl.rows(), tl.cols()) = tl;
  out.topRightCorner(tr.rows(), tr.cols()) = tr;
  out.bottomLeftCorner(bl.rows(), bl.cols()) = bl;
  out.bottomRightCorner(br.rows(), br.cols()) = br;
  return out;
}

inline Matrix stack_cd(const Realization& r) {
  Matrix cd(r.m(), r.n() + r.m());
  cd << r.C(), r.D();
  return cd;
}

inline Matrix q_alpha(const Realization& r, const Matrix& p) {
  const Matrix &a = r.A(), &b = r.B(), &c = r.C(), &d = r.D();
  return blocks(-p * a - a.adjoint() * p, c.adjoint() - p * b, c - b.adjoint() * p, d + d.adjoint());
}

// eta = +inf gives the plain bounded-real form.
inline Matrix q_beta(const Realization& r, const Matrix& p, double eta = INFINITY) {
  const Matrix &a = r.A(), &b = r.B();
  const double w = std::isinf(eta) ? 1.0 : (eta + 1.0) / (eta - 1.0);
  const Matrix cd = stack_cd(r);
  return blocks(-p * a - a.adjoint() * p, -p * b, -b.adjoint() * p, eye(r.m())) - w * cd.adjoint() * cd;
}

// Often quoted with [A B]^*[A B] subtracted; the P-weighted form is what the
// weight produces and agrees with that one at P = I.
inline Matrix q_gamma(const Realization& r, const Matrix& p) {
  const Matrix &a = r.A(), &b = r.B(), &c = r.C(), &d = r.D();
  Matrix ab(r.n(), r.n() + r.m());
  ab << a, b;
  return blocks(p, c.adjoint(), c, d + d.adjoint()) - ab.adjoint() * p * ab;
}

// The (2,2) block is sometimes quoted as I - D^*D; the B^*PB term belongs there
// (it is what the weight produces, and the standard discrete bounded-real form).
inline Matrix q_delta(const Realization& r, const Matrix& p) {
  const Matrix &a = r.A(), &b = r.B();
  const Matrix cd = stack_cd(r);
  return blocks(p - a.adjoint() * p * a, -a.adjoint() * p * b, -b.adjoint() * p * a, eye(r.m()) - b.adjoint() * p * b) -
         cd.adjoint() * cd;
}

// The two shortened forms above, transcribed literally.
inline Matrix q_gamma_literal(const Realization& r, const Matrix& p) {
  const Matrix &a = r.A(), &b = r.B(), &c = r.C(), &d = r.D();
  Matrix ab(r.n(), r.n() + r.m());
  ab << a, b;
  return blocks(p, c.adjoint(), c, d + d.adjoint()) - ab.adjoint() * ab;
}

inline Matrix q_delta_literal(const Realization& r, const Matrix& p) {
  const Matrix &a = r.A(), &b = r.B();
  const Matrix cd = stack_cd(r);
  return blocks(p - a.adjoint() * p * a, -a.adjoint() * p * b, -b.adjoint() * p * a, eye(r.m())) -
         cd.adjoint() * cd;
}

inline Matrix q_blocks(passivity::Family f, const Realization& r, const Matrix& p) {
  switch (f) {
    case passivity::Family::alpha: return q_alpha(r, p);
    case passivity::Family::beta: return q_beta(r, p);
    case passivity::Family::gamma: return q_gamma(r, p);
    case passivity::Family::delta: return q_delta(r, p);
  }
  return {};
}

// The 2(n+m) weights, entered block by block.
inline Matrix w_blocks(passivity::Family f, const Matrix& p, Eigen::Index m) {
  const auto n = p.rows();
  const auto k = n + m;
  Matrix w = Matrix::Zero(2 * k, 2 * k);
  const Matrix im = eye(m);
  switch (f) {
    case passivity::Family::delta:
      w.block(0, 0, n, n) = -p;
      w.block(n, n, m, m) = -im;
      w.block(k, k, n, n) = p;
      w.block(k + n, k + n, m, m) = im;
      break;
    case passivity::Family::beta:
      w.block(0, k, n, n) = -p;
      w.block(k, 0, n, n) = -p;
      w.block(n, n, m, m) = -im;
      w.block(k + n, k + n, m, m) = im;
      break;
    case passivity::Family::alpha:
      w.block(0, k, n, n) = -p;
      w.block(k, 0, n, n) = -p;
      w.block(n, k + n, m, m) = im;
      w.block(k + n, n, m, m) = im;
      break;
    case passivity::Family::gamma:
      w.block(0, 0, n, n) = -p;
      w.block(k, k, n, n) = p;
      w.block(n, k + n, m, m) = im;
      w.block(k + n, n, m, m) = im;
      break;
  }
  return w;
}

// The real symmetric orthogonal matrix taking W_delta to W_beta.
inline Matrix u1(Eigen::Index n, Eigen::Index m) {
  const auto k = n + m;
  const double s = 1.0 / std::sqrt(2.0);
  Matrix u = Matrix::Zero(2 * k, 2 * k);
  u.block(0, 0, n, n) = s * eye(n);
  u.block(0, k, n, n) = s * eye(n);
  u.block(n, n, m, m) = eye(m);
  u.block(k, 0, n, n) = s * eye(n);
  u.block(k, k, n, n) = -s * eye(n);
  u.block(k + n, k + n, m, m) = eye(m);
  return u;
}

// [0, -I; I, 0] on the (n+m) halves.
inline Matrix u2(Eigen::Index n, Eigen::Index m) {
  const auto k = n + m;
  Matrix u = Matrix::Zero(2 * k, 2 * k);
  u.block(0, k, k, k) = -eye(k);
  u.block(k, 0, k, k) = eye(k);
  return u;
}

// A signed permutation that does give W_delta V = W_alpha.
inline Matrix delta_to_alpha(Eigen::Index n, Eigen::Index m) {
  const auto k = n + m;
  Matrix v = Matrix::Zero(2 * k, 2 * k);
  v.block(0, k, n, n) = eye(n);
  v.block(n, k + n, m, m) = -eye(m);
  v.block(k, 0, n, n) = -eye(n);
  v.block(k + n, n, m, m) = eye(m);
  return v;
}

// ---- closed forms ---------------------------------------------------------

inline Complex f_closed(Complex z) { return 1.0 / (4.0 * z + 2.0); }
inline Complex g_closed(Complex z) { return 2.0 * (2.0 + z) / z; }

// The lossless family in closed form, entry by entry.
inline Matrix F1_closed(Complex z, double a, double b) {
  const double r = b / a;
  Matrix f(2, 2);
  f << r * r + 1.0, z - r,  //
      -(z + r), 1.0;
  return f / (a * a * z);
}

inline Matrix F2_closed(Complex z, double a, double b) {
  Matrix f(2, 2);
  f << a * a * z, a * (b * z - a),  //
      a * (b * z + a), (a * a + b * b) * z;
  return f / (z * z + 1.0);
}

inline Matrix F3_closed(Complex z, double a, double b) {
  const double r = b / a;
  Matrix f(2, 2);
  f << 1.0, r - z,  //
      r + z, r * r + 1.0;
  return f * (z / (1.0 + z * z));
}

// ---- random instances with a known certificate ----------------------------

template <class Rng>
Matrix gaussian(Eigen::Index r, Eigen::Index c, Rng& rng) {
  return passivity::linalg::complex_gaussian(r, c, rng);
}

template <class Rng>
Matrix random_pd(Eigen::Index n, Rng& rng, double floor = 0.2) {
  const Matrix g = gaussian(n, n, rng);
  return g * g.adjoint() / static_cast<double>(std::max<Eigen::Index>(n, 1)) + floor * eye(n);
}

// Well-conditioned coordinate change.
template <class Rng>
Matrix random_t(Eigen::Index n, Rng& rng) {
  const Matrix u = passivity::linalg::random_unitary(n, rng);
  std::uniform_real_distribution<double> s(0.5, 2.0);
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) d(i, i) = s(rng);
  return u * d * passivity::linalg::random_unitary(n, rng);
}

inline Matrix skew(const Matrix& g) { return (g - g.adjoint()) / 2.0; }

/// A realization with Q_l(I) positive definite, smallest eigenvalue about `slack`.
/// eta applies to beta only.
template <class Rng>
Realization balanced_instance(passivity::Family f, Eigen::Index n, Eigen::Index m, Rng& rng, double slack = 0.1,
                              double eta = INFINITY) {
  using passivity::Family;
  const auto k = n + m;
  switch (f) {
    case Family::alpha: {
      // Q_alpha(I) = J R + R^* J with J = diag(-I, I); R = J K gives Q = K + K^*.
      Matrix j = eye(k);
      j.topLeftCorner(n, n) *= -1.0;
      const Matrix h = random_pd(k, rng, slack) / 2.0;
      const Matrix kk = h + skew(gaussian(k, k, rng));
      return Realization::from_array(j * kk, n);
    }
    case Family::delta: {
      // Q_delta(I) = I - R^* R.
      Matrix r = gaussian(k, k, rng);
      r *= (1.0 - slack) / passivity::linalg::norm2(r);
      return Realization::from_array(r, n);
    }
    case Family::beta: {
      Matrix d = gaussian(m, m, rng);
      d *= 0.5 / passivity::linalg::norm2(d);
      const Matrix a0 = gaussian(n, n, rng), b = gaussian(n, m, rng), c = gaussian(m, n, rng);
      const Matrix schur = eye(m) - d.adjoint() * d;
      const Matrix x = -b - c.adjoint() * d;
      const Matrix need = a0 + a0.adjoint() + c.adjoint() * c + x * schur.inverse() * x.adjoint();
      const double s = n == 0 ? 0.0 : (passivity::linalg::hermitian_eigenvalues(need).maxCoeff() + 2.0 * slack) / 2.0;
      Realization base(a0 - s * eye(n), b, c, d);
      if (std::isinf(eta)) return base;
      const double w = std::sqrt((eta + 1.0) / (eta - 1.0));
      return Realization(base.A(), base.B(), base.C() / w, base.D() / w);
    }
    case Family::gamma: {
      Matrix a = gaussian(n, n, rng);
      if (n > 0) a *= 0.5 / passivity::linalg::norm2(a);
      const Matrix b = gaussian(n, m, rng), c = gaussian(m, n, rng);
      const Matrix x = c - b.adjoint() * a;
      const Matrix need = b.adjoint() * b + x * (eye(n) - a.adjoint() * a).inverse() * x.adjoint();
      const Matrix d = (need + slack * eye(m)) / 2.0 + skew(gaussian(m, m, rng));
      return Realization(a, b, c, d);
    }
  }
  return Realization::constant(eye(m));
}

/// A certified instance in random coordinates: returns R and its certificate P = T^*T.
template <class Rng>
std::pair<Realization, Matrix> certified_instance(passivity::Family f, Eigen::Index n, Eigen::Index m, Rng& rng,
                                                  double slack = 0.1, double eta = INFINITY) {
  const Realization r = balanced_instance(f, n, m, rng, slack, eta);
  const Matrix t = random_t(n, rng);
  return {passivity::change_coordinates(r, t), t.adjoint() * t};
}

}  // namespace oracle
