#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "passivity/core.hpp"
#include "passivity/linalg.hpp"
#include "passivity/qmi.hpp"
#include "passivity/realization.hpp"

namespace passivity {

/// Right half-plane C_R (boundary iR) for the continuous families, exterior of
/// the closed unit disk (boundary the unit circle) for the discrete ones.
enum class Domain { right_half_plane, exterior_disk };

constexpr std::string_view to_string(Domain d) {
  return d == Domain::right_half_plane ? "right-half-plane" : "exterior-disk";
}

constexpr Domain domain_of(Family f) { return is_continuous(f) ? Domain::right_half_plane : Domain::exterior_disk; }

struct DomainGrid {
  Domain domain = Domain::right_half_plane;
  std::vector<Complex> boundary;
  std::vector<Complex> interior;
  std::uint64_t seed = 0;

  /// Appends a user-chosen sample (e.g. a known witness), sorted into boundary
  /// or interior. Points outside the closed domain are rejected.
  void add_point(Complex z) {
    constexpr double on = 1e-12;
    if (domain == Domain::right_half_plane) {
      if (std::abs(z.real()) <= on)
        boundary.push_back(Complex(0.0, z.imag()));
      else if (z.real() > 0.0)
        interior.push_back(z);
      else
        fail(ErrorCode::domain_mismatch, "point lies in the left half-plane");
    } else {
      const double r = std::abs(z);
      if (std::abs(r - 1.0) <= on)
        boundary.push_back(z / r);
      else if (r > 1.0)
        interior.push_back(z);
      else
        fail(ErrorCode::domain_mismatch, "point lies inside the open unit disk");
    }
  }

  std::size_t size() const { return boundary.size() + interior.size(); }
};

namespace detail {
inline double radical_inverse(std::uint64_t k, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double out = 0.0;
  while (k > 0) {
    out += f * static_cast<double>(k % base);
    k /= base;
    f *= inv;
  }
  return out;
}
}  // namespace detail

/// Boundary points come from a uniform angle sweep: z = i tan(theta/2) on iR
/// (theta = 0 included, theta = pi avoided) or z = e^{i theta} on the circle.
/// Interior points are a seeded, randomly shifted Halton(2,3) sequence mapped to
/// Re z = tan(pi u / 2), Im z = tan(pi (v - 1/2)) on C_R, or to radius
/// 1 / (1 - u) and angle 2 pi v outside the disk.
inline DomainGrid make_grid(Domain domain, int n_boundary, int n_interior, std::uint64_t seed) {
  require(n_boundary >= 0 && n_interior >= 0 && n_boundary + n_interior >= 1, ErrorCode::bad_params,
          "grid needs at least one point");
  constexpr double pi = std::numbers::pi;
  DomainGrid grid;
  grid.domain = domain;
  grid.seed = seed;
  for (int k = 0; k < n_boundary; ++k) {
    if (domain == Domain::right_half_plane) {
      const int divisions = n_boundary % 2 == 0 ? n_boundary + 1 : n_boundary;
      const double theta = 2.0 * pi * (k - n_boundary / 2) / divisions;
      grid.boundary.push_back(Complex(0.0, std::tan(theta / 2.0)));
    } else {
      grid.boundary.push_back(std::polar(1.0, 2.0 * pi * k / n_boundary));
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double shift_u = unit(rng);
  const double shift_v = unit(rng);
  for (int k = 0; k < n_interior; ++k) {
    double u = std::fmod(detail::radical_inverse(k + 1, 2) + shift_u, 1.0);
    const double v = std::fmod(detail::radical_inverse(k + 1, 3) + shift_v, 1.0);
    u = std::clamp(u, 1e-9, 1.0 - 1e-9);
    if (domain == Domain::right_half_plane)
      grid.interior.push_back(Complex(std::tan(pi * u / 2.0), std::tan(pi * (v - 0.5))));
    else
      grid.interior.push_back(std::polar(1.0 / (1.0 - u), 2.0 * pi * v));
  }
  return grid;
}

enum class OracleKind {
  positive_real,
  bounded_real,
  discrete_positive_real,
  discrete_bounded_real,
  lossless_positive,
  lossless_bounded,
  hyper_bounded,
  hyper_discrete_bounded,
  anti_discrete_bounded,
};

constexpr std::string_view to_string(OracleKind k) {
  switch (k) {
    case OracleKind::positive_real: return "P";
    case OracleKind::bounded_real: return "B";
    case OracleKind::discrete_positive_real: return "DP";
    case OracleKind::discrete_bounded_real: return "DB";
    case OracleKind::lossless_positive: return "LP";
    case OracleKind::lossless_bounded: return "LB";
    case OracleKind::hyper_bounded: return "HB";
    case OracleKind::hyper_discrete_bounded: return "HDB";
    case OracleKind::anti_discrete_bounded: return "anti-DB";
  }
  return "?";
}

constexpr OracleKind oracle_kind(Family f) {
  switch (f) {
    case Family::alpha: return OracleKind::positive_real;
    case Family::beta: return OracleKind::bounded_real;
    case Family::gamma: return OracleKind::discrete_positive_real;
    case Family::delta: return OracleKind::discrete_bounded_real;
  }
  return OracleKind::positive_real;
}

enum class Verdict { pass, fail };

constexpr std::string_view to_string(Verdict v) { return v == Verdict::pass ? "pass" : "fail"; }

/// Sampled evidence. A fail names a concrete counterexample point; a pass is
/// only a verdict with margin over the sampled points.
struct MembershipReport {
  OracleKind kind;
  std::optional<double> eta;
  Verdict verdict = Verdict::pass;
  Complex worst_point{0.0, 0.0};
  double worst_margin = kInfinity;
  int samples_used = 0;
  int skipped = 0;
  double tol_oracle = tol::kOracle;

  bool passed() const { return verdict == Verdict::pass; }
};

/// sqrt((eta - 1) / (eta + 1)), equal to 1 at eta = inf.
inline double hyper_bound(double eta) {
  require(!std::isnan(eta) && eta > 1.0, ErrorCode::eta_out_of_range, "eta must lie in (1, inf]");
  return std::isinf(eta) ? 1.0 : std::sqrt((eta - 1.0) / (eta + 1.0));
}

/// The defining margin of each oracle at one value F(z); >= 0 means inside.
inline double oracle_margin(OracleKind kind, const Matrix& f, std::optional<double> eta = std::nullopt) {
  const auto m = f.rows();
  switch (kind) {
    case OracleKind::positive_real:
    case OracleKind::discrete_positive_real:
      return linalg::min_eigenvalue(f + f.adjoint());
    case OracleKind::bounded_real:
    case OracleKind::discrete_bounded_real:
      return 1.0 - linalg::norm2(f);
    case OracleKind::hyper_bounded:
    case OracleKind::hyper_discrete_bounded:
      return hyper_bound(eta.value_or(kInfinity)) - linalg::norm2(f);
    case OracleKind::anti_discrete_bounded:
      return linalg::sigma_min(f) - 1.0;
    case OracleKind::lossless_positive:
      return -linalg::norm2(f + f.adjoint());
    case OracleKind::lossless_bounded:
      return -linalg::norm2(f.adjoint() * f - linalg::identity(m));
  }
  return 0.0;
}

namespace detail {

inline void require_domain(const DomainGrid& grid, Domain expected) {
  require(grid.domain == expected, ErrorCode::domain_mismatch,
          "grid domain is " + std::string(to_string(grid.domain)) + ", expected " +
              std::string(to_string(expected)));
}

class PoleFilter {
 public:
  explicit PoleFilter(const Realization& r) {
    if (r.n() > 0) poles_ = Eigen::ComplexEigenSolver<Matrix>(r.A(), false).eigenvalues();
  }

  bool near_pole(Complex z) const {
    for (Eigen::Index i = 0; i < poles_.size(); ++i)
      if (std::abs(z - poles_(i)) <= tol::kPoleExclusion * (1.0 + std::abs(z))) return true;
    return false;
  }

 private:
  Vector poles_;
};

inline void accumulate(const Realization& r, const PoleFilter& poles, const std::vector<Complex>& points,
                       OracleKind kind, std::optional<double> eta, MembershipReport& report) {
  for (const Complex z : points) {
    if (poles.near_pole(z)) {
      ++report.skipped;
      continue;
    }
    Matrix value;
    try {
      value = evaluate(r, z).value;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::pole_at) throw;
      ++report.skipped;
      continue;
    }
    const double margin = oracle_margin(kind, value, eta);
    ++report.samples_used;
    if (margin < report.worst_margin) {
      report.worst_margin = margin;
      report.worst_point = z;
    }
  }
}

inline MembershipReport sweep(const Realization& r, const DomainGrid& grid, OracleKind kind,
                              std::optional<double> eta, double tol_oracle, bool boundary_only = false) {
  MembershipReport report{kind, eta};
  report.tol_oracle = tol_oracle;
  const PoleFilter poles(r);
  accumulate(r, poles, grid.boundary, kind, eta, report);
  if (!boundary_only) accumulate(r, poles, grid.interior, kind, eta, report);
  report.verdict = report.worst_margin >= -tol_oracle ? Verdict::pass : Verdict::fail;
  return report;
}

}  // namespace detail

inline MembershipReport hyper_bounded_oracle(const Realization& r, double eta, const DomainGrid& grid,
                                             double tol_oracle = tol::kOracle) {
  hyper_bound(eta);
  detail::require_domain(grid, Domain::right_half_plane);
  if (std::isinf(eta)) return detail::sweep(r, grid, OracleKind::bounded_real, std::nullopt, tol_oracle);
  return detail::sweep(r, grid, OracleKind::hyper_bounded, eta, tol_oracle);
}

/// Discrete analogue: sup over |z| > 1 of ||F(z)||_2 bounded by sqrt((eta-1)/(eta+1)).
inline MembershipReport hyper_discrete_bounded_oracle(const Realization& r, double eta, const DomainGrid& grid,
                                                      double tol_oracle = tol::kOracle) {
  hyper_bound(eta);
  detail::require_domain(grid, Domain::exterior_disk);
  if (std::isinf(eta))
    return detail::sweep(r, grid, OracleKind::discrete_bounded_real, std::nullopt, tol_oracle);
  return detail::sweep(r, grid, OracleKind::hyper_discrete_bounded, eta, tol_oracle);
}

/// Positive families test min eig(F + F^*) >= 0, bounded ones 1 - ||F||_2 >= 0.
inline MembershipReport membership_oracle(const Realization& r, const FamilyTag& tag, const DomainGrid& grid,
                                          double tol_oracle = tol::kOracle) {
  if (tag.hyper()) return hyper_bounded_oracle(r, *tag.eta(), grid, tol_oracle);
  detail::require_domain(grid, domain_of(tag.family()));
  return detail::sweep(r, grid, oracle_kind(tag.family()), std::nullopt, tol_oracle);
}

/// sigma_min(F(z)) > 1 on the exterior of the disk; the pass test is strict.
inline MembershipReport anti_db_oracle(const Realization& r, const DomainGrid& grid,
                                       double tol_oracle = tol::kOracle) {
  detail::require_domain(grid, Domain::exterior_disk);
  MembershipReport report = detail::sweep(r, grid, OracleKind::anti_discrete_bounded, std::nullopt, tol_oracle);
  report.verdict = report.worst_margin > tol_oracle ? Verdict::pass : Verdict::fail;
  return report;
}

enum class LosslessKind { positive, bounded };

/// Boundary test F + F^* = 0 (LP) or F^*F = I (LB) on iR, combined with the
/// parent P or B oracle over the whole grid. The worst entry is the smaller of
/// the two margins.
inline MembershipReport lossless_boundary_oracle(const Realization& r, LosslessKind kind, const DomainGrid& grid,
                                                 double tol_oracle = tol::kOracle) {
  detail::require_domain(grid, Domain::right_half_plane);
  const OracleKind ok = kind == LosslessKind::positive ? OracleKind::lossless_positive : OracleKind::lossless_bounded;
  MembershipReport report = detail::sweep(r, grid, ok, std::nullopt, tol_oracle, true);
  const FamilyTag parent(kind == LosslessKind::positive ? Family::alpha : Family::beta);
  const MembershipReport parent_report = membership_oracle(r, parent, grid, tol_oracle);
  if (parent_report.worst_margin < report.worst_margin) {
    report.worst_margin = parent_report.worst_margin;
    report.worst_point = parent_report.worst_point;
  }
  report.verdict = report.passed() && parent_report.passed() ? Verdict::pass : Verdict::fail;
  return report;
}

/// Realization of (I - F)(I + F)^{-1}.
inline Realization cayley_function(const Realization& r) {
  const Matrix id = linalg::identity(r.m());
  require(!linalg::is_singular(id + r.D()), ErrorCode::singular_i_plus_d, "I + D is singular");
  const Matrix s = (id + r.D()).partialPivLu().inverse();
  return Realization(r.A() - r.B() * s * r.C(), r.B() * s, -2.0 * s * r.C(), (id - r.D()) * s);
}

/// Realization of G(z) = F((z + 1) / (z - 1)).
///
/// The Moebius map sends the exterior of the closed unit disk onto C_R and the
/// unit circle onto iR, so P maps into DP and B into DB under the exterior-disk
/// convention used by the oracles. With s = (z+1)/(z-1):
///   A' = -(I - A)^{-1}(I + A), B' = (I - A)^{-1} B,
///   C' = -2 C (I - A)^{-1},    D' = D + C (I - A)^{-1} B = F(1).
inline Realization bilinear_substitute(const Realization& r) {
  if (r.n() == 0) return r;
  const Matrix id = linalg::identity(r.n());
  require(!linalg::is_singular(id - r.A()), ErrorCode::singular_i_minus_a, "I - A is singular");
  const auto lu = (id - r.A()).partialPivLu();
  const Matrix inv = lu.inverse();
  return Realization(-inv * (id + r.A()), inv * r.B(), -2.0 * r.C() * inv, r.D() + r.C() * inv * r.B());
}

}  // namespace passivity
