#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace passivity {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

enum class ErrorCode {
  dimension_mismatch,
  non_finite,
  pole_at,
  singular_t,
  singular_array,
  singular_d,
  not_positive_definite,
  eta_out_of_range,
  certificate_not_verified,
  bad_family,
  minus_one_in_spectrum,
  not_an_isometry_family,
  domain_mismatch,
  singular_i_plus_d,
  singular_i_minus_a,
  bad_params,
  input_not_certified,
  parse_error,
  shape_error,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::non_finite: return "NonFinite";
    case ErrorCode::pole_at: return "PoleAt";
    case ErrorCode::singular_t: return "SingularT";
    case ErrorCode::singular_array: return "SingularArray";
    case ErrorCode::singular_d: return "SingularD";
    case ErrorCode::not_positive_definite: return "NotPositiveDefinite";
    case ErrorCode::eta_out_of_range: return "EtaOutOfRange";
    case ErrorCode::certificate_not_verified: return "CertificateNotVerified";
    case ErrorCode::bad_family: return "BadFamily";
    case ErrorCode::minus_one_in_spectrum: return "MinusOneInSpectrum";
    case ErrorCode::not_an_isometry_family: return "NotAnIsometryFamily";
    case ErrorCode::domain_mismatch: return "DomainMismatch";
    case ErrorCode::singular_i_plus_d: return "SingularIPlusD";
    case ErrorCode::singular_i_minus_a: return "SingularIMinusA";
    case ErrorCode::bad_params: return "BadParams";
    case ErrorCode::input_not_certified: return "InputNotCertified";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::shape_error: return "ShapeError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

/// Numerical thresholds shared across modules.
namespace tol {
// zI - A (and friends) is singular when sigma_min <= kSingular * sigma_max.
inline constexpr double kSingular = 1e-12;
// Largest condition number accepted for coordinate changes.
inline constexpr double kCondMax = 1e12;
// Relative SVD cut-off for controllability/observability ranks.
inline constexpr double kRank = 1e-8;
// Hermiticity check, relative to the matrix norm.
inline constexpr double kHermitian = 1e-12;
// Sample points closer than kPoleExclusion * (1 + |z|) to an eigenvalue of A are skipped.
inline constexpr double kPoleExclusion = 1e-6;
// Absolute tolerance on oracle margins.
inline constexpr double kOracle = 1e-8;
// Isometry families must reproduce the identity to this accuracy.
inline constexpr double kIsometry = 1e-8;
// Relative PSD tolerance: min eig >= -kPsdRelative * (1 + ||Q||_2).
inline constexpr double kPsdRelative = 1e-9;

inline double psd(double norm) { return kPsdRelative * (1.0 + norm); }
}  // namespace tol

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace passivity
