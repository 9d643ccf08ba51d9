#pragma once

// Shared vocabulary: dense vector/matrix aliases, tolerances and the error type.

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bsa {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Default feasibility / equality tolerance used throughout.
inline constexpr double kDefaultTol = 1e-9;

enum class ErrorCode {
  DimensionMismatch,
  NotSymmetric,
  DegenerateBall,
  BadExponent,
  ZeroFunctional,
  UnsupportedDimension,
  NotPolytope,
  NumericalBreakdown,
  UnsupportedNormPair,
  IndexError,
  DuplicatePoint,
  TooSmall,
  NotInvertible,
  NormBoundViolated,
  UseSummingFamily,
  DegenerateStart,
  NotStrictlyConvexEvidence,
  NotBiorthogonal,
  InvalidInput,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::DegenerateBall: return "DegenerateBall";
    case ErrorCode::BadExponent: return "BadExponent";
    case ErrorCode::ZeroFunctional: return "ZeroFunctional";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::NotPolytope: return "NotPolytope";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::UnsupportedNormPair: return "UnsupportedNormPair";
    case ErrorCode::IndexError: return "IndexError";
    case ErrorCode::DuplicatePoint: return "DuplicatePoint";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::NormBoundViolated: return "NormBoundViolated";
    case ErrorCode::UseSummingFamily: return "UseSummingFamily";
    case ErrorCode::DegenerateStart: return "DegenerateStart";
    case ErrorCode::NotStrictlyConvexEvidence: return "NotStrictlyConvexEvidence";
    case ErrorCode::NotBiorthogonal: return "NotBiorthogonal";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require_same_dim(Eigen::Index a, Eigen::Index b, const char* where) {
  if (a != b) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(where) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

inline Vector make_vector(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

inline Vector unit_vector(Eigen::Index dim, Eigen::Index k) {
  Vector e = Vector::Zero(dim);
  e(k) = 1.0;
  return e;
}

inline std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline Vector from_std(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace bsa
