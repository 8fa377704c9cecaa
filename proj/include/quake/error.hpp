#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace quake {

enum class ErrorCode {
  IdentityInput,
  NotElliptic,
  NotHyperbolic,
  DegenerateTriple,
  OrientationMismatch,
  NotSeparated,
  NotRankOne,
  ZeroMatrix,
  OnChartPlane,
  SingularSystem,
  DegeneratePlane,
  SeparationFailed,
  OnGraph,
  NoEllipticSolution,
  NotHyperbolicComposition,
  CrossingLeaves,
  NonPositiveWeight,
  DegenerateFlat,
  UnclassifiableFace,
  NotOnPlane,
  InconsistentRidge,
  InvalidInput,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::IdentityInput: return "IdentityInput";
    case ErrorCode::NotElliptic: return "NotElliptic";
    case ErrorCode::NotHyperbolic: return "NotHyperbolic";
    case ErrorCode::DegenerateTriple: return "DegenerateTriple";
    case ErrorCode::OrientationMismatch: return "OrientationMismatch";
    case ErrorCode::NotSeparated: return "NotSeparated";
    case ErrorCode::NotRankOne: return "NotRankOne";
    case ErrorCode::ZeroMatrix: return "ZeroMatrix";
    case ErrorCode::OnChartPlane: return "OnChartPlane";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::DegeneratePlane: return "DegeneratePlane";
    case ErrorCode::SeparationFailed: return "SeparationFailed";
    case ErrorCode::OnGraph: return "OnGraph";
    case ErrorCode::NoEllipticSolution: return "NoEllipticSolution";
    case ErrorCode::NotHyperbolicComposition: return "NotHyperbolicComposition";
    case ErrorCode::CrossingLeaves: return "CrossingLeaves";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::DegenerateFlat: return "DegenerateFlat";
    case ErrorCode::UnclassifiableFace: return "UnclassifiableFace";
    case ErrorCode::NotOnPlane: return "NotOnPlane";
    case ErrorCode::InconsistentRidge: return "InconsistentRidge";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class GeometryError : public std::runtime_error {
 public:
  GeometryError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace quake
