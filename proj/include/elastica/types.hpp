#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace elastica {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VecX = Vec<double>;
using MatX = Mat<double>;

/// Node-per-row storage for curves and fields along curves.
using NodeMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ErrorCode {
  OutOfChartDomain,
  MismatchedBasePoints,
  BeyondInjectivityRadius,
  CurveTooCoarse,
  DegenerateCurve,
  EmptyWindow,
  MissingReference,
  NonFiniteGradient,
  SeedFailure,
  LineSearchStalled,
  GeodesicDegenerate,
  FieldCurveMismatch,
  NoChainFound,
  InvalidArgument,
  ParseError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OutOfChartDomain: return "OutOfChartDomain";
    case ErrorCode::MismatchedBasePoints: return "MismatchedBasePoints";
    case ErrorCode::BeyondInjectivityRadius: return "BeyondInjectivityRadius";
    case ErrorCode::CurveTooCoarse: return "CurveTooCoarse";
    case ErrorCode::DegenerateCurve: return "DegenerateCurve";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::MissingReference: return "MissingReference";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::SeedFailure: return "SeedFailure";
    case ErrorCode::LineSearchStalled: return "LineSearchStalled";
    case ErrorCode::GeodesicDegenerate: return "GeodesicDegenerate";
    case ErrorCode::FieldCurveMismatch: return "FieldCurveMismatch";
    case ErrorCode::NoChainFound: return "NoChainFound";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace elastica
