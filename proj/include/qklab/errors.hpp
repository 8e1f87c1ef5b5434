#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qklab {

enum class ErrorKind {
  InvalidPoint,
  FrameMismatch,
  DimensionMismatch,
  DegenerateMetric,
  OutsideCone,
  PoleOfPrepotential,
  SignatureDegenerate,
  NotAutomorphism,
  SingularMatrix,
  EmbeddingInconsistency,
  OmegaHInconsistency,
  DeformationSingular,
  OutsideOneLoopDomain,
  DegenerateSpan,
  TransversalityFailure,
  LeftDomain,
  ModeMismatch,
  PhiViolation,
  Config,
};

std::string_view to_string(ErrorKind kind);

/// Exception carrying a machine-checkable kind plus a short tag naming the
/// failing sub-expression or offending point.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
        kind_(kind),
        detail_(std::move(detail)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidPoint: return "invalid point";
    case ErrorKind::FrameMismatch: return "frame mismatch";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::DegenerateMetric: return "degenerate metric";
    case ErrorKind::OutsideCone: return "outside PSR cone";
    case ErrorKind::PoleOfPrepotential: return "pole of prepotential";
    case ErrorKind::SignatureDegenerate: return "signature degenerate at point";
    case ErrorKind::NotAutomorphism: return "not an automorphism";
    case ErrorKind::SingularMatrix: return "singular matrix";
    case ErrorKind::EmbeddingInconsistency: return "embedding inconsistency";
    case ErrorKind::OmegaHInconsistency: return "omega_H inconsistency";
    case ErrorKind::DeformationSingular: return "deformation singular at point";
    case ErrorKind::OutsideOneLoopDomain: return "outside one-loop domain";
    case ErrorKind::DegenerateSpan: return "degenerate quaternionic span";
    case ErrorKind::TransversalityFailure: return "transversality failure";
    case ErrorKind::LeftDomain: return "left domain";
    case ErrorKind::ModeMismatch: return "mode mismatch";
    case ErrorKind::PhiViolation: return "phi violation";
    case ErrorKind::Config: return "configuration error";
  }
  return "unknown";
}

}  // namespace qklab
