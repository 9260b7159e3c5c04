#include "heisenbundle/errors.hpp"

namespace hb {

const char* to_string(ErrorKind k) {
  switch (k) {
  case ErrorKind::SingularMatrix: return "SingularMatrix";
  case ErrorKind::DimensionMismatch: return "DimensionMismatch";
  case ErrorKind::AlgebraMismatch: return "AlgebraMismatch";
  case ErrorKind::ShapeMismatch: return "ShapeMismatch";
  case ErrorKind::NoConvergence: return "NoConvergence";
  case ErrorKind::NotPositive: return "NotPositive";
  case ErrorKind::BoxTooSmall: return "BoxTooSmall";
  case ErrorKind::QuadratureUnderResolved: return "QuadratureUnderResolved";
  case ErrorKind::GridMismatch: return "GridMismatch";
  case ErrorKind::DecayNotCertified: return "DecayNotCertified";
  case ErrorKind::BaseMismatch: return "BaseMismatch";
  case ErrorKind::NotAFrame: return "NotAFrame";
  case ErrorKind::DegenerateData: return "DegenerateData";
  case ErrorKind::NotSelfAdjoint: return "NotSelfAdjoint";
  case ErrorKind::InvalidArgument: return "InvalidArgument";
  case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

} // namespace hb
