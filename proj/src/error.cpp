#include "cxr/error.hpp"

namespace cxr {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::MalformedImage: return "MalformedImage";
    case ErrorKind::UnsupportedBitDepth: return "UnsupportedBitDepth";
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidPolicy: return "InvalidPolicy";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::TooFewRecords: return "TooFewRecords";
    case ErrorKind::SingleClassDataset: return "SingleClassDataset";
    case ErrorKind::TooFewMasks: return "TooFewMasks";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::NoRuns: return "NoRuns";
    case ErrorKind::EmptyIntersection: return "EmptyIntersection";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::DegenerateWindow: return "DegenerateWindow";
    case ErrorKind::EmptySeries: return "EmptySeries";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace cxr
