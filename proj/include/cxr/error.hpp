#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cxr {

enum class ErrorKind {
  FileNotFound,
  MalformedImage,
  UnsupportedBitDepth,
  EmptyMask,
  DimensionMismatch,
  InvalidPolicy,
  MalformedRow,
  DuplicateId,
  TooFewRecords,
  SingleClassDataset,
  TooFewMasks,
  InvalidConfig,
  ShapeMismatch,
  LengthMismatch,
  NonFiniteGradient,
  EmptyDataset,
  NoRuns,
  EmptyIntersection,
  TooFewPoints,
  DegenerateWindow,
  EmptySeries,
  GridMismatch,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cxr
