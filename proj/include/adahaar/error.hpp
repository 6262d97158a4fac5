#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adahaar {

enum class ErrorKind {
  MalformedPartition,
  NotNested,
  GapOrOverlap,
  DepthMismatch,
  BadWeights,
  BadPair,
  PartitionMismatch,
  IndexMismatch,
  DegenerateSpan,
  BadClustering,
  ClustererStalled,
  ZeroDegreeCluster,
  UnknownVertex,
  ParseError,
  ValidationError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedPartition: return "MalformedPartition";
    case ErrorKind::NotNested: return "NotNested";
    case ErrorKind::GapOrOverlap: return "GapOrOverlap";
    case ErrorKind::DepthMismatch: return "DepthMismatch";
    case ErrorKind::BadWeights: return "BadWeights";
    case ErrorKind::BadPair: return "BadPair";
    case ErrorKind::PartitionMismatch: return "PartitionMismatch";
    case ErrorKind::IndexMismatch: return "IndexMismatch";
    case ErrorKind::DegenerateSpan: return "DegenerateSpan";
    case ErrorKind::BadClustering: return "BadClustering";
    case ErrorKind::ClustererStalled: return "ClustererStalled";
    case ErrorKind::ZeroDegreeCluster: return "ZeroDegreeCluster";
    case ErrorKind::UnknownVertex: return "UnknownVertex";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace adahaar
