#pragma once

#include <stdexcept>
#include <string>

namespace nlgqe {

// Data-level failure: malformed input files, contract violations in records,
// infeasible splits. The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Checkpoint-specific failures, kept distinct so callers can tell a truncated
// file from a stale format from a vocabulary that no longer matches.
class CheckpointCorruptError : public DataError {
 public:
  explicit CheckpointCorruptError(const std::string& msg) : DataError(msg) {}
};

class CheckpointVersionError : public DataError {
 public:
  explicit CheckpointVersionError(const std::string& msg) : DataError(msg) {}
};

class VocabularyMismatchError : public DataError {
 public:
  explicit VocabularyMismatchError(const std::string& msg) : DataError(msg) {}
};

// Correlation requested on degenerate input (zero variance or n < 2).
class UndefinedCorrelationError : public DataError {
 public:
  explicit UndefinedCorrelationError(const std::string& msg) : DataError(msg) {}
};

}  // namespace nlgqe
