#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace topicena {

enum class ErrorCode {
  EmptyDocument,
  MissingScore,
  ScoreOutOfRange,
  ParseError,
  DuplicateDocId,
  DuplicateKey,
  InvalidArgument,
  UnknownUtterance,
  GroupConflict,
  EmptyGroup,
  RankDeficient,
  DegenerateMeans,
  DimensionMismatch,
  NodeSetMismatch,
  AllUnitsEmpty,
  EmptySample,
  MissingLayout,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. Carries a machine-checkable code, an
/// optional 1-based input line, and the pipeline stage that raised it (set by
/// the orchestrator when it propagates module errors).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }
  const std::string& stage() const noexcept { return stage_; }
  const std::string& detail() const noexcept { return detail_; }

  /// Copy of this error attributed to `stage`.
  Error with_stage(std::string stage) const;

 private:
  static std::string compose(ErrorCode code, const std::string& message,
                             std::optional<std::size_t> line,
                             const std::string& stage);

  ErrorCode code_;
  std::optional<std::size_t> line_;
  std::string detail_;
  std::string stage_;
};

}  // namespace topicena
