#include "topicena/error.hpp"

namespace topicena {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::MissingScore: return "MissingScore";
    case ErrorCode::ScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateDocId: return "DuplicateDocId";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownUtterance: return "UnknownUtterance";
    case ErrorCode::GroupConflict: return "GroupConflict";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DegenerateMeans: return "DegenerateMeans";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NodeSetMismatch: return "NodeSetMismatch";
    case ErrorCode::AllUnitsEmpty: return "AllUnitsEmpty";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::MissingLayout: return "MissingLayout";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> line)
    : std::runtime_error(compose(code, message, line, {})),
      code_(code),
      line_(line),
      detail_(message) {}

Error Error::with_stage(std::string stage) const {
  Error copy(code_, detail_, line_);
  static_cast<std::runtime_error&>(copy) =
      std::runtime_error(compose(code_, detail_, line_, stage));
  copy.stage_ = std::move(stage);
  return copy;
}

std::string Error::compose(ErrorCode code, const std::string& message,
                           std::optional<std::size_t> line,
                           const std::string& stage) {
  std::string out;
  if (!stage.empty()) out += "[" + stage + "] ";
  out += to_string(code);
  if (line) out += " (line " + std::to_string(*line) + ")";
  out += ": " + message;
  return out;
}

}  // namespace topicena
