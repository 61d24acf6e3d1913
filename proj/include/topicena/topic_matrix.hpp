#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace topicena {

struct TopicInfo {
  int topic_id = 0;
  std::string label;
  std::vector<std::string> top_words;

  friend bool operator==(const TopicInfo&, const TopicInfo&) = default;
};

/// Row key joining a matrix row to the utterance table.
struct UtteranceKey {
  std::string doc_id;
  std::size_t utterance_index = 0;

  friend auto operator<=>(const UtteranceKey&, const UtteranceKey&) = default;
};

/// Dense row-per-utterance topic probabilities, row-major. Columns are kept in
/// ascending topic_id order.
struct TopicProbabilityMatrix {
  std::vector<UtteranceKey> keys;
  std::vector<TopicInfo> topics;
  std::vector<double> values;

  std::size_t rows() const { return keys.size(); }
  std::size_t cols() const { return topics.size(); }
  double at(std::size_t row, std::size_t col) const {
    return values[row * cols() + col];
  }

  /// Throws InvalidArgument/DuplicateKey when shape, bounds or key
  /// uniqueness are violated.
  void validate() const;
};

/// Binary presence matrix: value(r, t) == 1 iff p(r, t) > threshold_used.
struct CodeMatrix {
  std::vector<UtteranceKey> keys;
  std::vector<TopicInfo> topics;
  std::vector<std::uint8_t> values;
  double threshold_used = 0.0;

  std::size_t rows() const { return keys.size(); }
  std::size_t cols() const { return topics.size(); }
  bool at(std::size_t row, std::size_t col) const {
    return values[row * cols() + col] != 0;
  }

  friend bool operator==(const CodeMatrix&, const CodeMatrix&) = default;
};

struct DiagnosticsReport {
  std::size_t rows = 0;
  std::size_t topic_count = 0;
  std::size_t min_codes = 0;
  double mean_codes = 0.0;
  std::size_t max_codes = 0;
  double zero_row_fraction = 0.0;
  std::vector<std::size_t> topic_counts;  // rows coding each topic
  std::size_t topics_without_rows = 0;
  bool warning = false;
  std::vector<std::string> warnings;
};

/// Fraction of all-zero rows at or above which diagnostics raise a warning.
inline constexpr double kZeroRowWarningFraction = 0.5;

/// Strict comparison: a topic is present only when its probability exceeds
/// the threshold. Probabilities are never renormalized.
CodeMatrix encode_inclusion(const TopicProbabilityMatrix& probs, double threshold);

DiagnosticsReport coding_diagnostics(const CodeMatrix& codes);

struct SweepEntry {
  double threshold = 0.0;
  DiagnosticsReport report;
};

/// One diagnostics report per threshold; thresholds must be ascending.
std::vector<SweepEntry> threshold_sweep(const TopicProbabilityMatrix& probs,
                                        const std::vector<double>& thresholds);

nlohmann::ordered_json diagnostics_to_json(const DiagnosticsReport& report);

// -- files -------------------------------------------------------------------

std::vector<TopicInfo> parse_topic_metadata(const std::string& json_text);
std::string serialize_topic_metadata(const std::vector<TopicInfo>& topics);

/// CSV `doc_id,utterance_index,<label>...`. With metadata, columns are matched
/// to topics by label; otherwise ids are assigned in column order.
TopicProbabilityMatrix parse_topic_probabilities(
    const std::string& csv_text,
    const std::optional<std::vector<TopicInfo>>& metadata = std::nullopt);
TopicProbabilityMatrix read_topic_probabilities(
    const std::filesystem::path& csv_path,
    const std::optional<std::filesystem::path>& metadata_path = std::nullopt);
std::string serialize_topic_probabilities(const TopicProbabilityMatrix& probs);

std::string serialize_code_matrix_csv(const CodeMatrix& codes);
std::string serialize_code_matrix_sidecar(const CodeMatrix& codes);
CodeMatrix parse_code_matrix(const std::string& csv_text,
                             const std::string& sidecar_json);
void write_code_matrix(const std::filesystem::path& csv_path,
                       const std::filesystem::path& sidecar_path,
                       const CodeMatrix& codes);
CodeMatrix read_code_matrix(const std::filesystem::path& csv_path,
                            const std::filesystem::path& sidecar_path);

}  // namespace topicena
