#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "topicena/corpus.hpp"
#include "topicena/topic_matrix.hpp"

namespace topicena {

// Contract between the external topic-model exporter and this pipeline. The
// exporter itself lives outside this project; these types fix the files it
// must produce.

struct TopicModelConfig {
  std::string preset;  // "coarse", "medium", "fine" or "custom"
  int n_neighbors = 35;
  int n_components = 5;
  double min_dist = 0.0;
  int min_cluster_size = 10;
  int min_samples = 10;
  int min_topic_size = 10;
  std::int64_t random_seed = 42;
  std::string embedding_model_id = "all-MiniLM-L6-v2";

  /// Granularity presets differ only in n_neighbors (60 / 35 / 18).
  static TopicModelConfig for_preset(const std::string& name);
  void validate() const;
  friend bool operator==(const TopicModelConfig&, const TopicModelConfig&) = default;
};

nlohmann::ordered_json topic_model_config_to_json(const TopicModelConfig& config);
TopicModelConfig topic_model_config_from_json(const nlohmann::json& j);

struct ExportRunReport {
  std::size_t topic_count = 0;
  double outlier_fraction = 0.0;
  std::map<int, std::size_t> topic_sizes;  // topic_id -> utterances assigned
  std::string probability_method = "soft_cluster_membership";
  TopicModelConfig config;

  friend bool operator==(const ExportRunReport&, const ExportRunReport&) = default;
};

nlohmann::ordered_json run_report_to_json(const ExportRunReport& report);
ExportRunReport run_report_from_json(const nlohmann::json& j);
ExportRunReport read_run_report(const std::filesystem::path& path);
void write_run_report(const std::filesystem::path& path, const ExportRunReport& report);

struct ExportValidation {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

/// Checks an export bundle against the utterance table: every file parses,
/// probability rows align one-to-one with utterances, no outlier column, and
/// the run report agrees with the metadata. Coding diagnostics at
/// `threshold` contribute warnings.
ExportValidation validate_export(const std::vector<Utterance>& utterances,
                                 const std::string& probabilities_csv,
                                 const std::string& metadata_json,
                                 const std::optional<std::string>& run_report_json,
                                 double threshold);

}  // namespace topicena
