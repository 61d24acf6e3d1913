#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "topicena/accumulate.hpp"
#include "topicena/corpus.hpp"
#include "topicena/project.hpp"
#include "topicena/svg.hpp"

namespace topicena {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kManifestSchemaVersion = 1;

/// Everything that influences a run's outputs. The output directory is the
/// one field left out of the manifest echo, so a manifest can be replayed
/// into any directory.
struct RunConfig {
  std::filesystem::path corpus;
  CorpusFormat format = CorpusFormat::Csv;
  ColumnAliases column_aliases;
  std::filesystem::path topics;
  std::optional<std::filesystem::path> topic_meta;
  double threshold = 0.05;
  SegmentationRule segmentation;
  GroupingRule grouping;
  UnitSpec unit_spec;
  /// nullopt selects means rotation over `groups` when both are present in
  /// the data and SVD otherwise.
  std::optional<ProjectionMethod> projection;
  std::size_t dims = 2;
  GroupLabel group_a{"HIGH"};
  GroupLabel group_b{"LOW"};
  std::filesystem::path out;
  PlotOptions plot;
  std::optional<std::int64_t> seed;  // reserved; forwarded to exporter configs

  /// Throws InvalidArgument (attributed to stage "config") before any output.
  void validate() const;
};

nlohmann::ordered_json config_to_json(const RunConfig& config);
/// Accepts either a bare config object or a manifest carrying "config".
RunConfig config_from_json(const nlohmann::json& j);

/// Output file names inside the run directory.
namespace files {
inline constexpr const char* kUtterances = "utterances.jsonl";
inline constexpr const char* kCodes = "codes.csv";
inline constexpr const char* kCodesSidecar = "codes.json";
inline constexpr const char* kDiagnostics = "diagnostics.json";
inline constexpr const char* kAccumulated = "accumulated.json";
inline constexpr const char* kProjection = "projection.json";
inline constexpr const char* kPoints = "points.csv";
inline constexpr const char* kModelSummary = "model_summary.json";
inline constexpr const char* kManifest = "manifest.json";
inline constexpr const char* kSweepSummary = "sweep_summary.json";
}  // namespace files

/// Stages read their inputs from the previous stage's files in `config.out`
/// and return a JSON summary for the manifest.
nlohmann::ordered_json run_segment_stage(const RunConfig& config);
nlohmann::ordered_json run_encode_stage(const RunConfig& config);
nlohmann::ordered_json run_model_stage(const RunConfig& config);
nlohmann::ordered_json run_plot_stage(const RunConfig& config);

/// segment -> encode -> model (accumulate, normalize, project, networks,
/// layout, stats) -> plot, then writes manifest.json. Module errors are
/// rethrown attributed to their stage.
nlohmann::ordered_json run_pipeline(const RunConfig& config);

/// One full run per threshold under out/threshold_<t>/ plus
/// sweep_summary.json. Variants run concurrently.
nlohmann::ordered_json run_sweep(const RunConfig& config, std::vector<double> thresholds);

/// Parses "thresholds=0.01,0.05,0.10" (the "thresholds=" prefix is optional).
std::vector<double> parse_sweep_spec(const std::string& text);

}  // namespace topicena
