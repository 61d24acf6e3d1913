#include "topicena/export_contract.hpp"

#include <set>

#include "topicena/error.hpp"
#include "topicena/text_io.hpp"

namespace topicena {

using nlohmann::json;
using nlohmann::ordered_json;

TopicModelConfig TopicModelConfig::for_preset(const std::string& name) {
  TopicModelConfig c;
  c.preset = name;
  if (name == "coarse") {
    c.n_neighbors = 60;
  } else if (name == "medium") {
    c.n_neighbors = 35;
  } else if (name == "fine") {
    c.n_neighbors = 18;
  } else {
    throw Error(ErrorCode::InvalidArgument,
                "preset must be coarse, medium or fine, got '" + name + "'");
  }
  return c;
}

void TopicModelConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
  if (n_neighbors < 2) fail("n_neighbors must be >= 2");
  if (n_components < 2) fail("n_components must be >= 2");
  if (!(min_dist >= 0.0 && min_dist < 1.0)) fail("min_dist must lie in [0,1)");
  if (min_cluster_size < 2) fail("min_cluster_size must be >= 2");
  if (min_samples < 1) fail("min_samples must be >= 1");
  if (min_topic_size < 2) fail("min_topic_size must be >= 2");
  if (embedding_model_id.empty()) fail("embedding_model_id is empty");
}

ordered_json topic_model_config_to_json(const TopicModelConfig& c) {
  return {{"preset", c.preset},
          {"n_neighbors", c.n_neighbors},
          {"n_components", c.n_components},
          {"min_dist", c.min_dist},
          {"min_cluster_size", c.min_cluster_size},
          {"min_samples", c.min_samples},
          {"min_topic_size", c.min_topic_size},
          {"random_seed", c.random_seed},
          {"embedding_model_id", c.embedding_model_id}};
}

TopicModelConfig topic_model_config_from_json(const json& j) {
  TopicModelConfig c;
  try {
    c.preset = j.value("preset", std::string("custom"));
    c.n_neighbors = j.at("n_neighbors").get<int>();
    c.n_components = j.at("n_components").get<int>();
    c.min_dist = j.at("min_dist").get<double>();
    c.min_cluster_size = j.at("min_cluster_size").get<int>();
    c.min_samples = j.at("min_samples").get<int>();
    c.min_topic_size = j.at("min_topic_size").get<int>();
    c.random_seed = j.at("random_seed").get<std::int64_t>();
    c.embedding_model_id = j.at("embedding_model_id").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("topic model config: ") + e.what());
  }
  c.validate();
  return c;
}

ordered_json run_report_to_json(const ExportRunReport& r) {
  ordered_json sizes = ordered_json::array();
  for (const auto& [id, n] : r.topic_sizes) sizes.push_back({{"topic_id", id}, {"size", n}});
  return {{"topic_count", r.topic_count},
          {"outlier_fraction", r.outlier_fraction},
          {"topic_sizes", sizes},
          {"probability_method", r.probability_method},
          {"config", topic_model_config_to_json(r.config)}};
}

ExportRunReport run_report_from_json(const json& j) {
  ExportRunReport r;
  try {
    r.topic_count = j.at("topic_count").get<std::size_t>();
    r.outlier_fraction = j.at("outlier_fraction").get<double>();
    for (const auto& s : j.at("topic_sizes")) {
      const int id = s.at("topic_id").get<int>();
      if (!r.topic_sizes.emplace(id, s.at("size").get<std::size_t>()).second) {
        throw Error(ErrorCode::DuplicateKey, "run report repeats topic " + std::to_string(id));
      }
    }
    r.probability_method = j.at("probability_method").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("run report: ") + e.what());
  }
  if (!(r.outlier_fraction >= 0.0 && r.outlier_fraction <= 1.0)) {
    throw Error(ErrorCode::ParseError, "run report outlier_fraction outside [0,1]");
  }
  if (!j.contains("config")) throw Error(ErrorCode::ParseError, "run report lacks config");
  r.config = topic_model_config_from_json(j.at("config"));
  return r;
}

ExportRunReport read_run_report(const std::filesystem::path& path) {
  try {
    return run_report_from_json(json::parse(io::read_file(path)));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_run_report(const std::filesystem::path& path, const ExportRunReport& report) {
  io::write_file(path, run_report_to_json(report).dump(2) + "\n");
}

ExportValidation validate_export(const std::vector<Utterance>& utterances,
                                 const std::string& probabilities_csv,
                                 const std::string& metadata_json,
                                 const std::optional<std::string>& run_report_json,
                                 double threshold) {
  ExportValidation out;
  std::vector<TopicInfo> topics;
  TopicProbabilityMatrix probs;
  try {
    topics = parse_topic_metadata(metadata_json);
    probs = parse_topic_probabilities(probabilities_csv, topics);
    probs.validate();
  } catch (const Error& e) {
    out.errors.push_back(e.what());
    return out;
  }

  if (probs.rows() != utterances.size()) {
    out.errors.push_back("probability rows (" + std::to_string(probs.rows()) +
                         ") differ from utterance rows (" + std::to_string(utterances.size()) + ")");
  }
  std::set<UtteranceKey> expected;
  for (const auto& u : utterances) expected.insert({u.doc_id, u.utterance_index});
  std::size_t unknown = 0;
  for (const auto& k : probs.keys) unknown += expected.erase(k) == 0;
  if (unknown > 0) out.errors.push_back(std::to_string(unknown) + " probability rows name no utterance");
  if (!expected.empty()) {
    out.errors.push_back(std::to_string(expected.size()) + " utterances have no probability row");
  }

  if (run_report_json) {
    try {
      const auto report = run_report_from_json(json::parse(*run_report_json));
      if (report.topic_count != topics.size()) {
        out.errors.push_back("run report topic_count " + std::to_string(report.topic_count) +
                             " differs from metadata (" + std::to_string(topics.size()) + ")");
      }
      if (report.topic_sizes.count(-1)) {
        out.errors.push_back("run report lists the outlier topic among topic sizes");
      }
      for (const auto& t : topics) {
        if (!report.topic_sizes.count(t.topic_id)) {
          out.warnings.push_back("run report has no size for topic " + std::to_string(t.topic_id));
        }
      }
    } catch (const Error& e) {
      out.errors.push_back(e.what());
    } catch (const json::exception& e) {
      out.errors.push_back(std::string("run report: ") + e.what());
    }
  }

  if (probs.rows() > 0 && probs.cols() > 0) {
    const auto report = coding_diagnostics(encode_inclusion(probs, threshold));
    for (const auto& w : report.warnings) out.warnings.push_back(w);
  }
  return out;
}

}  // namespace topicena
