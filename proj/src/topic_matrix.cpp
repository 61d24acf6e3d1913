#include "topicena/topic_matrix.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "topicena/error.hpp"
#include "topicena/text_io.hpp"

namespace topicena {

using nlohmann::json;
using nlohmann::ordered_json;

void TopicProbabilityMatrix::validate() const {
  if (values.size() != rows() * cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "probability matrix has " + std::to_string(values.size()) +
                    " values for " + std::to_string(rows()) + "x" +
                    std::to_string(cols()));
  }
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "probability " + io::format_double(v) + " outside [0,1]");
    }
  }
  std::set<int> ids;
  for (const auto& t : topics) {
    if (t.topic_id < 0) {
      throw Error(ErrorCode::InvalidArgument,
                  "outlier topic " + std::to_string(t.topic_id) +
                      " must be excluded before encoding");
    }
    if (t.label.empty()) throw Error(ErrorCode::InvalidArgument, "empty topic label");
    if (!ids.insert(t.topic_id).second) {
      throw Error(ErrorCode::DuplicateKey,
                  "duplicate topic_id " + std::to_string(t.topic_id));
    }
  }
  std::set<UtteranceKey> seen;
  for (const auto& k : keys) {
    if (!seen.insert(k).second) {
      throw Error(ErrorCode::DuplicateKey,
                  "duplicate row (" + k.doc_id + ", " +
                      std::to_string(k.utterance_index) + ")");
    }
  }
}

CodeMatrix encode_inclusion(const TopicProbabilityMatrix& probs, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "threshold " + io::format_double(threshold) + " outside [0,1]");
  }
  CodeMatrix codes;
  codes.keys = probs.keys;
  codes.topics = probs.topics;
  codes.threshold_used = threshold;
  codes.values.resize(probs.values.size());
  std::transform(probs.values.begin(), probs.values.end(), codes.values.begin(),
                 [threshold](double p) -> std::uint8_t { return p > threshold ? 1 : 0; });
  return codes;
}

DiagnosticsReport coding_diagnostics(const CodeMatrix& codes) {
  if (codes.rows() == 0 || codes.cols() == 0) {
    throw Error(ErrorCode::InvalidArgument, "diagnostics need a non-empty code matrix");
  }
  DiagnosticsReport r;
  r.rows = codes.rows();
  r.topic_count = codes.cols();
  r.topic_counts.assign(codes.cols(), 0);
  r.min_codes = codes.cols();
  std::size_t total = 0;
  std::size_t zero_rows = 0;
  for (std::size_t row = 0; row < codes.rows(); ++row) {
    std::size_t n = 0;
    for (std::size_t col = 0; col < codes.cols(); ++col) {
      if (codes.at(row, col)) {
        ++n;
        ++r.topic_counts[col];
      }
    }
    total += n;
    if (n == 0) ++zero_rows;
    r.min_codes = std::min(r.min_codes, n);
    r.max_codes = std::max(r.max_codes, n);
  }
  r.mean_codes = static_cast<double>(total) / static_cast<double>(r.rows);
  r.zero_row_fraction = static_cast<double>(zero_rows) / static_cast<double>(r.rows);
  r.topics_without_rows = static_cast<std::size_t>(
      std::count(r.topic_counts.begin(), r.topic_counts.end(), std::size_t{0}));

  if (r.zero_row_fraction >= kZeroRowWarningFraction) {
    r.warnings.push_back("at least half of all rows carry no code");
  }
  if (r.topics_without_rows > 0) {
    r.warnings.push_back(std::to_string(r.topics_without_rows) +
                         " topic(s) never exceed the threshold");
  }
  if (r.max_codes < 2) {
    r.warnings.push_back("no row carries two codes; no co-occurrence can form");
  }
  r.warning = !r.warnings.empty();
  return r;
}

std::vector<SweepEntry> threshold_sweep(const TopicProbabilityMatrix& probs,
                                        const std::vector<double>& thresholds) {
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw Error(ErrorCode::InvalidArgument, "sweep thresholds must be ascending");
  }
  std::vector<SweepEntry> out;
  out.reserve(thresholds.size());
  for (double t : thresholds) {
    out.push_back({t, coding_diagnostics(encode_inclusion(probs, t))});
  }
  return out;
}

ordered_json diagnostics_to_json(const DiagnosticsReport& r) {
  ordered_json j;
  j["rows"] = r.rows;
  j["topic_count"] = r.topic_count;
  j["codes_per_row"] = {{"min", r.min_codes}, {"mean", r.mean_codes}, {"max", r.max_codes}};
  j["zero_row_fraction"] = r.zero_row_fraction;
  j["topic_counts"] = r.topic_counts;
  j["topics_without_rows"] = r.topics_without_rows;
  j["warning"] = r.warning;
  j["warnings"] = r.warnings;
  return j;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

std::vector<TopicInfo> parse_topic_metadata(const std::string& json_text) {
  json arr;
  try {
    arr = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("topic metadata: ") + e.what());
  }
  if (!arr.is_array()) {
    throw Error(ErrorCode::ParseError, "topic metadata must be a JSON array");
  }
  std::vector<TopicInfo> topics;
  std::set<int> ids;
  for (const auto& item : arr) {
    TopicInfo t;
    try {
      t.topic_id = item.at("topic_id").get<int>();
      t.label = item.at("label").get<std::string>();
      if (item.contains("top_words")) {
        t.top_words = item["top_words"].get<std::vector<std::string>>();
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("topic metadata: ") + e.what());
    }
    if (t.topic_id < 0) {
      throw Error(ErrorCode::ParseError,
                  "topic metadata contains outlier topic " + std::to_string(t.topic_id));
    }
    if (t.label.empty()) throw Error(ErrorCode::ParseError, "empty topic label");
    if (!ids.insert(t.topic_id).second) {
      throw Error(ErrorCode::DuplicateKey,
                  "duplicate topic_id " + std::to_string(t.topic_id));
    }
    topics.push_back(std::move(t));
  }
  std::sort(topics.begin(), topics.end(),
            [](const TopicInfo& a, const TopicInfo& b) { return a.topic_id < b.topic_id; });
  return topics;
}

namespace {

ordered_json topics_json(const std::vector<TopicInfo>& topics) {
  ordered_json arr = ordered_json::array();
  for (const auto& t : topics) {
    ordered_json j;
    j["topic_id"] = t.topic_id;
    j["label"] = t.label;
    j["top_words"] = t.top_words;
    arr.push_back(std::move(j));
  }
  return arr;
}

struct ParsedTable {
  std::vector<UtteranceKey> keys;
  std::vector<std::string> labels;
  std::vector<double> values;  // file column order
};

ParsedTable parse_keyed_table(const std::string& csv_text, bool binary) {
  const auto records = io::parse_csv(csv_text);
  if (records.empty()) throw Error(ErrorCode::ParseError, "missing CSV header", 1);
  const auto& header = records.front().fields;
  if (header.size() < 3 || io::trim(header[0]) != "doc_id" ||
      io::trim(header[1]) != "utterance_index") {
    throw Error(ErrorCode::ParseError,
                "header must start with doc_id,utterance_index and name >= 1 topic", 1);
  }
  ParsedTable t;
  for (std::size_t c = 2; c < header.size(); ++c) {
    t.labels.emplace_back(io::trim(header[c]));
  }
  const std::size_t k = t.labels.size();
  t.values.reserve((records.size() - 1) * k);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != k + 2) {
      throw Error(ErrorCode::ParseError,
                  "expected " + std::to_string(k + 2) + " fields", rec.line);
    }
    const auto index = io::parse_int(rec.fields[1], rec.line);
    if (index < 0) throw Error(ErrorCode::ParseError, "negative utterance_index", rec.line);
    t.keys.push_back({rec.fields[0], static_cast<std::size_t>(index)});
    for (std::size_t c = 0; c < k; ++c) {
      const double v = io::parse_double(rec.fields[c + 2], rec.line);
      if (!(v >= 0.0 && v <= 1.0) || (binary && v != 0.0 && v != 1.0)) {
        throw Error(ErrorCode::ParseError,
                    std::string(binary ? "code must be 0 or 1" : "probability outside [0,1]") +
                        ": " + rec.fields[c + 2],
                    rec.line);
      }
      t.values.push_back(v);
    }
  }
  return t;
}

/// Column permutation placing `topics` (sorted by id) against file labels.
std::vector<std::size_t> column_order(const std::vector<std::string>& labels,
                                      const std::vector<TopicInfo>& topics) {
  if (labels.size() != topics.size()) {
    throw Error(ErrorCode::ParseError,
                "matrix has " + std::to_string(labels.size()) +
                    " topic columns but metadata lists " + std::to_string(topics.size()));
  }
  std::map<std::string, std::size_t> by_label;
  for (std::size_t c = 0; c < labels.size(); ++c) {
    if (!by_label.emplace(labels[c], c).second) {
      throw Error(ErrorCode::ParseError, "duplicate topic column '" + labels[c] + "'", 1);
    }
  }
  std::vector<std::size_t> order;
  for (const auto& t : topics) {
    auto it = by_label.find(t.label);
    if (it == by_label.end()) {
      throw Error(ErrorCode::ParseError, "no column for topic '" + t.label + "'", 1);
    }
    order.push_back(it->second);
  }
  return order;
}

std::vector<TopicInfo> topics_from_labels(const std::vector<std::string>& labels) {
  std::vector<TopicInfo> topics;
  for (std::size_t c = 0; c < labels.size(); ++c) {
    topics.push_back({static_cast<int>(c), labels[c], {}});
  }
  return topics;
}

template <typename T>
std::vector<T> permute_columns(const std::vector<double>& values, std::size_t k,
                               const std::vector<std::size_t>& order) {
  const std::size_t rows = k == 0 ? 0 : values.size() / k;
  std::vector<T> out(values.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      out[r * k + c] = static_cast<T>(values[r * k + order[c]]);
    }
  }
  return out;
}

}  // namespace

std::string serialize_topic_metadata(const std::vector<TopicInfo>& topics) {
  return topics_json(topics).dump(2) + "\n";
}

TopicProbabilityMatrix parse_topic_probabilities(
    const std::string& csv_text, const std::optional<std::vector<TopicInfo>>& metadata) {
  auto table = parse_keyed_table(csv_text, false);
  TopicProbabilityMatrix m;
  m.topics = metadata ? *metadata : topics_from_labels(table.labels);
  std::sort(m.topics.begin(), m.topics.end(),
            [](const TopicInfo& a, const TopicInfo& b) { return a.topic_id < b.topic_id; });
  const auto order = column_order(table.labels, m.topics);
  m.keys = std::move(table.keys);
  m.values = permute_columns<double>(table.values, m.topics.size(), order);
  m.validate();
  return m;
}

TopicProbabilityMatrix read_topic_probabilities(
    const std::filesystem::path& csv_path,
    const std::optional<std::filesystem::path>& metadata_path) {
  std::optional<std::vector<TopicInfo>> metadata;
  if (metadata_path) metadata = parse_topic_metadata(io::read_file(*metadata_path));
  return parse_topic_probabilities(io::read_file(csv_path), metadata);
}

std::string serialize_topic_probabilities(const TopicProbabilityMatrix& probs) {
  std::vector<std::string> header{"doc_id", "utterance_index"};
  for (const auto& t : probs.topics) header.push_back(t.label);
  std::string out = io::csv_join(header) + "\n";
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    std::vector<std::string> row{probs.keys[r].doc_id,
                                 std::to_string(probs.keys[r].utterance_index)};
    for (std::size_t c = 0; c < probs.cols(); ++c) {
      row.push_back(io::format_double(probs.at(r, c)));
    }
    out += io::csv_join(row) + "\n";
  }
  return out;
}

std::string serialize_code_matrix_csv(const CodeMatrix& codes) {
  std::vector<std::string> header{"doc_id", "utterance_index"};
  for (const auto& t : codes.topics) header.push_back(t.label);
  std::string out = io::csv_join(header) + "\n";
  for (std::size_t r = 0; r < codes.rows(); ++r) {
    out += io::csv_escape(codes.keys[r].doc_id);
    out += ',';
    out += std::to_string(codes.keys[r].utterance_index);
    for (std::size_t c = 0; c < codes.cols(); ++c) {
      out += codes.at(r, c) ? ",1" : ",0";
    }
    out += '\n';
  }
  return out;
}

std::string serialize_code_matrix_sidecar(const CodeMatrix& codes) {
  ordered_json j;
  j["threshold_used"] = codes.threshold_used;
  j["comparison"] = "greater_than";
  j["topics"] = topics_json(codes.topics);
  return j.dump(2) + "\n";
}

CodeMatrix parse_code_matrix(const std::string& csv_text, const std::string& sidecar_json) {
  json side;
  try {
    side = json::parse(sidecar_json);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("code sidecar: ") + e.what());
  }
  if (!side.contains("threshold_used")) {
    throw Error(ErrorCode::ParseError, "code sidecar lacks threshold_used");
  }
  auto table = parse_keyed_table(csv_text, true);
  CodeMatrix codes;
  codes.threshold_used = side["threshold_used"].get<double>();
  codes.topics = side.contains("topics")
                     ? parse_topic_metadata(side["topics"].dump())
                     : topics_from_labels(table.labels);
  const auto order = column_order(table.labels, codes.topics);
  codes.keys = std::move(table.keys);
  codes.values = permute_columns<std::uint8_t>(table.values, codes.topics.size(), order);
  std::set<UtteranceKey> seen;
  for (const auto& k : codes.keys) {
    if (!seen.insert(k).second) {
      throw Error(ErrorCode::DuplicateKey, "duplicate code row (" + k.doc_id + ", " +
                                               std::to_string(k.utterance_index) + ")");
    }
  }
  return codes;
}

void write_code_matrix(const std::filesystem::path& csv_path,
                       const std::filesystem::path& sidecar_path, const CodeMatrix& codes) {
  io::write_file(csv_path, serialize_code_matrix_csv(codes));
  io::write_file(sidecar_path, serialize_code_matrix_sidecar(codes));
}

CodeMatrix read_code_matrix(const std::filesystem::path& csv_path,
                            const std::filesystem::path& sidecar_path) {
  return parse_code_matrix(io::read_file(csv_path), io::read_file(sidecar_path));
}

}  // namespace topicena
