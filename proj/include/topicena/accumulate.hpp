#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "topicena/corpus.hpp"
#include "topicena/topic_matrix.hpp"

namespace topicena {

/// Co-occurrence window. per_line pairs codes within one utterance; moving(w)
/// pairs the codes of utterance t with the codes of the w most recent
/// utterances of its conversation (t included); whole_conversation pairs the
/// element-wise OR of each conversation's codes.
struct Window {
  enum class Kind { PerLine, Moving, WholeConversation };
  Kind kind = Kind::PerLine;
  std::size_t size = 1;

  static Window per_line() { return {}; }
  static Window moving(std::size_t w);
  static Window whole_conversation() { return {Kind::WholeConversation, 0}; }

  /// "per-line", "moving:W" or "conversation"; parse() accepts the same.
  std::string describe() const;
  static Window parse(const std::string& text);

  friend bool operator==(const Window&, const Window&) = default;
};

struct UnitSpec {
  std::vector<std::string> unit_keys{"doc_id"};
  std::vector<std::string> conversation_keys{"conversation_id"};
  Window window;
  /// Utterance field whose value becomes the unit's group label.
  std::string group_field = "group";

  void validate() const;
  friend bool operator==(const UnitSpec&, const UnitSpec&) = default;
};

/// Composite unit key; rendered as the parts joined by '|'.
struct UnitId {
  std::vector<std::string> parts;

  std::string str() const;
  friend auto operator<=>(const UnitId&, const UnitId&) = default;
};

struct AdjacencyVector {
  UnitId unit_id;
  std::vector<double> values;
};

enum class Normalization { None, Sphere };
std::string to_string(Normalization n);

struct AccumulatedModel {
  std::vector<TopicInfo> topics;
  UnitSpec spec;
  Normalization normalization = Normalization::None;
  std::vector<AdjacencyVector> units;  // sorted by unit_id
  std::map<UnitId, GroupLabel> groups;
  std::vector<UnitId> empty_units;     // no coded line at all
  std::vector<UnitId> zero_units;      // zero vector at normalization time

  std::size_t pair_count() const;
  std::optional<GroupLabel> group_of(const UnitId& id) const;
};

std::size_t pair_count(std::size_t topic_count);
/// Position of pair (i, j), i < j, in lexicographic pair order over K topics.
std::size_t pair_index(std::size_t i, std::size_t j, std::size_t topic_count);
std::vector<std::pair<std::size_t, std::size_t>> pair_order(std::size_t topic_count);

/// Binary accumulation: each unordered pair counts at most once per
/// utterance (per_line, moving) or per conversation (whole_conversation).
/// Utterances absent from `codes` occupy window positions with no codes.
/// Throws UnknownUtterance for code rows with no utterance and GroupConflict
/// when a unit's utterances disagree on the group field.
AccumulatedModel accumulate(const CodeMatrix& codes,
                            const std::vector<Utterance>& utterances,
                            const UnitSpec& spec);

AccumulatedModel normalize_sphere(const AccumulatedModel& model);

/// Arithmetic mean of the unit vectors carrying `group`; throws EmptyGroup.
std::vector<double> group_mean_vector(const AccumulatedModel& model,
                                      const GroupLabel& group);

/// Distinct group labels present in the model, sorted.
std::vector<GroupLabel> group_labels(const AccumulatedModel& model);

nlohmann::ordered_json model_to_json(const AccumulatedModel& model);
AccumulatedModel model_from_json(const nlohmann::json& j);
void write_model(const std::filesystem::path& path, const AccumulatedModel& model);
AccumulatedModel read_model(const std::filesystem::path& path);

nlohmann::ordered_json unit_spec_to_json(const UnitSpec& spec);
UnitSpec unit_spec_from_json(const nlohmann::json& j);

}  // namespace topicena
