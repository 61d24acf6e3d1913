#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace topicena {

/// A label from a finite, configured label set ("HIGH", "LOW", ...).
struct GroupLabel {
  std::string name;
  friend auto operator<=>(const GroupLabel&, const GroupLabel&) = default;
};

struct Document {
  std::string doc_id;
  std::string full_text;
  std::string assignment_id;
  std::optional<int> score;
  std::map<std::string, std::string> extra;

  friend bool operator==(const Document&, const Document&) = default;
};

/// One sentence-level discourse unit. `metadata` carries the parent
/// document's assignment_id and extra fields so any of them can serve as a
/// unit, conversation or group key downstream.
struct Utterance {
  std::string doc_id;
  std::size_t utterance_index = 0;
  std::string conversation_id;
  std::string text;
  std::optional<GroupLabel> group;
  std::map<std::string, std::string> metadata;

  /// Looks up a key field by name: doc_id, conversation_id, group,
  /// utterance_index, or any metadata entry.
  std::optional<std::string> field(const std::string& name) const;

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

struct SegmentationRule {
  enum class Kind { Period, Regex };
  Kind kind = Kind::Period;
  std::string pattern;  // boundary regex when kind == Regex

  static SegmentationRule period() { return {}; }
  static SegmentationRule regex(std::string pattern) {
    return {Kind::Regex, std::move(pattern)};
  }
  /// "period" or "regex:<pattern>"; parse() accepts the same strings.
  std::string describe() const;
  static SegmentationRule parse(const std::string& text);
};

/// Inclusive score interval.
struct ScoreRange {
  int lo = 0;
  int hi = 0;
  bool contains(int score) const { return score >= lo && score <= hi; }
  std::string describe() const;
  static ScoreRange parse(const std::string& text);  // "1-3"
};

struct GroupingRule {
  ScoreRange low{1, 3};
  ScoreRange high{4, 6};
  std::string low_label = "LOW";
  std::string high_label = "HIGH";
};

enum class CorpusFormat { Csv, Jsonl };
CorpusFormat parse_corpus_format(const std::string& text);
std::string to_string(CorpusFormat format);

/// Splits `doc.full_text` into trimmed fragments at boundary markers and
/// drops fragments consisting only of whitespace and punctuation. Throws
/// EmptyDocument when nothing survives.
std::vector<Utterance> segment_document(const Document& doc,
                                        const SegmentationRule& rule);

/// LOW if the score is in `low`, HIGH if in `high`. Throws MissingScore,
/// ScoreOutOfRange, or InvalidArgument for overlapping ranges.
GroupLabel derive_group_label(const Document& doc, const GroupingRule& rule);

/// Segments every document in order. Documents without a score carry no
/// group label; a score outside both ranges is an error.
std::vector<Utterance> segment_corpus(const std::vector<Document>& docs,
                                      const SegmentationRule& rule,
                                      const GroupingRule& grouping);

/// Column aliases for CSV headers, e.g. {"essay_id" -> "doc_id"}.
using ColumnAliases = std::map<std::string, std::string>;

std::vector<Document> load_corpus(const std::filesystem::path& path,
                                  CorpusFormat format,
                                  const ColumnAliases& aliases = {});
std::vector<Document> parse_corpus(const std::string& content,
                                   CorpusFormat format,
                                   const ColumnAliases& aliases = {});
std::string serialize_corpus(const std::vector<Document>& docs,
                             CorpusFormat format);

/// Utterance table JSONL: the hand-off file to the topic-model exporter.
std::string serialize_utterances(const std::vector<Utterance>& utterances);
std::vector<Utterance> parse_utterances(const std::string& content);
void write_utterances(const std::filesystem::path& path,
                      const std::vector<Utterance>& utterances);
std::vector<Utterance> read_utterances(const std::filesystem::path& path);

}  // namespace topicena
