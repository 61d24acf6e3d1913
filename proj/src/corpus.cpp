#include "topicena/corpus.hpp"

#include <cctype>
#include <regex>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "topicena/error.hpp"
#include "topicena/text_io.hpp"

namespace topicena {

using nlohmann::json;
using nlohmann::ordered_json;

std::optional<std::string> Utterance::field(const std::string& name) const {
  if (name == "doc_id") return doc_id;
  if (name == "conversation_id") return conversation_id;
  if (name == "utterance_index") return std::to_string(utterance_index);
  if (name == "group") {
    if (group) return group->name;
    return std::nullopt;
  }
  if (auto it = metadata.find(name); it != metadata.end()) return it->second;
  return std::nullopt;
}

std::string SegmentationRule::describe() const {
  return kind == Kind::Period ? std::string("period") : "regex:" + pattern;
}

SegmentationRule SegmentationRule::parse(const std::string& text) {
  if (text == "period") return period();
  if (text.rfind("regex:", 0) == 0 && text.size() > 6) {
    return regex(text.substr(6));
  }
  throw Error(ErrorCode::InvalidArgument,
              "segmentation rule must be 'period' or 'regex:<pattern>', got '" +
                  text + "'");
}

std::string ScoreRange::describe() const {
  return std::to_string(lo) + "-" + std::to_string(hi);
}

ScoreRange ScoreRange::parse(const std::string& text) {
  const auto dash = text.find('-', 1);
  if (dash == std::string::npos) {
    throw Error(ErrorCode::InvalidArgument, "score range must be 'LO-HI'");
  }
  ScoreRange r{static_cast<int>(io::parse_int(text.substr(0, dash), 0)),
               static_cast<int>(io::parse_int(text.substr(dash + 1), 0))};
  if (r.lo > r.hi) {
    throw Error(ErrorCode::InvalidArgument, "empty score range " + text);
  }
  return r;
}

CorpusFormat parse_corpus_format(const std::string& text) {
  if (text == "csv") return CorpusFormat::Csv;
  if (text == "jsonl") return CorpusFormat::Jsonl;
  throw Error(ErrorCode::InvalidArgument, "unknown corpus format '" + text + "'");
}

std::string to_string(CorpusFormat format) {
  return format == CorpusFormat::Csv ? "csv" : "jsonl";
}

namespace {

bool has_content(std::string_view fragment) {
  for (unsigned char c : fragment) {
    if (!std::isspace(c) && !std::ispunct(c)) return true;
  }
  return false;
}

std::vector<std::string_view> split_fragments(std::string_view text,
                                              const SegmentationRule& rule) {
  std::vector<std::string_view> out;
  if (rule.kind == SegmentationRule::Kind::Period) {
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
      if (i == text.size() || text[i] == '.') {
        out.push_back(text.substr(start, i - start));
        start = i + 1;
      }
    }
    return out;
  }
  std::regex boundary;
  try {
    boundary = std::regex(rule.pattern);
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::InvalidArgument,
                "bad segmentation regex '" + rule.pattern + "': " + e.what());
  }
  std::size_t start = 0;
  for (auto it = std::cregex_iterator(text.data(), text.data() + text.size(),
                                      boundary);
       it != std::cregex_iterator(); ++it) {
    const auto pos = static_cast<std::size_t>(it->position());
    out.push_back(text.substr(start, pos - start));
    start = pos + static_cast<std::size_t>(it->length());
  }
  out.push_back(text.substr(start));
  return out;
}

}  // namespace

std::vector<Utterance> segment_document(const Document& doc,
                                        const SegmentationRule& rule) {
  std::vector<Utterance> out;
  std::map<std::string, std::string> metadata = doc.extra;
  if (!doc.assignment_id.empty()) metadata["assignment_id"] = doc.assignment_id;
  for (auto fragment : split_fragments(doc.full_text, rule)) {
    if (!has_content(fragment)) continue;
    Utterance u;
    u.doc_id = doc.doc_id;
    u.utterance_index = out.size();
    u.conversation_id = doc.doc_id;
    u.text = std::string(io::trim(fragment));
    u.metadata = metadata;
    out.push_back(std::move(u));
  }
  if (out.empty()) {
    throw Error(ErrorCode::EmptyDocument,
                "document '" + doc.doc_id + "' has no non-empty fragment");
  }
  return out;
}

GroupLabel derive_group_label(const Document& doc, const GroupingRule& rule) {
  if (rule.low.hi >= rule.high.lo && rule.high.hi >= rule.low.lo) {
    throw Error(ErrorCode::InvalidArgument, "score ranges " +
                                                rule.low.describe() + " and " +
                                                rule.high.describe() + " overlap");
  }
  if (!doc.score) {
    throw Error(ErrorCode::MissingScore, "document '" + doc.doc_id + "' has no score");
  }
  if (rule.low.contains(*doc.score)) return {rule.low_label};
  if (rule.high.contains(*doc.score)) return {rule.high_label};
  throw Error(ErrorCode::ScoreOutOfRange,
              "document '" + doc.doc_id + "' score " + std::to_string(*doc.score) +
                  " is in neither " + rule.low.describe() + " nor " +
                  rule.high.describe());
}

std::vector<Utterance> segment_corpus(const std::vector<Document>& docs,
                                      const SegmentationRule& rule,
                                      const GroupingRule& grouping) {
  std::vector<Utterance> table;
  for (const auto& doc : docs) {
    std::optional<GroupLabel> group;
    if (doc.score) group = derive_group_label(doc, grouping);
    auto utterances = segment_document(doc, rule);
    for (auto& u : utterances) {
      u.group = group;
      table.push_back(std::move(u));
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Corpus files
// ---------------------------------------------------------------------------

namespace {

std::string scalar_to_string(const json& v, std::size_t line, const char* key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw Error(ErrorCode::ParseError, std::string("field '") + key +
                                         "' must be a string", line);
}

std::optional<int> parse_score(const std::string& text, std::size_t line) {
  if (io::trim(text).empty()) return std::nullopt;
  return static_cast<int>(io::parse_int(text, line));
}

void check_unique(std::unordered_set<std::string>& seen, const Document& doc,
                  std::size_t line) {
  if (!seen.insert(doc.doc_id).second) {
    throw Error(ErrorCode::DuplicateDocId, "duplicate doc_id '" + doc.doc_id + "'",
                line);
  }
}

std::vector<Document> parse_csv_corpus(const std::string& content,
                                       const ColumnAliases& aliases) {
  const auto records = io::parse_csv(content);
  if (records.empty()) {
    throw Error(ErrorCode::ParseError, "missing CSV header", 1);
  }
  std::vector<std::string> header;
  for (auto name : records.front().fields) {
    name = std::string(io::trim(name));
    if (auto it = aliases.find(name); it != aliases.end()) name = it->second;
    header.push_back(name);
  }
  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto id_col = column("doc_id");
  const auto text_col = column("full_text");
  if (!id_col || !text_col) {
    throw Error(ErrorCode::ParseError,
                "CSV header needs doc_id and full_text columns", 1);
  }
  const auto assignment_col = column("assignment_id");
  const auto score_col = column("score");

  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size()) {
      throw Error(ErrorCode::ParseError,
                  "expected " + std::to_string(header.size()) + " fields, found " +
                      std::to_string(rec.fields.size()),
                  rec.line);
    }
    Document doc;
    doc.doc_id = rec.fields[*id_col];
    doc.full_text = rec.fields[*text_col];
    if (assignment_col) doc.assignment_id = rec.fields[*assignment_col];
    if (score_col) doc.score = parse_score(rec.fields[*score_col], rec.line);
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == *id_col || c == *text_col || c == assignment_col || c == score_col) {
        continue;
      }
      doc.extra[header[c]] = rec.fields[c];
    }
    if (doc.doc_id.empty()) {
      throw Error(ErrorCode::ParseError, "empty doc_id", rec.line);
    }
    check_unique(seen, doc, rec.line);
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> parse_jsonl_corpus(const std::string& content) {
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    ++line_no;
    const auto line = io::trim(std::string_view(content).substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::ParseError, e.what(), line_no);
    }
    if (!obj.is_object() || !obj.contains("doc_id") || !obj.contains("full_text")) {
      throw Error(ErrorCode::ParseError, "record needs doc_id and full_text", line_no);
    }
    Document doc;
    doc.doc_id = scalar_to_string(obj["doc_id"], line_no, "doc_id");
    doc.full_text = scalar_to_string(obj["full_text"], line_no, "full_text");
    if (obj.contains("assignment_id") && !obj["assignment_id"].is_null()) {
      doc.assignment_id = scalar_to_string(obj["assignment_id"], line_no, "assignment_id");
    }
    if (obj.contains("score") && !obj["score"].is_null()) {
      const auto& s = obj["score"];
      if (s.is_number_integer()) {
        doc.score = s.get<int>();
      } else if (s.is_string()) {
        doc.score = parse_score(s.get<std::string>(), line_no);
      } else {
        throw Error(ErrorCode::ParseError, "score must be an integer", line_no);
      }
    }
    if (obj.contains("extra")) {
      if (!obj["extra"].is_object()) {
        throw Error(ErrorCode::ParseError, "extra must be an object", line_no);
      }
      for (const auto& [k, v] : obj["extra"].items()) {
        doc.extra[k] = scalar_to_string(v, line_no, "extra");
      }
    }
    check_unique(seen, doc, line_no);
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace

std::vector<Document> parse_corpus(const std::string& content,
                                   CorpusFormat format,
                                   const ColumnAliases& aliases) {
  return format == CorpusFormat::Csv ? parse_csv_corpus(content, aliases)
                                     : parse_jsonl_corpus(content);
}

std::vector<Document> load_corpus(const std::filesystem::path& path,
                                  CorpusFormat format,
                                  const ColumnAliases& aliases) {
  return parse_corpus(io::read_file(path), format, aliases);
}

std::string serialize_corpus(const std::vector<Document>& docs,
                             CorpusFormat format) {
  std::string out;
  if (format == CorpusFormat::Csv) {
    std::set<std::string> extra_keys;
    for (const auto& d : docs) {
      for (const auto& [k, v] : d.extra) extra_keys.insert(k);
    }
    std::vector<std::string> header{"doc_id", "assignment_id", "score", "full_text"};
    header.insert(header.end(), extra_keys.begin(), extra_keys.end());
    out += io::csv_join(header) + "\n";
    for (const auto& d : docs) {
      std::vector<std::string> row{d.doc_id, d.assignment_id,
                                   d.score ? std::to_string(*d.score) : "",
                                   d.full_text};
      for (const auto& k : extra_keys) {
        auto it = d.extra.find(k);
        row.push_back(it == d.extra.end() ? "" : it->second);
      }
      out += io::csv_join(row) + "\n";
    }
    return out;
  }
  for (const auto& d : docs) {
    ordered_json obj;
    obj["doc_id"] = d.doc_id;
    obj["assignment_id"] = d.assignment_id;
    obj["score"] = d.score ? json(*d.score) : json(nullptr);
    obj["full_text"] = d.full_text;
    if (!d.extra.empty()) obj["extra"] = d.extra;
    out += obj.dump() + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Utterance table
// ---------------------------------------------------------------------------

std::string serialize_utterances(const std::vector<Utterance>& utterances) {
  std::string out;
  for (const auto& u : utterances) {
    ordered_json obj;
    obj["doc_id"] = u.doc_id;
    obj["utterance_index"] = u.utterance_index;
    obj["conversation_id"] = u.conversation_id;
    obj["text"] = u.text;
    obj["group"] = u.group ? json(u.group->name) : json(nullptr);
    if (!u.metadata.empty()) obj["meta"] = u.metadata;
    out += obj.dump() + "\n";
  }
  return out;
}

std::vector<Utterance> parse_utterances(const std::string& content) {
  std::vector<Utterance> table;
  std::map<std::string, std::size_t> next_index;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    ++line_no;
    const auto line = io::trim(std::string_view(content).substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
      Utterance u;
      u.doc_id = obj.at("doc_id").get<std::string>();
      u.utterance_index = obj.at("utterance_index").get<std::size_t>();
      u.conversation_id = obj.value("conversation_id", u.doc_id);
      u.text = obj.at("text").get<std::string>();
      if (obj.contains("group") && !obj["group"].is_null()) {
        u.group = GroupLabel{obj["group"].get<std::string>()};
      }
      if (obj.contains("meta")) {
        u.metadata = obj["meta"].get<std::map<std::string, std::string>>();
      }
      auto& expected = next_index[u.doc_id];
      if (u.utterance_index != expected) {
        throw Error(ErrorCode::ParseError,
                    "utterance indices of '" + u.doc_id +
                        "' must be contiguous from 0 in document order",
                    line_no);
      }
      ++expected;
      if (io::trim(u.text).empty()) {
        throw Error(ErrorCode::ParseError, "empty utterance text", line_no);
      }
      table.push_back(std::move(u));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, e.what(), line_no);
    }
  }
  return table;
}

void write_utterances(const std::filesystem::path& path,
                      const std::vector<Utterance>& utterances) {
  io::write_file(path, serialize_utterances(utterances));
}

std::vector<Utterance> read_utterances(const std::filesystem::path& path) {
  return parse_utterances(io::read_file(path));
}

}  // namespace topicena
