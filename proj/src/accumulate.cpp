#include "topicena/accumulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "topicena/error.hpp"
#include "topicena/text_io.hpp"

namespace topicena {

using nlohmann::json;
using nlohmann::ordered_json;

Window Window::moving(std::size_t w) {
  if (w < 2) {
    throw Error(ErrorCode::InvalidArgument, "moving window size must be >= 2");
  }
  return {Kind::Moving, w};
}

std::string Window::describe() const {
  switch (kind) {
    case Kind::PerLine: return "per-line";
    case Kind::Moving: return "moving:" + std::to_string(size);
    case Kind::WholeConversation: return "conversation";
  }
  return "per-line";
}

Window Window::parse(const std::string& text) {
  if (text == "per-line") return per_line();
  if (text == "conversation") return whole_conversation();
  if (text.rfind("moving:", 0) == 0) {
    const auto w = io::parse_int(text.substr(7), 0);
    if (w < 2) throw Error(ErrorCode::InvalidArgument, "moving window size must be >= 2");
    return moving(static_cast<std::size_t>(w));
  }
  throw Error(ErrorCode::InvalidArgument,
              "window must be per-line, moving:W or conversation, got '" + text + "'");
}

void UnitSpec::validate() const {
  if (unit_keys.empty()) throw Error(ErrorCode::InvalidArgument, "unit_keys is empty");
  if (conversation_keys.empty()) {
    throw Error(ErrorCode::InvalidArgument, "conversation_keys is empty");
  }
  if (window.kind == Window::Kind::Moving && window.size < 2) {
    throw Error(ErrorCode::InvalidArgument, "moving window size must be >= 2");
  }
}

std::string UnitId::str() const {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back('|');
    out += parts[i];
  }
  return out;
}

std::string to_string(Normalization n) {
  return n == Normalization::Sphere ? "sphere" : "none";
}

std::size_t pair_count(std::size_t k) { return k < 2 ? 0 : k * (k - 1) / 2; }

std::size_t pair_index(std::size_t i, std::size_t j, std::size_t k) {
  return i * k - i * (i + 1) / 2 + (j - i - 1);
}

std::vector<std::pair<std::size_t, std::size_t>> pair_order(std::size_t k) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(pair_count(k));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) out.emplace_back(i, j);
  }
  return out;
}

std::size_t AccumulatedModel::pair_count() const {
  return topicena::pair_count(topics.size());
}

std::optional<GroupLabel> AccumulatedModel::group_of(const UnitId& id) const {
  if (auto it = groups.find(id); it != groups.end()) return it->second;
  return std::nullopt;
}

namespace {

struct KeyHash {
  std::size_t operator()(const UtteranceKey& k) const noexcept {
    return std::hash<std::string>{}(k.doc_id) * 1000003u ^ k.utterance_index;
  }
};
struct KeyEq {
  bool operator()(const UtteranceKey& a, const UtteranceKey& b) const noexcept {
    return a.utterance_index == b.utterance_index && a.doc_id == b.doc_id;
  }
};

UnitId composite_key(const Utterance& u, const std::vector<std::string>& fields) {
  UnitId id;
  id.parts.reserve(fields.size());
  for (const auto& f : fields) {
    auto v = u.field(f);
    if (!v) {
      throw Error(ErrorCode::InvalidArgument,
                  "utterance (" + u.doc_id + ", " + std::to_string(u.utterance_index) +
                      ") has no field '" + f + "'");
    }
    id.parts.push_back(std::move(*v));
  }
  return id;
}

using PairCounts = std::unordered_map<std::uint64_t, std::uint64_t>;

/// Adds every unordered pair {i, j}, i != j, with i in `anchor` and j in
/// `window_codes`, each at most once; `scratch` holds the pair indices
/// while they are deduplicated.
void add_window_pairs(const std::vector<std::uint32_t>& anchor,
                      const std::vector<std::uint32_t>& window_codes, std::size_t k,
                      std::vector<std::uint64_t>& scratch, PairCounts& acc) {
  scratch.clear();
  for (auto i : anchor) {
    for (auto j : window_codes) {
      if (i == j) continue;
      scratch.push_back(pair_index(std::min(i, j), std::max(i, j), k));
    }
  }
  std::sort(scratch.begin(), scratch.end());
  scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
  for (auto p : scratch) ++acc[p];
}

void add_all_pairs(const std::vector<std::uint32_t>& codes, std::size_t k, PairCounts& acc) {
  for (std::size_t a = 0; a < codes.size(); ++a) {
    for (std::size_t b = a + 1; b < codes.size(); ++b) {
      ++acc[pair_index(codes[a], codes[b], k)];
    }
  }
}

}  // namespace

AccumulatedModel accumulate(const CodeMatrix& codes, const std::vector<Utterance>& utterances,
                            const UnitSpec& spec) {
  spec.validate();
  const std::size_t k = codes.cols();

  std::unordered_map<UtteranceKey, std::size_t, KeyHash, KeyEq> row_of_utterance;
  row_of_utterance.reserve(utterances.size());
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    UtteranceKey key{utterances[i].doc_id, utterances[i].utterance_index};
    if (!row_of_utterance.emplace(std::move(key), i).second) {
      throw Error(ErrorCode::DuplicateKey, "utterance (" + utterances[i].doc_id + ", " +
                                               std::to_string(utterances[i].utterance_index) +
                                               ") appears twice");
    }
  }

  // Active code list per utterance, ascending topic column.
  std::vector<std::vector<std::uint32_t>> active(utterances.size());
  std::vector<bool> has_row(utterances.size(), false);
  for (std::size_t r = 0; r < codes.rows(); ++r) {
    auto it = row_of_utterance.find(codes.keys[r]);
    if (it == row_of_utterance.end()) {
      throw Error(ErrorCode::UnknownUtterance,
                  "code row (" + codes.keys[r].doc_id + ", " +
                      std::to_string(codes.keys[r].utterance_index) +
                      ") has no utterance");
    }
    has_row[it->second] = true;
    auto& list = active[it->second];
    for (std::size_t c = 0; c < k; ++c) {
      if (codes.at(r, c)) list.push_back(static_cast<std::uint32_t>(c));
    }
  }
  const auto uncoded = static_cast<std::size_t>(std::count(has_row.begin(), has_row.end(), false));
  if (uncoded > 0) {
    spdlog::warn("{} utterance(s) have no code row and count as uncoded lines", uncoded);
  }

  // Units in sorted key order.
  std::map<UnitId, std::size_t> unit_index;
  std::vector<UnitId> utterance_unit_key(utterances.size());
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    utterance_unit_key[i] = composite_key(utterances[i], spec.unit_keys);
    unit_index.emplace(utterance_unit_key[i], 0);
  }
  std::size_t next = 0;
  for (auto& [id, idx] : unit_index) idx = next++;
  std::vector<std::size_t> unit_of(utterances.size());
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    unit_of[i] = unit_index.at(utterance_unit_key[i]);
  }

  AccumulatedModel model;
  model.topics = codes.topics;
  model.spec = spec;
  model.units.resize(unit_index.size());
  for (const auto& [id, idx] : unit_index) model.units[idx].unit_id = id;

  for (std::size_t i = 0; i < utterances.size(); ++i) {
    auto label = utterances[i].field(spec.group_field);
    if (!label || label->empty()) continue;
    const auto& id = model.units[unit_of[i]].unit_id;
    auto [it, inserted] = model.groups.emplace(id, GroupLabel{*label});
    if (!inserted && it->second.name != *label) {
      throw Error(ErrorCode::GroupConflict, "unit '" + id.str() + "' mixes groups '" +
                                                it->second.name + "' and '" + *label + "'");
    }
  }

  std::vector<PairCounts> acc(model.units.size());
  std::vector<bool> unit_coded(model.units.size(), false);
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    if (!active[i].empty()) unit_coded[unit_of[i]] = true;
  }

  std::vector<std::uint64_t> scratch;
  if (spec.window.kind == Window::Kind::PerLine) {
    for (std::size_t i = 0; i < utterances.size(); ++i) {
      add_all_pairs(active[i], k, acc[unit_of[i]]);
    }
  } else {
    std::map<UnitId, std::vector<std::size_t>> conversations;
    for (std::size_t i = 0; i < utterances.size(); ++i) {
      conversations[composite_key(utterances[i], spec.conversation_keys)].push_back(i);
    }
    if (spec.window.kind == Window::Kind::Moving) {
      const std::size_t w = spec.window.size;
      std::vector<std::uint32_t> window_codes;
      std::vector<std::size_t> stamp(k, 0);
      std::size_t epoch = 0;
      for (const auto& [conv, rows] : conversations) {
        for (std::size_t t = 0; t < rows.size(); ++t) {
          const auto& anchor = active[rows[t]];
          if (anchor.empty()) continue;
          ++epoch;
          window_codes.clear();
          const std::size_t first = t + 1 >= w ? t + 1 - w : 0;
          for (std::size_t s = first; s <= t; ++s) {
            for (auto c : active[rows[s]]) {
              if (stamp[c] != epoch) {
                stamp[c] = epoch;
                window_codes.push_back(c);
              }
            }
          }
          add_window_pairs(anchor, window_codes, k, scratch, acc[unit_of[rows[t]]]);
        }
      }
    } else {
      // OR over each (conversation, unit) slice.
      for (const auto& [conv, rows] : conversations) {
        std::map<std::size_t, std::vector<bool>> present;
        for (auto r : rows) {
          auto& mask = present[unit_of[r]];
          mask.resize(k, false);
          for (auto c : active[r]) mask[c] = true;
        }
        for (const auto& [unit, mask] : present) {
          std::vector<std::uint32_t> list;
          for (std::size_t c = 0; c < k; ++c) {
            if (mask[c]) list.push_back(static_cast<std::uint32_t>(c));
          }
          add_all_pairs(list, k, acc[unit]);
        }
      }
    }
  }

  const std::size_t pairs = pair_count(k);
  for (std::size_t u = 0; u < model.units.size(); ++u) {
    auto& values = model.units[u].values;
    values.assign(pairs, 0.0);
    for (const auto& [p, n] : acc[u]) values[p] = static_cast<double>(n);
    if (!unit_coded[u]) model.empty_units.push_back(model.units[u].unit_id);
  }
  if (!model.empty_units.empty()) {
    spdlog::warn("EmptyUnit: {} unit(s) have zero coded lines", model.empty_units.size());
  }
  return model;
}

AccumulatedModel normalize_sphere(const AccumulatedModel& model) {
  if (model.normalization != Normalization::None) {
    throw Error(ErrorCode::InvalidArgument, "model is already normalized");
  }
  AccumulatedModel out = model;
  out.normalization = Normalization::Sphere;
  out.zero_units.clear();
  for (auto& unit : out.units) {
    double sq = 0.0;
    for (double v : unit.values) sq += v * v;
    if (sq == 0.0) {
      out.zero_units.push_back(unit.unit_id);
      continue;
    }
    const double norm = std::sqrt(sq);
    for (double& v : unit.values) v /= norm;
  }
  return out;
}

std::vector<double> group_mean_vector(const AccumulatedModel& model, const GroupLabel& group) {
  std::vector<double> sum(model.pair_count(), 0.0);
  std::size_t n = 0;
  for (const auto& unit : model.units) {
    auto g = model.group_of(unit.unit_id);
    if (!g || *g != group) continue;
    ++n;
    for (std::size_t p = 0; p < sum.size(); ++p) sum[p] += unit.values[p];
  }
  if (n == 0) {
    throw Error(ErrorCode::EmptyGroup, "no unit carries group '" + group.name + "'");
  }
  for (double& v : sum) v /= static_cast<double>(n);
  return sum;
}

std::vector<GroupLabel> group_labels(const AccumulatedModel& model) {
  std::vector<GroupLabel> labels;
  for (const auto& [id, g] : model.groups) labels.push_back(g);
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

ordered_json unit_spec_to_json(const UnitSpec& spec) {
  ordered_json j;
  j["unit_keys"] = spec.unit_keys;
  j["conversation_keys"] = spec.conversation_keys;
  j["window"] = spec.window.describe();
  j["group_field"] = spec.group_field;
  return j;
}

UnitSpec unit_spec_from_json(const json& j) {
  UnitSpec spec;
  spec.unit_keys = j.at("unit_keys").get<std::vector<std::string>>();
  spec.conversation_keys = j.at("conversation_keys").get<std::vector<std::string>>();
  spec.window = Window::parse(j.at("window").get<std::string>());
  spec.group_field = j.value("group_field", std::string("group"));
  spec.validate();
  return spec;
}

ordered_json model_to_json(const AccumulatedModel& model) {
  ordered_json j;
  j["schema_version"] = 1;
  j["normalization"] = to_string(model.normalization);
  j["accumulation"] = "binary";
  j["unit_spec"] = unit_spec_to_json(model.spec);
  ordered_json topics = ordered_json::array();
  for (const auto& t : model.topics) {
    topics.push_back({{"topic_id", t.topic_id}, {"label", t.label}, {"top_words", t.top_words}});
  }
  j["topics"] = std::move(topics);
  ordered_json pairs = ordered_json::array();
  for (auto [a, b] : pair_order(model.topics.size())) {
    pairs.push_back({model.topics[a].topic_id, model.topics[b].topic_id});
  }
  j["pair_order"] = std::move(pairs);
  ordered_json units = ordered_json::array();
  for (const auto& u : model.units) {
    ordered_json ju;
    ju["unit_id"] = u.unit_id.parts;
    auto g = model.group_of(u.unit_id);
    ju["group"] = g ? json(g->name) : json(nullptr);
    ju["values"] = u.values;
    units.push_back(std::move(ju));
  }
  j["units"] = std::move(units);
  auto ids = [](const std::vector<UnitId>& v) {
    ordered_json arr = ordered_json::array();
    for (const auto& id : v) arr.push_back(id.parts);
    return arr;
  };
  j["empty_units"] = ids(model.empty_units);
  j["zero_units"] = ids(model.zero_units);
  return j;
}

AccumulatedModel model_from_json(const json& j) {
  AccumulatedModel model;
  try {
    const auto norm = j.at("normalization").get<std::string>();
    if (norm == "sphere") {
      model.normalization = Normalization::Sphere;
    } else if (norm == "none") {
      model.normalization = Normalization::None;
    } else {
      throw Error(ErrorCode::ParseError, "unknown normalization '" + norm + "'");
    }
    model.spec = unit_spec_from_json(j.at("unit_spec"));
    model.topics = parse_topic_metadata(j.at("topics").dump());
    const std::size_t pairs = model.pair_count();
    for (const auto& ju : j.at("units")) {
      AdjacencyVector v;
      v.unit_id.parts = ju.at("unit_id").get<std::vector<std::string>>();
      v.values = ju.at("values").get<std::vector<double>>();
      if (v.values.size() != pairs) {
        throw Error(ErrorCode::DimensionMismatch,
                    "unit '" + v.unit_id.str() + "' has " + std::to_string(v.values.size()) +
                        " values, expected " + std::to_string(pairs));
      }
      if (ju.contains("group") && !ju["group"].is_null()) {
        model.groups[v.unit_id] = GroupLabel{ju["group"].get<std::string>()};
      }
      model.units.push_back(std::move(v));
    }
    for (const auto& id : j.value("empty_units", json::array())) {
      model.empty_units.push_back({id.get<std::vector<std::string>>()});
    }
    for (const auto& id : j.value("zero_units", json::array())) {
      model.zero_units.push_back({id.get<std::vector<std::string>>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("accumulated model: ") + e.what());
  }
  return model;
}

void write_model(const std::filesystem::path& path, const AccumulatedModel& model) {
  io::write_file(path, model_to_json(model).dump(2) + "\n");
}

AccumulatedModel read_model(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace topicena
