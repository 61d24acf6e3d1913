#include "topicena/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <future>
#include <map>
#include <set>

#include <spdlog/spdlog.h>

#include "topicena/error.hpp"
#include "topicena/network.hpp"
#include "topicena/stats.hpp"
#include "topicena/text_io.hpp"
#include "topicena/topic_matrix.hpp"

namespace topicena {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (!e.stage().empty()) throw;
    throw e.with_stage(stage);
  } catch (const fs::filesystem_error& e) {
    throw Error(ErrorCode::Io, e.what()).with_stage(stage);
  }
}

std::string file_safe(const std::string& label) {
  std::string out;
  for (unsigned char c : label) {
    out.push_back(std::isalnum(c) || c == '-' || c == '_' ? static_cast<char>(c) : '_');
  }
  return out.empty() ? "_" : out;
}

ordered_json plot_to_json(const PlotOptions& p) {
  ordered_json j;
  j["width"] = p.width;
  j["height"] = p.height;
  j["margin"] = p.margin;
  j["node_radius_min"] = p.node_radius_min;
  j["node_radius_max"] = p.node_radius_max;
  j["edge_width_min"] = p.edge_width_min;
  j["edge_width_max"] = p.edge_width_max;
  j["point_radius"] = p.point_radius;
  j["positive_color"] = p.positive_color;
  j["negative_color"] = p.negative_color;
  j["neutral_color"] = p.neutral_color;
  j["show_points"] = p.show_points;
  j["show_labels"] = p.show_labels;
  return j;
}

PlotOptions plot_from_json(const json& j) {
  PlotOptions p;
  p.width = j.value("width", p.width);
  p.height = j.value("height", p.height);
  p.margin = j.value("margin", p.margin);
  p.node_radius_min = j.value("node_radius_min", p.node_radius_min);
  p.node_radius_max = j.value("node_radius_max", p.node_radius_max);
  p.edge_width_min = j.value("edge_width_min", p.edge_width_min);
  p.edge_width_max = j.value("edge_width_max", p.edge_width_max);
  p.point_radius = j.value("point_radius", p.point_radius);
  p.positive_color = j.value("positive_color", p.positive_color);
  p.negative_color = j.value("negative_color", p.negative_color);
  p.neutral_color = j.value("neutral_color", p.neutral_color);
  p.show_points = j.value("show_points", p.show_points);
  p.show_labels = j.value("show_labels", p.show_labels);
  return p;
}

ordered_json fingerprint(const fs::path& path) {
  const auto bytes = io::read_file(path);
  return {{"path", path.generic_string()}, {"bytes", bytes.size()},
          {"fnv1a64", io::fnv1a_hex(bytes)}};
}

json nan_to_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

ordered_json comparison_to_json(const GroupComparison& c) {
  ordered_json j;
  j["dimension"] = c.dimension;
  j["n_a"] = c.n_a;
  j["n_b"] = c.n_b;
  j["u_statistic"] = c.u_statistic;
  j["p_value_two_sided"] = c.p_value_two_sided;
  j["rank_biserial_effect"] = c.rank_biserial_effect;
  j["method"] = c.exact ? "exact" : "normal_approximation";
  if (!c.exact) j["z"] = c.z;
  return j;
}

PlotOptions plot_options_for(const RunConfig& config) {
  PlotOptions p = config.plot;
  p.group_colors[config.group_a.name] = p.positive_color;
  p.group_colors[config.group_b.name] = p.negative_color;
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::InvalidArgument, msg).with_stage("config");
  };
  if (corpus.empty()) fail("no corpus path given");
  if (!fs::is_regular_file(corpus)) fail("corpus file not found: " + corpus.string());
  if (topics.empty()) fail("no topic-matrix path given");
  if (!fs::is_regular_file(topics)) fail("topic-matrix file not found: " + topics.string());
  if (topic_meta && !fs::is_regular_file(*topic_meta)) {
    fail("topic metadata file not found: " + topic_meta->string());
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) fail("threshold must lie in [0,1]");
  if (dims < 2) fail("plotting needs dims >= 2");
  if (group_a == group_b) fail("comparison needs two distinct group labels");
  if (out.empty()) fail("no output directory given");
  try {
    unit_spec.validate();
  } catch (const Error& e) {
    throw e.with_stage("config");
  }
}

ordered_json config_to_json(const RunConfig& c) {
  ordered_json j;
  j["corpus"] = c.corpus.generic_string();
  j["format"] = to_string(c.format);
  j["column_aliases"] = c.column_aliases;
  j["topics"] = c.topics.generic_string();
  j["topic_meta"] = c.topic_meta ? json(c.topic_meta->generic_string()) : json(nullptr);
  j["threshold"] = c.threshold;
  j["threshold_comparison"] = "greater_than";
  j["segmentation"] = c.segmentation.describe();
  j["grouping"] = {{"low", c.grouping.low.describe()},
                   {"high", c.grouping.high.describe()},
                   {"low_label", c.grouping.low_label},
                   {"high_label", c.grouping.high_label}};
  j["unit_spec"] = unit_spec_to_json(c.unit_spec);
  j["projection"] = c.projection ? c.projection->describe() : std::string("auto");
  j["dims"] = c.dims;
  j["groups"] = {c.group_a.name, c.group_b.name};
  j["plot"] = plot_to_json(c.plot);
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  return j;
}

RunConfig config_from_json(const json& root) {
  const json& j = root.contains("config") ? root["config"] : root;
  RunConfig c;
  try {
    c.corpus = j.at("corpus").get<std::string>();
    c.format = parse_corpus_format(j.value("format", std::string("csv")));
    c.column_aliases = j.value("column_aliases", ColumnAliases{});
    c.topics = j.at("topics").get<std::string>();
    if (j.contains("topic_meta") && !j["topic_meta"].is_null()) {
      c.topic_meta = j["topic_meta"].get<std::string>();
    }
    c.threshold = j.value("threshold", c.threshold);
    c.segmentation = SegmentationRule::parse(j.value("segmentation", std::string("period")));
    if (j.contains("grouping")) {
      const auto& g = j["grouping"];
      c.grouping.low = ScoreRange::parse(g.value("low", std::string("1-3")));
      c.grouping.high = ScoreRange::parse(g.value("high", std::string("4-6")));
      c.grouping.low_label = g.value("low_label", c.grouping.low_label);
      c.grouping.high_label = g.value("high_label", c.grouping.high_label);
    }
    if (j.contains("unit_spec")) c.unit_spec = unit_spec_from_json(j["unit_spec"]);
    const auto projection = j.value("projection", std::string("auto"));
    if (projection != "auto") c.projection = ProjectionMethod::parse(projection);
    c.dims = j.value("dims", c.dims);
    if (j.contains("groups")) {
      const auto groups = j["groups"].get<std::vector<std::string>>();
      if (groups.size() != 2) {
        throw Error(ErrorCode::InvalidArgument, "groups must name exactly two labels");
      }
      c.group_a = {groups[0]};
      c.group_b = {groups[1]};
    }
    if (j.contains("plot")) c.plot = plot_from_json(j["plot"]);
    if (j.contains("seed") && !j["seed"].is_null()) c.seed = j["seed"].get<std::int64_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + e.what()).with_stage("config");
  }
  return c;
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

ordered_json run_segment_stage(const RunConfig& config) {
  return in_stage("segment", [&] {
    const auto docs = load_corpus(config.corpus, config.format, config.column_aliases);
    const auto table = segment_corpus(docs, config.segmentation, config.grouping);
    write_utterances(config.out / files::kUtterances, table);

    std::map<std::string, std::pair<std::size_t, std::size_t>> per_assignment;
    for (const auto& d : docs) ++per_assignment[d.assignment_id].first;
    std::map<std::string, std::size_t> per_group;
    for (const auto& u : table) {
      auto it = u.metadata.find("assignment_id");
      ++per_assignment[it == u.metadata.end() ? std::string() : it->second].second;
      ++per_group[u.group ? u.group->name : std::string()];
    }
    ordered_json summary;
    summary["documents"] = docs.size();
    summary["utterances"] = table.size();
    ordered_json assignments = ordered_json::object();
    for (const auto& [id, counts] : per_assignment) {
      assignments[id] = {{"documents", counts.first}, {"utterances", counts.second}};
    }
    summary["per_assignment"] = std::move(assignments);
    summary["utterances_per_group"] = per_group;
    spdlog::info("segment: {} documents -> {} utterances", docs.size(), table.size());
    return summary;
  });
}

ordered_json run_encode_stage(const RunConfig& config) {
  return in_stage("encode", [&] {
    const auto table = read_utterances(config.out / files::kUtterances);
    const auto probs = read_topic_probabilities(config.topics, config.topic_meta);
    std::set<UtteranceKey> known;
    for (const auto& u : table) known.insert({u.doc_id, u.utterance_index});
    for (const auto& k : probs.keys) {
      if (!known.count(k)) {
        throw Error(ErrorCode::UnknownUtterance,
                    "topic row (" + k.doc_id + ", " + std::to_string(k.utterance_index) +
                        ") is not in the utterance table");
      }
    }
    const auto codes = encode_inclusion(probs, config.threshold);
    write_code_matrix(config.out / files::kCodes, config.out / files::kCodesSidecar, codes);
    const auto report = coding_diagnostics(codes);
    auto summary = diagnostics_to_json(report);
    summary["threshold_used"] = codes.threshold_used;
    summary["rows_without_topic_row"] = table.size() - probs.rows();
    io::write_file(config.out / files::kDiagnostics, summary.dump(2) + "\n");
    for (const auto& w : report.warnings) spdlog::warn("encode: {}", w);
    return summary;
  });
}

ordered_json run_model_stage(const RunConfig& config) {
  return in_stage("model", [&] {
    const auto table = read_utterances(config.out / files::kUtterances);
    const auto codes = read_code_matrix(config.out / files::kCodes,
                                        config.out / files::kCodesSidecar);
    const auto raw = accumulate(codes, table, config.unit_spec);
    write_model(config.out / files::kAccumulated, raw);
    auto model = normalize_sphere(raw);

    const auto labels = group_labels(model);
    const bool have_a = std::find(labels.begin(), labels.end(), config.group_a) != labels.end();
    const bool have_b = std::find(labels.begin(), labels.end(), config.group_b) != labels.end();
    const bool compare = have_a && have_b;
    const ProjectionMethod method =
        config.projection ? *config.projection
        : compare         ? ProjectionMethod::means_rotation(config.group_a, config.group_b)
                          : ProjectionMethod::svd();
    const auto projection = fit_projection(model, method, config.dims);
    write_projection(config.out / files::kProjection, projection.model);
    write_points(config.out / files::kPoints, projection.points);

    const auto layout = optimize_node_positions(model, projection.points, projection.model);

    ordered_json networks = ordered_json::array();
    auto emit = [&](const std::string& name, const NetworkGraph& g) {
      const std::string file = "network_" + file_safe(name) + ".json";
      write_network(config.out / file, g, layout);
      ordered_json n{{"name", name}, {"file", file}, {"kind", g.kind.describe()}};
      if (g.kind.kind == NetworkKind::Kind::Subtraction) n["l1_mass"] = g.l1_mass();
      networks.push_back(std::move(n));
    };
    std::optional<double> subtraction_mass;
    if (compare) {
      const auto net_a = group_mean_network(model, config.group_a);
      const auto net_b = group_mean_network(model, config.group_b);
      const auto diff = subtract_network(net_a, net_b);
      subtraction_mass = diff.l1_mass();
      emit(config.group_a.name, net_a);
      emit(config.group_b.name, net_b);
      emit("subtraction", diff);
    } else {
      spdlog::warn("model: groups '{}' and '{}' are not both present; no comparison",
                   config.group_a.name, config.group_b.name);
      AccumulatedModel pooled = model;
      for (const auto& u : pooled.units) pooled.groups[u.unit_id] = GroupLabel{"ALL"};
      emit("ALL", group_mean_network(pooled, GroupLabel{"ALL"}));
    }

    ordered_json comparisons = ordered_json::array();
    if (compare) {
      for (std::size_t d = 0; d < config.dims; ++d) {
        std::vector<double> a;
        std::vector<double> b;
        for (const auto& pt : projection.points) {
          if (!pt.group) continue;
          if (*pt.group == config.group_a) a.push_back(pt.coords[d]);
          if (*pt.group == config.group_b) b.push_back(pt.coords[d]);
        }
        auto c = mann_whitney_u(a, b);
        c.dimension = d + 1;
        comparisons.push_back(comparison_to_json(c));
      }
    }

    ordered_json summary;
    summary["units"] = model.units.size();
    summary["empty_units"] = model.empty_units.size();
    summary["zero_units"] = model.zero_units.size();
    std::map<std::string, std::size_t> per_group;
    for (const auto& [id, g] : model.groups) ++per_group[g.name];
    summary["units_per_group"] = per_group;
    summary["normalization"] = "sphere";
    summary["projection"] = {{"method", method.describe()},
                             {"dims", config.dims},
                             {"variance_explained", projection.model.variance_explained}};
    ordered_json fit = ordered_json::array();
    for (std::size_t d = 0; d < layout.fit.size(); ++d) {
      fit.push_back({{"dim", d + 1},
                     {"pearson", nan_to_null(layout.fit[d].pearson)},
                     {"spearman", nan_to_null(layout.fit[d].spearman)}});
    }
    std::vector<int> isolated;
    for (std::size_t i = 0; i < layout.isolated.size(); ++i) {
      if (layout.isolated[i]) isolated.push_back(model.topics[i].topic_id);
    }
    summary["layout"] = {{"fit", fit},
                         {"ridge_applied", layout.ridge_applied},
                         {"isolated_topics", isolated},
                         {"units_used", layout.units_used}};
    summary["networks"] = std::move(networks);
    summary["subtraction_l1_mass"] = subtraction_mass ? json(*subtraction_mass) : json(nullptr);
    summary["statistics"] = {{"test", "mann_whitney_u"},
                             {"groups", {config.group_a.name, config.group_b.name}},
                             {"exact_max_total", kExactMaxTotal},
                             {"continuity_correction", kContinuityCorrection},
                             {"comparisons", comparisons}};
    io::write_file(config.out / files::kModelSummary, summary.dump(2) + "\n");
    return summary;
  });
}

ordered_json run_plot_stage(const RunConfig& config) {
  return in_stage("plot", [&] {
    const auto summary = json::parse(io::read_file(config.out / files::kModelSummary));
    const auto points = read_points(config.out / files::kPoints);
    const auto options = plot_options_for(config);
    ordered_json plots = ordered_json::array();
    for (const auto& n : summary.at("networks")) {
      const auto network = read_network(config.out / n.at("file").get<std::string>());
      const std::string file = "plot_" + file_safe(n.at("name").get<std::string>()) + ".svg";
      io::write_file(config.out / file,
                     render_network_svg(network.graph, network.layout, points, options));
      plots.push_back(file);
    }
    return ordered_json{{"plots", plots}};
  });
}

nlohmann::ordered_json run_pipeline(const RunConfig& config) {
  config.validate();
  fs::create_directories(config.out);

  ordered_json manifest;
  manifest["schema_version"] = kManifestSchemaVersion;
  manifest["tool"] = "topicena";
  manifest["version"] = kVersion;
  manifest["config"] = config_to_json(config);
  ordered_json inputs;
  inputs["corpus"] = fingerprint(config.corpus);
  inputs["topics"] = fingerprint(config.topics);
  if (config.topic_meta) inputs["topic_meta"] = fingerprint(*config.topic_meta);
  manifest["inputs"] = std::move(inputs);

  ordered_json stages;
  stages["segment"] = run_segment_stage(config);
  stages["encode"] = run_encode_stage(config);
  stages["model"] = run_model_stage(config);
  stages["plot"] = run_plot_stage(config);

  std::vector<std::string> outputs{files::kUtterances, files::kCodes,      files::kCodesSidecar,
                                   files::kDiagnostics, files::kAccumulated, files::kProjection,
                                   files::kPoints,      files::kModelSummary};
  for (const auto& n : stages["model"]["networks"]) outputs.push_back(n["file"].get<std::string>());
  for (const auto& p : stages["plot"]["plots"]) outputs.push_back(p.get<std::string>());
  ordered_json listing = ordered_json::array();
  for (const auto& name : outputs) {
    const auto bytes = io::read_file(config.out / name);
    listing.push_back({{"file", name}, {"bytes", bytes.size()}, {"fnv1a64", io::fnv1a_hex(bytes)}});
  }
  manifest["stages"] = std::move(stages);
  manifest["tolerances"] = {{"orthonormality", kOrthonormalityTolerance},
                            {"degenerate_means", kDegenerateMeansTolerance},
                            {"layout_ridge", kLayoutRidge},
                            {"zero_row_warning_fraction", kZeroRowWarningFraction}};
  manifest["outputs"] = std::move(listing);
  io::write_file(config.out / files::kManifest, manifest.dump(2) + "\n");
  return manifest;
}

std::vector<double> parse_sweep_spec(const std::string& text) {
  std::string list = text;
  if (list.rfind("thresholds=", 0) == 0) list = list.substr(11);
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    auto comma = list.find(',', start);
    if (comma == std::string::npos) comma = list.size();
    out.push_back(io::parse_double(list.substr(start, comma - start), 0));
    start = comma + 1;
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "empty sweep");
  return out;
}

nlohmann::ordered_json run_sweep(const RunConfig& config, std::vector<double> thresholds) {
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  std::vector<RunConfig> variants;
  for (double t : thresholds) {
    RunConfig v = config;
    v.threshold = t;
    v.out = config.out / ("threshold_" + io::format_double(t));
    v.validate();
    variants.push_back(std::move(v));
  }
  std::vector<std::future<ordered_json>> jobs;
  for (const auto& v : variants) {
    jobs.push_back(std::async(std::launch::async, [&v] { return run_pipeline(v); }));
  }
  ordered_json runs = ordered_json::array();
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto manifest = jobs[i].get();
    const auto& encode = manifest["stages"]["encode"];
    const auto& model = manifest["stages"]["model"];
    runs.push_back({{"threshold", thresholds[i]},
                    {"directory", variants[i].out.filename().generic_string()},
                    {"mean_codes_per_row", encode["codes_per_row"]["mean"]},
                    {"zero_row_fraction", encode["zero_row_fraction"]},
                    {"empty_units", model["empty_units"]},
                    {"projection", model["projection"]},
                    {"layout_fit", model["layout"]["fit"]},
                    {"subtraction_l1_mass", model["subtraction_l1_mass"]},
                    {"comparisons", model["statistics"]["comparisons"]}});
  }
  ordered_json summary;
  summary["schema_version"] = kManifestSchemaVersion;
  summary["tool"] = "topicena";
  summary["version"] = kVersion;
  summary["thresholds"] = thresholds;
  summary["runs"] = std::move(runs);
  io::write_file(config.out / files::kSweepSummary, summary.dump(2) + "\n");
  return summary;
}

}  // namespace topicena
