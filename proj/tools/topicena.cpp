// topicena: command-line front end for the topic-coded epistemic network
// pipeline. Subcommands mirror the stages:
//
//   segment   corpus -> utterances.jsonl
//   encode    topic probabilities -> codes.csv + codes.json (+ diagnostics)
//   model     accumulate, normalize, project, networks, layout, stats
//   plot      network JSON + points -> SVG
//   pipeline  all of the above plus manifest.json (or a sweep with --sweep)
//   sweep     one pipeline per inclusion threshold plus sweep_summary.json
//   validate-export  check topic-model exporter output against utterances

#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "topicena/error.hpp"
#include "topicena/export_contract.hpp"
#include "topicena/log.hpp"
#include "topicena/pipeline.hpp"
#include "topicena/text_io.hpp"

namespace {

using topicena::RunConfig;

/// Raw flag values; applied onto a RunConfig only when the user set them.
struct Flags {
  std::string config_file;
  std::string corpus;
  std::string format;
  std::vector<std::string> aliases;
  std::string topics;
  std::string topic_meta;
  double threshold = 0.05;
  std::string segmenter;
  std::string low_range;
  std::string high_range;
  std::string window;
  std::vector<std::string> unit_keys;
  std::vector<std::string> conversation_keys;
  std::string group_field;
  std::string projection;
  std::size_t dims = 2;
  std::string groups;
  std::string out;
  double node_scale = 18.0;
  double edge_scale = 8.0;
  std::string colors;
  std::int64_t seed = 0;
  std::string sweep;
};

struct Registered {
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> setters;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

enum OptionSet : unsigned {
  kCorpus = 1u << 0,
  kTopics = 1u << 1,
  kModel = 1u << 2,
  kPlot = 1u << 3,
  kSweep = 1u << 4,
  kSweepRequired = 1u << 5,
  kConfig = 1u << 6,
};

void add_options(CLI::App* cmd, Flags& f, Registered& reg, unsigned sets) {
  auto add = [&](CLI::Option* opt, std::function<void(RunConfig&)> apply) {
    reg.setters.emplace_back(opt, std::move(apply));
  };
  add(cmd->add_option("--out", f.out, "Run directory"), [&f](RunConfig& c) { c.out = f.out; });
  if (sets & kConfig) {
    cmd->add_option("--config", f.config_file,
                    "Replay a manifest.json (or bare config JSON); flags override it");
  }
  if (sets & kCorpus) {
    add(cmd->add_option("--corpus", f.corpus, "Corpus file"),
        [&f](RunConfig& c) { c.corpus = f.corpus; });
    add(cmd->add_option("--format", f.format, "Corpus format")->check(CLI::IsMember({"csv", "jsonl"})),
        [&f](RunConfig& c) { c.format = topicena::parse_corpus_format(f.format); });
    add(cmd->add_option("--column-alias", f.aliases, "CSV header alias FROM=TO (e.g. essay_id=doc_id)"),
        [&f](RunConfig& c) {
          c.column_aliases.clear();
          for (const auto& a : f.aliases) {
            const auto eq = a.find('=');
            if (eq == std::string::npos) {
              throw topicena::Error(topicena::ErrorCode::InvalidArgument,
                                    "column alias must be FROM=TO: " + a);
            }
            c.column_aliases[a.substr(0, eq)] = a.substr(eq + 1);
          }
        });
    add(cmd->add_option("--segmenter", f.segmenter, "period | regex:PATTERN"),
        [&f](RunConfig& c) { c.segmentation = topicena::SegmentationRule::parse(f.segmenter); });
    add(cmd->add_option("--low-range", f.low_range, "Score range for the LOW group (default 1-3)"),
        [&f](RunConfig& c) { c.grouping.low = topicena::ScoreRange::parse(f.low_range); });
    add(cmd->add_option("--high-range", f.high_range, "Score range for the HIGH group (default 4-6)"),
        [&f](RunConfig& c) { c.grouping.high = topicena::ScoreRange::parse(f.high_range); });
  }
  if (sets & kTopics) {
    add(cmd->add_option("--topics", f.topics, "Topic probability CSV"),
        [&f](RunConfig& c) { c.topics = f.topics; });
    add(cmd->add_option("--topic-meta", f.topic_meta, "Topic metadata JSON"),
        [&f](RunConfig& c) { c.topic_meta = f.topic_meta; });
    add(cmd->add_option("--threshold", f.threshold, "Topic inclusion threshold (default 0.05)")
            ->check(CLI::Range(0.0, 1.0)),
        [&f](RunConfig& c) { c.threshold = f.threshold; });
  }
  if (sets & kModel) {
    add(cmd->add_option("--window", f.window, "per-line | moving:W | conversation"),
        [&f](RunConfig& c) { c.unit_spec.window = topicena::Window::parse(f.window); });
    add(cmd->add_option("--unit-keys", f.unit_keys, "Fields defining the unit (default doc_id)")
            ->delimiter(','),
        [&f](RunConfig& c) { c.unit_spec.unit_keys = f.unit_keys; });
    add(cmd->add_option("--conversation-keys", f.conversation_keys,
                        "Fields defining conversations (default conversation_id)")
            ->delimiter(','),
        [&f](RunConfig& c) { c.unit_spec.conversation_keys = f.conversation_keys; });
    add(cmd->add_option("--group-field", f.group_field, "Field holding the group label (default group)"),
        [&f](RunConfig& c) { c.unit_spec.group_field = f.group_field; });
    add(cmd->add_option("--projection", f.projection, "auto | svd | means:GROUPA,GROUPB"),
        [&f](RunConfig& c) {
          if (f.projection == "auto") {
            c.projection.reset();
          } else {
            c.projection = topicena::ProjectionMethod::parse(f.projection);
          }
        });
    add(cmd->add_option("--dims", f.dims, "Projection dimensions (>= 2)"),
        [&f](RunConfig& c) { c.dims = f.dims; });
  }
  if (sets & (kModel | kPlot)) {
    add(cmd->add_option("--groups", f.groups, "Comparison labels A,B (default HIGH,LOW)"),
        [&f](RunConfig& c) {
          const auto parts = split(f.groups, ',');
          if (parts.size() != 2) {
            throw topicena::Error(topicena::ErrorCode::InvalidArgument, "--groups needs A,B");
          }
          c.group_a = {parts[0]};
          c.group_b = {parts[1]};
        });
  }
  if (sets & kPlot) {
    add(cmd->add_option("--node-scale", f.node_scale, "Radius of the strongest node"),
        [&f](RunConfig& c) { c.plot.node_radius_max = f.node_scale; });
    add(cmd->add_option("--edge-scale", f.edge_scale, "Width of the heaviest edge"),
        [&f](RunConfig& c) { c.plot.edge_width_max = f.edge_scale; });
    add(cmd->add_option("--colors", f.colors, "Colors for group A / positive and group B / negative"),
        [&f](RunConfig& c) {
          const auto parts = split(f.colors, ',');
          if (parts.size() != 2) {
            throw topicena::Error(topicena::ErrorCode::InvalidArgument, "--colors needs A,B");
          }
          c.plot.positive_color = parts[0];
          c.plot.negative_color = parts[1];
        });
  }
  if (sets & kSweep) {
    auto* opt = cmd->add_option("--sweep", f.sweep, "thresholds=T1,T2,...");
    if (sets & kSweepRequired) opt->required();
  }
  if (sets & (kCorpus | kTopics)) {
    add(cmd->add_option("--seed", f.seed, "Reserved; recorded and forwarded to exporter configs"),
        [&f](RunConfig& c) { c.seed = f.seed; });
  }
}

RunConfig resolve(const Flags& f, const Registered& reg) {
  RunConfig config;
  if (!f.config_file.empty()) {
    config = topicena::config_from_json(
        nlohmann::json::parse(topicena::io::read_file(f.config_file)));
  }
  for (const auto& [opt, apply] : reg.setters) {
    if (opt->count() > 0) apply(config);
  }
  if (config.out.empty()) {
    throw topicena::Error(topicena::ErrorCode::InvalidArgument, "--out is required");
  }
  return config;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw topicena::Error(topicena::ErrorCode::InvalidArgument, what);
}

}  // namespace

int main(int argc, char** argv) {
  topicena::configure_logging_from_env();

  CLI::App app{"Topic-coded epistemic network analysis"};
  app.set_version_flag("--version", std::string(topicena::kVersion));
  app.require_subcommand(1);

  std::map<std::string, std::pair<Flags, Registered>> state;
  auto sub = [&](const char* name, const char* help, unsigned sets) {
    auto* cmd = app.add_subcommand(name, help);
    auto& [flags, reg] = state[name];
    add_options(cmd, flags, reg, sets);
    return cmd;
  };
  auto* segment = sub("segment", "Split the corpus into utterances", kCorpus);
  auto* encode = sub("encode", "Threshold topic probabilities into codes", kTopics);
  auto* model = sub("model", "Accumulate, project and co-register networks", kModel);
  auto* plot = sub("plot", "Render network plots as SVG", kPlot | kModel);
  auto* pipeline = sub("pipeline", "Run every stage and write a manifest",
                       kCorpus | kTopics | kModel | kPlot | kConfig | kSweep);
  auto* sweep = sub("sweep", "Run the pipeline once per threshold",
                    kCorpus | kTopics | kModel | kPlot | kConfig | kSweep | kSweepRequired);

  auto* check = app.add_subcommand("validate-export",
                                   "Check topic-model exporter files against an utterance table");
  std::string check_utterances, check_topics, check_meta, check_report;
  double check_threshold = 0.05;
  check->add_option("--utterances", check_utterances, "utterances.jsonl")->required();
  check->add_option("--topics", check_topics, "Topic probability CSV")->required();
  check->add_option("--topic-meta", check_meta, "Topic metadata JSON")->required();
  check->add_option("--run-report", check_report, "Exporter run report JSON");
  check->add_option("--threshold", check_threshold, "Threshold for coding diagnostics")
      ->check(CLI::Range(0.0, 1.0));

  CLI11_PARSE(app, argc, argv);

  try {
    nlohmann::ordered_json result;
    auto config_for = [&](const char* name) {
      const auto& [flags, reg] = state.at(name);
      return resolve(flags, reg);
    };
    if (check->parsed()) {
      namespace io = topicena::io;
      const auto v = topicena::validate_export(
          topicena::read_utterances(check_utterances), io::read_file(check_topics),
          io::read_file(check_meta),
          check_report.empty() ? std::nullopt : std::optional(io::read_file(check_report)),
          check_threshold);
      nlohmann::ordered_json j{{"ok", v.ok()}, {"errors", v.errors}, {"warnings", v.warnings}};
      std::cout << j.dump(2) << "\n";
      return v.ok() ? 0 : 1;
    }
    if (segment->parsed()) {
      const auto c = config_for("segment");
      require(!c.corpus.empty(), "segment needs --corpus");
      result = topicena::run_segment_stage(c);
    } else if (encode->parsed()) {
      const auto c = config_for("encode");
      require(!c.topics.empty(), "encode needs --topics");
      result = topicena::run_encode_stage(c);
    } else if (model->parsed()) {
      result = topicena::run_model_stage(config_for("model"));
    } else if (plot->parsed()) {
      result = topicena::run_plot_stage(config_for("plot"));
    } else if (pipeline->parsed()) {
      const auto c = config_for("pipeline");
      const auto& spec = state.at("pipeline").first.sweep;
      result = spec.empty() ? topicena::run_pipeline(c)
                            : topicena::run_sweep(c, topicena::parse_sweep_spec(spec));
    } else if (sweep->parsed()) {
      const auto c = config_for("sweep");
      result = topicena::run_sweep(c, topicena::parse_sweep_spec(state.at("sweep").first.sweep));
    }
    std::cout << result.dump(2) << "\n";
  } catch (const topicena::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
