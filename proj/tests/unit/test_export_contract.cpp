#include "test_support.hpp"

#include "topicena/export_contract.hpp"
#include "topicena/text_io.hpp"

using namespace topicena;
using testing::code_of;

namespace {

const std::filesystem::path kFixtures = TOPICENA_FIXTURE_DIR;

std::vector<Utterance> fixture_utterances() {
  const auto docs = load_corpus(kFixtures / "corpus.csv", CorpusFormat::Csv);
  return segment_corpus(docs, SegmentationRule::period(), GroupingRule{});
}

ExportRunReport fixture_report() {
  ExportRunReport r;
  r.topic_count = 4;
  r.outlier_fraction = 0.125;
  r.topic_sizes = {{0, 10}, {1, 12}, {2, 9}, {3, 11}};
  r.config = TopicModelConfig::for_preset("coarse");
  return r;
}

}  // namespace

TEST_CASE("granularity presets") {
  CHECK(TopicModelConfig::for_preset("coarse").n_neighbors == 60);
  CHECK(TopicModelConfig::for_preset("medium").n_neighbors == 35);
  CHECK(TopicModelConfig::for_preset("fine").n_neighbors == 18);
  CHECK(code_of([] { TopicModelConfig::for_preset("tiny"); }) == ErrorCode::InvalidArgument);
  auto c = TopicModelConfig::for_preset("fine");
  c.min_dist = 1.0;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("run report round-trips") {
  const auto r = fixture_report();
  CHECK(run_report_from_json(nlohmann::json::parse(run_report_to_json(r).dump())) == r);
  auto j = nlohmann::json::parse(run_report_to_json(r).dump());
  j["outlier_fraction"] = 1.5;
  CHECK(code_of([&] { run_report_from_json(j); }) == ErrorCode::ParseError);
  j = nlohmann::json::parse(run_report_to_json(r).dump());
  j.erase("config");
  CHECK(code_of([&] { run_report_from_json(j); }) == ErrorCode::ParseError);
}

TEST_CASE("fixture export validates cleanly") {
  const auto v = validate_export(fixture_utterances(), io::read_file(kFixtures / "topics.csv"),
                                 io::read_file(kFixtures / "topic_meta.json"),
                                 run_report_to_json(fixture_report()).dump(), 0.05);
  CHECK(v.ok());
  CHECK(v.warnings.empty());
}

TEST_CASE("export validation catches contract breaks") {
  const auto table = fixture_utterances();
  const auto meta = io::read_file(kFixtures / "topic_meta.json");
  auto csv = io::read_file(kFixtures / "topics.csv");

  // Dropping one row breaks one-to-one alignment.
  const auto last = csv.rfind('\n', csv.size() - 2);
  auto v = validate_export(table, csv.substr(0, last + 1), meta, std::nullopt, 0.05);
  CHECK_FALSE(v.ok());

  // An outlier topic in the metadata is rejected.
  auto bad_meta = nlohmann::json::parse(meta);
  bad_meta.push_back({{"topic_id", -1}, {"label", "outlier"}, {"top_words", nlohmann::json::array()}});
  v = validate_export(table, csv, bad_meta.dump(), std::nullopt, 0.05);
  CHECK_FALSE(v.ok());

  auto report = fixture_report();
  report.topic_count = 5;
  v = validate_export(table, csv, meta, run_report_to_json(report).dump(), 0.05);
  CHECK_FALSE(v.ok());

  report = fixture_report();
  report.topic_sizes.erase(3);
  v = validate_export(table, csv, meta, run_report_to_json(report).dump(), 0.05);
  CHECK(v.ok());
  CHECK(v.warnings.size() == 1);

  // Threshold 1 codes nothing, which the diagnostics flag.
  v = validate_export(table, csv, meta, std::nullopt, 1.0);
  CHECK(v.ok());
  CHECK_FALSE(v.warnings.empty());
}
