#include "test_support.hpp"

#include <filesystem>
#include <fstream>

#include "topicena/pipeline.hpp"
#include "topicena/text_io.hpp"

using namespace topicena;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = TOPICENA_FIXTURE_DIR;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("topicena_test_" + name)) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

RunConfig fixture_config(const fs::path& out) {
  RunConfig c;
  c.corpus = kFixtures / "corpus.csv";
  c.topics = kFixtures / "topics.csv";
  c.topic_meta = kFixtures / "topic_meta.json";
  c.out = out;
  return c;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).generic_string()] = io::read_file(e.path());
  }
  return out;
}

}  // namespace

TEST_CASE("pipeline writes every stage output") {
  TempDir tmp("full");
  const auto manifest = run_pipeline(fixture_config(tmp.path));
  for (const char* f : {files::kUtterances, files::kCodes, files::kCodesSidecar, files::kDiagnostics,
                        files::kAccumulated, files::kProjection, files::kPoints,
                        files::kModelSummary, files::kManifest}) {
    CHECK(fs::exists(tmp.path / f));
  }
  CHECK(fs::exists(tmp.path / "plot_subtraction.svg"));
  CHECK(fs::exists(tmp.path / "network_HIGH.json"));
  CHECK(manifest["stages"]["model"]["projection"]["method"] == "means:HIGH,LOW");
  CHECK(manifest["stages"]["segment"]["documents"] == 12);
  CHECK(manifest["stages"]["model"]["statistics"]["comparisons"].size() == 2);
  CHECK_FALSE(manifest["config"].contains("out"));
}

TEST_CASE("pipeline output is byte-identical across runs") {
  TempDir a("det_a");
  TempDir b("det_b");
  run_pipeline(fixture_config(a.path));
  run_pipeline(fixture_config(b.path));
  const auto sa = snapshot(a.path);
  CHECK(sa.size() > 10);
  CHECK(sa == snapshot(b.path));
}

TEST_CASE("missing topic matrix fails before any output") {
  TempDir tmp("missing");
  auto c = fixture_config(tmp.path);
  c.topics = kFixtures / "does_not_exist.csv";
  try {
    run_pipeline(c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.stage() == "config");
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
  CHECK_FALSE(fs::exists(tmp.path));
}

TEST_CASE("stages rerun from files reproduce the pipeline") {
  TempDir full("stage_full");
  TempDir staged("stage_parts");
  run_pipeline(fixture_config(full.path));
  const auto c = fixture_config(staged.path);
  fs::create_directories(staged.path);
  run_segment_stage(c);
  run_encode_stage(c);
  run_model_stage(c);
  run_plot_stage(c);
  auto want = snapshot(full.path);
  want.erase(files::kManifest);
  CHECK(snapshot(staged.path) == want);

  // Re-running only the model stage leaves the files unchanged.
  run_model_stage(c);
  CHECK(snapshot(staged.path) == want);
}

TEST_CASE("stage errors carry their stage") {
  TempDir tmp("stage_err");
  const auto c = fixture_config(tmp.path);
  fs::create_directories(tmp.path);
  try {
    run_encode_stage(c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.stage() == "encode");
    CHECK(e.code() == ErrorCode::Io);
  }
}

TEST_CASE("manifest config replays to the same outputs") {
  TempDir first("replay_a");
  TempDir second("replay_b");
  auto c = fixture_config(first.path);
  c.threshold = 0.2;
  c.unit_spec.window = Window::moving(3);
  const auto manifest = run_pipeline(c);
  auto replay = config_from_json(nlohmann::json::parse(manifest.dump()));
  replay.out = second.path;
  run_pipeline(replay);
  CHECK(snapshot(first.path) == snapshot(second.path));
}

TEST_CASE("sweep writes one run per threshold") {
  TempDir tmp("sweep");
  const auto summary = run_sweep(fixture_config(tmp.path), parse_sweep_spec("thresholds=0.10,0.01,0.05"));
  CHECK(summary["thresholds"] == nlohmann::json::array({0.01, 0.05, 0.1}));
  REQUIRE(summary["runs"].size() == 3);
  double prev = 1e9;
  for (const auto& r : summary["runs"]) {
    CHECK(fs::exists(tmp.path / r["directory"].get<std::string>() / files::kManifest));
    const double mean = r["mean_codes_per_row"].get<double>();
    CHECK(mean <= prev);
    prev = mean;
  }
  CHECK(fs::exists(tmp.path / files::kSweepSummary));
}

TEST_CASE("single-group data falls back to a pooled network") {
  TempDir tmp("pooled");
  auto c = fixture_config(tmp.path);
  c.grouping.low = {1, 1};
  c.grouping.high = {2, 6};
  c.grouping.low_label = "ONLY";
  c.grouping.high_label = "ONLY";
  const auto manifest = run_pipeline(c);
  CHECK(manifest["stages"]["model"]["projection"]["method"] == "svd");
  CHECK(fs::exists(tmp.path / "network_ALL.json"));
  CHECK(fs::exists(tmp.path / "plot_ALL.svg"));
}
