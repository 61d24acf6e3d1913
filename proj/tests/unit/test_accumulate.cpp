#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "topicena/accumulate.hpp"

using namespace topicena;
using testing::build;
using testing::code_of;
using testing::CodedRow;

namespace {

UnitSpec spec_with(Window w) {
  UnitSpec s;
  s.window = w;
  return s;
}

std::map<std::string, std::vector<long long>> as_counts(const AccumulatedModel& m) {
  std::map<std::string, std::vector<long long>> out;
  for (const auto& u : m.units) {
    std::vector<long long> v;
    for (double x : u.values) v.push_back(static_cast<long long>(x));
    out[u.unit_id.str()] = v;
  }
  return out;
}

}  // namespace

TEST_CASE("pair order is lexicographic") {
  CHECK(pair_count(7) == 21);
  std::size_t p = 0;
  for (auto [i, j] : pair_order(7)) CHECK(pair_index(i, j, 7) == p++);
  CHECK(pair_order(3) == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {0, 2}, {1, 2}});
}

TEST_CASE("per-line and whole-conversation examples") {
  const auto [codes, table] = build({{"e", "c", "", {1, 1, 0}}, {"e", "c", "", {0, 1, 1}}}, 3);
  auto m = accumulate(codes, table, spec_with(Window::per_line()));
  REQUIRE(m.units.size() == 1);
  CHECK(m.units[0].values == std::vector<double>{1, 0, 1});
  m = accumulate(codes, table, spec_with(Window::whole_conversation()));
  CHECK(m.units[0].values == std::vector<double>{1, 1, 1});
  m = accumulate(codes, table, spec_with(Window::moving(2)));
  // Line 1 pairs (0,1) with itself; line 2 sees {0,1} and its own {1,2}.
  CHECK(m.units[0].values == std::vector<double>{2, 1, 1});
}

TEST_CASE("single active code contributes nothing per line") {
  const auto [codes, table] = build({{"e", "c", "", {0, 1, 0}}, {"e", "c", "", {1, 0, 0}}}, 3);
  const auto m = accumulate(codes, table, spec_with(Window::per_line()));
  CHECK(m.units[0].values == std::vector<double>{0, 0, 0});
  CHECK(m.empty_units.empty());
}

TEST_CASE("units with no coded line are flagged") {
  const auto [codes, table] = build({{"a", "c", "", {0, 0}}, {"b", "c", "", {1, 1}}}, 2);
  const auto m = accumulate(codes, table, spec_with(Window::per_line()));
  REQUIRE(m.empty_units.size() == 1);
  CHECK(m.empty_units[0].str() == "a");
}

TEST_CASE("accumulation errors") {
  auto [codes, table] = build({{"a", "c", "LOW", {1, 1}}, {"a", "c", "HIGH", {1, 1}}}, 2);
  CHECK(code_of([&] { accumulate(codes, table, spec_with(Window::per_line())); }) ==
        ErrorCode::GroupConflict);
  table[1].group = table[0].group;
  codes.keys.push_back({"zz", 0});
  codes.values.push_back(1);
  codes.values.push_back(0);
  CHECK(code_of([&] { accumulate(codes, table, spec_with(Window::per_line())); }) ==
        ErrorCode::UnknownUtterance);
  CHECK(code_of([] { Window::moving(1); }) == ErrorCode::InvalidArgument);
  CHECK(Window::parse("moving:4") == Window::moving(4));
  CHECK(Window::parse(Window::whole_conversation().describe()) == Window::whole_conversation());
}

TEST_CASE("composite unit and conversation keys") {
  auto [codes, table] = build({{"a", "c", "LOW", {1, 1}}, {"b", "c", "LOW", {1, 1}}}, 2);
  table[0].metadata["assignment_id"] = "4";
  table[1].metadata["assignment_id"] = "4";
  UnitSpec s;
  s.unit_keys = {"assignment_id", "group"};
  const auto m = accumulate(codes, table, s);
  REQUIRE(m.units.size() == 1);
  CHECK(m.units[0].unit_id.str() == "4|LOW");
  s.unit_keys = {"missing"};
  CHECK(code_of([&] { accumulate(codes, table, s); }) == ErrorCode::InvalidArgument);
  CHECK(m.units[0].values == std::vector<double>{2});
}

TEST_CASE("all window modes match the triple-loop oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t k = 2 + rng() % 4;
    const auto rows = testing::random_rows(rng, 6, 6, k);
    const auto [codes, table] = build(rows, k);
    const auto lines = testing::oracle_lines(rows);
    CHECK(as_counts(accumulate(codes, table, spec_with(Window::per_line()))) ==
          oracle::accumulate(lines, static_cast<int>(k), oracle::Mode::PerLine));
    CHECK(as_counts(accumulate(codes, table, spec_with(Window::moving(3)))) ==
          oracle::accumulate(lines, static_cast<int>(k), oracle::Mode::Moving, 3));
    CHECK(as_counts(accumulate(codes, table, spec_with(Window::whole_conversation()))) ==
          oracle::accumulate(lines, static_cast<int>(k), oracle::Mode::Conversation));
  }
}

TEST_CASE("per-line counts are invariant under row permutation") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    auto rows = testing::random_rows(rng, 5, 6, 4);
    const auto [c1, t1] = build(rows, 4);
    auto a = accumulate(c1, t1, spec_with(Window::per_line()));
    // Shuffling the code matrix rows only (keys travel with their values).
    std::vector<std::size_t> perm(c1.rows());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    CodeMatrix c2 = c1;
    for (std::size_t r = 0; r < perm.size(); ++r) {
      c2.keys[r] = c1.keys[perm[r]];
      std::copy_n(c1.values.begin() + perm[r] * 4, 4, c2.values.begin() + r * 4);
    }
    CHECK(as_counts(accumulate(c2, t1, spec_with(Window::per_line()))) == as_counts(a));
  }
}

TEST_CASE("window modes nest") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const auto rows = testing::random_rows(rng, 4, 8, 4, 0.5);
    const auto [codes, table] = build(rows, 4);
    const auto line = as_counts(accumulate(codes, table, spec_with(Window::per_line())));
    const auto w2 = as_counts(accumulate(codes, table, spec_with(Window::moving(2))));
    const auto w4 = as_counts(accumulate(codes, table, spec_with(Window::moving(4))));
    for (const auto& [unit, v] : line) {
      for (std::size_t p = 0; p < v.size(); ++p) {
        CHECK(v[p] <= w2.at(unit)[p]);
        CHECK(w2.at(unit)[p] <= w4.at(unit)[p]);
      }
    }
  }
}

TEST_CASE("sphere normalization") {
  auto m = normalize_sphere(testing::model_from_vectors({{3, 4, 0}, {0, 0, 0}, {5, 0, 0}}, {}, false));
  CHECK(m.units[0].values[0] == doctest::Approx(0.6));
  CHECK(m.units[0].values[1] == doctest::Approx(0.8));
  CHECK(m.units[0].values[2] == 0.0);
  CHECK(m.units[1].values == std::vector<double>{0, 0, 0});
  REQUIRE(m.zero_units.size() == 1);
  CHECK(m.zero_units[0].str() == "u001");
  CHECK(m.units[2].values == std::vector<double>{1, 0, 0});
  CHECK(code_of([&] { normalize_sphere(m); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("group mean vector") {
  const auto m = testing::model_from_vectors({{1, 0, 0}, {0, 1, 0}, {0, 0, 7}}, {"A", "A", "B"});
  CHECK(group_mean_vector(m, GroupLabel{"A"}) == std::vector<double>{0.5, 0.5, 0});
  CHECK(group_mean_vector(m, GroupLabel{"B"}) == std::vector<double>{0, 0, 7});
  CHECK(code_of([&] { group_mean_vector(m, GroupLabel{"C"}); }) == ErrorCode::EmptyGroup);
  CHECK(group_labels(m) == std::vector<GroupLabel>{{"A"}, {"B"}});
}

TEST_CASE("model JSON round-trip") {
  std::mt19937_64 rng(3);
  const auto rows = testing::random_rows(rng, 5, 5, 4);
  const auto [codes, table] = build(rows, 4);
  const auto m = normalize_sphere(accumulate(codes, table, spec_with(Window::moving(3))));
  const auto j = model_to_json(m);
  const auto back = model_from_json(nlohmann::json::parse(j.dump()));
  CHECK(model_to_json(back).dump() == j.dump());
  CHECK(back.spec == m.spec);
  CHECK(back.groups == m.groups);
}
