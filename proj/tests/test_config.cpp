#include <gtest/gtest.h>

#include <json.hpp>
#include <sstream>

#include "hmp/config.hpp"
#include "hmp/report.hpp"
#include "hmp/scenarios.hpp"

using namespace hmp;

TEST(Config, DumpParseRoundTrip) {
  for (const auto& name : builtin_names()) {
    const Scenario sc = builtin_scenario(name);
    const std::string text = dump_scenario(sc);
    const Scenario back = parse_scenario(text);
    EXPECT_EQ(dump_scenario(back), text) << name;
    EXPECT_EQ(back.T.times, sc.T.times);
    EXPECT_EQ(back.model.limits[0].tau_max, sc.model.limits[0].tau_max);
  }
}

TEST(Config, BaseWithOverrides) {
  const Scenario sc = parse_scenario(R"({"base": "throwing", "search": {"budget": 12, "seed": 3},
                                        "integrator": {"dt": 0.002}})");
  const Scenario ref = throwing_scenario();
  EXPECT_EQ(sc.search.budget, 12);
  EXPECT_EQ(sc.search.seed, 3u);
  EXPECT_EQ(sc.dt, 0.002);
  EXPECT_EQ(sc.search.restarts, ref.search.restarts);
  EXPECT_EQ(sc.model.links[1].length, ref.model.links[1].length);
}

TEST(Config, InfiniteBoundsAsNull) {
  const Scenario sc = builtin_scenario("free_pair");
  const auto j = nlohmann::json::parse(dump_scenario(sc));
  EXPECT_TRUE(j["goals"][0].is_null() || j["goals"][0]["q_lo"].is_null());
  const Scenario back = parse_scenario(j.dump());
  EXPECT_FALSE(back.goals[0].bounded());
}

TEST(Config, ErrorsNameTheKey) {
  auto message = [](const std::string& text) {
    try {
      parse_scenario(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message(R"({"base": "throwing", "bogus": 1})").find("bogus"), std::string::npos);
  EXPECT_NE(message(R"({"base": "nowhere"})").find("nowhere"), std::string::npos);
  EXPECT_NE(message("{not json"), "no error");
  EXPECT_NE(message(R"({"base": "throwing", "integrator": {"dt": -1}})"), "no error");
  EXPECT_THROW(load_scenario_file("/nonexistent/file.json"), ConfigError);
}

TEST(Config, ParseMatrix) {
  const auto like = throwing_scenario().T;
  const auto T = parse_matrix("0.1 0.3 0.9; 0, 0.2, 0.9", like);
  ASSERT_EQ(T.joints(), 2);
  ASSERT_EQ(T.columns(), 3);
  EXPECT_EQ(T.times(0, 1), 0.3);
  EXPECT_EQ(T.times(1, 0), 0.0);
  EXPECT_EQ(T.initial_mode, like.initial_mode);
  EXPECT_THROW(parse_matrix("0.1 0.3; 0.2", like), Error);
  EXPECT_THROW(parse_matrix("0.1 x 0.9; 0 0.2 0.9", like), Error);
}

TEST(Report, CsvLayout) {
  const Scenario sc = throwing_scenario();
  const auto ev = evaluate_motion(sc.T, sc);
  std::ostringstream out;
  write_trajectory_csv(out, ev.trajectory);
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  EXPECT_EQ(std::count(header.begin(), header.end(), ',') + 1, 4 * 2 + 2);
  EXPECT_EQ(header.substr(0, 2), "t,");
  int rows = 0;
  while (std::getline(in, row)) {
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), 9);
    ++rows;
  }
  EXPECT_EQ(rows, ev.trajectory.size());
}

TEST(Report, SummaryIsStableJson) {
  const Scenario sc = throwing_scenario();
  const auto ev = evaluate_motion(sc.T, sc);
  RunSummary run{"evaluate", sc.name, 0, 0, 1, {ev.score}, {}};
  const std::string a = summary_json(sc, ev, run);
  const std::string b = summary_json(sc, evaluate_motion(sc.T, sc), run);
  EXPECT_EQ(a, b);
  const auto j = nlohmann::json::parse(a);
  for (const char* key : {"T", "schedule", "objective", "score", "feasible", "violation", "penalty",
                          "peak_power", "diagnostics", "power_curve"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_TRUE(j.contains("release"));
  EXPECT_EQ(j["power_curve"]["t"].size(), ev.trajectory.t.size());
}
