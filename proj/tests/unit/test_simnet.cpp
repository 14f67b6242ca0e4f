#include <gtest/gtest.h>

#include <json.hpp>

#include "edgeshare/error.hpp"
#include "edgeshare/simnet.hpp"

using namespace edgeshare;

namespace {

SimScenario builtin(const std::string& name) {
  for (auto& s : builtin_scenarios()) {
    if (s.name == name) return s;
  }
  throw std::runtime_error("missing builtin " + name);
}

std::size_t count_outcome(const SimResult& r, const std::string& kind, const std::string& prefix) {
  return static_cast<std::size_t>(std::count_if(r.events.begin(), r.events.end(), [&](const SimEvent& e) {
    return e.kind == kind && e.outcome.rfind(prefix, 0) == 0;
  }));
}

}  // namespace

TEST(Simnet, HappyPathAllAccepted) {
  const SimResult r = run_scenario(builtin("happy-path"));
  EXPECT_TRUE(r.passed) << (r.diffs.empty() ? "" : r.diffs.front());
  EXPECT_EQ(count_outcome(r, "authorize", "accepted"), 10u);
  EXPECT_EQ(count_outcome(r, "authorize", "rejected"), 0u);
  EXPECT_EQ(count_outcome(r, "ledger-sync", "replica-valid"), 5u);
  EXPECT_EQ(count_outcome(r, "register", "ok"), 5u);
}

TEST(Simnet, AttacksAllDetected) {
  const SimResult r = run_scenario(builtin("attacks"));
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.attacks, 6u);
  EXPECT_EQ(r.attacks_detected, r.attacks);
  for (const auto& e : r.events) {
    if (e.kind == "detection" && e.payload == "attack=forge-share") {
      EXPECT_TRUE(e.outcome == "detected:tag-mismatch" || e.outcome == "detected:decrypt-failure") << e.outcome;
    }
    if (e.kind == "detection" && e.payload == "attack=replay") EXPECT_EQ(e.outcome, "detected:replay");
    EXPECT_NE(e.outcome, "undetected");
  }
  EXPECT_EQ(count_outcome(r, "verify-chain", "detected:index-"), 1u);
}

TEST(Simnet, ReplayScenario) {
  const SimResult r = run_scenario(builtin("replay"));
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(count_outcome(r, "detection", "detected:replay"), 3u);
}

TEST(Simnet, TicksNonDecreasingAndNoRawKeys) {
  for (const auto& s : builtin_scenarios()) {
    const SimResult r = run_scenario(s);
    for (std::size_t i = 1; i < r.events.size(); ++i) ASSERT_LE(r.events[i - 1].tick, r.events[i].tick);
    for (const auto& e : r.events) {
      ASSERT_TRUE(e.actor == "edge" || e.actor == "cloud" || e.actor == "adversary" || e.actor == "tsa");
    }
  }
}

TEST(Simnet, DeterministicReplay) {
  for (const auto& s : builtin_scenarios()) EXPECT_TRUE(replay_determinism_check(s)) << s.name;
}

TEST(Simnet, DifferentSeedsDiffer) {
  SimScenario a = builtin("happy-path"), b = a;
  b.seed = a.seed + 1;
  EXPECT_NE(run_scenario(a).event_log(), run_scenario(b).event_log());
}

TEST(Simnet, EmptyScenario) {
  SimScenario empty;
  EXPECT_TRUE(replay_determinism_check(empty));
  const SimResult r = run_scenario(empty);
  EXPECT_TRUE(r.passed);
  EXPECT_TRUE(r.event_log().empty());
}

TEST(Simnet, HeaderCarriesConfigHash) {
  const SimScenario s = builtin("replay");
  const auto header = nlohmann::json::parse(run_scenario(s).header_line);
  EXPECT_EQ(header.at("scenario"), "replay");
  EXPECT_EQ(header.at("seed"), 99);
  EXPECT_EQ(header.at("config_sha256").get<std::string>().size(), 64u);
}

TEST(Simnet, WrongExpectationFailsVerdict) {
  SimScenario s = builtin("replay");
  s.script[0].expect = "rejected";
  const SimResult r = run_scenario(s);
  EXPECT_FALSE(r.passed);
  EXPECT_FALSE(r.diffs.empty());
}

TEST(Simnet, ScenarioJsonRoundTripAndErrors) {
  for (const auto& s : builtin_scenarios()) {
    const auto j = to_json(s);
    EXPECT_EQ(to_json(scenario_from_json(j)), j);
  }
  for (const char* bad : {R"({"seed": "x"})", R"({"seed": 1, "script": [{"action": "fly"}]})",
                          R"({"seed": 1, "script": [{"action": "attack", "attack": "nope"}]})", "[]"}) {
    try {
      scenario_from_json(nlohmann::json::parse(bad));
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::config_error) << bad;
    }
  }
}

TEST(Simnet, UnknownDeviceIsConfigErrorOrFailedVerdict) {
  SimScenario s;
  s.device_count = 1;
  s.script.push_back({ActionKind::transact, "ghost", {}, {}});
  bool rejected = false;
  try {
    rejected = !run_scenario(s).passed;
  } catch (const Error& e) {
    rejected = e.code() == ErrorCode::config_error;
  }
  EXPECT_TRUE(rejected);
}

TEST(Simnet, AttackSuiteAcrossSeeds) {
  SimScenario s = builtin("attacks");
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    s.seed = seed;
    const SimResult r = run_scenario(s);
    ASSERT_TRUE(r.passed) << seed;
    ASSERT_EQ(r.attacks_detected, r.attacks) << seed;
  }
}

TEST(EdgeDataSplit, Partitions) {
  const SplitPolicy policy{10, {"archive"}};
  const std::vector<DataRecord> young{{"a", 1, {}}, {"b", 9, {}}};
  EXPECT_TRUE(edge_data_split(young, policy).historical.empty());

  const std::vector<DataRecord> mixed{{"a", 1, {}}, {"b", 10, {}}, {"c", 11, {}}, {"d", {}, "archive"},
                                      {"e", 2, "archive"}, {"f", {}, "live"}};
  const DataPartition p = edge_data_split(mixed, policy);
  std::vector<std::string> timely, hist;
  for (const auto& r : p.timely) timely.push_back(r.id);
  for (const auto& r : p.historical) hist.push_back(r.id);
  EXPECT_EQ(timely, (std::vector<std::string>{"a", "b", "f"}));
  EXPECT_EQ(hist, (std::vector<std::string>{"c", "d", "e"}));
}

TEST(EdgeDataSplit, UntaggedRecordIsClassificationError) {
  try {
    edge_data_split({{"x", {}, {}}}, SplitPolicy{5, {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::classification_error);
  }
}

TEST(EdgeDataSplit, RandomRecordsPartitionExactly) {
  Rng rng(8);
  std::vector<DataRecord> records;
  for (int i = 0; i < 1000; ++i) {
    DataRecord r{std::to_string(i), {}, {}};
    if (rng.uniform(4) != 0) r.age = rng.uniform(100);
    if (!r.age || rng.uniform(3) == 0) r.category = rng.uniform(2) ? "archive" : "live";
    records.push_back(r);
  }
  const DataPartition p = edge_data_split(records, SplitPolicy{50, {"archive"}});
  EXPECT_EQ(p.timely.size() + p.historical.size(), records.size());
  std::set<std::string> ids;
  for (const auto& r : p.timely) ids.insert(r.id);
  for (const auto& r : p.historical) EXPECT_TRUE(ids.insert(r.id).second);
  EXPECT_EQ(ids.size(), records.size());
}
