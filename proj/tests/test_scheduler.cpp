#include <cmath>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "sagents/harness.hpp"

using namespace sagents;

namespace {

Event ev(Tick t, std::uint64_t seq, std::string agent, std::string kind, nlohmann::json detail = nlohmann::json::object()) {
    return Event{t, seq, std::move(agent), std::move(kind), std::move(detail)};
}

struct Outcome {
    RunReport report;
    RunArtifacts artifacts;
};

Outcome run_org(const std::string& org, Mode mode, const std::string& task, std::uint64_t seed,
                const nlohmann::json& overrides = nlohmann::json::object()) {
    const auto config = config_with(overrides);
    OracleBackend oracle(config.world);
    Outcome o;
    o.report = run(org_from_string(org), mode, parse_task(*config.world, task), seed, config, oracle, &o.artifacts);
    return o;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Scheduler, NanTruthTable) {
    const NanPolicy p;
    auto tracker_with = [](int attempts) {
        ProgressTracker t;
        t.record_progress(0);
        t.record_attempts(attempts);
        return t;
    };
    const Tick over = 41 * kTicksPerMinute, under = 30 * kTicksPerMinute, edge = 40 * kTicksPerMinute;
    EXPECT_TRUE(nan_check(tracker_with(6), over, p));
    EXPECT_FALSE(nan_check(tracker_with(5), over, p));
    EXPECT_FALSE(nan_check(tracker_with(6), under, p));
    EXPECT_FALSE(nan_check(tracker_with(2), under, p));
    EXPECT_FALSE(nan_check(tracker_with(6), edge, p));
    EXPECT_TRUE(nan_check(tracker_with(6), edge + 1, p));

    ProgressTracker t = tracker_with(9);
    t.record_progress(1000);
    EXPECT_EQ(t.attempts(), 0);
    EXPECT_FALSE(nan_check(t, 1000 + over, p));
}

TEST(Scheduler, DurationMatrixFixture) {
    const std::vector<std::vector<int>> m{{10, 20, 30}, {10, 20, 30}};
    EXPECT_EQ(simulate_duration_matrix(m, Mode::RoundBased), 60 * kTicksPerMinute);
    EXPECT_EQ(simulate_duration_matrix(m, Mode::NonObstructive), 40 * kTicksPerMinute);
    EXPECT_EQ(simulate_duration_matrix(m, Mode::Relay), 120 * kTicksPerMinute);
    EXPECT_EQ(simulate_duration_matrix({{5, 5}, {5, 5}}, Mode::NonObstructive),
              simulate_duration_matrix({{5, 5}, {5, 5}}, Mode::RoundBased));
    EXPECT_THROW(simulate_duration_matrix({{1, 2}, {3}}, Mode::Relay), Error);
}

TEST(Scheduler, CollectMetricsCountsPlans) {
    std::vector<Event> events{ev(0, 1, "scheduler", "run_start",
                                 {{"agents", {"leader", "workerA", "workerB"}}, {"org", "tree"}, {"mode", "nonobstructive"},
                                  {"task", "t"}, {"seed", 7}, {"config_hash", "12"}})};
    std::uint64_t seq = 2;
    const std::vector<std::pair<std::string, int>> plans{{"leader", 4}, {"workerA", 3}, {"workerB", 4}};
    for (const auto& [who, n] : plans)
        for (int i = 0; i < n; ++i) events.push_back(ev(Tick(10 * seq), seq, who, "plan", {{"ticks", 30}})), ++seq;
    events.push_back(ev(600, seq, "scheduler", "goal"));
    const auto r = collect_metrics(events);
    EXPECT_EQ(r.mean_prompt_times, 11.0 / 3.0);
    EXPECT_EQ(r.per_agent_prompts.at("workerA"), 3);
    EXPECT_EQ(r.time_cost_min, 10.0);
    EXPECT_TRUE(r.success);
    EXPECT_EQ(r.seed, 7u);
    EXPECT_EQ(r.config_hash, 12u);
    EXPECT_EQ(r.per_agent_busy_ticks.at("leader"), 4u * 30);

    events.back() = ev(600, seq, "scheduler", "abort", {{"reason", "nan_rule"}});
    const auto n = collect_metrics(events);
    EXPECT_TRUE(n.is_nan());
    EXPECT_TRUE(n.to_json()["time_cost_min"].is_null());
}

TEST(Scheduler, SoloIsModeIndependent) {
    const auto a = run_org("solo", Mode::NonObstructive, "collection:log:8", 3).report;
    const auto b = run_org("solo", Mode::RoundBased, "collection:log:8", 3).report;
    const auto c = run_org("solo", Mode::Relay, "collection:log:8", 3).report;
    ASSERT_TRUE(a.success);
    EXPECT_EQ(a.time_cost_min, b.time_cost_min);
    EXPECT_EQ(a.time_cost_min, c.time_cost_min);
}

TEST(Scheduler, DeterministicLogs) {
    const auto a = run_org("toa:2", Mode::NonObstructive, "collection:stone:10", 9);
    const auto b = run_org("toa:2", Mode::NonObstructive, "collection:stone:10", 9);
    const auto c = run_org("toa:2", Mode::NonObstructive, "collection:stone:10", 10);
    EXPECT_EQ(events_to_jsonl(a.artifacts.events), events_to_jsonl(b.artifacts.events));
    EXPECT_EQ(a.report.to_json().dump(), b.report.to_json().dump());
    EXPECT_EQ(a.artifacts.pool_jsonl, b.artifacts.pool_jsonl);
    EXPECT_NE(events_to_jsonl(a.artifacts.events), events_to_jsonl(c.artifacts.events));
}

TEST(Scheduler, ReplayRebuildsReport) {
    const auto a = run_org("coa:3", Mode::Relay, "collection:log:9", 4);
    ASSERT_TRUE(a.report.success);
    const auto back = events_from_jsonl(events_to_jsonl(a.artifacts.events));
    EXPECT_EQ(collect_metrics(back).to_json().dump(), a.report.to_json().dump());
}

TEST(Scheduler, GoldenLog) {
    const std::string dir = SAGENTS_TEST_DATA;
    const auto golden = slurp(dir + "/golden_toa2_logs6.jsonl");
    const auto expected = nlohmann::json::parse(slurp(dir + "/golden_toa2_logs6.report.json"));
    ASSERT_FALSE(golden.empty());
    EXPECT_EQ(collect_metrics(events_from_jsonl(golden)).to_json(), expected);
    const auto fresh = run_org("toa:2", Mode::NonObstructive, "collection:log:6", 42);
    EXPECT_EQ(events_to_jsonl(fresh.artifacts.events), golden);
}

TEST(Scheduler, GoalWaitsForPrimitiveToFinish) {
    const auto a = run_org("toa:3", Mode::NonObstructive, "collection:stone:20", 42);
    ASSERT_TRUE(a.report.success);
    Tick goal = 0;
    for (const auto& e : a.artifacts.events)
        if (e.kind == "goal") goal = e.tick;
    // Effects land at a primitive's start, so an early goal would fire mid-primitive.
    bool ends_at_goal = false;
    for (const auto& e : a.artifacts.events)
        if (e.kind == "primitive_start" && e.detail.value("ok", false))
            ends_at_goal |= e.tick + e.detail["ticks"].get<Tick>() == goal;
    EXPECT_TRUE(ends_at_goal);
}

TEST(Scheduler, InvalidInputs) {
    const auto config = RunConfig::defaults();
    OracleBackend oracle(config.world);
    std::set<Edge> edges{{Vertex::of("a"), Vertex::of("b")}};
    const AgentGraph bad(Structure::Chain, {"a", "b"}, edges);
    try {
        run(bad, Mode::Relay, make_collection(*config.world, "log", 3), 1, config, oracle);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidOrganization);
    }
    TaskSpec empty;
    try {
        run(org_from_string("toa:2"), Mode::Relay, empty, 1, config, oracle);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TaskUndefined);
    }
}

TEST(Scheduler, ModeNames) {
    EXPECT_EQ(mode_from_string("rb"), Mode::RoundBased);
    EXPECT_EQ(mode_from_string("Non-Obstructive"), Mode::NonObstructive);
    EXPECT_EQ(mode_from_string(to_string(Mode::Relay)), Mode::Relay);
    EXPECT_THROW(mode_from_string("chaos"), Error);
}

TEST(Scheduler, ConfigHashTracksOverrides) {
    EXPECT_EQ(config_with({}).hash(), RunConfig::defaults().hash());
    EXPECT_NE(config_with({{"injector", {{"probability", 0.1}}}}).hash(), RunConfig::defaults().hash());
    EXPECT_THROW(config_with({{"scheduler", {{"max_ticks", "lots"}}}}), Error);
}
