#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "sagents/harness.hpp"

using namespace sagents;
namespace fs = std::filesystem;

namespace {

std::shared_ptr<const WorldConfig> cfg() {
    static auto c = std::make_shared<const WorldConfig>(default_world_config());
    return c;
}

std::vector<Event> place_events(const std::vector<Position>& cells) {
    std::vector<Event> out;
    std::uint64_t seq = 1;
    for (const auto& p : cells) out.push_back(Event{seq, seq, "w", "place", {{"cell", {p.x, p.y, p.z}}, {"block", "stone"}}}), ++seq;
    return out;
}

void build(WorldState& w, const std::vector<Position>& cells, const std::string& block) {
    for (const auto& p : cells) w.set_block(p, block);
}

}  // namespace

TEST(Task, ParseAndLabel) {
    const auto t = parse_task(*cfg(), "collection:stone:50");
    EXPECT_EQ(t.kind, TaskKind::Collection);
    EXPECT_EQ(t.commission(), "mine 50 stones");
    EXPECT_EQ(t.label(), "collection-stone-50");
    const auto s = parse_task(*cfg(), "shelter:4,65,-6");
    EXPECT_EQ(s.kind, TaskKind::Shelter);
    EXPECT_EQ(s.shelter.origin, (Position{4, 65, -6}));
    EXPECT_EQ(s.commission(), "build a shelter at (4,65,-6)");
    EXPECT_THROW(parse_task(*cfg(), "collection:stone:0"), Error);
    EXPECT_THROW(parse_task(*cfg(), "collection:unobtainium:3"), Error);
    EXPECT_THROW(parse_task(*cfg(), "party"), Error);
}

TEST(Task, BlueprintShape) {
    const auto bp = ShelterBlueprint::from(ShelterSpec{});
    EXPECT_EQ(bp.foundation.size(), 25u);
    EXPECT_EQ(bp.roof.size(), 25u);
    EXPECT_EQ(bp.walls.size(), 16u * 3);
    EXPECT_EQ(bp.cells().size(), 25u + 25 + 48);
    for (const auto& p : bp.walls) {
        EXPECT_TRUE(p.x == -2 || p.x == 2 || p.z == -2 || p.z == 2);
        EXPECT_GE(p.y, 66);
        EXPECT_LE(p.y, 68);
    }
    EXPECT_EQ(bp.block_for("wall"), "plank_block");
    EXPECT_EQ(bp.part("ceiling"), &bp.roof);
}

TEST(Task, GoalSatisfiedCountsInventoriesAndPending) {
    auto t = make_collection(*cfg(), "stone", 5);
    auto w = generate_world(1, *cfg());
    w.add_body("a", {0, 65, 0}, {{"stone", 3}});
    w.add_body("b", {1, 65, 0}, {{"stone", 2}});
    EXPECT_EQ(goal_progress(t, w), 5);
    EXPECT_TRUE(goal_satisfied(t, w));
    PendingEffects pending;
    pending.deltas["b"]["stone"] = 2;
    EXPECT_EQ(goal_progress(t, w, pending), 3);
    EXPECT_FALSE(goal_satisfied(t, w, pending));
}

TEST(Task, VerifyShelter) {
    const auto spec = ShelterSpec{};
    const auto bp = ShelterBlueprint::from(spec);
    auto w = generate_world(1, *cfg());
    // The foundation sits on the surface layer, so clear it first.
    for (const auto& [p, _] : bp.cells()) w.set_block(p, kAir);
    auto check = verify_shelter(w, bp);
    EXPECT_FALSE(check.complete);
    EXPECT_EQ(check.missing.size(), bp.cells().size());

    build(w, bp.foundation, "stone");
    build(w, bp.walls, "plank_block");
    build(w, bp.roof, "stone");
    EXPECT_TRUE(verify_shelter(w, bp).complete);
    EXPECT_FALSE(verify_shelter(w, bp, {bp.roof.front()}).complete);

    w.set_block(bp.walls.front(), "dirt");
    check = verify_shelter(w, bp);
    EXPECT_FALSE(check.complete);
    EXPECT_EQ(check.wrong_material, std::vector<Position>{bp.walls.front()});
}

TEST(Task, StageOrderAudit) {
    const auto bp = ShelterBlueprint::from(ShelterSpec{});
    std::vector<Position> ordered = bp.foundation;
    ordered.insert(ordered.end(), bp.walls.begin(), bp.walls.end());
    ordered.insert(ordered.end(), bp.roof.begin(), bp.roof.end());
    EXPECT_TRUE(stage_order_audit(place_events(ordered), bp).empty());

    // One roof cell placed before anything else.
    std::vector<Position> roof_first{bp.roof.front()};
    roof_first.insert(roof_first.end(), bp.foundation.begin(), bp.foundation.end());
    roof_first.insert(roof_first.end(), bp.walls.begin(), bp.walls.end());
    roof_first.insert(roof_first.end(), bp.roof.begin() + 1, bp.roof.end());
    const auto v = stage_order_audit(place_events(roof_first), bp);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].cell, bp.roof.front());
    EXPECT_EQ(v[0].seq, 1u);
}

TEST(Task, StartingInventoriesCoverTheBlueprint) {
    auto t = make_shelter();
    const std::vector<AgentId> workers{"workerA", "workerB", "workerC"};
    assign_starting_inventories(t, workers);
    const auto bp = ShelterBlueprint::from(t.shelter);
    int planks = 0;
    for (const auto& w : {"workerA", "workerB"}) planks += t.starting_inventories.at(w).at("plank");
    EXPECT_GE(planks, int(bp.walls.size()));
    EXPECT_GE(t.starting_inventories.at("workerC").at("stone"), int(bp.foundation.size() + bp.roof.size()));
}

TEST(Harness, WorkerNames) {
    EXPECT_EQ(worker_names(3), (std::vector<AgentId>{"workerA", "workerB", "workerC"}));
    EXPECT_EQ(worker_names(27).back(), AgentId("worker27"));
}

TEST(Harness, MatrixParsing) {
    const auto m = ExperimentMatrix::from_json(nlohmann::json::parse(R"({
        "name": "t",
        "cells": [{"name": "a", "org": "toa:2", "mode": "rb", "task": "collection:log:4", "seeds": [1, 2], "repetitions": 2}]
    })"));
    ASSERT_EQ(m.cells.size(), 1u);
    EXPECT_EQ(m.cells[0].mode, Mode::RoundBased);
    EXPECT_EQ(m.cells[0].seeds, (std::vector<std::uint64_t>{1, 2}));
    EXPECT_THROW(ExperimentMatrix::from_json(nlohmann::json::parse(R"({"cells": [{"name": "x"}]})")), Error);
}

TEST(Harness, EmptyMatrix) {
    const auto s = run_experiment(ExperimentMatrix{}, RunConfig::defaults(), backend_factory("oracle"));
    EXPECT_TRUE(s.runs.empty());
}

TEST(Harness, ExperimentWritesArtifacts) {
    const fs::path out = fs::temp_directory_path() / "sagents_harness_test";
    fs::remove_all(out);
    ExperimentMatrix m;
    m.cells.push_back({"toa", "demo", "toa:2", Mode::NonObstructive, "collection:log:4", {5}, 1, nlohmann::json::object()});
    m.cells.push_back({"broken", "demo", "ring:9", Mode::NonObstructive, "collection:log:4", {5}, 1, nlohmann::json::object()});
    const auto s = run_experiment(m, RunConfig::defaults(), backend_factory("oracle"), out, 2);
    ASSERT_EQ(s.runs.size(), 2u);
    EXPECT_TRUE(s.runs[0].report.success);
    EXPECT_FALSE(s.runs[1].error.empty());
    EXPECT_TRUE(s.runs[1].report.is_nan());
    for (const char* f : {"report.json", "events.jsonl", "pool.jsonl", "world_final.json"})
        EXPECT_TRUE(fs::exists(out / "toa" / "5" / f)) << f;
    EXPECT_TRUE(fs::exists(out / "summary.md"));
    EXPECT_TRUE(fs::exists(out / "summary.csv"));
    EXPECT_NE(s.markdown.find("demo"), std::string::npos);
    fs::remove_all(out);
}

TEST(Harness, BackendFactory) {
    EXPECT_EQ(backend_factory("oracle")(RunConfig::defaults())->name(), "oracle");
    EXPECT_THROW(backend_factory("psychic"), Error);
}
