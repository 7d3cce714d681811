#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace sagents;
using fixtures::item_totals;
using fixtures::small_config;

namespace {

// Trunk count by replaying the placement loop's draws.
long expected_trunks(std::uint64_t seed, const WorldConfig& c) {
    SplitMix64 rng(seed);
    const int hx = c.half_extent_x, hz = c.half_extent_z;
    const long trees = std::lround(c.trees_per_chunk * (2.0 * hx + 1) * (2.0 * hz + 1) / 256.0);
    std::vector<std::pair<int, int>> placed;
    for (long t = 0; t < trees; ++t)
        for (int a = 0; a < 20; ++a) {
            const int x = -hx + 1 + int(rng.below(2 * hx - 1));
            const int z = -hz + 1 + int(rng.below(2 * hz - 1));
            if (std::abs(x) <= kClearZone && std::abs(z) <= kClearZone) continue;
            bool near = false;
            for (auto [px, pz] : placed) near |= std::abs(px - x) < 3 && std::abs(pz - z) < 3;
            if (near) continue;
            rng.below(c.tree_max_height - c.tree_min_height + 1);
            placed.emplace_back(x, z);
            break;
        }
    return static_cast<long>(placed.size());
}

long trunk_columns(const WorldState& w) {
    long n = 0;
    const auto& c = w.config();
    for (int x = -c.half_extent_x; x <= c.half_extent_x; ++x)
        for (int z = -c.half_extent_z; z <= c.half_extent_z; ++z)
            if (w.block_name_at({x, c.surface_y + 1, z}) == "log") ++n;
    return n;
}

}  // namespace

TEST(World, GenerationIsDeterministic) {
    const auto c = default_world_config();
    const auto a = generate_world(7, c), b = generate_world(7, c), d = generate_world(8, c);
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_EQ(a.blocks().size(), b.blocks().size());
    EXPECT_EQ(a.count_blocks("iron_ore"), b.count_blocks("iron_ore"));
    EXPECT_NE(trunk_columns(a) * 1000 + long(a.count_blocks("log")), trunk_columns(d) * 1000 + long(d.count_blocks("log")));
}

TEST(World, TreeCountMatchesIndependentReplay) {
    for (std::uint64_t seed : {1ULL, 42ULL, 99ULL}) {
        const auto c = default_world_config();
        EXPECT_EQ(trunk_columns(generate_world(seed, c)), expected_trunks(seed, c)) << seed;
        const auto s = small_config();
        EXPECT_EQ(trunk_columns(generate_world(seed, s)), expected_trunks(seed, s)) << seed;
    }
}

TEST(World, IronStaysInBand) {
    const auto c = default_world_config();
    const auto w = generate_world(42, c);
    ASSERT_GT(w.count_blocks("iron_ore"), 0u);
    for (const auto& [p, id] : w.blocks()) {
        if (w.block_name(id) != "iron_ore") continue;
        const double r = std::hypot(p.x, p.z);
        EXPECT_GE(r, c.iron.min_radius);
        EXPECT_LE(r, c.iron.max_radius);
    }
}

TEST(World, PerceptionMatchesBruteForce) {
    auto w = generate_world(3, small_config());
    w.add_body("a", {9, w.config().surface_y + 1, 9});
    const auto snap = w.perceive("a");
    const Position me{9, w.config().surface_y + 1, 9};
    const long long r2 = 36;
    std::map<std::string, long long> best;
    for (const auto& [p, id] : w.blocks()) {
        const long long d2 = distance_squared(p, me);
        if (d2 > r2) continue;
        auto name = w.block_name(id);
        if (!best.count(name) || d2 < best[name]) best[name] = d2;
    }
    ASSERT_EQ(snap.nearby_blocks.size(), best.size());
    for (const auto& [name, d2] : best) EXPECT_EQ(distance_squared(snap.nearby_blocks.at(name), me), d2) << name;
    EXPECT_EQ(snap.nearby_chest_contents.size(), distance_squared(*w.config().chest, me) <= r2 ? 1u : 0u);
}

TEST(World, StoneNeedsPickaxe) {
    auto w = generate_world(1, default_world_config());
    w.add_body("a", spawn_position(w.config(), -1, 1));
    const auto r = w.execute("a", primitive::MineBlock{"stone", 1});
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.error, ErrorCode::NoTool);
    EXPECT_EQ(w.body("a").count("stone"), 0);
}

TEST(World, OneLogMakesFourPlanks) {
    auto w = generate_world(1, default_world_config());
    w.add_body("a", {0, 65, 0}, {{"log", 1}});
    const auto r = w.execute("a", primitive::CraftItem{"planks", 4});
    ASSERT_TRUE(r.ok) << r.transcript;
    EXPECT_EQ(w.body("a").count("plank"), 4);
    EXPECT_EQ(w.body("a").count("log"), 0);
    EXPECT_EQ(r.ticks, w.config().ticks.craft);
    const auto again = w.execute("a", primitive::CraftItem{"plank", 1});
    EXPECT_EQ(again.error, ErrorCode::NoMaterials);
}

TEST(World, MineTicksFollowGreedyNearestPath) {
    const auto c = small_config();
    auto w = generate_world(5, c);
    const Position home{0, c.surface_y + 1, 0};
    w.add_body("a", home);

    // Greedy nearest-log walk computed from a snapshot of the block map.
    std::set<Position> logs;
    for (const auto& [p, id] : w.blocks())
        if (w.block_name(id) == "log" && distance_squared(p, home) <= 30LL * 30) logs.insert(p);
    const int n = std::min<int>(5, static_cast<int>(logs.size()));
    ASSERT_GT(n, 0);
    Position at = home;
    Tick expected = 0;
    for (int i = 0; i < n; ++i) {
        auto best = logs.begin();
        for (auto it = logs.begin(); it != logs.end(); ++it)
            if (distance_squared(*it, at) < distance_squared(*best, at)) best = it;
        expected += static_cast<Tick>(std::ceil(distance(at, *best) - 1e-9)) * c.ticks.move_per_block + 20;
        at = *best;
        logs.erase(best);
    }
    const auto r = w.execute("a", primitive::MineBlock{"woods", n});
    ASSERT_TRUE(r.ok) << r.transcript;
    EXPECT_EQ(r.ticks, expected);
    EXPECT_EQ(w.body("a").count("log"), n);
}

TEST(World, MissingTargetCostsExploreTime) {
    auto c = small_config();
    c.trees_per_chunk = 0;
    auto w = generate_world(5, c);
    w.add_body("a", {0, 65, 0});
    const auto r = w.execute("a", primitive::MineBlock{"log", 2});
    EXPECT_EQ(r.error, ErrorCode::TargetNotFound);
    EXPECT_EQ(r.ticks, c.ticks.explore);
}

TEST(World, InterleavedAgentsShareTheWorld) {
    const auto c = small_config();
    auto w = generate_world(11, c);
    w.add_body("a", {0, 65, 0});
    w.add_body("b", {1, 65, 0});
    const auto before = w.count_blocks("log");
    int got = 0;
    for (int i = 0; i < 4; ++i) {
        for (const char* who : {"a", "b"}) {
            const auto r = w.execute(who, primitive::MineBlock{"log", 1});
            if (r.ok) ++got;
        }
    }
    EXPECT_EQ(w.count_blocks("log"), before - got);
    EXPECT_EQ(w.body("a").count("log") + w.body("b").count("log"), got);
}

TEST(World, GiveMovesItems) {
    auto w = generate_world(1, small_config());
    w.add_body("a", {0, 65, 0}, {{"stone", 5}});
    w.add_body("b", {2, 65, 0});
    EXPECT_TRUE(w.execute("a", primitive::GiveItem{"b", "stones", 3}).ok);
    EXPECT_EQ(w.body("a").count("stone"), 2);
    EXPECT_EQ(w.body("b").count("stone"), 3);
    EXPECT_EQ(w.execute("a", primitive::GiveItem{"b", "stone", 3}).error, ErrorCode::NoMaterials);
    EXPECT_EQ(w.execute("a", primitive::GiveItem{"a", "stone", 1}).error, ErrorCode::BadTarget);
}

TEST(World, ConservationUnderRandomPrimitives) {
    const auto c = small_config();
    SplitMix64 rng(2024);
    for (int seq = 0; seq < 40; ++seq) {
        auto w = fixtures::conservation_world(c, seq);
        const auto start = item_totals(w);
        for (int step = 0; step < 15; ++step) {
            const auto p = fixtures::random_primitive(rng, c);
            w.execute(p.first, p.second);
            ASSERT_EQ(item_totals(w), start) << "seq " << seq << " step " << step << " " << describe(p.second);
        }
    }
}
