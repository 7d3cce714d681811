#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sagents/plan.hpp"
#include "sagents/todo.hpp"
#include "sagents/world.hpp"

// Shared between the unit tests and the acceptance binary.
namespace fixtures {

struct MonitorCase {
    std::string name;
    std::string task;
    std::string transcript;
    sagents::TaskStatus expected;
};

// Transcripts in both shapes the monitor accepts, built from the protocol
// phrases and the record layout of the worked monitor examples.
inline std::vector<MonitorCase> monitor_cases() {
    return {
        {"start only", "Stage 1: Gather resources\n    WorkerA mine 27 stones.",
         "-[15:03:10]leader says: 'WorkerA, please mine 27 stones'\n"
         "-[15:03:20] WorkerA says: 'I'll start the task mine 27 stones now'",
         sagents::TaskStatus::Unknown},
        {"acknowledged", "Stage 1: Gather resources\n    WorkerA mine 27 stones.",
         "-[15:03:10]leader says: 'WorkerA, please mine 27 stones'\n-[15:03:20] WorkerA says: 'Got it!'",
         sagents::TaskStatus::Unknown},
        {"succeeded", "WorkerA mine 10 logs",
         "{'linnea3v3': [\"[13:40:02]workera says: 'I'll start the task mine 10 logs now'\", "
         "\"[13:51:55]workera says: 'I have succeeded the task mine 10 logs.'\", "
         "\"[13:51:55]workera says: 'my inventory is {'crafting_table': 1, 'oak_planks': 8, 'stick': 8, 'oak_log': 5, "
         "'birch_log': 5}, and my equipment is [None, None, None, None, 'crafting_table', None] '\"]}",
         sagents::TaskStatus::Success},
        {"failed", "WorkerA mine 15 more irons. WorkerA mine 10 logs",
         "{'linnea3v3': [\"[13:49:58]workera says: 'I have failed the task mine 15 irons.'\", "
         "\"[13:51:55]workera says: 'I have succeeded the task mine 10 logs.'\", "
         "\"[13:51:55]workera says: 'my inventory is {'crafting_table': 1, 'oak_planks': 8, 'stick': 8, 'oak_log': 5, "
         "'birch_log': 5}, and my equipment is [None, None, None, None, 'crafting_table', None] '\"]}",
         sagents::TaskStatus::Fail},
        {"inventory contradiction", "Craft a wooden pickaxe",
         "{'linnea3v3': [\"[19:35:09]workera says: 'I'll start the task Craft a wooden pickaxe now'\", "
         "\"[19:36:11]workera says: 'I have succeeded the task Craft a wooden pickaxe.'\", "
         "\"[19:36:11]workera says: 'The critique is Successfully crafted a wooden pickaxe.'\", "
         "\"[19:36:11]workera says: 'my inventory is {'acacia_log': 11}, and my equipment is [None, None, None, None, "
         "None, None] '\"]}",
         sagents::TaskStatus::Fail},
    };
}

// Todo lines from the worked action-planner examples with their parses.
inline std::vector<std::pair<std::string, sagents::AgentAction>> grammar_examples() {
    using sagents::AgentAction;
    using sagents::Verb;
    std::vector<std::pair<std::string, AgentAction>> out;
    AgentAction a;
    a.kind = AgentAction::Kind::Delegate;
    a.target = sagents::AgentId("WorkerA");
    a.verb = Verb::Mine;
    a.quantity = 25;
    a.item = "wood";
    out.emplace_back("inform WorkerA to mine 25 woods", a);
    AgentAction b = a;
    b.target = sagents::AgentId("workerB");
    b.quantity = 15;
    b.item = "stone";
    out.emplace_back("inform workerB mine 15 stone", b);
    AgentAction c;
    c.kind = AgentAction::Kind::Delegate;
    c.target = sagents::AgentId("workerA");
    c.verb = Verb::Build;
    c.item = "walls";
    c.position = sagents::Position{-10, 72, -30};
    out.emplace_back("inform workerA to build walls at (-10,72,-30) (use 48 planks)", c);
    AgentAction d;
    d.verb = Verb::Mine;
    d.quantity = 25;
    d.item = "wood";
    out.emplace_back("mine 25 woods", d);
    return out;
}

inline const std::vector<std::string>& fuzz_items() {
    static const std::vector<std::string> items{"log",   "stone",  "plank",          "stick",        "iron_ore",
                                                "wood",  "dirt",   "crafting_table", "wooden_pickaxe", "iron ingot",
                                                "walls", "roof",   "foundation",     "furnace",      "cobblestone"};
    return items;
}

// A random action in canonical form (what render produces and parse returns).
inline sagents::AgentAction random_action(sagents::SplitMix64& rng) {
    using sagents::AgentAction;
    using sagents::Verb;
    static const std::vector<Verb> verbs{Verb::Mine, Verb::Craft, Verb::Smelt, Verb::Kill, Verb::Cook,
                                         Verb::Equip, Verb::Build, Verb::Give, Verb::MoveTo};
    static const std::vector<std::string> players{"workerA", "WorkerB", "leader", "alice", "Bob7"};
    AgentAction a;
    a.verb = verbs[rng.below(verbs.size())];
    if (rng.below(3) == 0) {
        a.kind = AgentAction::Kind::Delegate;
        a.target = sagents::AgentId(players[rng.below(players.size())]);
    }
    auto pos = [&] {
        return sagents::Position{int(rng.below(401)) - 200, int(rng.below(128)), int(rng.below(401)) - 200};
    };
    if (a.verb == Verb::MoveTo) {
        a.position = pos();
        return a;
    }
    const auto& items = fuzz_items();
    if (a.verb == Verb::Build) {
        if (rng.below(2)) a.item = items[10 + rng.below(3)];
        a.position = pos();
        if (rng.below(3) == 0) a.quantity = 1 + int(rng.below(64));
        if (a.quantity && a.item) a.item = sagents::singular_item(*a.item);
        return a;
    }
    a.item = items[rng.below(items.size())];
    if (rng.below(4) != 0) a.quantity = 1 + int(rng.below(999));
    // Quantified items parse to their singular form.
    if (a.quantity) a.item = sagents::singular_item(*a.item);
    if (a.verb == Verb::Give) a.recipient = sagents::AgentId(players[rng.below(players.size())]);
    else if (rng.below(5) == 0) a.position = pos();
    return a;
}

inline sagents::WorldConfig small_config() {
    sagents::WorldConfig c = sagents::default_world_config();
    c.half_extent_x = 12;
    c.half_extent_z = 12;
    c.trees_per_chunk = 8;
    c.iron.max_radius = 0;
    c.iron.veins = 3;
    c.search_radius = 30;
    c.perception_radius = 6;
    c.chest = sagents::Position{0, c.surface_y + 1, 3};
    return c;
}

// Every item held, stored, or recoverable from a block.
inline std::map<std::string, long> item_totals(const sagents::WorldState& w) {
    std::map<std::string, long> t;
    for (const auto& [_, b] : w.bodies())
        for (const auto& [item, n] : b.inventory) t[item] += n;
    for (const auto& [_, inv] : w.chests())
        for (const auto& [item, n] : inv) t[item] += n;
    for (const auto& [_, id] : w.blocks()) {
        const auto& drop = w.config().blocks[id - 1].drop;
        if (!drop.empty()) t[drop] += 1;
    }
    for (auto it = t.begin(); it != t.end();) it = it->second == 0 ? t.erase(it) : std::next(it);
    return t;
}

// Two stocked agents on a small world; "a" can mine stone.
inline sagents::WorldState conservation_world(const sagents::WorldConfig& c, std::uint64_t seed) {
    auto w = sagents::generate_world(seed, c);
    w.add_body("a", {0, c.surface_y + 1, 0}, {{"wooden_pickaxe", 1}, {"plank", 6}});
    w.add_body("b", {3, c.surface_y + 1, 1}, {{"stone", 4}, {"log", 2}});
    w.execute("a", sagents::primitive::Equip{"wooden_pickaxe"});
    return w;
}

// A random item-moving primitive (no crafting or smelting, which transform items).
inline std::pair<sagents::AgentId, sagents::Primitive> random_primitive(sagents::SplitMix64& rng,
                                                                       const sagents::WorldConfig& c) {
    namespace p = sagents::primitive;
    const sagents::AgentId who = rng.below(2) ? "a" : "b";
    const sagents::AgentId other = who == sagents::AgentId("a") ? "b" : "a";
    static const std::vector<std::string> items{"log", "stone", "plank", "dirt"};
    const auto& item = items[rng.below(items.size())];
    const sagents::Position cell{int(rng.below(9)) - 4, c.surface_y + int(rng.below(3)), int(rng.below(9)) - 4};
    switch (rng.below(5)) {
        case 0: return {who, p::MineBlock{item, 1 + int(rng.below(3))}};
        case 1: return {who, p::PlaceBlock{item, cell}};
        case 2: return {who, p::GiveItem{other, item, 1 + int(rng.below(2))}};
        case 3: return {who, p::DepositChest{*c.chest, item, 1 + int(rng.below(2))}};
        default: return {who, p::MoveTo{cell}};
    }
}

}  // namespace fixtures
