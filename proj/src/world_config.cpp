#include <cmath>

#include "sagents/world.hpp"

namespace sagents {

namespace {

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key) && !j[key].is_null()) out = j[key].get<T>();
}

}  // namespace

WorldConfig WorldConfig::from_json(const nlohmann::json& root) {
    WorldConfig c;
    try {
        const nlohmann::json& w = root.contains("world") ? root["world"] : nlohmann::json::object();
        read(w, "half_extent_x", c.half_extent_x);
        read(w, "half_extent_z", c.half_extent_z);
        read(w, "surface_y", c.surface_y);
        read(w, "dirt_depth", c.dirt_depth);
        read(w, "stone_layers", c.stone_layers);
        read(w, "headroom", c.headroom);
        read(w, "trees_per_chunk", c.trees_per_chunk);
        read(w, "tree_min_height", c.tree_min_height);
        read(w, "tree_max_height", c.tree_max_height);
        if (w.contains("iron")) {
            const auto& i = w["iron"];
            read(i, "veins", c.iron.veins);
            read(i, "vein_size", c.iron.vein_size);
            read(i, "min_radius", c.iron.min_radius);
            read(i, "max_radius", c.iron.max_radius);
        }
        read(w, "perception_radius", c.perception_radius);
        read(w, "search_radius", c.search_radius);
        read(w, "spawn_spread", c.spawn_spread);
        read(w, "biome", c.biome);
        if (w.contains("chest") && !w["chest"].is_null()) {
            const auto& p = w["chest"];
            c.chest = Position{p.at(0).get<int>(), p.at(1).get<int>(), p.at(2).get<int>()};
        }
        read(w, "scripted_damage", c.scripted_damage);
        if (w.contains("damage_events")) {
            for (const auto& d : w["damage_events"])
                c.damage_events.push_back({d.at("at").get<Tick>(), d.at("agent").get<std::string>(),
                                           d.at("amount").get<int>()});
        }

        if (root.contains("ticks")) {
            const auto& t = root["ticks"];
            read(t, "move_per_block", c.ticks.move_per_block);
            read(t, "craft", c.ticks.craft);
            read(t, "smelt", c.ticks.smelt);
            read(t, "place", c.ticks.place);
            read(t, "give", c.ticks.give);
            read(t, "equip", c.ticks.equip);
            read(t, "deposit", c.ticks.deposit);
            read(t, "explore", c.ticks.explore);
        }
        if (root.contains("blocks")) {
            for (const auto& b : root["blocks"])
                c.blocks.push_back({b.at("name").get<std::string>(), b.value("drop", std::string{}), b.value("tier", 0),
                                    b.value("mine_ticks", Tick{0})});
        }
        if (root.contains("recipes")) {
            for (const auto& r : root["recipes"]) {
                Recipe rec;
                rec.output = r.at("output").get<std::string>();
                rec.count = r.value("count", 1);
                rec.inputs = r.at("inputs").get<Inventory>();
                if (r.contains("station") && !r["station"].is_null()) rec.station = r["station"].get<std::string>();
                rec.tool_required = r.value("tool_required", 0);
                c.recipes.push_back(std::move(rec));
            }
        }
        if (root.contains("smelting")) {
            for (const auto& s : root["smelting"])
                c.smelting.push_back({s.at("output").get<std::string>(), s.at("input").get<std::string>(),
                                      s.value("station", std::string("furnace"))});
        }
        read(root, "tools", c.tools);
        read(root, "placeable", c.placeable);
        read(root, "aliases", c.aliases);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, e.what());
    }
    return c;
}

nlohmann::json WorldConfig::to_json() const {
    nlohmann::json j;
    auto& w = j["world"];
    w["half_extent_x"] = half_extent_x;
    w["half_extent_z"] = half_extent_z;
    w["surface_y"] = surface_y;
    w["dirt_depth"] = dirt_depth;
    w["stone_layers"] = stone_layers;
    w["headroom"] = headroom;
    w["trees_per_chunk"] = trees_per_chunk;
    w["tree_min_height"] = tree_min_height;
    w["tree_max_height"] = tree_max_height;
    w["iron"] = {{"veins", iron.veins},
                 {"vein_size", iron.vein_size},
                 {"min_radius", iron.min_radius},
                 {"max_radius", iron.max_radius}};
    w["perception_radius"] = perception_radius;
    w["search_radius"] = search_radius;
    w["spawn_spread"] = spawn_spread;
    w["biome"] = biome;
    w["chest"] = chest ? nlohmann::json{chest->x, chest->y, chest->z} : nlohmann::json(nullptr);
    w["scripted_damage"] = scripted_damage;
    w["damage_events"] = nlohmann::json::array();
    for (const auto& d : damage_events)
        w["damage_events"].push_back({{"at", d.at}, {"agent", d.agent}, {"amount", d.amount}});
    j["ticks"] = {{"move_per_block", ticks.move_per_block}, {"craft", ticks.craft}, {"smelt", ticks.smelt},
                  {"place", ticks.place},         {"give", ticks.give},   {"equip", ticks.equip},
                  {"deposit", ticks.deposit},     {"explore", ticks.explore}};
    j["blocks"] = nlohmann::json::array();
    for (const auto& b : blocks)
        j["blocks"].push_back({{"name", b.name}, {"drop", b.drop}, {"tier", b.required_tier}, {"mine_ticks", b.mine_ticks}});
    j["recipes"] = nlohmann::json::array();
    for (const auto& r : recipes) {
        nlohmann::json rj{{"output", r.output}, {"count", r.count}, {"inputs", r.inputs}};
        if (!r.station.empty()) rj["station"] = r.station;
        if (r.tool_required) rj["tool_required"] = r.tool_required;
        j["recipes"].push_back(std::move(rj));
    }
    j["smelting"] = nlohmann::json::array();
    for (const auto& s : smelting) j["smelting"].push_back({{"output", s.output}, {"input", s.input}, {"station", s.station}});
    j["tools"] = tools;
    j["placeable"] = placeable;
    j["aliases"] = aliases;
    return j;
}

WorldConfig default_world_config() {
    static const WorldConfig config = WorldConfig::from_json(default_config_json());
    return config;
}

Position spawn_position(const WorldConfig& config, int slot, int slots) {
    const int y = config.surface_y + 1;
    if (slot < 0 || slots <= 0) return {0, y, 0};
    const double angle = 2.0 * M_PI * static_cast<double>(slot) / static_cast<double>(slots);
    return {static_cast<int>(std::lround(config.spawn_spread * std::cos(angle))), y,
            static_cast<int>(std::lround(config.spawn_spread * std::sin(angle)))};
}

}  // namespace sagents
