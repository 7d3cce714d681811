#include "sagents/task.hpp"

#include <algorithm>
#include <regex>

#include "sagents/text.hpp"

namespace sagents {

nlohmann::json Event::to_json() const {
    return {{"tick", tick}, {"seq", seq}, {"agent", agent}, {"kind", kind}, {"detail", detail}};
}

Event Event::from_json(const nlohmann::json& j) {
    try {
        Event e;
        e.tick = j.at("tick").get<Tick>();
        e.seq = j.at("seq").get<std::uint64_t>();
        e.agent = j.at("agent").get<std::string>();
        e.kind = j.at("kind").get<std::string>();
        e.detail = j.value("detail", nlohmann::json::object());
        return e;
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::ParseFailure, std::string("bad event: ") + ex.what());
    }
}

std::string events_to_jsonl(const std::vector<Event>& events) {
    std::string out;
    for (const auto& e : events) out += e.to_json().dump() + "\n";
    return out;
}

std::vector<Event> events_from_jsonl(const std::string& text) {
    std::vector<Event> out;
    for (const auto& line : text::split_lines(text)) {
        if (text::trim(line).empty()) continue;
        try {
            out.push_back(Event::from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& ex) {
            throw Error(ErrorCode::ParseFailure, std::string("bad event line: ") + ex.what());
        }
    }
    return out;
}

namespace {

std::string pos_text(const Position& p) {
    return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + "," + std::to_string(p.z) + ")";
}

std::string plural_noun(const std::string& noun) {
    std::string s = text::replace_all(noun, "_", " ");
    if (!s.empty() && s.back() != 's') s += "s";
    return s;
}

}  // namespace

std::string TaskSpec::commission() const {
    if (kind == TaskKind::Shelter) return "build a shelter at " + pos_text(shelter.origin);
    return "mine " + std::to_string(quantity) + " " + plural_noun(noun.empty() ? item : noun);
}

std::string TaskSpec::label() const {
    if (kind == TaskKind::Shelter) return "shelter";
    return "collection-" + (noun.empty() ? item : noun) + "-" + std::to_string(quantity);
}

nlohmann::json TaskSpec::to_json() const {
    nlohmann::json j{{"kind", kind == TaskKind::Shelter ? "shelter" : "collection"}, {"commission", commission()}};
    if (kind == TaskKind::Collection) {
        j["item"] = item;
        j["quantity"] = quantity;
    } else {
        j["origin"] = {shelter.origin.x, shelter.origin.y, shelter.origin.z};
        j["width"] = shelter.width;
        j["depth"] = shelter.depth;
        j["wall_height"] = shelter.wall_height;
    }
    nlohmann::json inv = nlohmann::json::object();
    for (const auto& [id, items] : starting_inventories) inv[id.name()] = inventory_json(items);
    j["starting_inventories"] = inv;
    return j;
}

ShelterBlueprint ShelterBlueprint::from(const ShelterSpec& s) {
    ShelterBlueprint b;
    const Position& o = s.origin;
    for (int x = 0; x < s.width; ++x)
        for (int z = 0; z < s.depth; ++z) {
            b.foundation.push_back({o.x + x, o.y, o.z + z});
            b.roof.push_back({o.x + x, o.y + s.wall_height + 1, o.z + z});
        }
    for (int y = 1; y <= s.wall_height; ++y)
        for (int x = 0; x < s.width; ++x)
            for (int z = 0; z < s.depth; ++z)
                if (x == 0 || z == 0 || x == s.width - 1 || z == s.depth - 1) b.walls.push_back({o.x + x, o.y + y, o.z + z});
    return b;
}

const std::vector<Position>* ShelterBlueprint::part(const std::string& name) const {
    const std::string n = singular_item(name);
    if (n == "foundation" || n == "floor") return &foundation;
    if (n == "wall") return &walls;
    if (n == "roof" || n == "ceiling") return &roof;
    return nullptr;
}

std::string ShelterBlueprint::block_for(const std::string& name) const {
    const auto* p = part(name);
    if (p == &foundation) return foundation_block;
    if (p == &walls) return wall_block;
    if (p == &roof) return roof_block;
    return "";
}

std::map<Position, std::string> ShelterBlueprint::cells() const {
    std::map<Position, std::string> out;
    for (const auto& c : foundation) out[c] = foundation_block;
    for (const auto& c : walls) out[c] = wall_block;
    for (const auto& c : roof) out[c] = roof_block;
    return out;
}

TaskSpec make_collection(const WorldConfig& config, const std::string& item, int quantity) {
    if (quantity <= 0) throw Error(ErrorCode::InvalidParams, "collection quantity must be positive");
    const std::string canon = canonical_item_name(config, singular_item(item));
    const bool minable = std::any_of(config.blocks.begin(), config.blocks.end(),
                                     [&](const BlockInfo& b) { return !b.drop.empty() && b.drop == canon; });
    if (!minable) throw Error(ErrorCode::InvalidParams, "no block yields " + item);
    TaskSpec t;
    t.kind = TaskKind::Collection;
    t.item = canon;
    t.noun = singular_item(item);
    t.quantity = quantity;
    return t;
}

TaskSpec make_shelter(const ShelterSpec& spec) {
    if (spec.width < 3 || spec.depth < 3) throw Error(ErrorCode::InvalidParams, "shelter footprint must be at least 3x3");
    if (spec.wall_height < 1) throw Error(ErrorCode::InvalidParams, "shelter walls need a height");
    TaskSpec t;
    t.kind = TaskKind::Shelter;
    t.shelter = spec;
    return t;
}

TaskSpec parse_task(const WorldConfig& config, const std::string& textual) {
    const auto parts = text::split(text::trim(textual), ':');
    if (parts.empty()) throw Error(ErrorCode::InvalidParams, "empty task");
    const std::string kind = to_lower(parts[0]);
    try {
        if (kind == "collection" && parts.size() == 3) return make_collection(config, parts[1], std::stoi(parts[2]));
        if (kind == "shelter" && parts.size() <= 2) {
            ShelterSpec s;
            if (parts.size() == 2) {
                const auto xyz = text::split(parts[1], ',');
                if (xyz.size() != 3) throw Error(ErrorCode::InvalidParams, "shelter origin must be x,y,z");
                s.origin = {std::stoi(xyz[0]), std::stoi(xyz[1]), std::stoi(xyz[2])};
            }
            return make_shelter(s);
        }
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::InvalidParams, "bad number in task " + textual);
    }
    throw Error(ErrorCode::InvalidParams, "unknown task " + textual + " (collection:<item>:<n> or shelter[:x,y,z])");
}

void assign_starting_inventories(TaskSpec& task, const std::vector<AgentId>& workers) {
    task.starting_inventories.clear();
    for (const auto& w : workers) task.starting_inventories[w];
    if (task.kind != TaskKind::Shelter || workers.empty()) return;
    const auto bp = ShelterBlueprint::from(task.shelter);
    const int stone = static_cast<int>(bp.foundation.size() + bp.roof.size());
    const int planks = static_cast<int>(bp.walls.size());
    if (workers.size() == 1) {
        task.starting_inventories[workers[0]] = {{"stone", stone}, {"plank", planks}};
        return;
    }
    const int carpenters = static_cast<int>(workers.size()) - 1;
    for (int i = 0; i < carpenters; ++i) {
        const int share = planks / carpenters + (i < planks % carpenters ? 1 : 0);
        if (share > 0) task.starting_inventories[workers[i]]["plank"] = share;
    }
    task.starting_inventories[workers.back()]["stone"] = stone;
}

ShelterCheck verify_shelter(const WorldState& world, const ShelterBlueprint& blueprint, const std::set<Position>& pending) {
    ShelterCheck c;
    for (const auto& [cell, block] : blueprint.cells()) {
        const std::string actual = world.block_name_at(cell);
        if (pending.count(cell) || actual == "air") c.missing.push_back(cell);
        else if (actual != block) c.wrong_material.push_back(cell);
    }
    c.complete = c.missing.empty() && c.wrong_material.empty();
    return c;
}

std::vector<AuditViolation> stage_order_audit(const std::vector<Event>& events, const ShelterBlueprint& blueprint) {
    std::vector<AuditViolation> out;
    const std::set<Position> foundation(blueprint.foundation.begin(), blueprint.foundation.end());
    const std::set<Position> walls(blueprint.walls.begin(), blueprint.walls.end());
    const std::set<Position> roof(blueprint.roof.begin(), blueprint.roof.end());
    std::set<Position> placed_foundation, placed_walls;
    for (const auto& e : events) {
        if (e.kind != "place") continue;
        const auto& c = e.detail.at("cell");
        const Position p{c.at(0).get<int>(), c.at(1).get<int>(), c.at(2).get<int>()};
        if (foundation.count(p)) {
            placed_foundation.insert(p);
        } else if (walls.count(p)) {
            if (placed_foundation.size() < foundation.size()) out.push_back({e.seq, p, "wall placed before the foundation was complete"});
            placed_walls.insert(p);
        } else if (roof.count(p)) {
            if (placed_walls.size() < walls.size()) out.push_back({e.seq, p, "roof placed before the walls were complete"});
        }
    }
    return out;
}

int goal_progress(const TaskSpec& task, const WorldState& world, const PendingEffects& pending) {
    if (task.kind == TaskKind::Shelter) {
        const auto bp = ShelterBlueprint::from(task.shelter);
        int n = 0;
        for (const auto& [cell, block] : bp.cells())
            if (!pending.cells.count(cell) && world.block_name_at(cell) == block) ++n;
        return n;
    }
    long long total = 0;
    for (const auto& [id, body] : world.bodies()) {
        total += body.count(task.item);
        if (auto it = pending.deltas.find(id); it != pending.deltas.end())
            if (auto d = it->second.find(task.item); d != it->second.end()) total -= d->second;
    }
    for (const auto& [pos, inv] : world.chests())
        if (auto it = inv.find(task.item); it != inv.end()) total += it->second;
    return static_cast<int>(total);
}

bool goal_satisfied(const TaskSpec& task, const WorldState& world, const PendingEffects& pending) {
    if (task.kind == TaskKind::Shelter)
        return verify_shelter(world, ShelterBlueprint::from(task.shelter), pending.cells).complete;
    return goal_progress(task, world, pending) >= task.quantity;
}

CellResolver make_cell_resolver(const WorldState& world, const ShelterSpec& spec) {
    return [&world, spec](const AgentId&, const std::string& part, const Position& origin)
               -> std::optional<std::pair<Position, std::string>> {
        ShelterSpec s = spec;
        s.origin = origin;
        const auto bp = ShelterBlueprint::from(s);
        const auto* cells = bp.part(part);
        if (!cells) return std::nullopt;
        for (const auto& c : *cells)
            if (world.block_at(c) == kAir) return std::make_pair(c, bp.block_for(part));
        return std::nullopt;
    };
}

}  // namespace sagents
