#include <algorithm>
#include <cmath>
#include <sstream>

#include "sagents/text.hpp"
#include "sagents/world.hpp"

namespace sagents {

std::string to_string(const Position& p) {
    return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", " + std::to_string(p.z) + ")";
}

long long distance_squared(const Position& a, const Position& b) noexcept {
    const long long dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

double distance(const Position& a, const Position& b) noexcept {
    return std::sqrt(static_cast<double>(distance_squared(a, b)));
}

int AgentBody::count(const std::string& item) const {
    auto it = inventory.find(item);
    return it == inventory.end() ? 0 : it->second;
}

nlohmann::json inventory_json(const Inventory& inv) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : inv)
        if (v > 0) j[k] = v;
    return j;
}

namespace {

nlohmann::json position_json(const Position& p) { return nlohmann::json::array({p.x, p.y, p.z}); }

nlohmann::json equipment_json(const std::array<std::optional<std::string>, kEquipmentSlots>& eq) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& s : eq) j.push_back(s ? nlohmann::json(*s) : nlohmann::json(nullptr));
    return j;
}

ActionOutcome fail(ErrorCode code, Tick ticks, std::string msg) {
    ActionOutcome o;
    o.ok = false;
    o.error = code;
    o.ticks = ticks;
    o.transcript = std::move(msg);
    return o;
}

ActionOutcome success(Tick ticks, std::string msg) {
    ActionOutcome o;
    o.ok = true;
    o.ticks = ticks;
    o.transcript = std::move(msg);
    return o;
}

Tick ceil_ticks(double d) { return static_cast<Tick>(std::ceil(d - 1e-9)); }

}  // namespace

nlohmann::json PerceptionSnapshot::to_json() const {
    nlohmann::json j;
    j["inventory"] = inventory_json(inventory);
    j["equipment"] = equipment_json(equipment);
    nlohmann::json nb = nlohmann::json::object();
    for (const auto& [k, p] : nearby_blocks) nb[k] = position_json(p);
    j["nearby_blocks"] = nb;
    j["biome"] = biome;
    j["time"] = time;
    j["health"] = health;
    j["hunger"] = hunger;
    j["position"] = position_json(position);
    nlohmann::json chests = nlohmann::json::array();
    for (const auto& [p, inv] : nearby_chest_contents)
        chests.push_back({{"position", position_json(p)}, {"contents", inventory_json(inv)}});
    j["nearby_chest_contents"] = chests;
    return j;
}

std::string describe(const Primitive& p) {
    using namespace primitive;
    return std::visit(
        [](const auto& a) -> std::string {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, MoveTo>) return "move to " + to_string(a.target);
            else if constexpr (std::is_same_v<T, MineBlock>) return "mine " + std::to_string(a.count) + " " + a.kind;
            else if constexpr (std::is_same_v<T, CraftItem>) return "craft " + std::to_string(a.count) + " " + a.item;
            else if constexpr (std::is_same_v<T, SmeltItem>) return "smelt " + std::to_string(a.count) + " " + a.item;
            else if constexpr (std::is_same_v<T, PlaceBlock>) return "place " + a.kind + " at " + to_string(a.target);
            else if constexpr (std::is_same_v<T, GiveItem>)
                return "give " + std::to_string(a.count) + " " + a.item + " to " + a.target.name();
            else if constexpr (std::is_same_v<T, Equip>) return "equip " + a.item;
            else return "deposit " + std::to_string(a.count) + " " + a.item + " into chest at " + to_string(a.chest);
        },
        p);
}

WorldState::WorldState(std::shared_ptr<const WorldConfig> config, std::uint64_t seed)
    : config_(std::move(config)), seed_(seed) {
    if (!config_) throw Error(ErrorCode::InvalidConfig, "world config is null");
    block_ids_["air"] = kAir;
    BlockId next = 1;
    for (const auto& b : config_->blocks) {
        if (b.name.empty() || block_ids_.count(b.name)) throw Error(ErrorCode::InvalidConfig, "bad block entry: " + b.name);
        block_ids_[b.name] = next++;
    }
    index_.resize(next);
}

std::string WorldState::block_name(BlockId id) const {
    if (id == kAir) return "air";
    if (id > config_->blocks.size()) throw Error(ErrorCode::InvalidParams, "unknown block id");
    return config_->blocks[id - 1].name;
}

std::optional<BlockId> WorldState::block_id(std::string_view name) const {
    auto it = block_ids_.find(std::string(name));
    if (it == block_ids_.end()) return std::nullopt;
    return it->second;
}

BlockId WorldState::block_at(const Position& p) const {
    auto it = blocks_.find(p);
    return it == blocks_.end() ? kAir : it->second;
}

std::string WorldState::block_name_at(const Position& p) const { return block_name(block_at(p)); }

void WorldState::set_block_raw(const Position& p, BlockId id) {
    auto it = blocks_.find(p);
    if (it != blocks_.end()) {
        index_[it->second].erase(p);
        if (id == kAir) {
            blocks_.erase(it);
            return;
        }
        it->second = id;
    } else if (id != kAir) {
        blocks_.emplace(p, id);
    }
    if (id != kAir) index_[id].insert(p);
}

void WorldState::set_block(const Position& p, BlockId id) {
    if (id >= index_.size()) throw Error(ErrorCode::InvalidParams, "unknown block id");
    set_block_raw(p, id);
    if (!generating_) edits_[p] = id;
}

void WorldState::set_block(const Position& p, std::string_view name) {
    auto id = block_id(name);
    if (!id) throw Error(ErrorCode::InvalidParams, "unknown block " + std::string(name));
    set_block(p, *id);
}

std::size_t WorldState::count_blocks(std::string_view name) const {
    auto id = block_id(name);
    if (!id || *id == kAir) return 0;
    return index_[*id].size();
}

void WorldState::add_chest(const Position& p, Inventory contents) {
    set_block(p, "chest");
    chests_[p] = std::move(contents);
}

AgentBody& WorldState::add_body(const AgentId& owner, const Position& home, Inventory inventory) {
    if (bodies_.count(owner)) throw Error(ErrorCode::DuplicateAgent, owner.name());
    AgentBody b;
    b.owner = owner;
    b.position = home;
    b.home = home;
    for (auto& [k, v] : inventory)
        if (v > 0) b.inventory[canonical_item(k)] += v;
    return bodies_.emplace(owner, std::move(b)).first->second;
}

bool WorldState::has_body(const AgentId& id) const { return bodies_.count(id) > 0; }

AgentBody& WorldState::body(const AgentId& id) {
    auto it = bodies_.find(id);
    if (it == bodies_.end()) throw Error(ErrorCode::UnknownAgent, id.name());
    return it->second;
}

const AgentBody& WorldState::body(const AgentId& id) const {
    auto it = bodies_.find(id);
    if (it == bodies_.end()) throw Error(ErrorCode::UnknownAgent, id.name());
    return it->second;
}

std::string canonical_item_name(const WorldConfig& cfg, std::string_view raw) {
    std::string s = to_lower(text::trim(raw));
    for (char& c : s)
        if (c == ' ' || c == '-') c = '_';
    auto known = [&](const std::string& n) {
        if (n == "air" || cfg.tools.count(n) || cfg.placeable.count(n)) return true;
        for (const auto& b : cfg.blocks)
            if (b.name == n || b.drop == n) return true;
        for (const auto& r : cfg.recipes)
            if (r.output == n || r.inputs.count(n)) return true;
        for (const auto& r : cfg.smelting)
            if (r.output == n || r.input == n) return true;
        return false;
    };
    auto alias = [&](const std::string& n) -> std::optional<std::string> {
        auto it = cfg.aliases.find(n);
        if (it != cfg.aliases.end()) return it->second;
        return std::nullopt;
    };
    if (auto a = alias(s)) return *a;
    if (known(s)) return s;
    if (s.size() > 1 && s.back() == 's') {
        std::string stem = s.substr(0, s.size() - 1);
        if (auto a = alias(stem)) return *a;
        if (known(stem)) return stem;
    }
    return s;
}

std::string WorldState::canonical_item(std::string_view raw) const { return canonical_item_name(*config_, raw); }

int WorldState::tool_tier(const AgentBody& body) const {
    const auto& held = body.equipment[kMainHand];
    if (!held) return 0;
    auto it = config_->tools.find(*held);
    return it == config_->tools.end() ? 0 : it->second;
}

bool WorldState::within_work_radius(const AgentBody& body, const Position& p) const {
    const long long r = config_->search_radius;
    return distance_squared(body.home, p) <= r * r;
}

Tick WorldState::travel(AgentBody& body, const Position& to) {
    const Tick t = ceil_ticks(distance(body.position, to)) * config_->ticks.move_per_block;
    body.position = to;
    return t;
}

void WorldState::sync_equipment(AgentBody& body) {
    for (auto it = body.inventory.begin(); it != body.inventory.end();) {
        if (it->second <= 0) it = body.inventory.erase(it);
        else ++it;
    }
    for (auto& slot : body.equipment)
        if (slot && body.count(*slot) <= 0) slot.reset();
}

std::optional<Position> WorldState::nearest_block(const AgentBody& body, const std::set<BlockId>& kinds) const {
    const Position from = body.position;
    std::optional<Position> best;
    long long best_d2 = 0;
    auto consider = [&](const Position& p) {
        if (!within_work_radius(body, p)) return;
        const long long d2 = distance_squared(from, p);
        if (!best || d2 < best_d2 || (d2 == best_d2 && p < *best)) {
            best = p;
            best_d2 = d2;
        }
    };
    std::size_t total = 0;
    for (BlockId k : kinds) total += index_[k].size();
    if (total <= 4096) {
        for (BlockId k : kinds)
            for (const auto& p : index_[k]) consider(p);
        return best;
    }
    // Chebyshev shells around the current position; a point in shell k is at
    // least k away, so stop once k^2 exceeds the best squared distance.
    const long long reach = config_->search_radius + static_cast<long long>(std::ceil(distance(from, body.home))) + 1;
    for (long long k = 0; k <= reach; ++k) {
        if (best && k * k > best_d2) break;
        for (long long dx = -k; dx <= k; ++dx)
            for (long long dy = -k; dy <= k; ++dy)
                for (long long dz = -k; dz <= k; ++dz) {
                    if (std::max({std::llabs(dx), std::llabs(dy), std::llabs(dz)}) != k) continue;
                    const Position p{static_cast<int>(from.x + dx), static_cast<int>(from.y + dy),
                                     static_cast<int>(from.z + dz)};
                    auto it = blocks_.find(p);
                    if (it != blocks_.end() && kinds.count(it->second)) consider(p);
                }
    }
    return best;
}

ActionOutcome WorldState::mine(AgentBody& body, const primitive::MineBlock& p) {
    const std::string item = canonical_item(p.kind);
    if (p.count <= 0) return fail(ErrorCode::InvalidParams, 0, "Cannot mine a non-positive amount.");
    std::set<BlockId> targets;
    int min_tier = 1 << 30;
    const int tier = tool_tier(body);
    for (std::size_t i = 0; i < config_->blocks.size(); ++i) {
        const auto& b = config_->blocks[i];
        if (b.drop.empty()) continue;
        if (b.name == item || b.drop == item) {
            min_tier = std::min(min_tier, b.required_tier);
            if (b.required_tier <= tier) targets.insert(static_cast<BlockId>(i + 1));
        }
    }
    if (min_tier == (1 << 30)) return fail(ErrorCode::BadTarget, 0, "There is no block that yields " + item + ".");
    if (targets.empty())
        return fail(ErrorCode::NoTool, 0, "Mining " + item + " needs a tool of tier " + std::to_string(min_tier) + ".");
    Tick ticks = 0;
    int mined = 0;
    for (int i = 0; i < p.count; ++i) {
        auto pos = nearest_block(body, targets);
        if (!pos) {
            if (mined == 0)
                return fail(ErrorCode::TargetNotFound, config_->ticks.explore, "Could not find any " + item + " nearby.");
            return fail(ErrorCode::TargetNotFound, ticks,
                        "Mined " + std::to_string(mined) + " " + item + " but could not find more.");
        }
        const BlockInfo& info = config_->blocks[block_at(*pos) - 1];
        ticks += travel(body, *pos) + info.mine_ticks;
        body.inventory[info.drop] += 1;
        set_block(*pos, kAir);
        ++mined;
    }
    return success(ticks, "Mined " + std::to_string(mined) + " " + item + ".");
}

ActionOutcome WorldState::craft(AgentBody& body, const primitive::CraftItem& p) {
    const std::string item = canonical_item(p.item);
    if (p.count <= 0) return fail(ErrorCode::InvalidParams, 0, "Cannot craft a non-positive amount.");
    const Recipe* recipe = nullptr;
    for (const auto& r : config_->recipes)
        if (r.output == item) recipe = &r;
    if (!recipe) return fail(ErrorCode::BadTarget, 0, "There is no recipe for " + item + ".");
    if (!recipe->station.empty() && body.count(recipe->station) <= 0)
        return fail(ErrorCode::NoTool, 0, "Crafting " + item + " needs a " + recipe->station + ".");
    if (recipe->tool_required > tool_tier(body))
        return fail(ErrorCode::NoTool, 0, "Crafting " + item + " needs a better tool.");
    const int crafts = (p.count + recipe->count - 1) / recipe->count;
    for (const auto& [in, n] : recipe->inputs)
        if (body.count(in) < n * crafts)
            return fail(ErrorCode::NoMaterials, 0,
                        "Not enough " + in + " to craft " + std::to_string(p.count) + " " + item + ".");
    for (const auto& [in, n] : recipe->inputs) body.inventory[in] -= n * crafts;
    body.inventory[item] += recipe->count * crafts;
    sync_equipment(body);
    return success(config_->ticks.craft * crafts,
                   "Crafted " + std::to_string(recipe->count * crafts) + " " + item + ".");
}

ActionOutcome WorldState::smelt(AgentBody& body, const primitive::SmeltItem& p) {
    const std::string item = canonical_item(p.item);
    if (p.count <= 0) return fail(ErrorCode::InvalidParams, 0, "Cannot smelt a non-positive amount.");
    const SmeltRecipe* recipe = nullptr;
    for (const auto& r : config_->smelting)
        if (r.output == item || r.input == item) recipe = &r;
    if (!recipe) return fail(ErrorCode::BadTarget, 0, item + " cannot be smelted.");
    if (body.count(recipe->station) <= 0)
        return fail(ErrorCode::NoTool, 0, "Smelting needs a " + recipe->station + ".");
    if (body.count(recipe->input) < p.count)
        return fail(ErrorCode::NoMaterials, 0, "Not enough " + recipe->input + " to smelt.");
    body.inventory[recipe->input] -= p.count;
    body.inventory[recipe->output] += p.count;
    sync_equipment(body);
    return success(config_->ticks.smelt * static_cast<Tick>(p.count),
                   "Smelted " + std::to_string(p.count) + " " + recipe->output + ".");
}

ActionOutcome WorldState::place(AgentBody& body, const primitive::PlaceBlock& p) {
    const std::string item = canonical_item(p.kind);
    std::string use_item, block;
    if (auto it = config_->placeable.find(item); it != config_->placeable.end()) {
        use_item = item;
        block = it->second;
    } else {
        for (const auto& [i, b] : config_->placeable)
            if (b == item || b == p.kind) {
                use_item = i;
                block = b;
            }
    }
    if (block.empty()) return fail(ErrorCode::BadTarget, 0, item + " cannot be placed.");
    if (body.count(use_item) <= 0) return fail(ErrorCode::NoMaterials, 0, "No " + use_item + " to place.");
    if (p.target.y < config_->min_y() || p.target.y > config_->max_y())
        return fail(ErrorCode::BadTarget, 0, "Cannot place outside the world.");
    if (!within_work_radius(body, p.target))
        return fail(ErrorCode::Unreachable, 0, to_string(p.target) + " is out of reach.");
    if (block_at(p.target) != kAir)
        return fail(ErrorCode::BadTarget, 0, to_string(p.target) + " is occupied by " + block_name_at(p.target) + ".");
    const Tick t = travel(body, p.target) + config_->ticks.place;
    body.inventory[use_item] -= 1;
    set_block(p.target, block);
    sync_equipment(body);
    ActionOutcome o = success(t, "Placed " + block + " at " + to_string(p.target) + ".");
    o.placed.push_back(p.target);
    return o;
}

ActionOutcome WorldState::give(AgentBody& body, const primitive::GiveItem& p) {
    const std::string item = canonical_item(p.item);
    if (p.target == body.owner || !has_body(p.target))
        return fail(ErrorCode::BadTarget, 0, "Cannot give items to " + p.target.name() + ".");
    if (p.count <= 0 || body.count(item) < p.count)
        return fail(ErrorCode::NoMaterials, 0, "Not enough " + item + " to give.");
    AgentBody& other = bodies_.at(p.target);
    const Tick t = travel(body, other.position) + config_->ticks.give;
    body.inventory[item] -= p.count;
    other.inventory[item] += p.count;
    sync_equipment(body);
    return success(t, "Gave " + std::to_string(p.count) + " " + item + " to " + p.target.name() + ".");
}

ActionOutcome WorldState::equip(AgentBody& body, const primitive::Equip& p) {
    const std::string item = canonical_item(p.item);
    if (body.count(item) <= 0) return fail(ErrorCode::NoMaterials, 0, "No " + item + " to equip.");
    body.equipment[kMainHand] = item;
    return success(config_->ticks.equip, "Equipped " + item + ".");
}

ActionOutcome WorldState::deposit(AgentBody& body, const primitive::DepositChest& p) {
    const std::string item = canonical_item(p.item);
    auto it = chests_.find(p.chest);
    if (it == chests_.end()) return fail(ErrorCode::TargetNotFound, 0, "No chest at " + to_string(p.chest) + ".");
    if (p.count <= 0 || body.count(item) < p.count)
        return fail(ErrorCode::NoMaterials, 0, "Not enough " + item + " to deposit.");
    const Tick t = travel(body, p.chest) + config_->ticks.deposit;
    body.inventory[item] -= p.count;
    it->second[item] += p.count;
    sync_equipment(body);
    return success(t, "Deposited " + std::to_string(p.count) + " " + item + ".");
}

ActionOutcome WorldState::move(AgentBody& body, const primitive::MoveTo& p) {
    if (!within_work_radius(body, p.target))
        return fail(ErrorCode::Unreachable, 0, to_string(p.target) + " is out of reach.");
    return success(travel(body, p.target), "Moved to " + to_string(p.target) + ".");
}

ActionOutcome WorldState::execute(const AgentId& agent, const Primitive& p) {
    AgentBody& b = body(agent);
    return std::visit(
        [&](const auto& a) -> ActionOutcome {
            using T = std::decay_t<decltype(a)>;
            using namespace primitive;
            if constexpr (std::is_same_v<T, MoveTo>) return move(b, a);
            else if constexpr (std::is_same_v<T, MineBlock>) return mine(b, a);
            else if constexpr (std::is_same_v<T, CraftItem>) return craft(b, a);
            else if constexpr (std::is_same_v<T, SmeltItem>) return smelt(b, a);
            else if constexpr (std::is_same_v<T, PlaceBlock>) return place(b, a);
            else if constexpr (std::is_same_v<T, GiveItem>) return give(b, a);
            else if constexpr (std::is_same_v<T, Equip>) return equip(b, a);
            else return deposit(b, a);
        },
        p);
}

void WorldState::advance_clock(Tick ticks) {
    clock_ += ticks;
    apply_damage_events();
}

void WorldState::apply_damage_events() {
    if (!config_->scripted_damage) return;
    const auto& events = config_->damage_events;
    while (next_damage_ < events.size() && events[next_damage_].at <= clock_) {
        const auto& e = events[next_damage_++];
        auto it = bodies_.find(AgentId(e.agent));
        if (it != bodies_.end()) it->second.health = std::max(0, it->second.health - e.amount);
    }
}

PerceptionSnapshot WorldState::perceive(const AgentId& agent) const {
    const AgentBody& b = body(agent);
    PerceptionSnapshot s;
    s.inventory = b.inventory;
    s.equipment = b.equipment;
    s.biome = config_->biome;
    s.time = clock_;
    s.health = b.health;
    s.hunger = b.hunger;
    s.position = b.position;
    const int r = config_->perception_radius;
    const long long r2 = static_cast<long long>(r) * r;
    std::map<std::string, long long> best;
    for (int dx = -r; dx <= r; ++dx)
        for (int dy = -r; dy <= r; ++dy)
            for (int dz = -r; dz <= r; ++dz) {
                const long long d2 = static_cast<long long>(dx) * dx + dy * dy + dz * dz;
                if (d2 > r2) continue;
                const Position p{b.position.x + dx, b.position.y + dy, b.position.z + dz};
                auto it = blocks_.find(p);
                if (it == blocks_.end()) continue;
                const std::string& name = config_->blocks[it->second - 1].name;
                auto bit = best.find(name);
                if (bit == best.end() || d2 < bit->second || (d2 == bit->second && p < s.nearby_blocks[name])) {
                    best[name] = d2;
                    s.nearby_blocks[name] = p;
                }
            }
    for (const auto& [p, inv] : chests_)
        if (distance_squared(p, b.position) <= r2) s.nearby_chest_contents[p] = inv;
    return s;
}

std::uint64_t WorldState::hash() const {
    // Terrain is a pure function of (seed, config), so the seed plus the edit
    // list stands in for the full block map.
    std::ostringstream os;
    os << seed_ << '|' << clock_ << '|';
    for (const auto& [p, id] : edits_) os << p.x << ',' << p.y << ',' << p.z << '=' << id << ';';
    os << '|';
    for (const auto& [p, inv] : chests_) {
        os << p.x << ',' << p.y << ',' << p.z << ':';
        for (const auto& [k, v] : inv) os << k << '=' << v << ';';
    }
    os << '|';
    for (const auto& [id, b] : bodies_) {
        os << id.key() << '@' << b.position.x << ',' << b.position.y << ',' << b.position.z << ':';
        for (const auto& [k, v] : b.inventory) os << k << '=' << v << ';';
        for (const auto& e : b.equipment) os << (e ? *e : "-") << ';';
        os << b.health << ';' << b.hunger << '/';
    }
    return text::fnv1a(os.str());
}

nlohmann::json WorldState::to_json(bool include_blocks) const {
    nlohmann::json j;
    j["seed"] = seed_;
    j["clock"] = clock_;
    j["biome"] = config_->biome;
    j["hash"] = hash();
    nlohmann::json counts = nlohmann::json::object();
    for (std::size_t i = 1; i < index_.size(); ++i) counts[block_name(static_cast<BlockId>(i))] = index_[i].size();
    j["block_counts"] = counts;
    nlohmann::json edits = nlohmann::json::array();
    for (const auto& [p, id] : edits_) edits.push_back({{"position", position_json(p)}, {"block", block_name(id)}});
    j["edits"] = edits;
    nlohmann::json chests = nlohmann::json::array();
    for (const auto& [p, inv] : chests_)
        chests.push_back({{"position", position_json(p)}, {"contents", inventory_json(inv)}});
    j["chests"] = chests;
    nlohmann::json bodies = nlohmann::json::array();
    for (const auto& [id, b] : bodies_)
        bodies.push_back({{"agent", id.name()},
                          {"position", position_json(b.position)},
                          {"home", position_json(b.home)},
                          {"inventory", inventory_json(b.inventory)},
                          {"equipment", equipment_json(b.equipment)},
                          {"health", b.health},
                          {"hunger", b.hunger}});
    j["bodies"] = bodies;
    if (include_blocks) {
        std::vector<std::pair<Position, BlockId>> all(blocks_.begin(), blocks_.end());
        std::sort(all.begin(), all.end());
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [p, id] : all) arr.push_back({p.x, p.y, p.z, block_name(id)});
        j["blocks"] = arr;
    }
    return j;
}

// Terrain: flat layers, log trunks, iron veins in a horizontal annulus.
WorldState generate_world(std::uint64_t seed, const WorldConfig& config) {
    WorldState w(std::make_shared<const WorldConfig>(config), seed);
    w.generating_ = true;
    const int hx = config.half_extent_x, hz = config.half_extent_z;
    const auto grass = w.block_id("grass"), dirt = w.block_id("dirt"), stone = w.block_id("stone");
    const auto log = w.block_id("log"), iron = w.block_id("iron_ore");
    if (!grass || !dirt || !stone || !log || !iron)
        throw Error(ErrorCode::InvalidConfig, "config must define grass, dirt, stone, log and iron_ore");
    w.blocks_.reserve(static_cast<std::size_t>((2 * hx + 1) * (2 * hz + 1) * (1 + config.dirt_depth + config.stone_layers)) +
                      4096);
    for (int x = -hx; x <= hx; ++x)
        for (int z = -hz; z <= hz; ++z) {
            w.set_block_raw({x, config.surface_y, z}, *grass);
            for (int d = 1; d <= config.dirt_depth; ++d) w.set_block_raw({x, config.surface_y - d, z}, *dirt);
            for (int y = config.stone_top(); y >= config.min_y(); --y) w.set_block_raw({x, y, z}, *stone);
        }

    SplitMix64 rng(seed);
    const double area = static_cast<double>(2 * hx + 1) * static_cast<double>(2 * hz + 1);
    const long trees = std::lround(config.trees_per_chunk * area / 256.0);
    std::vector<std::pair<int, int>> trunks;
    for (long t = 0; t < trees; ++t) {
        for (int attempt = 0; attempt < 20; ++attempt) {
            const int x = -hx + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * hx - 1)));
            const int z = -hz + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * hz - 1)));
            if (std::abs(x) <= kClearZone && std::abs(z) <= kClearZone) continue;
            bool crowded = false;
            for (const auto& [tx, tz] : trunks)
                if (std::abs(tx - x) < 3 && std::abs(tz - z) < 3) crowded = true;
            if (crowded) continue;
            const int h = config.tree_min_height +
                          static_cast<int>(rng.below(static_cast<std::uint64_t>(config.tree_max_height - config.tree_min_height + 1)));
            for (int y = 1; y <= h; ++y) w.set_block_raw({x, config.surface_y + y, z}, *log);
            trunks.emplace_back(x, z);
            break;
        }
    }

    const auto& ir = config.iron;
    auto in_band = [&](int x, int z) {
        const double r = std::hypot(static_cast<double>(x), static_cast<double>(z));
        if (ir.max_radius <= 0) return true;
        return r >= ir.min_radius && r <= ir.max_radius;
    };
    for (int v = 0; v < ir.veins; ++v) {
        const double angle = rng.unit() * 2.0 * M_PI;
        const double r = ir.max_radius <= 0 ? rng.unit() * std::min(hx, hz)
                                            : ir.min_radius + rng.unit() * (ir.max_radius - ir.min_radius);
        Position p{static_cast<int>(std::lround(r * std::cos(angle))),
                   config.min_y() + static_cast<int>(rng.below(static_cast<std::uint64_t>(config.stone_layers))),
                   static_cast<int>(std::lround(r * std::sin(angle)))};
        for (int k = 0; k < ir.vein_size; ++k) {
            if (in_band(p.x, p.z) && w.block_at(p) == *stone) w.set_block_raw(p, *iron);
            switch (rng.below(6)) {
                case 0: ++p.x; break;
                case 1: --p.x; break;
                case 2: ++p.y; break;
                case 3: --p.y; break;
                case 4: ++p.z; break;
                default: --p.z; break;
            }
            p.x = std::clamp(p.x, -hx, hx);
            p.z = std::clamp(p.z, -hz, hz);
            p.y = std::clamp(p.y, config.min_y(), config.stone_top());
        }
    }

    if (config.chest) {
        w.set_block_raw(*config.chest, *w.block_id("chest"));
        w.chests_[*config.chest] = {};
    }
    w.generating_ = false;
    return w;
}

PerceptionSnapshot perceive(const WorldState& world, const AgentId& agent) { return world.perceive(agent); }
ActionOutcome execute_primitive(WorldState& world, const AgentId& agent, const Primitive& p) {
    return world.execute(agent, p);
}
void advance_clock(WorldState& world, Tick ticks) { world.advance_clock(ticks); }

}  // namespace sagents
