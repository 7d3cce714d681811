#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "json.hpp"

#include "sagents/agent_id.hpp"

namespace sagents {

using Tick = std::uint64_t;
inline constexpr Tick kTicksPerMinute = 60;

struct Position {
    int x = 0;
    int y = 0;
    int z = 0;

    friend bool operator==(const Position&, const Position&) = default;
    friend auto operator<=>(const Position&, const Position&) = default;
};

std::string to_string(const Position& p);
double distance(const Position& a, const Position& b) noexcept;
long long distance_squared(const Position& a, const Position& b) noexcept;

struct PositionHash {
    std::size_t operator()(const Position& p) const noexcept {
        std::uint64_t h = static_cast<std::uint32_t>(p.x);
        h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(p.y);
        h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(p.z);
        return static_cast<std::size_t>(h ^ (h >> 29));
    }
};

/// splitmix64; the terrain generator's only source of randomness, so the
/// generation procedure can be reproduced outside this library.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    /// Uniform integer in [0, n), n > 0.
    std::uint64_t below(std::uint64_t n) noexcept { return next() % n; }
    /// Uniform double in [0, 1).
    double unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

using BlockId = std::uint16_t;
inline constexpr BlockId kAir = 0;

struct BlockInfo {
    std::string name;
    /// Item dropped when mined; empty for unmineable blocks.
    std::string drop;
    int required_tier = 0;
    Tick mine_ticks = 0;
};

struct Recipe {
    std::string output;
    int count = 1;
    std::map<std::string, int> inputs;
    /// Empty, or the item that must be in the inventory (e.g. crafting_table).
    std::string station;
    int tool_required = 0;
};

struct SmeltRecipe {
    std::string output;
    std::string input;
    std::string station = "furnace";
};

struct TickCosts {
    Tick move_per_block = 1;
    Tick craft = 10;
    Tick smelt = 10;
    Tick place = 2;
    Tick give = 1;
    Tick equip = 1;
    Tick deposit = 1;
    /// Time burned by a search that finds nothing.
    Tick explore = 300;
};

struct IronPlacement {
    int veins = 12;
    int vein_size = 10;
    /// Horizontal annulus around the world centre; max_radius <= 0 means anywhere.
    double min_radius = 44;
    double max_radius = 48;
};

struct DamageEvent {
    Tick at = 0;
    std::string agent;
    int amount = 0;
};

struct WorldConfig {
    int half_extent_x = 56;
    int half_extent_z = 56;
    int surface_y = 64;
    int dirt_depth = 2;
    int stone_layers = 6;
    int headroom = 16;
    double trees_per_chunk = 3.0;
    int tree_min_height = 4;
    int tree_max_height = 6;
    IronPlacement iron;
    int perception_radius = 16;
    /// Work radius around an agent's home position.
    int search_radius = 44;
    double spawn_spread = 24;
    std::string biome = "plains";
    std::optional<Position> chest;
    bool scripted_damage = false;
    std::vector<DamageEvent> damage_events;

    TickCosts ticks;
    std::vector<BlockInfo> blocks;
    std::vector<Recipe> recipes;
    std::vector<SmeltRecipe> smelting;
    /// Tool item -> mining tier.
    std::map<std::string, int> tools;
    /// Item -> block it places as.
    std::map<std::string, std::string> placeable;
    /// Free-form item names ("woods", "oak_log") -> canonical item.
    std::map<std::string, std::string> aliases;

    int min_y() const noexcept { return surface_y - dirt_depth - stone_layers; }
    int max_y() const noexcept { return surface_y + headroom; }
    /// First y of the stone layer.
    int stone_top() const noexcept { return surface_y - dirt_depth - 1; }

    static WorldConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// Built-in configuration (data/default_config.json compiled in).
const nlohmann::json& default_config_json();
WorldConfig default_world_config();

/// Canonical item name under a config's aliases ("woods" -> "log", "Wooden Pickaxe" -> "wooden_pickaxe").
std::string canonical_item_name(const WorldConfig& config, std::string_view name);

using Inventory = std::map<std::string, int>;
inline constexpr std::size_t kEquipmentSlots = 6;
inline constexpr std::size_t kMainHand = 4;

struct AgentBody {
    AgentId owner;
    Position position;
    Position home;
    Inventory inventory;
    std::array<std::optional<std::string>, kEquipmentSlots> equipment{};
    int health = 20;
    int hunger = 20;

    int count(const std::string& item) const;
};

struct PerceptionSnapshot {
    Inventory inventory;
    std::array<std::optional<std::string>, kEquipmentSlots> equipment{};
    /// Block kind -> nearest representative position within the radius.
    std::map<std::string, Position> nearby_blocks;
    std::string biome;
    Tick time = 0;
    int health = 20;
    int hunger = 20;
    Position position;
    std::map<Position, Inventory> nearby_chest_contents;

    nlohmann::json to_json() const;
};

namespace primitive {
struct MoveTo { Position target; };
struct MineBlock { std::string kind; int count = 1; };
struct CraftItem { std::string item; int count = 1; };
struct SmeltItem { std::string item; int count = 1; };
struct PlaceBlock { std::string kind; Position target; };
struct GiveItem { AgentId target; std::string item; int count = 1; };
struct Equip { std::string item; };
struct DepositChest { Position chest; std::string item; int count = 1; };
}  // namespace primitive

using Primitive = std::variant<primitive::MoveTo, primitive::MineBlock, primitive::CraftItem, primitive::SmeltItem,
                               primitive::PlaceBlock, primitive::GiveItem, primitive::Equip, primitive::DepositChest>;

std::string describe(const Primitive& p);

struct ActionOutcome {
    bool ok = false;
    std::optional<ErrorCode> error;
    Tick ticks = 0;
    std::string transcript;
    /// Blocks placed by this primitive (for stage auditing).
    std::vector<Position> placed;
};

class WorldState {
public:
    WorldState(std::shared_ptr<const WorldConfig> config, std::uint64_t seed);

    const WorldConfig& config() const noexcept { return *config_; }
    std::uint64_t seed() const noexcept { return seed_; }
    Tick clock() const noexcept { return clock_; }
    const std::string& biome() const noexcept { return config_->biome; }

    // Blocks.
    std::string block_name(BlockId id) const;
    std::optional<BlockId> block_id(std::string_view name) const;
    BlockId block_at(const Position& p) const;
    std::string block_name_at(const Position& p) const;
    void set_block(const Position& p, BlockId id);
    void set_block(const Position& p, std::string_view name);
    std::size_t count_blocks(std::string_view name) const;
    const std::unordered_map<Position, BlockId, PositionHash>& blocks() const noexcept { return blocks_; }
    /// Cells changed since generation (new kind; air for removals).
    const std::map<Position, BlockId>& edits() const noexcept { return edits_; }

    // Chests.
    const std::map<Position, Inventory>& chests() const noexcept { return chests_; }
    void add_chest(const Position& p, Inventory contents = {});

    // Bodies.
    AgentBody& add_body(const AgentId& owner, const Position& home, Inventory inventory = {});
    bool has_body(const AgentId& id) const;
    AgentBody& body(const AgentId& id);
    const AgentBody& body(const AgentId& id) const;
    const std::map<AgentId, AgentBody>& bodies() const noexcept { return bodies_; }

    /// Canonical item name ("woods" -> "log", "Wooden Pickaxe" -> "wooden_pickaxe").
    std::string canonical_item(std::string_view name) const;
    int tool_tier(const AgentBody& body) const;

    ActionOutcome execute(const AgentId& agent, const Primitive& p);
    void advance_clock(Tick ticks);
    /// Applies scripted damage events due at or before the clock.
    void apply_damage_events();

    PerceptionSnapshot perceive(const AgentId& agent) const;

    /// Stable content hash (blocks, chests, bodies, clock).
    std::uint64_t hash() const;
    nlohmann::json to_json(bool include_blocks = false) const;

private:
    friend WorldState generate_world(std::uint64_t seed, const WorldConfig& config);

    ActionOutcome mine(AgentBody& body, const primitive::MineBlock& p);
    ActionOutcome craft(AgentBody& body, const primitive::CraftItem& p);
    ActionOutcome smelt(AgentBody& body, const primitive::SmeltItem& p);
    ActionOutcome place(AgentBody& body, const primitive::PlaceBlock& p);
    ActionOutcome give(AgentBody& body, const primitive::GiveItem& p);
    ActionOutcome equip(AgentBody& body, const primitive::Equip& p);
    ActionOutcome deposit(AgentBody& body, const primitive::DepositChest& p);
    ActionOutcome move(AgentBody& body, const primitive::MoveTo& p);

    Tick travel(AgentBody& body, const Position& to);
    bool within_work_radius(const AgentBody& body, const Position& p) const;
    std::optional<Position> nearest_block(const AgentBody& body, const std::set<BlockId>& kinds) const;
    void sync_equipment(AgentBody& body);
    void set_block_raw(const Position& p, BlockId id);

    std::shared_ptr<const WorldConfig> config_;
    std::uint64_t seed_;
    Tick clock_ = 0;
    std::size_t next_damage_ = 0;
    std::unordered_map<std::string, BlockId> block_ids_;
    std::unordered_map<Position, BlockId, PositionHash> blocks_;
    std::vector<std::set<Position>> index_;
    std::map<Position, BlockId> edits_;
    bool generating_ = false;
    std::map<Position, Inventory> chests_;
    std::map<AgentId, AgentBody> bodies_;
};

/// Trees are kept out of |x|,|z| <= kClearZone so the centre stays buildable.
inline constexpr int kClearZone = 6;

WorldState generate_world(std::uint64_t seed, const WorldConfig& config);

/// Home position for the `slot`-th of `slots` ring positions; slot < 0 is the centre.
Position spawn_position(const WorldConfig& config, int slot, int slots);

// Free-function forms of the world operations.
PerceptionSnapshot perceive(const WorldState& world, const AgentId& agent);
ActionOutcome execute_primitive(WorldState& world, const AgentId& agent, const Primitive& p);
void advance_clock(WorldState& world, Tick ticks);

nlohmann::json inventory_json(const Inventory& inv);

}  // namespace sagents
