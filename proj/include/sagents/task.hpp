#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "sagents/event.hpp"
#include "sagents/hourglass.hpp"
#include "sagents/world.hpp"

namespace sagents {

enum class TaskKind { Collection, Shelter };

struct ShelterSpec {
    Position origin{-2, 65, -2};
    int width = 5;
    int depth = 5;
    int wall_height = 3;
};

struct TaskSpec {
    TaskKind kind = TaskKind::Collection;
    /// Collection: canonical item and amount.
    std::string item;
    /// Item word as the commissioner says it ("stone", "iron").
    std::string noun;
    int quantity = 0;
    ShelterSpec shelter;
    std::map<AgentId, Inventory> starting_inventories;

    /// Instruction the commissioner posts at t=0 ("mine 50 stones", "build a shelter at (x,y,z)").
    std::string commission() const;
    /// Short label for file names and tables ("collection-stone-50", "shelter").
    std::string label() const;
    nlohmann::json to_json() const;
};

struct ShelterBlueprint {
    std::vector<Position> foundation;
    std::vector<Position> walls;
    std::vector<Position> roof;
    std::string foundation_block = "stone";
    std::string wall_block = "plank_block";
    std::string roof_block = "stone";

    static ShelterBlueprint from(const ShelterSpec& spec);
    /// Cells for a part name ("foundation", "wall", "roof"; "floor"/"ceiling" also accepted).
    const std::vector<Position>* part(const std::string& name) const;
    std::string block_for(const std::string& part) const;
    /// Expected block per cell.
    std::map<Position, std::string> cells() const;
};

/// Throws InvalidParams for quantity <= 0 or an unknown item.
TaskSpec make_collection(const WorldConfig& config, const std::string& item, int quantity);
/// Throws InvalidParams for a footprint under 3x3 or height < 1.
TaskSpec make_shelter(const ShelterSpec& spec = {});
/// "collection:stone:50", "shelter" or "shelter:x,y,z". Throws InvalidParams.
TaskSpec parse_task(const WorldConfig& config, const std::string& text);

/// Shelter: the first workers split the wall planks, the last one holds the stone.
/// Collection: everyone starts empty.
void assign_starting_inventories(TaskSpec& task, const std::vector<AgentId>& workers);

struct ShelterCheck {
    bool complete = false;
    std::vector<Position> missing;
    std::vector<Position> wrong_material;
};

/// Cells in `pending` count as missing (placed but not yet finished).
ShelterCheck verify_shelter(const WorldState& world, const ShelterBlueprint& blueprint,
                            const std::set<Position>& pending = {});

struct AuditViolation {
    std::uint64_t seq = 0;
    Position cell;
    std::string reason;
};

/// Wall placements before the foundation is complete, roof placements before the walls are.
std::vector<AuditViolation> stage_order_audit(const std::vector<Event>& events, const ShelterBlueprint& blueprint);

/// Effects of primitives that are applied to the world but whose time has not elapsed.
struct PendingEffects {
    std::map<AgentId, Inventory> deltas;
    std::set<Position> cells;
};

/// Goal-relevant count: collected items, or correctly placed blueprint cells.
int goal_progress(const TaskSpec& task, const WorldState& world, const PendingEffects& pending = {});
bool goal_satisfied(const TaskSpec& task, const WorldState& world, const PendingEffects& pending = {});

/// Hands out free blueprint cells for Build actions.
CellResolver make_cell_resolver(const WorldState& world, const ShelterSpec& spec);

}  // namespace sagents
