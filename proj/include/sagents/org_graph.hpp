#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "sagents/agent_id.hpp"

namespace sagents {

enum class Structure { Solo, Chain, Graph, Tree };

std::string_view to_string(Structure s) noexcept;
Structure structure_from_string(std::string_view s);

/// A vertex of the agent graph: either an agent or the single environment node.
struct Vertex {
    std::optional<AgentId> agent;

    static Vertex environment() { return Vertex{}; }
    static Vertex of(AgentId id) { return Vertex{std::move(id)}; }
    bool is_environment() const noexcept { return !agent.has_value(); }

    friend bool operator==(const Vertex&, const Vertex&) = default;
    friend std::strong_ordering operator<=>(const Vertex& a, const Vertex& b) {
        // Environment sorts after every agent.
        if (a.is_environment() != b.is_environment())
            return a.is_environment() ? std::strong_ordering::greater : std::strong_ordering::less;
        if (a.is_environment()) return std::strong_ordering::equal;
        return *a.agent <=> *b.agent;
    }
};

struct Edge {
    Vertex from;
    Vertex to;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Organization graph: agents plus one environment vertex; an edge (a, b)
/// means `a` actively acts on `b` (commands it, or acts on the environment).
/// Immutable once built.
class AgentGraph {
public:
    AgentGraph(Structure structure, std::vector<AgentId> agents, std::set<Edge> edges,
               std::optional<AgentId> root = std::nullopt);

    Structure structure() const noexcept { return structure_; }
    const std::optional<AgentId>& root() const noexcept { return root_; }
    /// Agents in declaration order (chain order for Chain graphs).
    const std::vector<AgentId>& agents() const noexcept { return agents_; }
    const std::set<Edge>& edges() const noexcept { return edges_; }

    bool contains(const AgentId& id) const;
    /// Edges between two agents (command authority only).
    std::vector<std::pair<AgentId, AgentId>> command_edges() const;
    std::size_t agent_in_degree(const AgentId& id) const;

    nlohmann::json to_json() const;
    static AgentGraph from_json(const nlohmann::json& j);

private:
    Structure structure_;
    std::vector<AgentId> agents_;
    std::set<Edge> edges_;
    std::optional<AgentId> root_;
};

AgentGraph build_solo(const AgentId& agent);
AgentGraph build_toa(const AgentId& root, const std::vector<AgentId>& leaves);
AgentGraph build_goa(const std::vector<AgentId>& agents);
AgentGraph build_coa(const std::vector<AgentId>& order);

struct ValidationOptions {
    /// Highest command in-degree a Tree or Chain agent may have.
    std::size_t max_in_degree = 1;
    /// Elementary-cycle enumeration runs only up to this many agents;
    /// larger graphs get an existence check.
    std::size_t cycle_enumeration_agent_cap = 10;
    /// Stop enumerating after this many cycles (dense graphs explode).
    std::size_t cycle_enumeration_limit = 100000;
};

struct ValidationReport {
    bool is_valid = true;
    std::vector<std::vector<AgentId>> command_cycles;
    bool has_command_cycle = false;
    /// False when enumeration was skipped or truncated.
    bool cycles_complete = true;
    std::size_t max_agent_in_degree = 0;
    std::vector<std::string> violations;
};

ValidationReport validate(const AgentGraph& graph, const ValidationOptions& options = {});

/// Agents reachable over one outgoing command edge.
std::set<AgentId> command_targets(const AgentGraph& graph, const AgentId& agent);

}  // namespace sagents
