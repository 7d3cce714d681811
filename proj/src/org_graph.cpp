#include "sagents/org_graph.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "json.hpp"

namespace sagents {

std::string_view to_string(Structure s) noexcept {
    switch (s) {
        case Structure::Solo: return "solo";
        case Structure::Chain: return "chain";
        case Structure::Graph: return "graph";
        case Structure::Tree: return "tree";
    }
    return "?";
}

Structure structure_from_string(std::string_view s) {
    const std::string k = to_lower(s);
    if (k == "solo") return Structure::Solo;
    if (k == "chain" || k == "coa") return Structure::Chain;
    if (k == "graph" || k == "goa") return Structure::Graph;
    if (k == "tree" || k == "toa") return Structure::Tree;
    throw Error(ErrorCode::InvalidParams, "unknown structure '" + std::string(s) + "'");
}

namespace {

void require_distinct(const std::vector<AgentId>& ids) {
    std::set<AgentId> seen;
    for (const auto& id : ids) {
        if (!seen.insert(id).second) throw Error(ErrorCode::DuplicateAgent, id.name());
    }
}

std::set<Edge> environment_edges(const std::vector<AgentId>& agents) {
    std::set<Edge> edges;
    for (const auto& a : agents) edges.insert({Vertex::of(a), Vertex::environment()});
    return edges;
}

}  // namespace

AgentGraph::AgentGraph(Structure structure, std::vector<AgentId> agents, std::set<Edge> edges,
                       std::optional<AgentId> root)
    : structure_(structure), agents_(std::move(agents)), edges_(std::move(edges)), root_(std::move(root)) {}

bool AgentGraph::contains(const AgentId& id) const {
    return std::find(agents_.begin(), agents_.end(), id) != agents_.end();
}

std::vector<std::pair<AgentId, AgentId>> AgentGraph::command_edges() const {
    std::vector<std::pair<AgentId, AgentId>> out;
    for (const auto& e : edges_) {
        if (!e.from.is_environment() && !e.to.is_environment()) out.emplace_back(*e.from.agent, *e.to.agent);
    }
    return out;
}

std::size_t AgentGraph::agent_in_degree(const AgentId& id) const {
    std::size_t n = 0;
    for (const auto& e : edges_) {
        if (!e.from.is_environment() && !e.to.is_environment() && *e.to.agent == id) ++n;
    }
    return n;
}

nlohmann::json AgentGraph::to_json() const {
    nlohmann::json j;
    j["structure"] = std::string(to_string(structure_));
    j["root"] = root_ ? nlohmann::json(root_->name()) : nlohmann::json(nullptr);
    j["agents"] = nlohmann::json::array();
    for (const auto& a : agents_) j["agents"].push_back(a.name());
    j["edges"] = nlohmann::json::array();
    for (const auto& [from, to] : command_edges()) j["edges"].push_back({from.name(), to.name()});
    return j;
}

AgentGraph AgentGraph::from_json(const nlohmann::json& j) {
    try {
        const Structure s = structure_from_string(j.at("structure").get<std::string>());
        std::vector<AgentId> agents;
        for (const auto& a : j.at("agents")) agents.emplace_back(a.get<std::string>());
        require_distinct(agents);
        std::optional<AgentId> root;
        if (j.contains("root") && !j["root"].is_null()) root = AgentId(j["root"].get<std::string>());
        // Environment edges are implied for every agent.
        std::set<Edge> edges = environment_edges(agents);
        if (j.contains("edges")) {
            for (const auto& e : j["edges"]) {
                AgentId from(e.at(0).get<std::string>());
                AgentId to(e.at(1).get<std::string>());
                edges.insert({Vertex::of(from), Vertex::of(to)});
            }
        }
        return AgentGraph(s, std::move(agents), std::move(edges), std::move(root));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidParams, std::string("organization json: ") + e.what());
    }
}

AgentGraph build_solo(const AgentId& agent) {
    return AgentGraph(Structure::Solo, {agent}, environment_edges({agent}));
}

AgentGraph build_toa(const AgentId& root, const std::vector<AgentId>& leaves) {
    if (leaves.empty()) throw Error(ErrorCode::EmptyOrganization, "tree needs at least one leaf");
    std::vector<AgentId> agents{root};
    agents.insert(agents.end(), leaves.begin(), leaves.end());
    require_distinct(agents);
    std::set<Edge> edges = environment_edges(agents);
    for (const auto& leaf : leaves) edges.insert({Vertex::of(root), Vertex::of(leaf)});
    return AgentGraph(Structure::Tree, std::move(agents), std::move(edges), root);
}

AgentGraph build_goa(const std::vector<AgentId>& agents) {
    if (agents.size() < 2) throw Error(ErrorCode::EmptyOrganization, "graph needs at least two agents");
    require_distinct(agents);
    std::set<Edge> edges = environment_edges(agents);
    for (const auto& a : agents)
        for (const auto& b : agents)
            if (a != b) edges.insert({Vertex::of(a), Vertex::of(b)});
    return AgentGraph(Structure::Graph, agents, std::move(edges));
}

AgentGraph build_coa(const std::vector<AgentId>& order) {
    require_distinct(order);
    if (order.size() < 2) throw Error(ErrorCode::EmptyOrganization, "chain needs at least two agents");
    std::set<Edge> edges = environment_edges(order);
    for (std::size_t i = 0; i + 1 < order.size(); ++i) edges.insert({Vertex::of(order[i]), Vertex::of(order[i + 1])});
    return AgentGraph(Structure::Chain, order, std::move(edges), order.front());
}

namespace {

struct CycleSearch {
    const std::vector<std::vector<std::size_t>>& adj;
    std::size_t limit;
    std::vector<std::vector<std::size_t>> cycles;
    bool truncated = false;

    void run() {
        const std::size_t n = adj.size();
        std::vector<std::size_t> path;
        std::vector<bool> on_path(n, false);
        // Each elementary cycle is reported once, rooted at its smallest vertex.
        for (std::size_t s = 0; s < n && !truncated; ++s) {
            path = {s};
            on_path.assign(n, false);
            on_path[s] = true;
            dfs(s, s, path, on_path);
        }
    }

    void dfs(std::size_t start, std::size_t v, std::vector<std::size_t>& path, std::vector<bool>& on_path) {
        for (std::size_t w : adj[v]) {
            if (truncated) return;
            if (w == start) {
                cycles.push_back(path);
                if (cycles.size() >= limit) truncated = true;
            } else if (w > start && !on_path[w]) {
                on_path[w] = true;
                path.push_back(w);
                dfs(start, w, path, on_path);
                path.pop_back();
                on_path[w] = false;
            }
        }
    }
};

bool has_cycle(const std::vector<std::vector<std::size_t>>& adj) {
    std::vector<int> color(adj.size(), 0);
    std::function<bool(std::size_t)> visit = [&](std::size_t v) {
        color[v] = 1;
        for (std::size_t w : adj[v]) {
            if (color[w] == 1) return true;
            if (color[w] == 0 && visit(w)) return true;
        }
        color[v] = 2;
        return false;
    };
    for (std::size_t v = 0; v < adj.size(); ++v)
        if (color[v] == 0 && visit(v)) return true;
    return false;
}

}  // namespace

ValidationReport validate(const AgentGraph& graph, const ValidationOptions& options) {
    ValidationReport report;
    const auto& agents = graph.agents();
    std::map<AgentId, std::size_t> index;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (!index.emplace(agents[i], i).second) report.violations.push_back("duplicate agent " + agents[i].name());
    }

    std::vector<std::vector<std::size_t>> adj(agents.size());
    std::vector<std::size_t> in_degree(agents.size(), 0);
    std::vector<bool> acts_on_env(agents.size(), false);
    for (const auto& e : graph.edges()) {
        if (e.from.is_environment()) {
            report.violations.push_back("environment cannot issue commands");
            continue;
        }
        auto from = index.find(*e.from.agent);
        if (from == index.end()) {
            report.violations.push_back("edge from unknown agent " + e.from.agent->name());
            continue;
        }
        if (e.to.is_environment()) {
            acts_on_env[from->second] = true;
            continue;
        }
        auto to = index.find(*e.to.agent);
        if (to == index.end()) {
            report.violations.push_back("edge to unknown agent " + e.to.agent->name());
            continue;
        }
        if (from->second == to->second) {
            report.violations.push_back("self edge on " + e.from.agent->name());
            continue;
        }
        adj[from->second].push_back(to->second);
        ++in_degree[to->second];
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());

    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (!acts_on_env[i]) report.violations.push_back(agents[i].name() + " has no environment edge");
        report.max_agent_in_degree = std::max(report.max_agent_in_degree, in_degree[i]);
    }

    if (agents.size() <= options.cycle_enumeration_agent_cap) {
        CycleSearch search{adj, options.cycle_enumeration_limit, {}, false};
        search.run();
        for (const auto& c : search.cycles) {
            std::vector<AgentId> ids;
            for (std::size_t v : c) ids.push_back(agents[v]);
            report.command_cycles.push_back(std::move(ids));
        }
        report.has_command_cycle = !search.cycles.empty();
        report.cycles_complete = !search.truncated;
    } else {
        report.has_command_cycle = has_cycle(adj);
        report.cycles_complete = false;
    }

    const auto edge_count = [&] {
        std::size_t n = 0;
        for (const auto& a : adj) n += a.size();
        return n;
    }();

    switch (graph.structure()) {
        case Structure::Solo:
            if (agents.size() != 1) report.violations.push_back("solo organization must have exactly one agent");
            if (edge_count != 0) report.violations.push_back("solo organization has command edges");
            break;
        case Structure::Tree: {
            if (!graph.root() || !index.contains(*graph.root())) {
                report.violations.push_back("tree has no root agent");
                break;
            }
            const std::size_t r = index.at(*graph.root());
            if (in_degree[r] != 0) report.violations.push_back("root has incoming command edges");
            for (std::size_t i = 0; i < agents.size(); ++i) {
                if (i != r && in_degree[i] != 1)
                    report.violations.push_back(agents[i].name() + " must have exactly one commander");
                if (i != r && !adj[i].empty())
                    report.violations.push_back("leaf " + agents[i].name() + " issues commands");
            }
            if (report.has_command_cycle) report.violations.push_back("tree contains a command cycle");
            if (report.max_agent_in_degree > options.max_in_degree)
                report.violations.push_back("agent in-degree exceeds limit");
            break;
        }
        case Structure::Chain: {
            for (std::size_t i = 0; i < agents.size(); ++i) {
                const bool last = i + 1 == agents.size();
                const bool ok = last ? adj[i].empty() : (adj[i].size() == 1 && adj[i][0] == i + 1);
                if (!ok) report.violations.push_back("chain link broken at " + agents[i].name());
            }
            if (report.has_command_cycle) report.violations.push_back("chain contains a command cycle");
            if (report.max_agent_in_degree > options.max_in_degree)
                report.violations.push_back("agent in-degree exceeds limit");
            break;
        }
        case Structure::Graph:
            if (edge_count != agents.size() * (agents.size() - (agents.empty() ? 0 : 1)))
                report.violations.push_back("graph of agents must connect every ordered pair");
            break;
    }

    report.is_valid = report.violations.empty();
    return report;
}

std::set<AgentId> command_targets(const AgentGraph& graph, const AgentId& agent) {
    if (!graph.contains(agent)) throw Error(ErrorCode::UnknownAgent, agent.name());
    std::set<AgentId> out;
    for (const auto& [from, to] : graph.command_edges()) {
        if (from == agent) out.insert(to);
    }
    return out;
}

}  // namespace sagents
