#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "sagents/agent_id.hpp"
#include "sagents/world.hpp"

namespace sagents {

/// Position of an agent in its organization; decides which planner template it uses.
enum class Role { Root, Leaf, Peer, Chain, Solo };
std::string to_string(Role r);
Role role_from_string(std::string_view s);

enum class TaskStatus { Success, Fail, Unknown };
std::string to_string(TaskStatus s);

struct ProgressJudgment {
    std::string rationale;
    TaskStatus status = TaskStatus::Unknown;

    nlohmann::json to_json() const;
};

struct Assignment {
    AgentId agent;
    /// Task text after the agent name, e.g. "mines 17 stones".
    std::string task;

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct Stage {
    int number = 1;
    std::string title;
    /// Parenthesised header note, e.g. "adjust plan".
    std::string note;
    bool done = false;
    std::vector<Assignment> assignments;

    /// Same header and assignments; the done flag is ignored.
    bool same_content(const Stage& other) const;
    std::string header() const;
    /// "Stage 1: Gather stones\n    WorkerA mines 17 stones." (no done marker).
    std::string render() const;
};

/// What a commander believes about one of its workers.
struct AgentBelief {
    Inventory inventory;
    std::string last_task;
    /// "assigned", "started", "succeeded", "failed" or empty.
    std::string last_status;
    int successes = 0;
    int failures = 0;

    friend bool operator==(const AgentBelief&, const AgentBelief&) = default;
};

struct PlanState {
    std::string objective;
    std::string analysis;
    std::vector<Stage> long_term_plan;
    std::optional<Stage> task_at_hand;
    std::optional<AgentId> informer;
    std::map<AgentId, AgentBelief> inventory_beliefs;

    /// Index into long_term_plan of task_at_hand, if any.
    std::optional<std::size_t> task_index() const;
    nlohmann::json to_json() const;
};

/// Stages from "Stage N (note): title" blocks.
std::vector<Stage> parse_stage_text(std::string_view text);

/// Planner response text in the template's response format.
std::string render_plan_text(const PlanState& plan);
/// Throws MalformedPlan.
PlanState parse_plan(std::string_view raw);

std::string render_judgment_text(const ProgressJudgment& j);
/// Maps success/fail(ed)/unknown/ongoing; keeps the raw token in the rationale. Throws ParseFailure.
ProgressJudgment parse_judgment(std::string_view raw);

std::string render_todo_list(const std::vector<std::string>& todos);
/// Strict JSON array of strings, falling back to the first bracketed array. Throws UnparseableTodoList.
std::vector<std::string> parse_todo_list(std::string_view raw);

/// "{'stone': 17, 'log': 3}" -> map; tolerant of [] and double quotes.
Inventory parse_inventory_dict(std::string_view s);
std::string render_inventory_dict(const Inventory& inv);

}  // namespace sagents
