#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "sagents/backends.hpp"
#include "sagents/comms.hpp"
#include "sagents/plan.hpp"
#include "sagents/todo.hpp"
#include "sagents/world.hpp"

namespace sagents {

struct AgentTiming {
    Tick planning_ticks = 30;
    Tick monitor_ticks = 10;
    Tick message_ticks = 1;
    /// Consecutive Fail judgments before a worker gives its objective back.
    int max_consecutive_failures = 5;
};

struct AgentSetup {
    AgentId id;
    Role role = Role::Leaf;
    /// Agents this one may delegate to (its outgoing command edges).
    std::set<AgentId> command_targets;
    /// Chain only: the next agent and how many agents remain from here on.
    std::optional<AgentId> successor;
    int chain_remaining = 1;
};

/// Claims the next free cell of a structure part ("foundation", "wall", "roof")
/// anchored at `origin`; returns the cell and the block to place there.
using CellResolver =
    std::function<std::optional<std::pair<Position, std::string>>(const AgentId&, const std::string& part, const Position& origin)>;

/// Everything an agent touches during one step.
struct StepEnv {
    WorldState& world;
    MessagePool& pool;
    Backend& backend;
    AgentTiming timing;
    CellResolver next_cell;
    /// Returns true when this primitive should be replaced by an injected failure.
    std::function<bool(const AgentId&, const Primitive&)> inject;
    Tick injected_failure_ticks = 60;
    /// Consulted right before planning; false parks the agent at a barrier.
    std::function<bool(const AgentId&)> may_plan;
    /// Event sink: (kind, detail).
    std::function<void(const std::string&, nlohmann::json)> log;
};

enum class StepKind { Primitive, Delegate, Message, Plan, Sleep, Barrier };
std::string to_string(StepKind k);

struct StepOutcome {
    StepKind kind = StepKind::Sleep;
    Tick duration = 0;
};

/// A primitive whose effects are applied but whose time has not yet elapsed.
struct InFlight {
    Primitive primitive;
    Tick ends = 0;
    ActionOutcome outcome;
    bool injected = false;
    /// Inventory change per body caused by this primitive.
    std::map<AgentId, Inventory> deltas;
};

class HourglassAgent {
public:
    explicit HourglassAgent(AgentSetup setup);

    const AgentId& id() const noexcept { return setup_.id; }
    const AgentSetup& setup() const noexcept { return setup_; }
    Role role() const noexcept { return setup_.role; }

    /// One unit of work: finish/advance a primitive, dequeue an action, or plan.
    /// Throws AuthorityViolation for a delegation outside the command targets.
    StepOutcome step(StepEnv& env);

    /// Looks at a new pool record; true when it should wake a sleeping agent.
    bool notify(const MessageRecord& r);
    bool sleeping() const noexcept { return sleeping_; }
    void wake();

    int prompts() const noexcept { return prompts_; }
    int monitor_calls() const noexcept { return monitor_calls_; }
    int fail_judgments() const noexcept { return fail_judgments_; }
    const PlanState& plan() const noexcept { return plan_; }
    const std::optional<ProgressJudgment>& last_judgment() const noexcept { return judgment_; }
    std::size_t queue_size() const noexcept { return queue_.size(); }
    const std::optional<InFlight>& in_flight() const noexcept { return in_flight_; }
    /// Exact todo texts delegated and not yet answered, per target.
    const std::map<AgentId, std::set<std::string>>& outstanding() const noexcept { return outstanding_; }

    /// Monitor input for the current task at hand (own assignments only for non-roots).
    std::optional<std::string> monitor_task() const;

private:
    struct Running {
        std::string todo;
        AgentAction action;
        std::deque<Primitive> primitives;
        std::optional<std::string> build_part;
        Position build_origin;
        std::optional<int> build_left;
        bool any = false;
    };

    std::optional<Primitive> next_primitive(StepEnv& env);
    StepOutcome start_primitive(StepEnv& env, Primitive p);
    void finish_primitive(StepEnv& env);
    StepOutcome dequeue(StepEnv& env);
    StepOutcome plan_step(StepEnv& env);
    void report(StepEnv& env, const std::string& message_for_informer);
    void post(StepEnv& env, const AgentId& to, const std::string& message);
    AgentId informer() const;
    bool uses_root_templates() const;
    nlohmann::json planner_context(const WorldState& world, const std::vector<ConversationGroup>& groups) const;

    AgentSetup setup_;
    PlanState plan_;
    std::optional<ProgressJudgment> judgment_;
    std::deque<std::pair<std::string, AgentAction>> queue_;
    std::optional<Running> running_;
    std::optional<InFlight> in_flight_;
    ConversationCursor cursor_;
    std::map<AgentId, std::set<std::string>> outstanding_;
    int prompts_ = 0;
    int monitor_calls_ = 0;
    int fail_judgments_ = 0;
    int consecutive_failures_ = 0;
    bool sleeping_ = true;
    bool pending_wake_ = false;
    bool planned_empty_ = true;
    bool objective_reported_ = false;
};

/// Task text inside a "succeeded"/"failed" protocol phrase, with the status.
std::optional<std::pair<TaskStatus, std::string>> terminal_phrase(const std::string& message);

/// Primitives a direct action expands to; Build yields none (placed lazily).
/// Throws UnsupportedTask for verbs the simulator cannot run.
std::vector<Primitive> expand_action(const WorldState& world, const AgentAction& action);

}  // namespace sagents
