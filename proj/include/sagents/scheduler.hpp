#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "sagents/backends.hpp"
#include "sagents/event.hpp"
#include "sagents/hourglass.hpp"
#include "sagents/org_graph.hpp"
#include "sagents/task.hpp"
#include "sagents/world.hpp"

namespace sagents {

enum class Mode { Relay, RoundBased, NonObstructive };
std::string to_string(Mode m);
/// "relay", "roundbased"/"round-based"/"rb", "nonobstructive"/"non-obstructive"/"no". Throws InvalidParams.
Mode mode_from_string(std::string_view s);

struct NanPolicy {
    int stall_minutes = 40;
    int max_attempts = 5;
};

struct InjectorConfig {
    /// Chance that a primitive is replaced by a failure.
    double probability = 0.0;
    Tick failure_ticks = 60;
};

struct RunConfig {
    std::shared_ptr<const WorldConfig> world;
    AgentTiming timing;
    Tick max_ticks = 43200;
    NanPolicy nan;
    InjectorConfig injector;
    /// The JSON this config was read from (hashed into reports).
    nlohmann::json source;

    /// Reads a full config document (world sections plus scheduler, nan_policy, injector). Throws InvalidConfig.
    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig defaults();
    std::uint64_t hash() const;
};

/// Tracks the last tick at which the goal advanced and the failed attempts since then.
class ProgressTracker {
public:
    void record_progress(Tick now) {
        last_progress_ = now;
        attempts_ = 0;
    }
    void record_attempts(int n) { attempts_ += n; }
    Tick last_progress() const noexcept { return last_progress_; }
    int attempts() const noexcept { return attempts_; }

private:
    Tick last_progress_ = 0;
    int attempts_ = 0;
};

/// True iff the stall exceeds the policy's minutes and attempts exceed its cap.
bool nan_check(const ProgressTracker& tracker, Tick now, const NanPolicy& policy = {});

struct RunReport {
    double time_cost_min = std::numeric_limits<double>::quiet_NaN();
    double mean_prompt_times = 0;
    std::map<std::string, int> per_agent_prompts;
    std::map<std::string, Tick> per_agent_busy_ticks;
    std::map<std::string, int> per_agent_monitor_calls;
    bool success = false;
    std::string abort_reason;
    Tick end_tick = 0;
    std::uint64_t config_hash = 0;
    std::string org;
    std::string mode;
    std::string task;
    std::uint64_t seed = 0;
    std::size_t event_count = 0;

    bool is_nan() const noexcept { return time_cost_min != time_cost_min; }
    /// NaN time cost is written as null.
    nlohmann::json to_json() const;
};

/// Pure aggregation of an event log (the "run_start" event names the agents).
RunReport collect_metrics(const std::vector<Event>& events);

struct RunArtifacts {
    std::vector<Event> events;
    std::string pool_jsonl;
    nlohmann::json world_final;
};

/// Runs an organization on a task until the goal holds or the NaN rule fires.
/// Throws InvalidOrganization, TaskUndefined.
RunReport run(const AgentGraph& org, Mode mode, const TaskSpec& task, std::uint64_t seed, const RunConfig& config,
              Backend& backend, RunArtifacts* artifacts = nullptr);

/// Fixed work blocks: minutes[round][agent]. Returns simulated ticks until all work is done.
/// RoundBased barriers after each round; NonObstructive lets idle agents take over
/// remaining work tick by tick; Relay runs agents one after another.
Tick simulate_duration_matrix(const std::vector<std::vector<int>>& minutes, Mode mode);

}  // namespace sagents
