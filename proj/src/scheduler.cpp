#include "sagents/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

#include "sagents/comms.hpp"
#include "sagents/text.hpp"

namespace sagents {

std::string to_string(Mode m) {
    switch (m) {
        case Mode::Relay: return "relay";
        case Mode::RoundBased: return "roundbased";
        case Mode::NonObstructive: return "nonobstructive";
    }
    return "unknown";
}

Mode mode_from_string(std::string_view s) {
    const std::string t = to_lower(text::trim(s));
    if (t == "relay") return Mode::Relay;
    if (t == "roundbased" || t == "round-based" || t == "round_based" || t == "rb" || t == "obstructive")
        return Mode::RoundBased;
    if (t == "nonobstructive" || t == "non-obstructive" || t == "non_obstructive" || t == "no") return Mode::NonObstructive;
    throw Error(ErrorCode::InvalidParams, "unknown mode " + std::string(s));
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig c;
    c.world = std::make_shared<const WorldConfig>(WorldConfig::from_json(j));
    c.source = j;
    try {
        if (j.contains("scheduler")) {
            const auto& s = j["scheduler"];
            c.timing.planning_ticks = s.value("planning_ticks", c.timing.planning_ticks);
            c.timing.monitor_ticks = s.value("monitor_ticks", c.timing.monitor_ticks);
            c.timing.message_ticks = s.value("message_ticks", c.timing.message_ticks);
            c.timing.max_consecutive_failures = s.value("max_consecutive_failures", c.timing.max_consecutive_failures);
            c.max_ticks = s.value("max_ticks", c.max_ticks);
        }
        if (j.contains("nan_policy")) {
            c.nan.stall_minutes = j["nan_policy"].value("stall_minutes", c.nan.stall_minutes);
            c.nan.max_attempts = j["nan_policy"].value("max_attempts", c.nan.max_attempts);
        }
        if (j.contains("injector")) {
            c.injector.probability = j["injector"].value("probability", c.injector.probability);
            c.injector.failure_ticks = j["injector"].value("failure_ticks", c.injector.failure_ticks);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, e.what());
    }
    if (c.injector.probability < 0 || c.injector.probability > 1)
        throw Error(ErrorCode::InvalidConfig, "injector probability must be within [0, 1]");
    if (c.max_ticks == 0) throw Error(ErrorCode::InvalidConfig, "max_ticks must be positive");
    if (c.timing.max_consecutive_failures < 1) throw Error(ErrorCode::InvalidConfig, "max_consecutive_failures must be >= 1");
    return c;
}

RunConfig RunConfig::defaults() { return from_json(default_config_json()); }

std::uint64_t RunConfig::hash() const {
    // Effective values, so a config and its round-tripped form hash the same.
    nlohmann::json j = world->to_json();
    j["scheduler"] = {{"planning_ticks", timing.planning_ticks},
                      {"monitor_ticks", timing.monitor_ticks},
                      {"message_ticks", timing.message_ticks},
                      {"max_consecutive_failures", timing.max_consecutive_failures},
                      {"max_ticks", max_ticks}};
    j["nan_policy"] = {{"stall_minutes", nan.stall_minutes}, {"max_attempts", nan.max_attempts}};
    j["injector"] = {{"probability", injector.probability}, {"failure_ticks", injector.failure_ticks}};
    return text::fnv1a(j.dump());
}

bool nan_check(const ProgressTracker& tracker, Tick now, const NanPolicy& policy) {
    const Tick stall = now >= tracker.last_progress() ? now - tracker.last_progress() : 0;
    return stall > static_cast<Tick>(policy.stall_minutes) * kTicksPerMinute && tracker.attempts() > policy.max_attempts;
}

nlohmann::json RunReport::to_json() const {
    nlohmann::json j;
    j["time_cost_min"] = is_nan() ? nlohmann::json(nullptr) : nlohmann::json(time_cost_min);
    j["mean_prompt_times"] = mean_prompt_times;
    j["per_agent_prompts"] = per_agent_prompts;
    j["per_agent_busy_ticks"] = per_agent_busy_ticks;
    j["per_agent_monitor_calls"] = per_agent_monitor_calls;
    j["success"] = success;
    j["nan"] = is_nan();
    j["abort_reason"] = abort_reason;
    j["end_tick"] = end_tick;
    j["config_hash"] = std::to_string(config_hash);
    j["org"] = org;
    j["mode"] = mode;
    j["task"] = task;
    j["seed"] = seed;
    j["event_count"] = event_count;
    return j;
}

RunReport collect_metrics(const std::vector<Event>& events) {
    RunReport r;
    r.event_count = events.size();
    for (const auto& e : events) r.end_tick = std::max(r.end_tick, e.tick);
    for (const auto& e : events) {
        if (e.kind == "run_start") {
            for (const auto& a : e.detail.value("agents", nlohmann::json::array())) {
                const auto name = a.get<std::string>();
                r.per_agent_prompts[name];
                r.per_agent_busy_ticks[name];
                r.per_agent_monitor_calls[name];
            }
            r.org = e.detail.value("org", "");
            r.mode = e.detail.value("mode", "");
            r.task = e.detail.value("task", "");
            r.seed = e.detail.value("seed", std::uint64_t{0});
            r.config_hash = std::stoull(e.detail.value("config_hash", std::string("0")));
            continue;
        }
        if (e.kind == "plan") ++r.per_agent_prompts[e.agent];
        if (e.kind == "monitor" && !e.detail.value("skipped", false)) ++r.per_agent_monitor_calls[e.agent];
        if (e.detail.is_object() && e.detail.contains("ticks") &&
            (e.kind == "plan" || e.kind == "primitive_start" || e.kind == "delegate" || e.kind == "busy" || e.kind == "escalate"))
            r.per_agent_busy_ticks[e.agent] += std::min(e.detail["ticks"].get<Tick>(), r.end_tick - e.tick);
        if (e.kind == "goal") {
            r.success = true;
            r.time_cost_min = static_cast<double>(e.tick) / static_cast<double>(kTicksPerMinute);
        }
        if (e.kind == "abort") {
            r.success = false;
            r.time_cost_min = std::numeric_limits<double>::quiet_NaN();
            r.abort_reason = e.detail.value("reason", "");
        }
    }
    int total = 0;
    for (const auto& [name, n] : r.per_agent_prompts) total += n;
    r.mean_prompt_times = r.per_agent_prompts.empty() ? 0.0 : static_cast<double>(total) / r.per_agent_prompts.size();
    return r;
}

namespace {

struct Slot {
    Tick at;
    std::uint64_t seq;
    std::size_t agent;
    bool operator>(const Slot& o) const { return std::tie(at, seq) > std::tie(o.at, o.seq); }
};

std::vector<AgentSetup> setups_for(const AgentGraph& org) {
    std::vector<AgentSetup> out;
    const auto& agents = org.agents();
    for (std::size_t i = 0; i < agents.size(); ++i) {
        AgentSetup s;
        s.id = agents[i];
        s.command_targets = command_targets(org, agents[i]);
        switch (org.structure()) {
            case Structure::Solo: s.role = Role::Solo; break;
            case Structure::Graph: s.role = Role::Peer; break;
            case Structure::Tree: s.role = org.root() && *org.root() == agents[i] ? Role::Root : Role::Leaf; break;
            case Structure::Chain:
                s.role = Role::Chain;
                if (i + 1 < agents.size()) s.successor = agents[i + 1];
                s.chain_remaining = static_cast<int>(agents.size() - i);
                break;
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

RunReport run(const AgentGraph& org, Mode mode, const TaskSpec& task, std::uint64_t seed, const RunConfig& config,
              Backend& backend, RunArtifacts* artifacts) {
    const auto report = validate(org);
    if (!report.is_valid) {
        std::string why;
        for (const auto& v : report.violations) why += (why.empty() ? "" : "; ") + v;
        throw Error(ErrorCode::InvalidOrganization, why);
    }
    if (task.kind == TaskKind::Collection && (task.quantity <= 0 || task.item.empty()))
        throw Error(ErrorCode::TaskUndefined, "collection task needs an item and a positive quantity");
    if (task.kind == TaskKind::Shelter && (task.shelter.width < 3 || task.shelter.depth < 3 || task.shelter.wall_height < 1))
        throw Error(ErrorCode::TaskUndefined, "shelter footprint must be at least 3x3");
    if (!config.world) throw Error(ErrorCode::InvalidConfig, "run config has no world");

    WorldState world = generate_world(seed, *config.world);
    MessagePool pool;
    std::vector<HourglassAgent> agents;
    for (auto& s : setups_for(org)) agents.emplace_back(std::move(s));

    // Homes: leaders and solo agents at the centre, workers on a ring.
    std::vector<AgentId> workers;
    for (const auto& a : agents)
        if (a.role() != Role::Root) workers.push_back(a.id());
    TaskSpec t = task;
    if (t.kind == TaskKind::Shelter && t.starting_inventories.empty()) {
        std::vector<AgentId> sorted = workers;
        std::sort(sorted.begin(), sorted.end());
        assign_starting_inventories(t, sorted);
    }
    int ring = 0;
    for (const auto& a : agents) {
        const bool centre = a.role() == Role::Root || a.role() == Role::Solo;
        const Position home = spawn_position(*config.world, centre ? -1 : ring, static_cast<int>(workers.size()));
        if (!centre) ++ring;
        Inventory inv;
        if (auto it = t.starting_inventories.find(a.id()); it != t.starting_inventories.end()) inv = it->second;
        world.add_body(a.id(), home, inv);
    }

    std::vector<Event> events;
    std::uint64_t event_seq = 0;
    auto log = [&](const std::string& agent, const std::string& kind, nlohmann::json detail) {
        events.push_back(Event{world.clock(), ++event_seq, agent, kind, std::move(detail)});
    };
    const std::uint64_t config_hash = config.hash();
    {
        nlohmann::json names = nlohmann::json::array();
        for (const auto& a : agents) names.push_back(a.id().name());
        log("scheduler", "run_start",
            {{"agents", names},
             {"org", to_string(org.structure())},
             {"mode", to_string(mode)},
             {"task", t.label()},
             {"seed", seed},
             {"config_hash", std::to_string(config_hash)}});
    }

    std::priority_queue<Slot, std::vector<Slot>, std::greater<>> queue;
    std::uint64_t slot_seq = 0;
    std::vector<bool> scheduled(agents.size(), false), at_barrier(agents.size(), false), released(agents.size(), false);
    auto schedule = [&](std::size_t i, Tick at) {
        if (scheduled[i]) return;
        scheduled[i] = true;
        queue.push({at, ++slot_seq, i});
    };
    auto index_of = [&](const AgentId& id) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < agents.size(); ++i)
            if (agents[i].id() == id) return i;
        return std::nullopt;
    };

    std::uint64_t delivered = 0;
    auto deliver = [&]() {
        for (const auto& r : pool.records_after(delivered)) {
            delivered = r.seq;
            auto i = index_of(r.respondent);
            if (!i) continue;
            if (agents[*i].notify(r)) {
                agents[*i].wake();
                log(agents[*i].id().name(), "wake", {{"by", r.speaker.name()}, {"seq", r.seq}});
                schedule(*i, world.clock());
            }
        }
    };

    // Relay: one non-root agent works at a time.
    constexpr std::size_t kNoBaton = static_cast<std::size_t>(-1);
    std::size_t baton = kNoBaton;
    std::vector<std::size_t> baton_waiters;
    auto relay_rank = [&](std::size_t i) {
        if (org.structure() == Structure::Chain) return std::make_pair(i, std::string());
        return std::make_pair(std::size_t{0}, agents[i].id().key());
    };

    SplitMix64 injector_rng(seed ^ 0xA5A5A5A5DEADBEEFULL);
    std::size_t current = 0;
    StepEnv env{world, pool, backend, config.timing, {}, {}, config.injector.failure_ticks, {}, {}};
    if (t.kind == TaskKind::Shelter) env.next_cell = make_cell_resolver(world, t.shelter);
    if (config.injector.probability > 0)
        env.inject = [&](const AgentId&, const Primitive&) { return injector_rng.unit() < config.injector.probability; };
    if (mode == Mode::RoundBased)
        env.may_plan = [&](const AgentId&) {
            if (released[current]) {
                released[current] = false;
                return true;
            }
            at_barrier[current] = true;
            return false;
        };
    env.log = [&](const std::string& kind, nlohmann::json detail) { log(agents[current].id().name(), kind, std::move(detail)); };

    // The commissioner hands the task to the organization's entry point.
    const AgentId entry = org.root() ? *org.root() : org.agents().front();
    const auto commission = pool.post(commissioner_id(), entry, t.commission());
    log("commissioner", "message", {{"to", entry.name()}, {"seq", commission.seq}, {"text", commission.message}});
    deliver();

    ProgressTracker tracker;
    int best = goal_progress(t, world);
    int seen_fails = 0;
    std::string abort_reason;
    bool success = false;

    while (true) {
        if (queue.empty()) {
            bool any = false;
            if (mode == Mode::RoundBased)
                for (std::size_t i = 0; i < agents.size(); ++i)
                    if (at_barrier[i]) {
                        at_barrier[i] = false;
                        released[i] = true;
                        any = true;
                        schedule(i, world.clock());
                    }
            if (any) {
                log("scheduler", "barrier_release", nlohmann::json::object());
                continue;
            }
            abort_reason = "deadlock";
            break;
        }
        const Slot s = queue.top();
        queue.pop();
        if (s.at > config.max_ticks) {
            abort_reason = "max_ticks";
            break;
        }
        if (s.at > world.clock()) world.advance_clock(s.at - world.clock());
        pool.set_clock(world.clock());
        scheduled[s.agent] = false;
        current = s.agent;
        auto& agent = agents[current];

        if (mode == Mode::Relay && agent.role() != Role::Root) {
            if (baton != kNoBaton && baton != current) {
                if (std::find(baton_waiters.begin(), baton_waiters.end(), current) == baton_waiters.end())
                    baton_waiters.push_back(current);
                continue;
            }
            if (baton == kNoBaton) {
                baton = current;
                log(agent.id().name(), "baton", {{"action", "take"}});
            }
        }

        StepOutcome out;
        try {
            out = agent.step(env);
        } catch (const Error& e) {
            log(agent.id().name(), "error", {{"error", e.what()}});
            out = {StepKind::Message, config.timing.message_ticks};
        }
        if (out.kind == StepKind::Message) log(agent.id().name(), "busy", {{"ticks", out.duration}});
        deliver();

        if (out.kind == StepKind::Sleep) {
            if (mode == Mode::Relay && baton == current) {
                log(agent.id().name(), "baton", {{"action", "release"}});
                baton = kNoBaton;
                if (!baton_waiters.empty()) {
                    auto next = std::min_element(baton_waiters.begin(), baton_waiters.end(),
                                                 [&](std::size_t a, std::size_t b) { return relay_rank(a) < relay_rank(b); });
                    const std::size_t n = *next;
                    baton_waiters.erase(next);
                    schedule(n, world.clock());
                }
            }
        } else if (out.kind != StepKind::Barrier) {
            schedule(current, world.clock() + out.duration);
        }

        PendingEffects pending;
        int fails = 0;
        for (const auto& a : agents) {
            fails += a.fail_judgments();
            if (const auto& f = a.in_flight()) {
                for (const auto& [id, d] : f->deltas)
                    for (const auto& [item, n] : d) pending.deltas[id][item] += n;
                pending.cells.insert(f->outcome.placed.begin(), f->outcome.placed.end());
            }
        }
        if (fails > seen_fails) {
            tracker.record_attempts(fails - seen_fails);
            seen_fails = fails;
        }
        const int progress = goal_progress(t, world, pending);
        if (progress > best) {
            best = progress;
            tracker.record_progress(world.clock());
        }
        if (goal_satisfied(t, world, pending)) {
            success = true;
            log("scheduler", "goal", {{"progress", progress}});
            break;
        }
        if (nan_check(tracker, world.clock(), config.nan)) {
            abort_reason = "nan_rule";
            break;
        }
    }
    if (!success) log("scheduler", "abort", {{"reason", abort_reason}, {"attempts", tracker.attempts()}});

    RunReport r = collect_metrics(events);
    if (artifacts) {
        artifacts->events = events;
        artifacts->pool_jsonl = pool.to_jsonl();
        artifacts->world_final = world.to_json(false);
    }
    return r;
}

Tick simulate_duration_matrix(const std::vector<std::vector<int>>& minutes, Mode mode) {
    for (const auto& round : minutes)
        for (int m : round)
            if (m < 0) throw Error(ErrorCode::InvalidParams, "durations must be non-negative");
    if (minutes.empty()) return 0;
    const std::size_t n = minutes.front().size();
    for (const auto& round : minutes)
        if (round.size() != n) throw Error(ErrorCode::InvalidParams, "every round needs one duration per agent");
    if (n == 0) return 0;

    // Completion events ordered by (tick, seq).
    using Item = std::tuple<Tick, std::uint64_t, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
    std::uint64_t seq = 0;
    Tick end = 0;
    switch (mode) {
        case Mode::RoundBased: {
            Tick round_start = 0;
            for (const auto& round : minutes) {
                for (std::size_t a = 0; a < n; ++a) q.push({round_start + static_cast<Tick>(round[a]) * kTicksPerMinute, ++seq, a});
                // Barrier: the round ends when its last agent finishes.
                while (!q.empty()) {
                    round_start = std::get<0>(q.top());
                    q.pop();
                }
            }
            end = round_start;
            break;
        }
        case Mode::Relay: {
            Tick clock = 0;
            for (std::size_t a = 0; a < n; ++a)
                for (const auto& round : minutes) {
                    q.push({clock + static_cast<Tick>(round[a]) * kTicksPerMinute, ++seq, a});
                    clock = std::get<0>(q.top());
                    q.pop();
                }
            end = clock;
            break;
        }
        case Mode::NonObstructive: {
            // Work is a shared pool of one-tick units; a free agent takes the next unit at once.
            long long units = 0;
            for (const auto& round : minutes)
                for (int m : round) units += static_cast<long long>(m) * kTicksPerMinute;
            for (std::size_t a = 0; a < n && units > 0; ++a, --units) q.push({1, ++seq, a});
            while (!q.empty()) {
                auto [at, s, a] = q.top();
                q.pop();
                end = std::max(end, at);
                if (units > 0) {
                    --units;
                    q.push({at + 1, ++seq, a});
                }
            }
            break;
        }
    }
    return end;
}

}  // namespace sagents
