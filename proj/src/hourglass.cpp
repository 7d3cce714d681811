#include "sagents/hourglass.hpp"

#include <algorithm>
#include <regex>

#include "sagents/text.hpp"

namespace sagents {

std::string to_string(StepKind k) {
    switch (k) {
        case StepKind::Primitive: return "primitive";
        case StepKind::Delegate: return "delegate";
        case StepKind::Message: return "message";
        case StepKind::Plan: return "plan";
        case StepKind::Sleep: return "sleep";
        case StepKind::Barrier: return "barrier";
    }
    return "unknown";
}

std::optional<std::pair<TaskStatus, std::string>> terminal_phrase(const std::string& message) {
    static const std::regex re(R"(^\s*I have (succeeded|failed) the task (.*?)\.?\s*$)");
    std::smatch m;
    if (!std::regex_match(message, m, re)) return std::nullopt;
    return std::make_pair(m.str(1) == "succeeded" ? TaskStatus::Success : TaskStatus::Fail, text::trim(m.str(2)));
}

std::vector<Primitive> expand_action(const WorldState& world, const AgentAction& action) {
    const AgentAction a = action.inner();
    const int q = a.quantity.value_or(1);
    auto item = [&]() {
        if (!a.item || a.item->empty()) throw Error(ErrorCode::UnsupportedTask, render(a) + " names no item");
        return world.canonical_item(singular_item(*a.item));
    };
    std::vector<Primitive> out;
    switch (a.verb) {
        case Verb::Mine: {
            const std::string kind = item();
            for (int i = 0; i < q; ++i) out.push_back(primitive::MineBlock{kind, 1});
            break;
        }
        case Verb::Craft: out.push_back(primitive::CraftItem{item(), q}); break;
        case Verb::Smelt: out.push_back(primitive::SmeltItem{item(), q}); break;
        case Verb::Equip: out.push_back(primitive::Equip{item()}); break;
        case Verb::Give:
            if (!a.recipient) throw Error(ErrorCode::UnsupportedTask, render(a) + " has no recipient");
            out.push_back(primitive::GiveItem{*a.recipient, item(), q});
            break;
        case Verb::MoveTo:
            if (!a.position) throw Error(ErrorCode::MissingPosition, render(a));
            out.push_back(primitive::MoveTo{*a.position});
            break;
        case Verb::Build: break;
        case Verb::Kill:
        case Verb::Cook: throw Error(ErrorCode::UnsupportedTask, to_string(a.verb) + " is not simulated");
    }
    return out;
}

HourglassAgent::HourglassAgent(AgentSetup setup) : setup_(std::move(setup)) { cursor_.owner = setup_.id; }

void HourglassAgent::wake() {
    sleeping_ = false;
    pending_wake_ = true;
}

bool HourglassAgent::notify(const MessageRecord& r) {
    if (!(r.respondent == setup_.id) || r.speaker == setup_.id) return false;
    bool wake_up = r.speaker == commissioner_id() || text::starts_with_ci(r.message, setup_.id.name() + ", please ");
    if (!wake_up) {
        if (auto t = terminal_phrase(r.message)) {
            auto it = outstanding_.find(r.speaker);
            if (it != outstanding_.end() && it->second.erase(t->second) > 0) wake_up = true;
        }
    }
    if (!wake_up) return false;
    if (!sleeping_) {
        pending_wake_ = true;
        return false;
    }
    return true;
}

AgentId HourglassAgent::informer() const { return plan_.informer.value_or(commissioner_id()); }

bool HourglassAgent::uses_root_templates() const { return !setup_.command_targets.empty(); }

void HourglassAgent::post(StepEnv& env, const AgentId& to, const std::string& message) {
    if (to == setup_.id) return;
    auto rec = env.pool.post(setup_.id, to, message);
    if (env.log) env.log("message", {{"to", to.name()}, {"seq", rec.seq}, {"text", message}});
}

void HourglassAgent::report(StepEnv& env, const std::string& message) {
    const AgentId to = informer();
    post(env, to, message);
    if (env.world.has_body(setup_.id)) post(env, to, phrase::inventory_report(env.world.body(setup_.id)));
}

std::optional<std::string> HourglassAgent::monitor_task() const {
    if (!plan_.task_at_hand) return std::nullopt;
    if (setup_.role == Role::Root) return plan_.task_at_hand->render();
    Stage own = *plan_.task_at_hand;
    own.assignments.erase(std::remove_if(own.assignments.begin(), own.assignments.end(),
                                         [&](const Assignment& a) { return !(a.agent == setup_.id); }),
                          own.assignments.end());
    if (own.assignments.empty()) return std::nullopt;
    return own.render();
}

std::optional<Primitive> HourglassAgent::next_primitive(StepEnv& env) {
    auto& run = *running_;
    if (!run.primitives.empty()) {
        Primitive p = run.primitives.front();
        run.primitives.pop_front();
        return p;
    }
    if (run.build_part && (!run.build_left || *run.build_left > 0) && env.next_cell) {
        if (auto cell = env.next_cell(setup_.id, *run.build_part, run.build_origin)) {
            if (run.build_left) --*run.build_left;
            return primitive::PlaceBlock{cell->second, cell->first};
        }
    }
    return std::nullopt;
}

StepOutcome HourglassAgent::start_primitive(StepEnv& env, Primitive p) {
    std::map<AgentId, Inventory> before;
    for (const auto& [id, b] : env.world.bodies()) before[id] = b.inventory;
    InFlight f{p, 0, {}, false, {}};
    if (env.inject && env.inject(setup_.id, p)) {
        f.injected = true;
        f.outcome.ok = false;
        f.outcome.error = ErrorCode::InjectedFailure;
        f.outcome.ticks = env.injected_failure_ticks;
        f.outcome.transcript = "something went wrong during " + describe(p);
        if (env.log) env.log("injected_failure", {{"primitive", describe(p)}});
    } else {
        f.outcome = env.world.execute(setup_.id, p);
    }
    for (const auto& [id, b] : env.world.bodies()) {
        Inventory d;
        const auto& old = before[id];
        for (const auto& [item, n] : b.inventory) {
            auto it = old.find(item);
            const int diff = n - (it == old.end() ? 0 : it->second);
            if (diff != 0) d[item] = diff;
        }
        for (const auto& [item, n] : old)
            if (!b.inventory.count(item) && n != 0) d[item] = -n;
        if (!d.empty()) f.deltas[id] = d;
    }
    const Tick duration = std::max<Tick>(1, f.outcome.ticks);
    f.ends = env.world.clock() + duration;
    if (env.log) env.log("primitive_start", {{"primitive", describe(p)}, {"ticks", duration}, {"ok", f.outcome.ok}});
    in_flight_ = std::move(f);
    running_->any = true;
    return {StepKind::Primitive, duration};
}

void HourglassAgent::finish_primitive(StepEnv& env) {
    InFlight f = std::move(*in_flight_);
    in_flight_.reset();
    nlohmann::json d{{"primitive", describe(f.primitive)}, {"ok", f.outcome.ok}, {"transcript", f.outcome.transcript}};
    if (f.outcome.error) d["error"] = std::string(to_string(*f.outcome.error));
    if (env.log) env.log("primitive_end", d);
    for (const auto& c : f.outcome.placed)
        if (env.log) env.log("place", {{"cell", {c.x, c.y, c.z}}, {"block", env.world.block_name_at(c)}});
    if (!f.outcome.ok && running_) {
        report(env, phrase::failed(running_->todo));
        running_.reset();
        queue_.clear();
    }
}

StepOutcome HourglassAgent::dequeue(StepEnv& env) {
    auto [todo, action] = queue_.front();
    queue_.pop_front();
    if (action.is_delegate()) {
        auto it = setup_.command_targets.find(*action.target);
        if (it == setup_.command_targets.end())
            throw Error(ErrorCode::AuthorityViolation, setup_.id.name() + " may not command " + action.target->name());
        static const std::regex head(R"(^\s*(?:inform|instruct|tell)\s+\S+?,?\s+(?:to\s+)?(.*?)\s*$)", std::regex::icase);
        std::smatch m;
        const std::string inner = std::regex_match(todo, m, head) ? m.str(1) : render(action.inner());
        post(env, *it, phrase::directive(*it, inner));
        outstanding_[*it].insert(inner);
        if (env.log) env.log("delegate", {{"target", it->name()}, {"todo", inner}, {"ticks", env.timing.message_ticks}});
        return {StepKind::Delegate, env.timing.message_ticks};
    }
    post(env, informer(), phrase::start(todo));
    Running run;
    run.todo = todo;
    run.action = action;
    try {
        auto prims = expand_action(env.world, action);
        run.primitives.assign(prims.begin(), prims.end());
    } catch (const Error& e) {
        if (env.log) env.log("error", {{"todo", todo}, {"error", e.what()}});
        report(env, phrase::failed(todo));
        queue_.clear();
        return {StepKind::Message, env.timing.message_ticks};
    }
    if (action.verb == Verb::Build) {
        run.build_part = singular_item(action.item.value_or(""));
        run.build_origin = *action.position;
        run.build_left = action.quantity;
    }
    running_ = std::move(run);
    if (auto p = next_primitive(env)) return start_primitive(env, *p);
    report(env, phrase::succeeded(todo));
    running_.reset();
    return {StepKind::Message, env.timing.message_ticks};
}

nlohmann::json HourglassAgent::planner_context(const WorldState& world, const std::vector<ConversationGroup>& groups) const {
    std::vector<MessageRecord> records;
    for (const auto& g : groups) records.insert(records.end(), g.records.begin(), g.records.end());
    std::sort(records.begin(), records.end(), [](const MessageRecord& a, const MessageRecord& b) { return a.seq < b.seq; });
    nlohmann::json conv = nlohmann::json::array();
    for (const auto& r : records) conv.push_back(r.to_json());
    nlohmann::json employees = nlohmann::json::array();
    for (const auto& t : setup_.command_targets) employees.push_back(t.name());
    nlohmann::json ctx{{"role", to_string(setup_.role)},
                       {"name", setup_.id.name()},
                       {"employees", employees},
                       {"chain_remaining", setup_.chain_remaining},
                       {"conversation", conv}};
    ctx["successor"] = setup_.successor ? nlohmann::json(setup_.successor->name()) : nlohmann::json(nullptr);
    ctx["previous_plan"] = plan_.objective.empty() ? nlohmann::json(nullptr) : nlohmann::json(render_plan_text(plan_));
    if (judgment_) ctx["judgment"] = {{"status", to_string(judgment_->status)}, {"rationale", judgment_->rationale}};
    if (world.has_body(setup_.id)) {
        const auto& b = world.body(setup_.id);
        ctx["inventory"] = inventory_json(b.inventory);
        nlohmann::json eq = nlohmann::json::array();
        for (const auto& s : b.equipment) eq.push_back(s ? nlohmann::json(*s) : nlohmann::json(nullptr));
        ctx["equipment"] = eq;
    }
    return ctx;
}

StepOutcome HourglassAgent::plan_step(StepEnv& env) {
    pending_wake_ = false;
    const auto groups = env.pool.conversation_since(cursor_);
    for (const auto& g : groups)
        for (const auto& r : g.records)
            if (r.respondent == setup_.id && !(r.speaker == setup_.id) &&
                (r.speaker == commissioner_id() || text::starts_with_ci(r.message, setup_.id.name() + ", please "))) {
                objective_reported_ = false;
                consecutive_failures_ = 0;
            }
    const std::string conversation = groups.empty() ? "None" : render_conversation(setup_.id, groups);
    const std::string role = to_string(setup_.role);
    Tick cost = env.timing.planning_ticks;

    if (plan_.task_at_hand) {
        if (auto task = monitor_task()) {
            std::optional<Inventory> chest;
            if (env.world.has_body(setup_.id)) {
                const auto snap = env.world.perceive(setup_.id);
                if (!snap.nearby_chest_contents.empty()) chest = snap.nearby_chest_contents.begin()->second;
            }
            BackendRequest req;
            req.template_id = "monitor";
            req.role = role;
            req.prompt = render_prompt(prompt_template("monitor"),
                                       {{"task", *task}, {"conversation", conversation},
                                        {"chest", chest ? render_inventory_dict(*chest) : "None"}});
            req.context = {{"task", *task}, {"transcript", conversation}};
            if (chest) req.context["chest"] = inventory_json(*chest);
            ++monitor_calls_;
            cost += env.timing.monitor_ticks;
            try {
                judgment_ = request_judgment(env.backend, req);
            } catch (const Error& e) {
                judgment_ = ProgressJudgment{std::string("judgment unavailable: ") + e.what(), TaskStatus::Unknown};
                if (env.log) env.log("error", {{"stage", "monitor"}, {"error", e.what()}});
            }
        } else {
            judgment_ = ProgressJudgment{"every assignment of this stage was handed on", TaskStatus::Success};
        }
        if (env.log) env.log("monitor", {{"status", to_string(judgment_->status)}, {"rationale", judgment_->rationale}});
        if (judgment_->status == TaskStatus::Fail) {
            ++fail_judgments_;
            ++consecutive_failures_;
        } else {
            consecutive_failures_ = 0;
        }
    } else {
        judgment_.reset();
    }

    // A worker that keeps failing hands its objective back to whoever gave it.
    if (consecutive_failures_ >= env.timing.max_consecutive_failures && setup_.role != Role::Root && plan_.informer &&
        !(*plan_.informer == commissioner_id())) {
        report(env, phrase::failed(plan_.objective));
        if (env.log) env.log("escalate", {{"objective", plan_.objective}, {"to", plan_.informer->name()}, {"ticks", cost}});
        auto beliefs = plan_.inventory_beliefs;
        plan_ = PlanState{};
        plan_.inventory_beliefs = beliefs;
        judgment_.reset();
        consecutive_failures_ = 0;
        planned_empty_ = true;
        return {StepKind::Plan, cost};
    }

    ++prompts_;
    BackendRequest treq;
    treq.template_id = "task";
    treq.role = role;
    treq.context = planner_context(env.world, groups);
    const std::string previous = plan_.objective.empty() ? "None" : render_plan_text(plan_);
    const std::string progress = judgment_ ? render_judgment_text(*judgment_) : "None";
    std::string inventory = "None";
    if (env.world.has_body(setup_.id)) inventory = phrase::inventory_report(env.world.body(setup_.id));
    if (uses_root_templates()) {
        std::string roster, beliefs;
        for (const auto& t : setup_.command_targets) roster += (roster.empty() ? "" : ", ") + t.name();
        for (const auto& [who, b] : plan_.inventory_beliefs)
            beliefs += who.name() + ": " + render_inventory_dict(b.inventory) + "\n";
        treq.prompt = render_prompt(prompt_template("task_root"),
                                    {{"name", setup_.id.name()}, {"employees", roster}, {"conversation", conversation},
                                     {"previous_plan", previous}, {"beliefs", beliefs.empty() ? "None" : beliefs},
                                     {"progress", progress}});
    } else {
        treq.prompt = render_prompt(prompt_template("task_leaf"),
                                    {{"name", setup_.id.name()}, {"conversation", conversation},
                                     {"previous_plan", previous}, {"inventory", inventory}, {"progress", progress}});
    }
    const std::string old_objective = plan_.objective;
    try {
        plan_ = request_plan(env.backend, treq);
    } catch (const Error& e) {
        if (env.log) {
            env.log("error", {{"stage", "task"}, {"error", e.what()}});
            env.log("plan", {{"prompts", prompts_}, {"todos", nlohmann::json::array()}, {"ticks", cost}, {"failed", true}});
        }
        planned_empty_ = true;
        return {StepKind::Plan, cost};
    }
    if (plan_.objective != old_objective) objective_reported_ = false;

    std::vector<std::string> todos;
    if (plan_.task_at_hand) {
        BackendRequest areq;
        areq.template_id = "action";
        areq.role = role;
        const std::string task = plan_.task_at_hand->render();
        const std::string example_id = uses_root_templates() ? "action_root_example" : "action_leaf_example";
        areq.prompt = render_prompt(prompt_template("action"),
                                    {{"name", setup_.id.name()}, {"example", prompt_template(example_id).body}, {"task", task}});
        areq.context = {{"name", setup_.id.name()}, {"role", role}, {"task", task}};
        try {
            todos = request_todos(env.backend, areq);
        } catch (const Error& e) {
            if (env.log) env.log("error", {{"stage", "action"}, {"error", e.what()}});
        }
    }
    queue_.clear();
    for (const auto& t : todos) {
        try {
            queue_.emplace_back(t, parse_todo(t));
        } catch (const Error& e) {
            if (env.log) env.log("error", {{"todo", t}, {"error", e.what()}});
        }
    }

    const bool finished = !plan_.task_at_hand && !plan_.long_term_plan.empty() &&
                          std::all_of(plan_.long_term_plan.begin(), plan_.long_term_plan.end(),
                                      [](const Stage& s) { return s.done; });
    if (finished && setup_.role != Role::Root && !objective_reported_) {
        report(env, phrase::succeeded(plan_.objective));
        objective_reported_ = true;
    }
    planned_empty_ = queue_.empty();
    if (env.log) {
        nlohmann::json d{{"prompts", prompts_}, {"todos", todos}, {"ticks", cost}};
        d["task_at_hand"] = plan_.task_at_hand ? nlohmann::json(plan_.task_at_hand->header()) : nlohmann::json(nullptr);
        env.log("plan", d);
    }
    return {StepKind::Plan, cost};
}

StepOutcome HourglassAgent::step(StepEnv& env) {
    sleeping_ = false;
    if (in_flight_) finish_primitive(env);
    if (running_) {
        if (auto p = next_primitive(env)) return start_primitive(env, *p);
        report(env, phrase::succeeded(running_->todo));
        running_.reset();
    }
    if (!queue_.empty()) return dequeue(env);
    if (planned_empty_ && !pending_wake_) {
        sleeping_ = true;
        if (env.log) env.log("sleep", nlohmann::json::object());
        return {StepKind::Sleep, 0};
    }
    if (env.may_plan && !env.may_plan(setup_.id)) {
        if (env.log) env.log("barrier", nlohmann::json::object());
        return {StepKind::Barrier, 0};
    }
    return plan_step(env);
}

}  // namespace sagents
