#include <algorithm>
#include <cmath>
#include <regex>
#include <set>

#include "sagents/backends.hpp"
#include "sagents/comms.hpp"
#include "sagents/text.hpp"

namespace sagents {

std::vector<int> largest_remainder_split(int q, int n) {
    if (n <= 0 || q < 0) throw Error(ErrorCode::InvalidParams, "split needs n > 0 and q >= 0");
    // Equal quotas q/n: every remainder is the same, so ties go to the earliest parts.
    std::vector<int> parts(static_cast<std::size_t>(n), q / n);
    for (int i = 0; i < q % n; ++i) ++parts[static_cast<std::size_t>(i)];
    return parts;
}

std::string imperative(std::string_view task) {
    std::string t = text::trim(task);
    while (!t.empty() && t.back() == '.') t.pop_back();
    auto sp = t.find(' ');
    const std::string first = to_lower(t.substr(0, sp));
    const std::string rest = sp == std::string::npos ? "" : t.substr(sp);
    if (first == "moves" || first == "goes" || first == "go" || first == "move") return "move" + rest;
    if (auto v = verb_from_word(first)) return to_string(*v) + rest;
    return t;
}

namespace {

// ---------------------------------------------------------------- transcripts

struct Line {
    std::string clock;
    std::string speaker;
    std::string message;
    std::string raw;
};

std::string clean_message(std::string m) {
    m = text::trim(m);
    // Dict-of-lists transcripts leave list/dict punctuation after the message.
    while (!m.empty() && (m.back() == ']' || m.back() == '}' || m.back() == '"' || m.back() == ',' ||
                          std::isspace(static_cast<unsigned char>(m.back()))))
        m.pop_back();
    if (!m.empty() && m.front() == '\'') m.erase(m.begin());
    m = text::trim(m);
    if (!m.empty() && m.back() == '\'') m.pop_back();
    return text::trim(m);
}

std::vector<Line> parse_transcript(std::string_view transcript) {
    static const std::regex start(R"(\[(\d{1,3}:\d\d:\d\d)\]\s*([^\s\[\]'"]+?)\s+says:\s*)");
    const std::string s(transcript);
    std::vector<Line> out;
    std::vector<std::smatch> ms;
    for (auto it = std::sregex_iterator(s.begin(), s.end(), start); it != std::sregex_iterator(); ++it) ms.push_back(*it);
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const auto begin = static_cast<std::size_t>(ms[i].position(0) + ms[i].length(0));
        std::size_t end = i + 1 < ms.size() ? static_cast<std::size_t>(ms[i + 1].position(0)) : s.size();
        std::string body = s.substr(begin, end - begin);
        // The next record's opening quote/dash belongs to it, not to this message.
        if (i + 1 < ms.size()) {
            while (!body.empty() && (body.back() == '"' || body.back() == '-' || body.back() == ' ')) body.pop_back();
        }
        // A message runs to the end of its line in the dash-line shape.
        if (auto nl = body.find('\n'); nl != std::string::npos) body = body.substr(0, nl);
        out.push_back({ms[i].str(1), ms[i].str(2), clean_message(body), text::trim(s.substr(ms[i].position(0), end - ms[i].position(0)))});
    }
    return out;
}

enum class Phrase { None, Start, Success, Fail, Ack, Inventory };

struct Classified {
    Phrase kind = Phrase::None;
    std::string task;
    Inventory inventory;
};

Classified classify(const WorldConfig& cfg, const std::string& msg) {
    static const std::regex succeeded(R"(^\s*I have succeeded (?:in )?the task:?\s*(.+?)\s*\.?\s*$)", std::regex::icase);
    static const std::regex failed(R"(^\s*I have failed (?:in )?the task:?\s*(.+?)\s*\.?\s*$)", std::regex::icase);
    static const std::regex started(R"(^\s*I(?:'ll| will) start (?:the )?task:?\s*(.+?)(?:\s+now)?\s*\.?\s*$)",
                                    std::regex::icase);
    static const std::regex ack(R"(^\s*Got it!?\s*$)", std::regex::icase);
    static const std::regex inv(R"(my inventory is\s*(\{[^}]*\}|\[[^\]]*\])\s*,?\s*and my equipment is\s*(\[[^\]]*\]|none))",
                                std::regex::icase);
    Classified c;
    std::smatch m;
    if (std::regex_match(msg, m, succeeded)) {
        c.kind = Phrase::Success;
        c.task = m.str(1);
    } else if (std::regex_match(msg, m, failed)) {
        c.kind = Phrase::Fail;
        c.task = m.str(1);
    } else if (std::regex_match(msg, m, started)) {
        c.kind = Phrase::Start;
        c.task = m.str(1);
    } else if (std::regex_match(msg, m, ack)) {
        c.kind = Phrase::Ack;
    } else if (std::regex_search(msg, m, inv)) {
        c.kind = Phrase::Inventory;
        for (const auto& [k, v] : parse_inventory_dict(m.str(1))) c.inventory[canonical_item_name(cfg, k)] += v;
        static const std::regex item(R"('([^']+)')");
        const std::string eq = m.str(2);
        for (auto it = std::sregex_iterator(eq.begin(), eq.end(), item); it != std::sregex_iterator(); ++it)
            c.inventory[canonical_item_name(cfg, (*it).str(1))] += 1;
    }
    return c;
}

// ---------------------------------------------------------------- subtasks

struct Subtask {
    std::optional<AgentId> agent;
    std::optional<AgentAction> action;
    std::string text;
};

std::optional<std::pair<std::optional<AgentId>, AgentAction>> parse_with_agent(const std::string& sentence) {
    try {
        return std::make_pair(std::optional<AgentId>{}, parse_todo(sentence));
    } catch (const Error& e) {
        if (e.code() != ErrorCode::UnknownVerb) return std::nullopt;
    }
    std::string t = text::trim(sentence);
    auto sp = t.find(' ');
    if (sp == std::string::npos) return std::nullopt;
    std::string who = t.substr(0, sp);
    while (!who.empty() && (who.back() == ',' || who.back() == ':')) who.pop_back();
    if (who.empty()) return std::nullopt;
    try {
        AgentAction a = parse_todo(t.substr(sp + 1));
        if (a.is_delegate()) return std::nullopt;
        return std::make_pair(std::optional<AgentId>(AgentId(who)), a);
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::vector<Subtask> split_subtasks(std::string_view task) {
    static const std::regex header(R"(^\s*stage\s+\d+\s*(?:\([^)]*\))?\s*:?\s*(.*)$)", std::regex::icase);
    std::string t = text::replace_all(std::string(task), "```", "\n");
    std::vector<std::pair<bool, std::string>> lines;  // (is_header, content)
    for (const auto& l : text::split_lines(t)) {
        std::smatch m;
        if (std::regex_match(l, m, header)) lines.push_back({true, m.str(1)});
        else if (!text::trim(l).empty()) lines.push_back({false, l});
    }
    std::vector<std::string> sentences;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const bool has_body = i + 1 < lines.size() && !lines[i + 1].first;
        if (lines[i].first && has_body) continue;
        for (const auto& s : text::split(lines[i].second, '.'))
            if (!text::trim(s).empty()) sentences.push_back(text::trim(s));
    }
    std::vector<Subtask> out;
    for (const auto& s : sentences)
        if (auto p = parse_with_agent(s)) out.push_back({p->first, p->second, s});
    if (out.empty()) out.push_back({std::nullopt, std::nullopt, text::trim(t)});
    return out;
}

std::string normalized(std::string_view s) {
    std::string t = to_lower(text::trim(s));
    while (!t.empty() && (t.back() == '.' || t.back() == '!')) t.pop_back();
    return text::trim(t);
}

bool same_work(const WorldConfig& cfg, const AgentAction& a, const AgentAction& b) {
    if (a.verb != b.verb) return false;
    if (a.quantity.value_or(1) != b.quantity.value_or(1)) return false;
    const std::string ia = a.item ? canonical_item_name(cfg, singular_item(*a.item)) : "";
    const std::string ib = b.item ? canonical_item_name(cfg, singular_item(*b.item)) : "";
    if (ia != ib) return false;
    if (a.verb == Verb::Give && a.recipient != b.recipient) return false;
    if ((a.verb == Verb::MoveTo) && a.position != b.position) return false;
    return true;
}

bool phrase_matches(const WorldConfig& cfg, const Subtask& st, const std::string& phrase_task) {
    if (!st.action) return normalized(phrase_task) == normalized(st.text);
    auto p = parse_with_agent(phrase_task);
    if (!p) return false;
    return same_work(cfg, *st.action, p->second);
}

bool counts_items(Verb v) { return v == Verb::Mine || v == Verb::Craft || v == Verb::Smelt || v == Verb::Cook; }

}  // namespace

ProgressJudgment judge_transcript(const WorldConfig& cfg, std::string_view task, std::string_view transcript,
                                  const std::optional<Inventory>& chest) {
    if (text::trim(task).empty()) throw Error(ErrorCode::EmptyTask, "nothing to judge");
    const auto lines = parse_transcript(transcript);
    std::vector<Classified> cls;
    cls.reserve(lines.size());
    for (const auto& l : lines) cls.push_back(classify(cfg, l.message));

    std::vector<TaskStatus> statuses;
    std::vector<std::string> reasons;
    for (const auto& st : split_subtasks(task)) {
        const std::string label = st.action ? (st.agent ? st.agent->name() + " " : std::string()) + render(*st.action) : st.text;
        std::optional<std::size_t> decisive;
        bool acked = false;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (st.agent && !(AgentId(lines[i].speaker) == *st.agent)) continue;
            const auto& c = cls[i];
            if (c.kind == Phrase::Ack) acked = true;
            if ((c.kind == Phrase::Success || c.kind == Phrase::Fail || c.kind == Phrase::Start) &&
                phrase_matches(cfg, st, c.task))
                decisive = i;
        }
        TaskStatus status = TaskStatus::Unknown;
        std::string why;
        if (decisive) {
            const auto& line = lines[*decisive];
            const auto& c = cls[*decisive];
            if (c.kind == Phrase::Success) {
                status = TaskStatus::Success;
                why = "According to \"" + line.message + "\", " + line.speaker + " has succeeded the task " + c.task + ".";
                if (st.action && counts_items(st.action->verb) && st.action->item) {
                    const std::string item = canonical_item_name(cfg, singular_item(*st.action->item));
                    const int need = st.action->quantity.value_or(1);
                    for (std::size_t j = *decisive + 1; j < lines.size(); ++j) {
                        if (!(AgentId(lines[j].speaker) == AgentId(line.speaker))) continue;
                        const auto& cj = cls[j];
                        if (cj.kind == Phrase::Success || cj.kind == Phrase::Fail || cj.kind == Phrase::Start) break;
                        if (cj.kind != Phrase::Inventory) continue;
                        auto it = cj.inventory.find(item);
                        const int have = it == cj.inventory.end() ? 0 : it->second;
                        if (have < need) {
                            status = TaskStatus::Fail;
                            why = "According to the inventory reported by " + line.speaker + " (" +
                                  render_inventory_dict(cj.inventory) + "), " + line.speaker + " holds " +
                                  std::to_string(have) + " " + item + " of " + std::to_string(need) +
                                  ", so the task " + c.task + " has failed.";
                        }
                        break;
                    }
                }
            } else if (c.kind == Phrase::Fail) {
                status = TaskStatus::Fail;
                why = "According to \"" + line.message + "\", " + line.speaker + " has failed the task " + c.task + ".";
            } else {
                why = line.speaker + " has started " + c.task + " but has not reported a result, so " + label +
                      " is unknown.";
            }
        } else {
            why = acked ? "The task was acknowledged with \"Got it!\" but no result was reported for " + label + "."
                        : "The conversation holds no result for " + label + ".";
        }
        if (chest && st.action && st.action->item && counts_items(st.action->verb)) {
            const std::string item = canonical_item_name(cfg, singular_item(*st.action->item));
            auto it = chest->find(item);
            if (it != chest->end() && it->second >= st.action->quantity.value_or(1)) {
                status = TaskStatus::Success;
                why = "According to the chest information, the chest holds " + std::to_string(it->second) + " " + item +
                      ", so " + label + " has succeeded.";
            }
        }
        statuses.push_back(status);
        reasons.push_back(why);
    }
    ProgressJudgment j;
    const bool any_fail = std::count(statuses.begin(), statuses.end(), TaskStatus::Fail) > 0;
    const bool all_ok = std::count(statuses.begin(), statuses.end(), TaskStatus::Success) ==
                        static_cast<long>(statuses.size());
    j.status = any_fail ? TaskStatus::Fail : all_ok ? TaskStatus::Success : TaskStatus::Unknown;
    for (const auto& r : reasons) j.rationale += (j.rationale.empty() ? "" : " ") + r;
    return j;
}

// ---------------------------------------------------------------- oracle

namespace {

std::string pos_text(const Position& p) {
    return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + "," + std::to_string(p.z) + ")";
}

std::string plural(const std::string& item) {
    std::string s = text::replace_all(item, "_", " ");
    if (!s.empty() && s.back() != 's') s += "s";
    return s;
}

std::string spaced(const std::string& item) { return text::replace_all(item, "_", " "); }

struct Context {
    Role role = Role::Leaf;
    AgentId me;
    std::vector<AgentId> employees;
    std::optional<AgentId> successor;
    int chain_remaining = 1;
    std::vector<MessageRecord> conversation;
    std::optional<PlanState> previous;
    std::optional<ProgressJudgment> judgment;
    Inventory inventory;
    std::array<std::optional<std::string>, kEquipmentSlots> equipment{};
};

Context read_context(const nlohmann::json& j) {
    Context c;
    try {
        c.role = role_from_string(j.at("role").get<std::string>());
        c.me = AgentId(j.at("name").get<std::string>());
        for (const auto& e : j.value("employees", nlohmann::json::array())) c.employees.emplace_back(e.get<std::string>());
        std::sort(c.employees.begin(), c.employees.end());
        if (j.contains("successor") && !j["successor"].is_null()) c.successor = AgentId(j["successor"].get<std::string>());
        c.chain_remaining = j.value("chain_remaining", 1);
        for (const auto& r : j.value("conversation", nlohmann::json::array())) c.conversation.push_back(MessageRecord::from_json(r));
        if (j.contains("previous_plan") && j["previous_plan"].is_string()) c.previous = parse_plan(j["previous_plan"].get<std::string>());
        if (j.contains("judgment") && j["judgment"].is_object()) {
            ProgressJudgment pj;
            pj.rationale = j["judgment"].value("rationale", "");
            const std::string s = j["judgment"].value("status", "unknown");
            pj.status = s == "success" ? TaskStatus::Success : s == "fail" ? TaskStatus::Fail : TaskStatus::Unknown;
            c.judgment = pj;
        }
        if (j.contains("inventory")) c.inventory = parse_inventory_dict(j["inventory"].dump());
        if (j.contains("equipment") && j["equipment"].is_array())
            for (std::size_t i = 0; i < kEquipmentSlots && i < j["equipment"].size(); ++i)
                if (j["equipment"][i].is_string()) c.equipment[i] = j["equipment"][i].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidParams, std::string("oracle context: ") + e.what());
    }
    return c;
}

/// Latest instruction addressed to `me`: commissioner text or "<me>, please ...".
std::optional<std::pair<AgentId, std::string>> latest_directive(const Context& c) {
    std::optional<std::pair<AgentId, std::string>> found;
    const std::string prefix = c.me.name() + ", please ";
    for (const auto& r : c.conversation) {
        if (!(r.respondent == c.me) || r.speaker == c.me) continue;
        if (r.speaker == commissioner_id()) found = std::make_pair(r.speaker, text::trim(r.message));
        else if (text::starts_with_ci(r.message, prefix)) found = std::make_pair(r.speaker, text::trim(r.message.substr(prefix.size())));
    }
    return found;
}

class Planner {
public:
    Planner(const WorldConfig& world, const OracleConfig& cfg, Context ctx) : world_(world), cfg_(cfg), c_(std::move(ctx)) {}

    PlanState run() {
        PlanState plan = c_.previous.value_or(PlanState{});
        plan.analysis.clear();
        auto directive = latest_directive(c_);
        bool fresh = false;
        if (directive) {
            auto beliefs = plan.inventory_beliefs;
            plan = PlanState{};
            plan.inventory_beliefs = beliefs;
            plan.objective = directive->second;
            plan.informer = directive->first;
            fresh = true;
        }
        if (plan.objective.empty()) {
            plan.task_at_hand.reset();
            plan.analysis = "No instruction has arrived yet, so there is nothing to plan.";
            return plan;
        }
        AgentAction goal;
        try {
            goal = parse_todo(plan.objective);
        } catch (const Error& e) {
            throw Error(ErrorCode::UnsupportedTask, plan.objective + ": " + e.what());
        }
        if (goal.is_delegate()) throw Error(ErrorCode::UnsupportedTask, plan.objective);
        switch (c_.role) {
            case Role::Root:
                if (goal.verb == Verb::Build) root_shelter(plan, goal, fresh);
                else if (goal.verb == Verb::Mine) root_collect(plan, goal, fresh);
                else throw Error(ErrorCode::UnsupportedTask, plan.objective);
                break;
            case Role::Peer:
                if (fresh && directive->first == commissioner_id() && goal.verb == Verb::Mine && !c_.employees.empty())
                    peer_coordinate(plan, goal);
                else if (fresh) plan.long_term_plan = worker_stages(goal, goal.quantity.value_or(1));
                else progress(plan);
                break;
            case Role::Chain:
                if (fresh) chain_stages(plan, goal);
                else progress(plan);
                break;
            case Role::Leaf:
            case Role::Solo:
                if (fresh) plan.long_term_plan = worker_stages(goal, goal.quantity.value_or(1));
                else progress(plan);
                break;
        }
        if (fresh && c_.role != Role::Root) {
            number(plan.long_term_plan);
            if (!plan.long_term_plan.empty()) plan.task_at_hand = plan.long_term_plan.front();
            plan.analysis = "New instruction '" + plan.objective + "' from " + plan.informer->name() + "; " +
                            std::to_string(plan.long_term_plan.size()) + " stage(s) planned.";
        }
        return plan;
    }

private:
    static void number(std::vector<Stage>& stages) {
        for (std::size_t i = 0; i < stages.size(); ++i) stages[i].number = static_cast<int>(i + 1);
    }

    int have(const std::string& item) const {
        auto it = c_.inventory.find(item);
        return it == c_.inventory.end() ? 0 : it->second;
    }

    int held_tier() const {
        int best = 0;
        for (const auto& [tool, tier] : world_.tools)
            if (have(tool) > 0) best = std::max(best, tier);
        return best;
    }

    std::optional<std::string> tool_for(int tier) const {
        std::optional<std::string> pick;
        int pick_tier = 1 << 30;
        for (const auto& [tool, t] : world_.tools)
            if (t >= tier && have(tool) > 0 && t < pick_tier) {
                pick = tool;
                pick_tier = t;
            }
        return pick;
    }

    int required_tier(const std::string& item) const {
        std::optional<int> tier;
        for (const auto& b : world_.blocks)
            if (!b.drop.empty() && (b.drop == item || b.name == item)) tier = std::min(tier.value_or(1 << 30), b.required_tier);
        if (!tier) throw Error(ErrorCode::UnsupportedTask, "nothing yields " + item);
        return *tier;
    }

    Stage self_stage(std::string title, const std::vector<std::string>& jobs) const {
        Stage s;
        s.title = std::move(title);
        for (const auto& j : jobs) s.assignments.push_back({c_.me, j});
        return s;
    }

    /// Stages a worker runs itself: tool prerequisites, then the work.
    std::vector<Stage> worker_stages(const AgentAction& goal, int quantity) const {
        std::vector<Stage> out;
        if (goal.verb == Verb::Kill || goal.verb == Verb::Cook)
            throw Error(ErrorCode::UnsupportedTask, to_string(goal.verb) + " is not supported");
        if (goal.verb != Verb::Mine) {
            AgentAction g = goal;
            out.push_back(self_stage("Carry out the instruction", {render(g)}));
            return out;
        }
        const std::string item = canonical_item_name(world_, singular_item(goal.item.value_or("")));
        const int tier = required_tier(item);
        if (tier > 2) throw Error(ErrorCode::UnsupportedTask, item + " needs a tool beyond the stone pickaxe");
        const int held = held_tier();
        if (tier >= 1) {
            const bool need_wp = held < 1;
            const bool need_sp = tier >= 2 && held < 2;
            const bool need_table = (need_wp || need_sp) && have("crafting_table") == 0;
            const int sticks_need = (need_wp ? 2 : 0) + (need_sp ? 2 : 0);
            const int stick_crafts = (std::max(0, sticks_need - have("stick")) + 3) / 4;
            const int planks_need = (need_table ? 4 : 0) + (need_wp ? 3 : 0) + stick_crafts * 2;
            const int plank_crafts = (std::max(0, planks_need - have("plank")) + 3) / 4;
            const int logs = std::max(0, plank_crafts - have("log"));
            std::vector<std::string> jobs;
            if (logs > 0) jobs.push_back("mine " + std::to_string(logs) + " log");
            if (plank_crafts > 0) jobs.push_back("craft " + std::to_string(plank_crafts * 4) + " plank");
            if (stick_crafts > 0) jobs.push_back("craft " + std::to_string(stick_crafts * 4) + " stick");
            if (need_table) jobs.push_back("craft 1 crafting table");
            if (need_wp) jobs.push_back("craft 1 wooden pickaxe");
            const auto& hand = c_.equipment[kMainHand];
            const int hand_tier = hand && world_.tools.count(*hand) ? world_.tools.at(*hand) : 0;
            if (need_wp) jobs.push_back("equip wooden pickaxe");
            else if (!need_sp && hand_tier < tier) jobs.push_back("equip " + spaced(*tool_for(tier)));
            if (!jobs.empty()) out.push_back(self_stage("Make a wooden pickaxe", jobs));
            if (need_sp) {
                std::vector<std::string> sp;
                const int stone = std::max(0, 3 - have("stone"));
                if (stone > 0) sp.push_back("mine " + std::to_string(stone) + " stone");
                sp.push_back("craft 1 stone pickaxe");
                sp.push_back("equip stone pickaxe");
                out.push_back(self_stage("Make a stone pickaxe", sp));
            }
        }
        out.push_back(self_stage("Mine " + plural(item), {"mine " + std::to_string(quantity) + " " + spaced(item)}));
        return out;
    }

    /// Advance along the plan using the last judgment: success moves on, anything else repeats the stage.
    void progress(PlanState& plan) const {
        auto idx = plan.task_index();
        if (!idx) {
            plan.task_at_hand.reset();
            plan.analysis = "Every stage is finished.";
            return;
        }
        const TaskStatus st = c_.judgment ? c_.judgment->status : TaskStatus::Unknown;
        if (st == TaskStatus::Success) {
            plan.long_term_plan[*idx].done = true;
            plan.task_at_hand.reset();
            for (const auto& s : plan.long_term_plan)
                if (!s.done) {
                    plan.task_at_hand = s;
                    break;
                }
            plan.analysis = "Stage " + std::to_string(plan.long_term_plan[*idx].number) + " succeeded; " +
                            (plan.task_at_hand ? "moving to stage " + std::to_string(plan.task_at_hand->number) + "."
                                               : std::string("the instruction is complete."));
        } else {
            plan.analysis = "Stage " + std::to_string(plan.long_term_plan[*idx].number) + " was judged " + to_string(st) +
                            "; trying the same stage again.";
        }
    }

    void peer_coordinate(PlanState& plan, const AgentAction& goal) const {
        std::vector<AgentId> all = c_.employees;
        all.push_back(c_.me);
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        const auto shares = largest_remainder_split(goal.quantity.value_or(1), static_cast<int>(all.size()));
        const std::string item = plural(singular_item(goal.item.value_or("")));
        int mine = 0;
        std::vector<Assignment> others;
        for (std::size_t i = 0; i < all.size(); ++i) {
            if (all[i] == c_.me) mine = shares[i];
            else if (shares[i] > 0) others.push_back({all[i], "mines " + std::to_string(shares[i]) + " " + item});
        }
        auto own = mine > 0 ? worker_stages(goal, mine) : std::vector<Stage>{};
        if (own.empty()) {
            Stage s;
            s.title = "Share out the work";
            own.push_back(s);
        }
        own.front().assignments.insert(own.front().assignments.begin(), others.begin(), others.end());
        plan.long_term_plan = own;
    }

    void chain_stages(PlanState& plan, const AgentAction& goal) const {
        const int q = goal.quantity.value_or(1);
        const int share = largest_remainder_split(q, std::max(1, c_.chain_remaining)).front();
        plan.long_term_plan = share > 0 ? worker_stages(goal, share) : std::vector<Stage>{};
        if (q - share > 0 && c_.successor) {
            Stage s;
            s.title = "Pass on the rest";
            s.assignments.push_back(
                {*c_.successor, "mines " + std::to_string(q - share) + " " + plural(singular_item(goal.item.value_or("")))});
            plan.long_term_plan.push_back(s);
        }
    }

    // ---- root ---------------------------------------------------------

    void update_beliefs(PlanState& plan) const {
        for (const auto& e : c_.employees) plan.inventory_beliefs[e];
        const std::string please = ", please ";
        for (const auto& r : c_.conversation) {
            if (r.speaker == c_.me) {
                auto it = plan.inventory_beliefs.find(r.respondent);
                if (it == plan.inventory_beliefs.end()) continue;
                const std::string head = r.respondent.name() + please;
                if (!text::starts_with_ci(r.message, head)) continue;
                it->second.last_task = text::trim(r.message.substr(head.size()));
                it->second.last_status = "assigned";
                continue;
            }
            auto it = plan.inventory_beliefs.find(r.speaker);
            if (it == plan.inventory_beliefs.end()) continue;
            auto& b = it->second;
            const Classified cl = classify(world_, r.message);
            if (cl.kind == Phrase::Inventory) {
                b.inventory = cl.inventory;
            } else if ((cl.kind == Phrase::Success || cl.kind == Phrase::Fail || cl.kind == Phrase::Start) &&
                       !b.last_task.empty() && normalized(cl.task) == normalized(b.last_task)) {
                if (cl.kind == Phrase::Success) {
                    b.last_status = "succeeded";
                    ++b.successes;
                } else if (cl.kind == Phrase::Fail) {
                    b.last_status = "failed";
                    ++b.failures;
                } else {
                    b.last_status = "started";
                }
            }
        }
    }

    static bool idle(const AgentBelief& b) {
        return b.last_task.empty() || b.last_status == "succeeded" || b.last_status == "failed";
    }

    bool assignment_done(const PlanState& plan, const Assignment& a) const {
        auto it = plan.inventory_beliefs.find(a.agent);
        if (it == plan.inventory_beliefs.end()) return false;
        return it->second.last_status == "succeeded" && normalized(it->second.last_task) == normalized(imperative(a.task));
    }

    void mark_done(PlanState& plan) const {
        for (auto& s : plan.long_term_plan) {
            bool all = !s.assignments.empty();
            for (const auto& a : s.assignments) all = all && assignment_done(plan, a);
            if (all) s.done = true;
        }
    }

    void root_collect(PlanState& plan, const AgentAction& goal, bool fresh) const {
        if (c_.employees.empty()) throw Error(ErrorCode::UnsupportedTask, "a leader needs workers");
        update_beliefs(plan);
        const int q = goal.quantity.value_or(1);
        const std::string item = canonical_item_name(world_, singular_item(goal.item.value_or("")));
        const std::string noun = plural(singular_item(goal.item.value_or("")));
        plan.task_at_hand.reset();
        if (fresh || plan.long_term_plan.empty()) {
            Stage s;
            s.number = 1;
            s.title = "Gather " + noun;
            const auto shares = largest_remainder_split(q, static_cast<int>(c_.employees.size()));
            for (std::size_t i = 0; i < shares.size(); ++i)
                if (shares[i] > 0) s.assignments.push_back({c_.employees[i], "mines " + std::to_string(shares[i]) + " " + noun});
            plan.long_term_plan = {s};
            plan.task_at_hand = s;
            plan.analysis = "Split " + std::to_string(q) + " " + noun + " evenly over " +
                            std::to_string(c_.employees.size()) + " workers.";
            return;
        }
        mark_done(plan);
        int believed = 0;
        for (const auto& [id, b] : plan.inventory_beliefs) {
            auto it = b.inventory.find(item);
            if (it != b.inventory.end()) believed += it->second;
        }
        const int remaining = q - believed;
        std::vector<AgentId> candidates;
        for (const auto& e : c_.employees)
            if (idle(plan.inventory_beliefs[e]) && plan.inventory_beliefs[e].successes > 0) candidates.push_back(e);
        if (candidates.empty())
            for (const auto& e : c_.employees)
                if (idle(plan.inventory_beliefs[e])) candidates.push_back(e);
        if (remaining <= 0 || candidates.empty()) {
            plan.analysis = remaining <= 0 ? "Reported inventories already cover " + std::to_string(q) + " " + noun + "."
                                           : "Every worker is busy; waiting for reports.";
            return;
        }
        Stage s;
        s.number = plan.long_term_plan.back().number + 1;
        s.note = "adjust plan";
        s.title = "Gather the remaining " + noun;
        const auto shares = largest_remainder_split(remaining, static_cast<int>(candidates.size()));
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (shares[i] <= 0) continue;
            const std::string n = std::to_string(shares[i]);
            s.assignments.push_back({candidates[i], candidates.size() == 1 ? "mines the remaining " + n + " " + noun
                                                                             : "mines " + n + " more " + noun});
        }
        plan.long_term_plan.push_back(s);
        plan.task_at_hand = s;
        plan.analysis = std::to_string(believed) + " " + noun + " reported so far; " + std::to_string(remaining) +
                        " remain and go to idle workers.";
    }

    void root_shelter(PlanState& plan, const AgentAction& goal, bool fresh) const {
        if (!goal.position) throw Error(ErrorCode::MissingPosition, plan.objective);
        if (c_.employees.size() < 2) throw Error(ErrorCode::UnsupportedTask, "a shelter needs at least two workers");
        update_beliefs(plan);
        const std::string at = " at " + pos_text(*goal.position);
        if (fresh || plan.long_term_plan.empty()) {
            const AgentId& mason = c_.employees.back();
            std::vector<AgentId> carpenters(c_.employees.begin(), c_.employees.end() - 1);
            const int w = cfg_.shelter_width, d = cfg_.shelter_depth, h = cfg_.wall_height;
            const int wall_cells = (2 * w + 2 * d - 4) * h;
            Stage s1, s2, s3;
            s1.number = 1;
            s1.title = "Lay the foundation";
            s1.assignments.push_back({mason, "builds the foundation" + at});
            s2.number = 2;
            s2.title = "Raise the walls";
            const auto shares = largest_remainder_split(wall_cells, static_cast<int>(carpenters.size()));
            for (std::size_t i = 0; i < carpenters.size(); ++i)
                if (shares[i] > 0) s2.assignments.push_back({carpenters[i], "builds " + std::to_string(shares[i]) + " walls" + at});
            s3.number = 3;
            s3.title = "Put on the roof";
            s3.assignments.push_back({mason, "builds the roof" + at});
            plan.long_term_plan = {s1, s2, s3};
        }
        mark_done(plan);
        plan.task_at_hand.reset();
        for (auto& s : plan.long_term_plan) {
            if (s.done) continue;
            std::vector<Assignment> open;
            bool waiting = false;
            for (const auto& a : s.assignments) {
                if (assignment_done(plan, a)) continue;
                const auto& b = plan.inventory_beliefs[a.agent];
                const bool busy_on_it = normalized(b.last_task) == normalized(imperative(a.task)) &&
                                        (b.last_status == "assigned" || b.last_status == "started");
                if (busy_on_it) waiting = true;
                else open.push_back(a);
            }
            if (!open.empty() && !waiting) {
                if (open.size() != s.assignments.size()) {
                    s.assignments = open;
                    s.note = "adjust plan";
                }
                plan.task_at_hand = s;
                plan.analysis = "Stage " + std::to_string(s.number) + " (" + s.title + ") is next; earlier stages are finished.";
            } else {
                plan.analysis = "Waiting for stage " + std::to_string(s.number) + " (" + s.title + ") to finish.";
            }
            break;
        }
        if (std::all_of(plan.long_term_plan.begin(), plan.long_term_plan.end(), [](const Stage& s) { return s.done; }))
            plan.analysis = "Every stage of the shelter is reported finished.";
    }

    const WorldConfig& world_;
    const OracleConfig& cfg_;
    Context c_;
};

}  // namespace

OracleBackend::OracleBackend(std::shared_ptr<const WorldConfig> world, OracleConfig config)
    : world_(std::move(world)), config_(config) {
    if (!world_) throw Error(ErrorCode::InvalidConfig, "oracle needs a world config");
}

std::string OracleBackend::monitor(const nlohmann::json& ctx) const {
    std::optional<Inventory> chest;
    if (ctx.contains("chest") && ctx["chest"].is_object()) chest = parse_inventory_dict(ctx["chest"].dump());
    const auto j = judge_transcript(*world_, ctx.value("task", ""), ctx.value("transcript", ""), chest);
    return render_judgment_text(j);
}

std::string OracleBackend::plan_tasks(const nlohmann::json& ctx) const {
    Planner p(*world_, config_, read_context(ctx));
    return render_plan_text(p.run());
}

std::string OracleBackend::plan_actions(const nlohmann::json& ctx) const {
    const AgentId me(ctx.at("name").get<std::string>());
    static const std::regex from_of(R"(^(\w+)\s+(\d+|a|an|one)\s+(.+?)\s+from\s+the\s+(\w+?)s?\s+of\s+(\S+)$)",
                                    std::regex::icase);
    std::vector<std::string> todos;
    for (const auto& stage : parse_stage_text(ctx.value("task", ""))) {
        for (const auto& a : stage.assignments) {
            std::string job = imperative(a.task);
            std::smatch m;
            // "crafts 4 planks from the log of WorkerB": fetch the input first.
            if (std::regex_match(job, m, from_of) && !(AgentId(m.str(5)) == a.agent)) {
                const AgentId owner(m.str(5));
                const std::string give = "give 1 " + m.str(4) + " to " + a.agent.name();
                todos.push_back(owner == me ? give : "inform " + owner.name() + " to " + give);
                job = m.str(1) + " " + m.str(2) + " " + m.str(3);
            }
            todos.push_back(a.agent == me ? job : "inform " + a.agent.name() + " to " + job);
        }
    }
    return render_todo_list(todos);
}

BackendResponse OracleBackend::complete(const BackendRequest& request) {
    BackendResponse r;
    if (request.template_id == "monitor") r.raw_text = monitor(request.context);
    else if (request.template_id == "task") r.raw_text = plan_tasks(request.context);
    else if (request.template_id == "action") r.raw_text = plan_actions(request.context);
    else throw Error(ErrorCode::UnsupportedTask, "oracle has no template " + request.template_id);
    r.prompt_chars = request.prompt.size();
    r.completion_chars = r.raw_text.size();
    return r;
}

}  // namespace sagents
