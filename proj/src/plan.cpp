#include "sagents/plan.hpp"

#include <regex>

#include "sagents/text.hpp"

namespace sagents {

std::string to_string(Role r) {
    switch (r) {
        case Role::Root: return "root";
        case Role::Leaf: return "leaf";
        case Role::Peer: return "peer";
        case Role::Chain: return "chain";
        case Role::Solo: return "solo";
    }
    return "leaf";
}

Role role_from_string(std::string_view s) {
    const std::string l = to_lower(s);
    if (l == "root") return Role::Root;
    if (l == "leaf") return Role::Leaf;
    if (l == "peer") return Role::Peer;
    if (l == "chain") return Role::Chain;
    if (l == "solo") return Role::Solo;
    throw Error(ErrorCode::InvalidParams, "unknown role " + std::string(s));
}

std::string to_string(TaskStatus s) {
    switch (s) {
        case TaskStatus::Success: return "success";
        case TaskStatus::Fail: return "fail";
        case TaskStatus::Unknown: return "unknown";
    }
    return "unknown";
}

nlohmann::json ProgressJudgment::to_json() const { return {{"rationale", rationale}, {"status", to_string(status)}}; }

bool Stage::same_content(const Stage& o) const {
    return number == o.number && text::trim(title) == text::trim(o.title) && note == o.note && assignments == o.assignments;
}

std::string Stage::header() const {
    std::string h = "Stage " + std::to_string(number);
    if (!note.empty()) h += " (" + note + ")";
    h += ":";
    if (!title.empty()) h += " " + title;
    return h;
}

std::string Stage::render() const {
    std::string s = header();
    for (const auto& a : assignments) s += "\n    " + a.agent.name() + " " + a.task + ".";
    return s;
}

std::optional<std::size_t> PlanState::task_index() const {
    if (!task_at_hand) return std::nullopt;
    for (std::size_t i = 0; i < long_term_plan.size(); ++i)
        if (long_term_plan[i].same_content(*task_at_hand)) return i;
    return std::nullopt;
}

namespace {

nlohmann::json stage_json(const Stage& s) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& x : s.assignments) a.push_back({{"agent", x.agent.name()}, {"task", x.task}});
    return {{"number", s.number}, {"title", s.title}, {"note", s.note}, {"done", s.done}, {"assignments", a}};
}

}  // namespace

nlohmann::json PlanState::to_json() const {
    nlohmann::json j;
    j["objective"] = objective;
    j["analysis"] = analysis;
    j["long_term_plan"] = nlohmann::json::array();
    for (const auto& s : long_term_plan) j["long_term_plan"].push_back(stage_json(s));
    j["task_at_hand"] = task_at_hand ? stage_json(*task_at_hand) : nlohmann::json(nullptr);
    j["informer"] = informer ? nlohmann::json(informer->name()) : nlohmann::json(nullptr);
    nlohmann::json b = nlohmann::json::object();
    for (const auto& [id, belief] : inventory_beliefs)
        b[id.name()] = {{"inventory", inventory_json(belief.inventory)},
                        {"last_task", belief.last_task},
                        {"last_status", belief.last_status},
                        {"successes", belief.successes},
                        {"failures", belief.failures}};
    j["inventory_beliefs"] = b;
    return j;
}

std::string render_inventory_dict(const Inventory& inv) {
    std::string s = "{";
    bool first = true;
    for (const auto& [k, v] : inv) {
        if (v <= 0) continue;
        if (!first) s += ", ";
        s += "'" + k + "': " + std::to_string(v);
        first = false;
    }
    return s + "}";
}

Inventory parse_inventory_dict(std::string_view s) {
    static const std::regex entry(R"(['"]([^'"]+)['"]\s*:\s*(\d+))");
    Inventory inv;
    const std::string str(s);
    for (auto it = std::sregex_iterator(str.begin(), str.end(), entry); it != std::sregex_iterator(); ++it)
        inv[(*it).str(1)] += std::stoi((*it).str(2));
    return inv;
}

std::string render_plan_text(const PlanState& p) {
    std::string s = "Current inventory of employers:";
    if (p.inventory_beliefs.empty()) s += " None";
    for (const auto& [id, b] : p.inventory_beliefs) {
        s += "\n    " + id.name() + ": inventory " + render_inventory_dict(b.inventory);
        if (!b.last_task.empty()) s += "; task '" + b.last_task + "' " + (b.last_status.empty() ? "assigned" : b.last_status);
        s += "; successes " + std::to_string(b.successes) + "; failures " + std::to_string(b.failures);
    }
    s += "\n\nObjective:\n" + (p.objective.empty() ? std::string("None") : p.objective);
    s += "\n\nAnalysis:\n" + (p.analysis.empty() ? std::string("None") : p.analysis);
    s += "\n\nLong term plan:";
    for (const auto& st : p.long_term_plan) {
        std::string r = st.render();
        if (st.done) {
            auto nl = r.find('\n');
            r.insert(nl == std::string::npos ? r.size() : nl, " [done]");
        }
        s += "\n" + r;
    }
    if (p.long_term_plan.empty()) s += " None";
    s += "\n\nThe task at hand:\n" + (p.task_at_hand ? p.task_at_hand->render() : std::string("None"));
    s += "\n\nInformer is " + (p.informer ? p.informer->name() : std::string("None")) + "\n";
    return s;
}

namespace {

enum class Section { None, Beliefs, Objective, Analysis, Plan, Task, Informer };

std::optional<std::pair<Section, std::string>> section_header(const std::string& line) {
    static const std::vector<std::pair<Section, std::regex>> headers{
        {Section::Beliefs, std::regex(R"(^\s*current inventory( of employers)?\s*:?\s*(.*)$)", std::regex::icase)},
        {Section::Objective, std::regex(R"(^\s*objective\s*:\s*(.*)$)", std::regex::icase)},
        {Section::Analysis, std::regex(R"(^\s*analysis\s*:\s*(.*)$)", std::regex::icase)},
        {Section::Plan, std::regex(R"(^\s*long[ -]term plan\s*:\s*(.*)$)", std::regex::icase)},
        {Section::Task, std::regex(R"(^\s*the task at hand\s*:\s*(.*)$)", std::regex::icase)},
        {Section::Informer, std::regex(R"(^\s*informer is\s*:?\s*(.*)$)", std::regex::icase)},
    };
    for (const auto& [sec, re] : headers) {
        std::smatch m;
        if (std::regex_match(line, m, re)) return std::make_pair(sec, m.str(m.size() - 1));
    }
    return std::nullopt;
}

std::string strip_period(std::string s) {
    s = text::trim(s);
    while (!s.empty() && (s.back() == '.' || s.back() == ',')) s.pop_back();
    return text::trim(s);
}

std::optional<Assignment> parse_assignment(const std::string& line) {
    std::string t = strip_period(line);
    if (t.empty()) return std::nullopt;
    auto sp = t.find(' ');
    if (sp == std::string::npos) return std::nullopt;
    std::string who = t.substr(0, sp);
    while (!who.empty() && (who.back() == ',' || who.back() == ':')) who.pop_back();
    if (who.empty()) return std::nullopt;
    return Assignment{AgentId(who), text::trim(t.substr(sp + 1))};
}

std::vector<Stage> parse_stages(const std::vector<std::string>& lines) {
    static const std::regex header(R"(^\s*stage\s+(\d+)\s*(?:\(([^)]*)\))?\s*:?\s*(.*)$)", std::regex::icase);
    std::vector<Stage> stages;
    for (const auto& raw : lines) {
        std::smatch m;
        if (std::regex_match(raw, m, header)) {
            Stage s;
            s.number = std::stoi(m.str(1));
            s.note = text::trim(m.str(2));
            std::string title = text::trim(m.str(3));
            if (auto pos = title.rfind("[done]"); pos != std::string::npos && pos + 6 == title.size()) {
                s.done = true;
                title = text::trim(title.substr(0, pos));
            }
            s.title = title;
            stages.push_back(std::move(s));
            continue;
        }
        if (text::trim(raw).empty() || stages.empty()) continue;
        // Several sentences on one line are several assignments.
        for (const auto& sentence : text::split(raw, '.'))
            if (auto a = parse_assignment(sentence)) stages.back().assignments.push_back(*a);
    }
    // A stage written on its header line alone carries its assignments in the title.
    for (auto& s : stages)
        if (s.assignments.empty())
            for (const auto& sentence : text::split(s.title, '.'))
                if (auto a = parse_assignment(sentence)) s.assignments.push_back(*a);
    return stages;
}

void parse_beliefs(const std::vector<std::string>& lines, PlanState& p) {
    static const std::regex full(
        R"(^\s*(\S+?)\s*:\s*inventory\s*(\{[^}]*\}|\[[^\]]*\])(?:\s*;\s*task\s*'(.*)'\s*(\w+))?(?:\s*;\s*successes\s*(\d+))?(?:\s*;\s*failures\s*(\d+))?\s*$)",
        std::regex::icase);
    static const std::regex empty_inv(R"((\w+)\s+has an empty inventory)", std::regex::icase);
    for (const auto& line : lines) {
        std::smatch m;
        if (std::regex_match(line, m, full)) {
            AgentBelief b;
            b.inventory = parse_inventory_dict(m.str(2));
            b.last_task = m.str(3);
            b.last_status = to_lower(m.str(4));
            if (m[5].matched) b.successes = std::stoi(m.str(5));
            if (m[6].matched) b.failures = std::stoi(m.str(6));
            p.inventory_beliefs[AgentId(m.str(1))] = b;
            continue;
        }
        for (auto it = std::sregex_iterator(line.begin(), line.end(), empty_inv); it != std::sregex_iterator(); ++it)
            p.inventory_beliefs[AgentId((*it).str(1))] = AgentBelief{};
    }
}

std::string join_lines(const std::vector<std::string>& lines) {
    std::string s;
    for (const auto& l : lines) {
        const std::string t = text::trim(l);
        if (t.empty()) continue;
        if (!s.empty()) s += "\n";
        s += t;
    }
    return s;
}

bool is_none(const std::vector<std::string>& lines) {
    const std::string s = to_lower(strip_period(join_lines(lines)));
    return s.empty() || s == "none";
}

}  // namespace

std::vector<Stage> parse_stage_text(std::string_view text) { return parse_stages(text::split_lines(text)); }

PlanState parse_plan(std::string_view raw) {
    std::map<Section, std::vector<std::string>> body;
    Section cur = Section::None;
    for (const auto& line : text::split_lines(raw)) {
        if (auto h = section_header(line)) {
            cur = h->first;
            body[cur];
            if (!text::trim(h->second).empty()) body[cur].push_back(h->second);
            continue;
        }
        if (cur != Section::None) body[cur].push_back(line);
    }
    if (!body.count(Section::Plan)) throw Error(ErrorCode::MalformedPlan, "missing long term plan");
    if (!body.count(Section::Task)) throw Error(ErrorCode::MalformedPlan, "missing task at hand");
    PlanState p;
    p.objective = is_none(body[Section::Objective]) ? "" : join_lines(body[Section::Objective]);
    p.analysis = is_none(body[Section::Analysis]) ? "" : join_lines(body[Section::Analysis]);
    if (!is_none(body[Section::Plan])) p.long_term_plan = parse_stages(body[Section::Plan]);
    if (!is_none(body[Section::Task])) {
        auto st = parse_stages(body[Section::Task]);
        if (st.empty()) throw Error(ErrorCode::MalformedPlan, "task at hand is not a stage");
        Stage task = st.front();
        std::optional<std::size_t> idx;
        for (std::size_t i = 0; i < p.long_term_plan.size(); ++i)
            if (p.long_term_plan[i].same_content(task)) idx = i;
        if (!idx)
            for (std::size_t i = 0; i < p.long_term_plan.size(); ++i)
                if (p.long_term_plan[i].number == task.number) idx = i;
        if (!idx) throw Error(ErrorCode::MalformedPlan, "task at hand is not in the long term plan");
        task.done = p.long_term_plan[*idx].done;
        p.long_term_plan[*idx].assignments = task.assignments;
        p.long_term_plan[*idx].title = task.title;
        p.long_term_plan[*idx].note = task.note;
        p.task_at_hand = task;
    }
    if (body.count(Section::Informer) && !is_none(body[Section::Informer])) {
        std::string who = strip_period(join_lines(body[Section::Informer]));
        auto sp = who.find_first_of(" \n");
        if (sp != std::string::npos) who = who.substr(0, sp);
        p.informer = AgentId(who);
    }
    if (body.count(Section::Beliefs)) parse_beliefs(body[Section::Beliefs], p);
    return p;
}

std::string render_judgment_text(const ProgressJudgment& j) {
    return "Task result judgment: " + j.rationale + "\nFinal task status: " + to_string(j.status) + "\n";
}

ProgressJudgment parse_judgment(std::string_view raw) {
    static const std::regex status_re(R"(^\s*final task status\s*:?\s*['"`<]*\s*([A-Za-z]+))", std::regex::icase);
    static const std::regex judgment_re(R"(^\s*task result judgment\s*:?\s*(.*)$)", std::regex::icase);
    std::optional<std::string> token;
    std::string rationale;
    for (const auto& line : text::split_lines(raw)) {
        std::smatch m;
        if (std::regex_search(line, m, status_re)) token = to_lower(m.str(1));
        else if (std::regex_match(line, m, judgment_re)) rationale = text::trim(m.str(1));
    }
    if (!token) throw Error(ErrorCode::ParseFailure, "no final task status");
    ProgressJudgment j;
    if (*token == "success" || *token == "succeeded" || *token == "successful" || *token == "succeed")
        j.status = TaskStatus::Success;
    else if (*token == "fail" || *token == "failed" || *token == "failure")
        j.status = TaskStatus::Fail;
    else if (*token == "unknown" || *token == "ongoing")
        j.status = TaskStatus::Unknown;
    else
        throw Error(ErrorCode::ParseFailure, "unrecognised task status '" + *token + "'");
    j.rationale = (rationale.empty() ? std::string("(no judgment text)") : rationale) + " [raw status: " + *token + "]";
    return j;
}

std::string render_todo_list(const std::vector<std::string>& todos) { return nlohmann::json(todos).dump(); }

std::vector<std::string> parse_todo_list(std::string_view raw) {
    auto from_json = [](const nlohmann::json& j) -> std::optional<std::vector<std::string>> {
        if (!j.is_array()) return std::nullopt;
        std::vector<std::string> out;
        for (const auto& e : j) {
            if (!e.is_string()) return std::nullopt;
            out.push_back(e.get<std::string>());
        }
        return out;
    };
    try {
        if (auto v = from_json(nlohmann::json::parse(raw))) return *v;
    } catch (const nlohmann::json::exception&) {
    }
    const std::string s(raw);
    auto open = s.find('[');
    if (open != std::string::npos) {
        int depth = 0;
        for (std::size_t i = open; i < s.size(); ++i) {
            if (s[i] == '[') ++depth;
            else if (s[i] == ']' && --depth == 0) {
                try {
                    if (auto v = from_json(nlohmann::json::parse(s.substr(open, i - open + 1)))) return *v;
                } catch (const nlohmann::json::exception&) {
                }
                break;
            }
        }
    }
    throw Error(ErrorCode::UnparseableTodoList, s.substr(0, 200));
}

}  // namespace sagents
