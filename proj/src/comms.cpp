#include "sagents/comms.hpp"

#include <algorithm>

#include "sagents/text.hpp"

namespace sagents {

nlohmann::json MessageRecord::to_json() const {
    return {{"time", time}, {"seq", seq}, {"speaker", speaker.name()}, {"respondent", respondent.name()},
            {"message", message}};
}

MessageRecord MessageRecord::from_json(const nlohmann::json& j) {
    try {
        MessageRecord r;
        r.time = j.at("time").get<Tick>();
        r.seq = j.value("seq", std::uint64_t{0});
        r.speaker = AgentId(j.at("speaker").get<std::string>());
        r.respondent = AgentId(j.at("respondent").get<std::string>());
        r.message = j.at("message").get<std::string>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseFailure, e.what());
    }
}

namespace phrase {

std::string start(const std::string& task) { return "I'll start the task " + task + " now"; }
std::string succeeded(const std::string& task) { return "I have succeeded the task " + task + "."; }
std::string failed(const std::string& task) { return "I have failed the task " + task + "."; }

std::string inventory_report(const Inventory& inv, const std::array<std::optional<std::string>, kEquipmentSlots>& eq) {
    std::string s = "my inventory is {";
    bool first = true;
    for (const auto& [k, v] : inv) {
        if (v <= 0) continue;
        if (!first) s += ", ";
        s += "'" + k + "': " + std::to_string(v);
        first = false;
    }
    s += "}, and my equipment is [";
    for (std::size_t i = 0; i < eq.size(); ++i) {
        if (i) s += ", ";
        s += eq[i] ? "'" + *eq[i] + "'" : std::string("None");
    }
    return s + "]";
}

std::string inventory_report(const AgentBody& body) { return inventory_report(body.inventory, body.equipment); }

std::string directive(const AgentId& target, const std::string& todo) { return target.name() + ", please " + todo; }

}  // namespace phrase

MessageRecord MessagePool::post(const AgentId& speaker, const AgentId& respondent, std::string message) {
    if (speaker == respondent) throw Error(ErrorCode::SelfMessage, speaker.name());
    std::lock_guard lock(mu_);
    MessageRecord r{clock_, next_seq_++, speaker, respondent, std::move(message)};
    records_.push_back(r);
    return r;
}

void MessagePool::set_clock(Tick t) {
    std::lock_guard lock(mu_);
    if (t > clock_) clock_ = t;
}

Tick MessagePool::clock() const {
    std::lock_guard lock(mu_);
    return clock_;
}

std::vector<ConversationGroup> MessagePool::conversation_since(ConversationCursor& cursor) const {
    std::vector<ConversationGroup> groups;
    std::lock_guard lock(mu_);
    std::uint64_t last = cursor.last_seen;
    for (const auto& r : records_) {
        if (r.seq <= cursor.last_seen) continue;
        const bool spoke = r.speaker == cursor.owner;
        if (!spoke && r.respondent != cursor.owner) continue;
        const AgentId& other = spoke ? r.respondent : r.speaker;
        auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.counterpart == other; });
        if (it == groups.end()) {
            groups.push_back({other, {}});
            it = groups.end() - 1;
        }
        it->records.push_back(r);
        last = std::max(last, r.seq);
    }
    cursor.last_seen = last;
    return groups;
}

std::vector<MessageRecord> MessagePool::records() const {
    std::lock_guard lock(mu_);
    return records_;
}

std::vector<MessageRecord> MessagePool::records_after(std::uint64_t after) const {
    std::lock_guard lock(mu_);
    std::vector<MessageRecord> out;
    for (const auto& r : records_)
        if (r.seq > after) out.push_back(r);
    return out;
}

std::size_t MessagePool::size() const {
    std::lock_guard lock(mu_);
    return records_.size();
}

std::string MessagePool::to_jsonl() const {
    std::string out;
    for (const auto& r : records()) out += r.to_json().dump() + "\n";
    return out;
}

std::vector<MessageRecord> MessagePool::parse_jsonl(const std::string& text) {
    std::vector<MessageRecord> out;
    for (const auto& line : text::split_lines(text)) {
        if (text::trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ParseFailure, e.what());
        }
        out.push_back(MessageRecord::from_json(j));
    }
    return out;
}

std::string render_line(const MessageRecord& r) {
    return "-[" + text::clock_string(r.time) + "]" + r.speaker.name() + " says: '" + r.message + "'";
}

std::string render_transcript(const std::vector<MessageRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        if (!out.empty()) out += "\n";
        out += render_line(r);
    }
    return out;
}

std::string render_conversation(const AgentId& owner, const std::vector<ConversationGroup>& groups) {
    std::string out;
    for (const auto& g : groups) {
        if (!out.empty()) out += "\n";
        out += "The conversation between " + g.counterpart.name() + " and " + owner.name() + "\n";
        out += render_transcript(g.records) + "\n";
    }
    return out;
}

}  // namespace sagents
