#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "sagents/agent_id.hpp"
#include "sagents/world.hpp"

namespace sagents {

struct MessageRecord {
    Tick time = 0;
    std::uint64_t seq = 0;
    AgentId speaker;
    AgentId respondent;
    std::string message;

    nlohmann::json to_json() const;
    static MessageRecord from_json(const nlohmann::json& j);
};

struct ConversationCursor {
    AgentId owner;
    /// Sequence number of the last record seen; 0 means nothing seen (seqs start at 1).
    std::uint64_t last_seen = 0;
};

/// Records involving one owner, grouped by counterpart in first-appearance order.
struct ConversationGroup {
    AgentId counterpart;
    std::vector<MessageRecord> records;
};

namespace phrase {
std::string start(const std::string& task);
std::string succeeded(const std::string& task);
std::string failed(const std::string& task);
inline constexpr const char* kAck = "Got it!";
std::string inventory_report(const AgentBody& body);
std::string inventory_report(const Inventory& inv, const std::array<std::optional<std::string>, kEquipmentSlots>& eq);
/// "<Target>, please <todo>"
std::string directive(const AgentId& target, const std::string& todo);
}  // namespace phrase

inline const AgentId& commissioner_id() {
    static const AgentId id("commissioner");
    return id;
}

class MessagePool {
public:
    MessagePool() = default;
    MessagePool(const MessagePool&) = delete;
    MessagePool& operator=(const MessagePool&) = delete;

    /// Appends at the pool clock. Throws SelfMessage.
    MessageRecord post(const AgentId& speaker, const AgentId& respondent, std::string message);
    void set_clock(Tick t);
    Tick clock() const;

    std::vector<ConversationGroup> conversation_since(ConversationCursor& cursor) const;
    std::vector<MessageRecord> records() const;
    /// Records with seq > after.
    std::vector<MessageRecord> records_after(std::uint64_t after) const;
    std::size_t size() const;

    std::string to_jsonl() const;
    static std::vector<MessageRecord> parse_jsonl(const std::string& text);

private:
    mutable std::mutex mu_;
    Tick clock_ = 0;
    std::uint64_t next_seq_ = 1;
    std::vector<MessageRecord> records_;
};

std::string render_line(const MessageRecord& r);
std::string render_transcript(const std::vector<MessageRecord>& records);
/// Appendix-style block: "The conversation between <counterpart> and <owner>" then the lines.
std::string render_conversation(const AgentId& owner, const std::vector<ConversationGroup>& groups);

}  // namespace sagents
