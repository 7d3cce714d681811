#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "sagents/agent_id.hpp"
#include "sagents/world.hpp"

namespace sagents {

enum class Verb { Mine, Craft, Smelt, Kill, Cook, Equip, Build, Give, MoveTo };

std::string to_string(Verb v);
/// Verb for a single word in any accepted form ("mines", "crafted"); "move" is not included.
std::optional<Verb> verb_from_word(std::string_view word);

struct AgentAction {
    enum class Kind { Direct, Delegate };
    Kind kind = Kind::Direct;
    /// Delegate: who is told to act.
    std::optional<AgentId> target;
    Verb verb = Verb::Mine;
    std::optional<int> quantity;
    std::optional<std::string> item;
    std::optional<Position> position;
    /// Give: who receives the items.
    std::optional<AgentId> recipient;

    bool is_delegate() const noexcept { return kind == Kind::Delegate; }
    /// The action with the delegation stripped.
    AgentAction inner() const;

    friend bool operator==(const AgentAction&, const AgentAction&) = default;

    nlohmann::json to_json() const;
};

/// Parses one todo line ("inform WorkerA to mine 17 logs", "build walls at (1,2,3)").
/// Throws UnknownVerb, MissingPosition, MalformedTodo.
AgentAction parse_todo(std::string_view todo);

/// Canonical text for an action; parse_todo(render(a)) == a.
std::string render(const AgentAction& a);

/// Lowercased item with a plural 's' dropped ("Stones" -> "stone").
std::string singular_item(std::string_view item);

}  // namespace sagents
