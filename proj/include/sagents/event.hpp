#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "sagents/world.hpp"

namespace sagents {

/// One line of a run's event log.
struct Event {
    Tick tick = 0;
    std::uint64_t seq = 0;
    std::string agent;
    std::string kind;
    nlohmann::json detail = nlohmann::json::object();

    nlohmann::json to_json() const;
    static Event from_json(const nlohmann::json& j);
};

std::string events_to_jsonl(const std::vector<Event>& events);
/// Throws ParseFailure.
std::vector<Event> events_from_jsonl(const std::string& text);

}  // namespace sagents
