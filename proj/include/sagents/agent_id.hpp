#pragma once

#include <compare>
#include <functional>
#include <string>
#include <string_view>

#include "sagents/error.hpp"

namespace sagents {

std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b) noexcept;

/// Agent identifier. Compared case-insensitively; the original spelling is
/// preserved for rendering ("WorkerA" and "workera" are the same agent).
class AgentId {
public:
    AgentId() = default;
    AgentId(std::string name) : name_(std::move(name)), key_(to_lower(name_)) {
        if (name_.empty()) throw Error(ErrorCode::InvalidParams, "agent id must be non-empty");
    }
    AgentId(const char* name) : AgentId(std::string(name)) {}

    const std::string& name() const noexcept { return name_; }
    const std::string& key() const noexcept { return key_; }
    bool empty() const noexcept { return name_.empty(); }

    friend bool operator==(const AgentId& a, const AgentId& b) noexcept { return a.key_ == b.key_; }
    friend std::strong_ordering operator<=>(const AgentId& a, const AgentId& b) noexcept {
        return a.key_ <=> b.key_;
    }

private:
    std::string name_;
    std::string key_;
};

}  // namespace sagents

template <>
struct std::hash<sagents::AgentId> {
    std::size_t operator()(const sagents::AgentId& id) const noexcept {
        return std::hash<std::string>{}(id.key());
    }
};
