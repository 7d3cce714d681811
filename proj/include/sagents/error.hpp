#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sagents {

enum class ErrorCode {
    // org_graph
    DuplicateAgent,
    EmptyOrganization,
    UnknownAgent,
    // world
    InvalidConfig,
    NoTool,
    NoMaterials,
    TargetNotFound,
    Unreachable,
    BadTarget,
    InjectedFailure,
    // comms
    SelfMessage,
    // hourglass
    EmptyTask,
    UnknownVerb,
    MissingPosition,
    MalformedTodo,
    MalformedPlan,
    UnparseableTodoList,
    AuthorityViolation,
    // planner backends
    BackendUnavailable,
    UnboundSlot,
    UnsupportedTask,
    Timeout,
    ServiceError,
    ParseFailure,
    // scheduler / harness
    InvalidOrganization,
    TaskUndefined,
    InvalidParams,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace sagents
