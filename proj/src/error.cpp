#include "sagents/error.hpp"

namespace sagents {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::DuplicateAgent: return "DuplicateAgent";
        case ErrorCode::EmptyOrganization: return "EmptyOrganization";
        case ErrorCode::UnknownAgent: return "UnknownAgent";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::NoTool: return "NoTool";
        case ErrorCode::NoMaterials: return "NoMaterials";
        case ErrorCode::TargetNotFound: return "TargetNotFound";
        case ErrorCode::Unreachable: return "Unreachable";
        case ErrorCode::BadTarget: return "BadTarget";
        case ErrorCode::InjectedFailure: return "InjectedFailure";
        case ErrorCode::SelfMessage: return "SelfMessage";
        case ErrorCode::EmptyTask: return "EmptyTask";
        case ErrorCode::UnknownVerb: return "UnknownVerb";
        case ErrorCode::MissingPosition: return "MissingPosition";
        case ErrorCode::MalformedTodo: return "MalformedTodo";
        case ErrorCode::MalformedPlan: return "MalformedPlan";
        case ErrorCode::UnparseableTodoList: return "UnparseableTodoList";
        case ErrorCode::AuthorityViolation: return "AuthorityViolation";
        case ErrorCode::BackendUnavailable: return "BackendUnavailable";
        case ErrorCode::UnboundSlot: return "UnboundSlot";
        case ErrorCode::UnsupportedTask: return "UnsupportedTask";
        case ErrorCode::Timeout: return "Timeout";
        case ErrorCode::ServiceError: return "ServiceError";
        case ErrorCode::ParseFailure: return "ParseFailure";
        case ErrorCode::InvalidOrganization: return "InvalidOrganization";
        case ErrorCode::TaskUndefined: return "TaskUndefined";
        case ErrorCode::InvalidParams: return "InvalidParams";
    }
    return "Unknown";
}

}  // namespace sagents
