#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "sagents/plan.hpp"
#include "sagents/todo.hpp"
#include "sagents/world.hpp"

namespace sagents {

struct PromptTemplate {
    std::string id;
    std::string body;
};

/// Built-in templates: "monitor", "task_root", "task_leaf", "action", plus the
/// "action_root_example" and "action_leaf_example" blocks spliced into "action".
const PromptTemplate& prompt_template(std::string_view id);
std::vector<std::string> template_slots(const PromptTemplate& t);
/// Substitutes {slot} occurrences. Throws UnboundSlot when a slot has no value.
std::string render_prompt(const PromptTemplate& t, const std::map<std::string, std::string>& slots);

struct BackendRequest {
    /// "monitor", "task" or "action".
    std::string template_id;
    std::string prompt;
    /// Structured view of the same inputs the prompt was rendered from.
    nlohmann::json context;
    bool deterministic = true;
    /// Role of the asking agent ("root", "leaf", ...); remote backends map it to a model id.
    std::string role;
};

struct BackendResponse {
    std::string raw_text;
    nlohmann::json parsed;
    std::size_t prompt_chars = 0;
    std::size_t completion_chars = 0;
    double latency_ms = 0;
    int attempts = 1;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual BackendResponse complete(const BackendRequest& request) = 0;
    virtual std::string name() const = 0;
};

// -- scripted oracle --------------------------------------------------------

/// Largest-remainder split of q over n parts; earlier parts get the extra units.
std::vector<int> largest_remainder_split(int q, int n);

/// Rule-based progress judgment over a transcript (either the dash-line or the
/// dict-of-lists shape). Throws EmptyTask.
ProgressJudgment judge_transcript(const WorldConfig& config, std::string_view task, std::string_view transcript,
                                  const std::optional<Inventory>& chest = std::nullopt);

/// Base verb form of an assignment ("mines 17 stones" -> "mine 17 stones").
std::string imperative(std::string_view task);

struct OracleConfig {
    int shelter_width = 5;
    int shelter_depth = 5;
    int wall_height = 3;
};

class OracleBackend : public Backend {
public:
    explicit OracleBackend(std::shared_ptr<const WorldConfig> world, OracleConfig config = {});

    BackendResponse complete(const BackendRequest& request) override;
    std::string name() const override { return "oracle"; }

    std::string monitor(const nlohmann::json& ctx) const;
    std::string plan_tasks(const nlohmann::json& ctx) const;
    std::string plan_actions(const nlohmann::json& ctx) const;

    const WorldConfig& world() const noexcept { return *world_; }

private:
    std::shared_ptr<const WorldConfig> world_;
    OracleConfig config_;
};

// -- remote chat-completion client ------------------------------------------

struct EndpointConfig {
    /// e.g. "https://api.example.com"; requests go to {base_url}{path}.
    std::string base_url;
    std::string path = "/v1/chat/completions";
    std::string model = "gpt-4";
    /// Role name -> model id ("root" -> "gpt-4", "leaf" -> "gpt-3.5-turbo").
    std::map<std::string, std::string> role_models;
    std::string api_key_env = "SAGENTS_API_KEY";
    int max_retries = 3;
    int backoff_ms = 200;
    int timeout_ms = 30000;
    int max_in_flight = 4;
    double chat_temperature = 0.9;

    static EndpointConfig from_json(const nlohmann::json& j);
};

class RemoteBackend : public Backend {
public:
    explicit RemoteBackend(EndpointConfig config);

    BackendResponse complete(const BackendRequest& request) override;
    std::string name() const override { return "remote"; }

    /// Every exchange (request JSON, status, body) is passed here when set.
    std::function<void(const nlohmann::json&)> on_exchange;

private:
    EndpointConfig config_;
    std::counting_semaphore<1024> slots_;
};

// -- cassettes ----------------------------------------------------------------

/// Forwards to `inner` and appends every exchange to a JSONL file.
class CassetteRecorder : public Backend {
public:
    CassetteRecorder(Backend& inner, std::string path);
    BackendResponse complete(const BackendRequest& request) override;
    std::string name() const override { return "record:" + inner_.name(); }

private:
    Backend& inner_;
    std::string path_;
    std::mutex mu_;
};

/// Serves responses from a recorded JSONL file, matched on (template id, prompt).
class CassetteReplayer : public Backend {
public:
    explicit CassetteReplayer(const std::string& path);
    static std::unique_ptr<CassetteReplayer> from_text(const std::string& jsonl);
    BackendResponse complete(const BackendRequest& request) override;
    std::string name() const override { return "replay"; }
    std::size_t size() const noexcept { return entries_.size(); }

private:
    CassetteReplayer() = default;
    void load(const std::string& jsonl);
    std::multimap<std::uint64_t, std::string> entries_;
    std::map<std::uint64_t, std::size_t> served_;
    std::mutex mu_;
};

std::uint64_t cassette_key(const std::string& template_id, const std::string& prompt);

// -- shared response handling ------------------------------------------------

/// Each asks the backend, parses, and asks once more if parsing fails.
ProgressJudgment request_judgment(Backend& backend, const BackendRequest& request, std::string* raw = nullptr);
PlanState request_plan(Backend& backend, const BackendRequest& request, std::string* raw = nullptr);
std::vector<std::string> request_todos(Backend& backend, const BackendRequest& request, std::string* raw = nullptr);

}  // namespace sagents
