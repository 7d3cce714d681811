#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "sagents/backends.hpp"
#include "sagents/text.hpp"

namespace sagents {

EndpointConfig EndpointConfig::from_json(const nlohmann::json& j) {
    EndpointConfig c;
    try {
        c.base_url = j.value("base_url", c.base_url);
        c.path = j.value("path", c.path);
        c.model = j.value("model", c.model);
        if (j.contains("role_models")) c.role_models = j["role_models"].get<std::map<std::string, std::string>>();
        c.api_key_env = j.value("api_key_env", c.api_key_env);
        c.max_retries = j.value("max_retries", c.max_retries);
        c.backoff_ms = j.value("backoff_ms", c.backoff_ms);
        c.timeout_ms = j.value("timeout_ms", c.timeout_ms);
        c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
        c.chat_temperature = j.value("chat_temperature", c.chat_temperature);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, e.what());
    }
    if (c.max_in_flight < 1 || c.max_in_flight > 1024) throw Error(ErrorCode::InvalidConfig, "max_in_flight out of range");
    return c;
}

RemoteBackend::RemoteBackend(EndpointConfig config)
    : config_(std::move(config)), slots_(std::clamp(config_.max_in_flight, 1, 1024)) {
    if (config_.base_url.empty()) throw Error(ErrorCode::InvalidConfig, "remote backend needs a base_url");
}

BackendResponse RemoteBackend::complete(const BackendRequest& request) {
    std::string model = config_.model;
    if (auto it = config_.role_models.find(request.role); it != config_.role_models.end()) model = it->second;
    nlohmann::json body{{"model", model},
                        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
                        {"temperature", request.deterministic ? 0.0 : config_.chat_temperature}};
    const std::string payload = body.dump();

    httplib::Client client(config_.base_url);
    const auto secs = config_.timeout_ms / 1000;
    const auto usecs = (config_.timeout_ms % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    slots_.acquire();
    struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
    } release{slots_};

    std::optional<Error> last;
    const auto t0 = std::chrono::steady_clock::now();
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(config_.backoff_ms << (attempt - 1)));
        auto res = client.Post(config_.path, headers, payload, "application/json");
        nlohmann::json log{{"request", body}, {"attempt", attempt + 1}};
        if (!res) {
            last = Error(ErrorCode::Timeout, "no response from " + config_.base_url + ": " + httplib::to_string(res.error()));
            log["error"] = last->what();
            if (on_exchange) on_exchange(log);
            continue;
        }
        log["status"] = res->status;
        log["body"] = res->body;
        if (on_exchange) on_exchange(log);
        if (res->status < 200 || res->status >= 300) {
            last = Error(ErrorCode::ServiceError, "HTTP " + std::to_string(res->status) + " from " + config_.base_url);
            continue;
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ParseFailure, std::string("service returned invalid JSON: ") + e.what());
        }
        BackendResponse r;
        try {
            r.raw_text = j.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ParseFailure, std::string("unexpected completion shape: ") + e.what());
        }
        r.prompt_chars = request.prompt.size();
        r.completion_chars = r.raw_text.size();
        r.attempts = attempt + 1;
        r.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        return r;
    }
    throw *last;
}

std::uint64_t cassette_key(const std::string& template_id, const std::string& prompt) {
    return text::fnv1a(prompt, text::fnv1a(template_id));
}

CassetteRecorder::CassetteRecorder(Backend& inner, std::string path) : inner_(inner), path_(std::move(path)) {}

BackendResponse CassetteRecorder::complete(const BackendRequest& request) {
    BackendResponse r = inner_.complete(request);
    nlohmann::json line{{"key", cassette_key(request.template_id, request.prompt)},
                        {"template_id", request.template_id},
                        {"prompt", request.prompt},
                        {"response", r.raw_text}};
    std::lock_guard lock(mu_);
    std::ofstream out(path_, std::ios::app);
    if (!out) throw Error(ErrorCode::InvalidParams, "cannot write cassette " + path_);
    out << line.dump() << "\n";
    return r;
}

CassetteReplayer::CassetteReplayer(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::BackendUnavailable, "cannot read cassette " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    load(ss.str());
}

std::unique_ptr<CassetteReplayer> CassetteReplayer::from_text(const std::string& jsonl) {
    std::unique_ptr<CassetteReplayer> r(new CassetteReplayer());
    r->load(jsonl);
    return r;
}

void CassetteReplayer::load(const std::string& jsonl) {
    for (const auto& line : text::split_lines(jsonl)) {
        if (text::trim(line).empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            entries_.emplace(cassette_key(j.at("template_id").get<std::string>(), j.at("prompt").get<std::string>()),
                             j.at("response").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ParseFailure, std::string("bad cassette line: ") + e.what());
        }
    }
}

BackendResponse CassetteReplayer::complete(const BackendRequest& request) {
    const auto key = cassette_key(request.template_id, request.prompt);
    std::lock_guard lock(mu_);
    auto [lo, hi] = entries_.equal_range(key);
    const auto n = static_cast<std::size_t>(std::distance(lo, hi));
    if (n == 0) throw Error(ErrorCode::BackendUnavailable, "no recorded response for this " + request.template_id + " prompt");
    // Identical prompts replay their recordings in order, the last one repeating.
    std::size_t& k = served_[key];
    std::advance(lo, static_cast<long>(std::min(k, n - 1)));
    ++k;
    BackendResponse r;
    r.raw_text = lo->second;
    r.prompt_chars = request.prompt.size();
    r.completion_chars = r.raw_text.size();
    return r;
}

namespace {

template <typename T, typename Parse>
T request_parsed(Backend& backend, const BackendRequest& request, std::string* raw, ErrorCode final_code, Parse parse) {
    std::string first_error;
    for (int attempt = 0; attempt < 2; ++attempt) {
        BackendResponse r = backend.complete(request);
        if (raw) *raw = r.raw_text;
        try {
            return parse(r.raw_text);
        } catch (const Error& e) {
            if (first_error.empty()) first_error = e.what();
        }
    }
    throw Error(final_code, first_error);
}

}  // namespace

ProgressJudgment request_judgment(Backend& backend, const BackendRequest& request, std::string* raw) {
    return request_parsed<ProgressJudgment>(backend, request, raw, ErrorCode::ParseFailure,
                                            [](const std::string& t) { return parse_judgment(t); });
}

PlanState request_plan(Backend& backend, const BackendRequest& request, std::string* raw) {
    return request_parsed<PlanState>(backend, request, raw, ErrorCode::MalformedPlan,
                                     [](const std::string& t) { return parse_plan(t); });
}

std::vector<std::string> request_todos(Backend& backend, const BackendRequest& request, std::string* raw) {
    return request_parsed<std::vector<std::string>>(backend, request, raw, ErrorCode::UnparseableTodoList,
                                                    [](const std::string& t) { return parse_todo_list(t); });
}

}  // namespace sagents
