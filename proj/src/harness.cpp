#include "sagents/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "sagents/text.hpp"

namespace sagents {

std::vector<AgentId> worker_names(int n) {
    std::vector<AgentId> out;
    for (int i = 0; i < n; ++i)
        out.emplace_back(i < 26 ? std::string("worker") + static_cast<char>('A' + i) : "worker" + std::to_string(i + 1));
    return out;
}

AgentGraph org_from_string(const std::string& spec) {
    const auto parts = text::split(text::trim(spec), ':');
    const std::string kind = parts.empty() ? "" : to_lower(parts[0]);
    if (kind == "solo" && parts.size() == 1) return build_solo(worker_names(1).front());
    if (parts.size() != 2) throw Error(ErrorCode::InvalidParams, "org must be toa:N, coa:N, goa:N, scale:N or solo");
    int n = 0;
    try {
        n = std::stoi(parts[1]);
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::InvalidParams, "bad agent count in " + spec);
    }
    if (n < 1) throw Error(ErrorCode::InvalidParams, "agent count must be positive in " + spec);
    if (kind == "toa") return build_toa(AgentId("leader"), worker_names(n));
    if (kind == "coa") return build_coa(worker_names(n));
    if (kind == "goa") return build_goa(worker_names(n));
    if (kind == "scale") return n == 1 ? build_solo(worker_names(1).front()) : build_toa(AgentId("leader"), worker_names(n - 1));
    throw Error(ErrorCode::InvalidParams, "unknown organization " + spec);
}

RunConfig config_with(const nlohmann::json& overrides) {
    nlohmann::json j = default_config_json();
    if (!overrides.is_null() && !overrides.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
    if (overrides.is_object()) j.merge_patch(overrides);
    return RunConfig::from_json(j);
}

RunConfig load_config(const std::optional<std::filesystem::path>& path) {
    if (!path) return RunConfig::defaults();
    std::ifstream in(*path);
    if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read config " + path->string());
    try {
        return config_with(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, path->string() + ": " + e.what());
    }
}

namespace {

/// Lets one backend instance be shared by concurrent runs.
class SharedBackend : public Backend {
public:
    explicit SharedBackend(std::shared_ptr<Backend> inner) : inner_(std::move(inner)) {}
    BackendResponse complete(const BackendRequest& r) override { return inner_->complete(r); }
    std::string name() const override { return inner_->name(); }

private:
    std::shared_ptr<Backend> inner_;
};

class RecordingBackend : public Backend {
public:
    RecordingBackend(std::shared_ptr<Backend> inner, const std::string& path) : inner_(std::move(inner)), rec_(*inner_, path) {}
    BackendResponse complete(const BackendRequest& r) override { return rec_.complete(r); }
    std::string name() const override { return rec_.name(); }

private:
    std::shared_ptr<Backend> inner_;
    CassetteRecorder rec_;
};

}  // namespace

BackendFactory backend_factory(const std::string& spec, const std::string& record_path) {
    BackendFactory base;
    if (spec == "oracle") {
        base = [](const RunConfig& c) -> std::shared_ptr<Backend> { return std::make_shared<OracleBackend>(c.world); };
    } else if (spec == "remote") {
        base = [](const RunConfig& c) -> std::shared_ptr<Backend> {
            if (!c.source.contains("endpoint")) throw Error(ErrorCode::InvalidConfig, "remote backend needs an \"endpoint\" config section");
            return std::make_shared<RemoteBackend>(EndpointConfig::from_json(c.source["endpoint"]));
        };
    } else if (text::starts_with_ci(spec, "replay:")) {
        auto replayer = std::make_shared<CassetteReplayer>(spec.substr(7));
        base = [replayer](const RunConfig&) -> std::shared_ptr<Backend> { return std::make_shared<SharedBackend>(replayer); };
    } else {
        throw Error(ErrorCode::InvalidParams, "backend must be oracle, remote or replay:FILE");
    }
    if (record_path.empty()) return base;
    return [base, record_path](const RunConfig& c) -> std::shared_ptr<Backend> {
        return std::make_shared<RecordingBackend>(base(c), record_path);
    };
}

ExperimentMatrix ExperimentMatrix::from_json(const nlohmann::json& j) {
    ExperimentMatrix m;
    try {
        m.name = j.value("name", m.name);
        for (const auto& c : j.value("cells", nlohmann::json::array())) {
            MatrixCell cell;
            cell.org = c.at("org").get<std::string>();
            cell.task = c.at("task").get<std::string>();
            cell.mode = mode_from_string(c.value("mode", std::string("nonobstructive")));
            cell.name = c.value("name", cell.org + "-" + to_string(cell.mode) + "-" + cell.task);
            cell.table = c.value("table", cell.table);
            if (c.contains("seeds")) cell.seeds = c["seeds"].get<std::vector<std::uint64_t>>();
            cell.repetitions = c.value("repetitions", 1);
            cell.config = c.value("config", nlohmann::json::object());
            if (cell.seeds.empty() || cell.repetitions < 1)
                throw Error(ErrorCode::InvalidParams, "cell " + cell.name + " needs seeds and repetitions >= 1");
            m.cells.push_back(std::move(cell));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidParams, std::string("bad matrix: ") + e.what());
    }
    return m;
}

namespace {

void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidParams, "cannot write " + p.string());
    out << s;
}

std::string safe_name(std::string s) {
    for (char& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
    return s;
}

std::string fmt(double v, int digits = 2) {
    if (std::isnan(v)) return "NaN";
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

struct Aggregate {
    double tc = 0;
    double mpt = 0;
    int runs = 0;
    int ok = 0;
};

}  // namespace

void write_run_artifacts(const std::filesystem::path& dir, const RunReport& report, const RunArtifacts& artifacts) {
    std::filesystem::create_directories(dir);
    write_text(dir / "report.json", report.to_json().dump(2) + "\n");
    write_text(dir / "events.jsonl", events_to_jsonl(artifacts.events));
    write_text(dir / "pool.jsonl", artifacts.pool_jsonl);
    write_text(dir / "world_final.json", artifacts.world_final.dump(2) + "\n");
}

RunReport run_cell(const MatrixCell& cell, std::uint64_t seed, const RunConfig& base, const BackendFactory& backends,
                   const std::optional<std::filesystem::path>& dir) {
    RunConfig config = base;
    if (!cell.config.empty()) {
        nlohmann::json j = base.source.is_object() ? base.source : nlohmann::json(default_config_json());
        j.merge_patch(cell.config);
        config = RunConfig::from_json(j);
    }
    const AgentGraph org = org_from_string(cell.org);
    const TaskSpec task = parse_task(*config.world, cell.task);
    auto backend = backends(config);
    RunArtifacts artifacts;
    RunReport report = run(org, cell.mode, task, seed, config, *backend, dir ? &artifacts : nullptr);
    if (dir) write_run_artifacts(*dir, report, artifacts);
    return report;
}

ExperimentSummary run_experiment(const ExperimentMatrix& matrix, const RunConfig& base, const BackendFactory& backends,
                                 const std::optional<std::filesystem::path>& out, unsigned threads) {
    ExperimentSummary summary;
    for (const auto& cell : matrix.cells)
        for (auto seed : cell.seeds)
            for (int r = 0; r < cell.repetitions; ++r) summary.runs.push_back({cell.name, cell.table, seed, r, {}, {}});
    std::vector<const MatrixCell*> owners;
    for (const auto& cell : matrix.cells)
        for (std::size_t k = 0; k < cell.seeds.size() * static_cast<std::size_t>(cell.repetitions); ++k) owners.push_back(&cell);

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < summary.runs.size(); i = next++) {
            auto& run = summary.runs[i];
            const MatrixCell& cell = *owners[i];
            std::optional<std::filesystem::path> dir;
            if (out) {
                std::string leaf = std::to_string(run.seed);
                if (cell.repetitions > 1) leaf += "-r" + std::to_string(run.repetition);
                dir = *out / safe_name(cell.name) / leaf;
            }
            try {
                run.report = run_cell(cell, run.seed, base, backends, dir);
            } catch (const std::exception& e) {
                // A broken cell is recorded as NaN and the rest of the matrix still runs.
                run.error = e.what();
                run.report = RunReport{};
                run.report.abort_reason = "error";
                run.report.org = cell.org;
                run.report.mode = to_string(cell.mode);
                run.report.task = cell.task;
                run.report.seed = run.seed;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < std::min<std::size_t>(threads, summary.runs.size()); ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    summary.markdown = summary_markdown(summary.runs);
    summary.csv = summary_csv(summary.runs);
    if (out) {
        std::filesystem::create_directories(*out);
        write_text(*out / "summary.md", summary.markdown);
        write_text(*out / "summary.csv", summary.csv);
    }
    return summary;
}

std::string summary_markdown(const std::vector<CellRun>& runs) {
    std::vector<std::string> tables;
    std::map<std::string, std::vector<std::string>> columns;
    std::map<std::pair<std::string, std::string>, Aggregate> agg;
    for (const auto& r : runs) {
        if (!columns.count(r.table)) tables.push_back(r.table);
        auto& cols = columns[r.table];
        if (std::find(cols.begin(), cols.end(), r.cell) == cols.end()) cols.push_back(r.cell);
        auto& a = agg[{r.table, r.cell}];
        ++a.runs;
        if (!r.report.is_nan()) {
            ++a.ok;
            a.tc += r.report.time_cost_min;
        }
        a.mpt += r.report.mean_prompt_times;
    }
    std::string md;
    for (const auto& t : tables) {
        const auto& cols = columns[t];
        md += "### " + t + "\n\n| metric |";
        for (const auto& c : cols) md += " " + c + " |";
        md += "\n|---|";
        for (std::size_t i = 0; i < cols.size(); ++i) md += "---|";
        md += "\n| TC (min) |";
        for (const auto& c : cols) {
            const auto& a = agg[{t, c}];
            md += " " + (a.ok == a.runs && a.runs > 0 ? fmt(a.tc / a.ok) : std::string("NaN")) + " |";
        }
        md += "\n| mPT |";
        for (const auto& c : cols) {
            const auto& a = agg[{t, c}];
            md += " " + fmt(a.runs ? a.mpt / a.runs : 0.0) + " |";
        }
        md += "\n| succeeded |";
        for (const auto& c : cols) {
            const auto& a = agg[{t, c}];
            md += " " + std::to_string(a.ok) + "/" + std::to_string(a.runs) + " |";
        }
        md += "\n\n";
    }
    return md;
}

std::string summary_csv(const std::vector<CellRun>& runs) {
    std::string csv = "table,cell,seed,repetition,org,mode,task,time_cost_min,mean_prompt_times,success,abort_reason,error\n";
    auto quote = [](const std::string& s) { return "\"" + text::replace_all(s, "\"", "\"\"") + "\""; };
    for (const auto& r : runs) {
        csv += quote(r.table) + "," + quote(r.cell) + "," + std::to_string(r.seed) + "," + std::to_string(r.repetition) + "," +
               quote(r.report.org) + "," + quote(r.report.mode) + "," + quote(r.report.task) + "," +
               (r.report.is_nan() ? std::string("NaN") : fmt(r.report.time_cost_min, 4)) + "," +
               fmt(r.report.mean_prompt_times, 4) + "," + (r.report.success ? "true" : "false") + "," +
               quote(r.report.abort_reason) + "," + quote(r.error) + "\n";
    }
    return csv;
}

std::string timestamp_dir() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    localtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y%m%d-%H%M%S");
    return os.str();
}

}  // namespace sagents
