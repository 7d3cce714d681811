#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "sagents/harness.hpp"

namespace fs = std::filesystem;
using namespace sagents;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidParams, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::optional<fs::path> opt_path(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return fs::path(s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sagents: organized LLM-style agents in a simulated crafting world"};
    app.require_subcommand(1);

    std::string config_path, backend = "oracle", record;

    auto* run_cmd = app.add_subcommand("run", "Run one organization on one task");
    std::string task = "collection:stone:50", org = "toa:3", mode = "nonobstructive", out;
    std::uint64_t seed = 42;
    run_cmd->add_option("--task", task, "collection:<item>:<n> or shelter[:x,y,z]")->capture_default_str();
    run_cmd->add_option("--org", org, "toa:N, coa:N, goa:N, scale:N or solo")->capture_default_str();
    run_cmd->add_option("--mode", mode, "relay, roundbased or nonobstructive")->capture_default_str();
    run_cmd->add_option("--backend", backend, "oracle, remote or replay:FILE")->capture_default_str();
    run_cmd->add_option("--record", record, "Append every backend exchange to this cassette");
    run_cmd->add_option("--seed", seed)->capture_default_str();
    run_cmd->add_option("--config", config_path, "JSON config merged over the defaults");
    run_cmd->add_option("--out", out, "Write run artifacts under DIR/<cell>/<seed>");

    auto* exp_cmd = app.add_subcommand("experiment", "Run an experiment matrix");
    std::string matrix_path, exp_out;
    unsigned threads = 0;
    exp_cmd->add_option("--matrix", matrix_path, "Matrix JSON file")->required();
    exp_cmd->add_option("--config", config_path, "JSON config merged over the defaults");
    exp_cmd->add_option("--backend", backend, "oracle, remote or replay:FILE")->capture_default_str();
    exp_cmd->add_option("--record", record, "Append every backend exchange to this cassette");
    exp_cmd->add_option("--out", exp_out, "Output directory (default runs/<timestamp>)");
    exp_cmd->add_option("--threads", threads, "Parallel runs (0 = one per core)");

    auto* val_cmd = app.add_subcommand("validate-org", "Validate an organization JSON file");
    std::string org_file;
    val_cmd->add_option("file", org_file, "Organization JSON")->required();

    auto* replay_cmd = app.add_subcommand("replay", "Rebuild a run report from an event log");
    std::string events_path;
    replay_cmd->add_option("--events", events_path, "events.jsonl")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            const RunConfig config = load_config(opt_path(config_path));
            MatrixCell cell;
            cell.org = org;
            cell.task = task;
            cell.mode = mode_from_string(mode);
            cell.name = org + "-" + to_string(cell.mode) + "-" + task;
            std::optional<fs::path> dir;
            if (!out.empty()) {
                std::string name = cell.name;
                for (char& c : name)
                    if (c == ':' || c == ',' || c == '/') c = '_';
                dir = fs::path(out) / name / std::to_string(seed);
            }
            const RunReport r = run_cell(cell, seed, config, backend_factory(backend, record), dir);
            std::cout << r.to_json().dump(2) << "\n";
            if (dir) std::cerr << "artifacts in " << dir->string() << "\n";
            return r.success ? 0 : 2;
        }
        if (*exp_cmd) {
            const RunConfig config = load_config(opt_path(config_path));
            const auto matrix = ExperimentMatrix::from_json(nlohmann::json::parse(read_file(matrix_path)));
            const fs::path dir = exp_out.empty() ? fs::path("runs") / timestamp_dir() : fs::path(exp_out);
            const auto summary = run_experiment(matrix, config, backend_factory(backend, record), dir, threads);
            std::cout << summary.markdown;
            std::cerr << summary.runs.size() << " runs; artifacts in " << dir.string() << "\n";
            return 0;
        }
        if (*val_cmd) {
            const AgentGraph g = AgentGraph::from_json(nlohmann::json::parse(read_file(org_file)));
            const auto rep = validate(g);
            nlohmann::json j{{"is_valid", rep.is_valid},
                             {"structure", to_string(g.structure())},
                             {"max_agent_in_degree", rep.max_agent_in_degree},
                             {"has_command_cycle", rep.has_command_cycle},
                             {"cycles_complete", rep.cycles_complete},
                             {"violations", rep.violations}};
            nlohmann::json cycles = nlohmann::json::array();
            for (const auto& c : rep.command_cycles) {
                nlohmann::json names = nlohmann::json::array();
                for (const auto& a : c) names.push_back(a.name());
                cycles.push_back(names);
            }
            j["command_cycles"] = cycles;
            std::cout << j.dump(2) << "\n";
            return rep.is_valid ? 0 : 1;
        }
        if (*replay_cmd) {
            const auto events = events_from_jsonl(read_file(events_path));
            std::cout << collect_metrics(events).to_json().dump(2) << "\n";
            return 0;
        }
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: invalid JSON: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
