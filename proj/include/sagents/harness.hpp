#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sagents/backends.hpp"
#include "sagents/org_graph.hpp"
#include "sagents/scheduler.hpp"
#include "sagents/task.hpp"

namespace sagents {

/// "workerA", "workerB", ... (then "worker27", ... past Z).
std::vector<AgentId> worker_names(int n);

/// "toa:N" (a leader plus N workers), "coa:N", "goa:N", "solo", or "scale:N"
/// (N agents: solo for 1, otherwise a leader plus N-1 workers). Throws InvalidParams.
AgentGraph org_from_string(const std::string& spec);

/// Default config with an optional JSON file merged over it. Throws InvalidConfig.
RunConfig load_config(const std::optional<std::filesystem::path>& path = std::nullopt);
/// Default config with `overrides` merged over it.
RunConfig config_with(const nlohmann::json& overrides);

using BackendFactory = std::function<std::shared_ptr<Backend>(const RunConfig&)>;
/// "oracle", "remote" (endpoint from the config's "endpoint" section), or "replay:FILE".
/// A non-empty `record_path` wraps the backend in a cassette recorder. Throws InvalidParams.
BackendFactory backend_factory(const std::string& spec, const std::string& record_path = "");

struct MatrixCell {
    std::string name;
    /// Which summary table the cell belongs to.
    std::string table = "results";
    std::string org;
    Mode mode = Mode::NonObstructive;
    std::string task;
    std::vector<std::uint64_t> seeds{42};
    int repetitions = 1;
    /// Merged over the base config for this cell only.
    nlohmann::json config = nlohmann::json::object();
};

struct ExperimentMatrix {
    std::string name = "experiment";
    std::vector<MatrixCell> cells;

    /// {"name": ..., "cells": [{"name", "table", "org", "mode", "task", "seeds", "repetitions", "config"}]}.
    /// Throws InvalidParams.
    static ExperimentMatrix from_json(const nlohmann::json& j);
};

struct CellRun {
    std::string cell;
    std::string table;
    std::uint64_t seed = 0;
    int repetition = 0;
    RunReport report;
    /// Set when the run could not start (bad org, task, config).
    std::string error;
};

struct ExperimentSummary {
    std::vector<CellRun> runs;
    std::string markdown;
    std::string csv;
};

/// Writes report.json, events.jsonl, pool.jsonl, world_final.json into `dir`.
void write_run_artifacts(const std::filesystem::path& dir, const RunReport& report, const RunArtifacts& artifacts);

/// One run of one cell; artifacts go to `dir` when given.
RunReport run_cell(const MatrixCell& cell, std::uint64_t seed, const RunConfig& base, const BackendFactory& backends,
                   const std::optional<std::filesystem::path>& dir = std::nullopt);

/// Runs every cell x seed x repetition (in parallel up to `threads`), records failures as NaN,
/// and writes <out>/<cell>/<seed>/... plus summary.md and summary.csv when `out` is given.
ExperimentSummary run_experiment(const ExperimentMatrix& matrix, const RunConfig& base, const BackendFactory& backends,
                                 const std::optional<std::filesystem::path>& out = std::nullopt, unsigned threads = 0);

/// Markdown tables: one per table name, cells as columns, TC and mPT as rows (means over seeds).
std::string summary_markdown(const std::vector<CellRun>& runs);
std::string summary_csv(const std::vector<CellRun>& runs);

/// Timestamped directory name for a new batch of runs ("20261016-093000").
std::string timestamp_dir();

}  // namespace sagents
