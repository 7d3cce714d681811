// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>

#include "fixtures.hpp"
#include "sagents/harness.hpp"

using namespace sagents;

namespace {

struct Verdict {
    bool ok = true;
    std::string detail;
};

// Records the first few failures with context.
struct Checker {
    Verdict v;
    int failures = 0;
    void expect(bool cond, const std::string& what) {
        if (cond) return;
        v.ok = false;
        if (++failures <= 3) v.detail += (v.detail.empty() ? "" : "; ") + what;
    }
};

struct Run {
    RunReport report;
    RunArtifacts artifacts;
};

Run run_org(const std::string& org, Mode mode, const std::string& task, std::uint64_t seed,
            const nlohmann::json& overrides = nlohmann::json::object()) {
    const auto config = config_with(overrides);
    OracleBackend oracle(config.world);
    Run r;
    r.report = run(org_from_string(org), mode, parse_task(*config.world, task), seed, config, oracle, &r.artifacts);
    return r;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(4);
    os << x;
    return os.str();
}

// Elementary cycles by brute force: every vertex sequence starting at its smallest vertex.
std::size_t brute_force_cycles(const AgentGraph& g) {
    const auto& ids = g.agents();
    const std::size_t n = ids.size();
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    auto idx = [&](const AgentId& a) { return std::size_t(std::find(ids.begin(), ids.end(), a) - ids.begin()); };
    for (const auto& [a, b] : g.command_edges()) adj[idx(a)][idx(b)] = true;
    std::size_t count = 0;
    std::vector<std::size_t> path;
    std::vector<bool> used(n, false);
    std::function<void()> extend = [&] {
        const std::size_t last = path.back();
        if (path.size() >= 2 && adj[last][path.front()]) ++count;
        for (std::size_t v = path.front() + 1; v < n; ++v) {
            if (used[v] || !adj[last][v]) continue;
            used[v] = true;
            path.push_back(v);
            extend();
            path.pop_back();
            used[v] = false;
        }
    };
    for (std::size_t s = 0; s < n; ++s) {
        path = {s};
        used.assign(n, false);
        used[s] = true;
        extend();
    }
    return count;
}

std::size_t max_in_degree(const AgentGraph& g) {
    std::map<AgentId, std::size_t> in;
    std::size_t m = 0;
    for (const auto& [a, b] : g.command_edges()) m = std::max(m, ++in[b]);
    return m;
}

Verdict organization_properties() {
    Checker c;
    int graphs = 0;
    for (int n = 2; n <= 5; ++n) {
        auto ids = worker_names(n);
        const auto goa = build_goa(ids);
        const auto rg = validate(goa);
        c.expect(rg.is_valid && rg.has_command_cycle && !rg.command_cycles.empty(), "GoA n=" + std::to_string(n));
        c.expect(rg.command_cycles.size() == brute_force_cycles(goa), "GoA cycle count n=" + std::to_string(n));
        ++graphs;
        // Every root choice for trees, every ordering for chains.
        for (std::size_t r = 0; r < ids.size(); ++r) {
            std::vector<AgentId> leaves;
            for (std::size_t i = 0; i < ids.size(); ++i)
                if (i != r) leaves.push_back(ids[i]);
            const auto toa = build_toa(ids[r], leaves);
            const auto rt = validate(toa);
            c.expect(rt.is_valid && !rt.has_command_cycle && rt.command_cycles.empty() && brute_force_cycles(toa) == 0 &&
                         rt.max_agent_in_degree <= 1 && max_in_degree(toa) <= 1,
                     "ToA n=" + std::to_string(n));
            ++graphs;
        }
        std::sort(ids.begin(), ids.end());
        do {
            const auto coa = build_coa(ids);
            const auto rc = validate(coa);
            c.expect(rc.is_valid && !rc.has_command_cycle && rc.command_cycles.empty() && brute_force_cycles(coa) == 0 &&
                         rc.max_agent_in_degree <= 1 && max_in_degree(coa) <= 1,
                     "CoA n=" + std::to_string(n));
            ++graphs;
        } while (std::next_permutation(ids.begin(), ids.end()));
    }
    c.v.detail = c.v.detail.empty() ? std::to_string(graphs) + " organizations" : c.v.detail;
    return c.v;
}

Verdict oracle_splits() {
    Checker c;
    const auto config = RunConfig::defaults();
    OracleBackend oracle(config.world);
    const nlohmann::json ctx{
        {"role", "root"},
        {"name", "leader"},
        {"employees", {"workerA", "workerB", "workerC"}},
        {"conversation", {MessageRecord{0, 1, commissioner_id(), "leader", "mine 50 stones"}.to_json()}},
        {"previous_plan", nullptr},
        {"judgment", nullptr},
        {"inventory", nlohmann::json::object()},
        {"equipment", nlohmann::json::array()}};
    const auto plan = parse_plan(oracle.plan_tasks(ctx));
    const std::vector<Assignment> want{{"workerA", "mines 17 stones"}, {"workerB", "mines 17 stones"},
                                       {"workerC", "mines 16 stones"}};
    c.expect(plan.task_at_hand && plan.task_at_hand->assignments == want, "50 stones over 3 workers");
    SplitMix64 rng(1000);
    for (int i = 0; i < 1000; ++i) {
        const int q = int(rng.below(10000)), n = 1 + int(rng.below(16));
        const auto s = largest_remainder_split(q, n);
        bool ok = int(s.size()) == n && std::accumulate(s.begin(), s.end(), 0) == q;
        for (int k = 0; ok && k < n; ++k) ok = s[k] == q / n + (k < q % n ? 1 : 0);
        c.expect(ok, "split " + std::to_string(q) + "/" + std::to_string(n));
    }
    if (c.v.ok) c.v.detail = "17/17/16 and 1000 random splits";
    return c.v;
}

Verdict monitor_fixtures() {
    Checker c;
    const auto config = RunConfig::defaults();
    OracleBackend oracle(config.world);
    for (const auto& f : fixtures::monitor_cases()) {
        const auto resp = oracle.complete({"monitor", f.transcript, {{"task", f.task}, {"transcript", f.transcript}}, true, "root"});
        const auto j = parse_judgment(resp.raw_text);
        c.expect(j.status == f.expected, f.name + " judged " + to_string(j.status));
    }
    if (c.v.ok) c.v.detail = "5 cases";
    return c.v;
}

Verdict grammar_round_trip() {
    Checker c;
    for (const auto& [line, want] : fixtures::grammar_examples()) {
        const auto got = parse_todo(line);
        c.expect(got == want && parse_todo(render(got)) == got, line);
    }
    try {
        parse_todo("dance 5 times");
        c.expect(false, "dance parsed");
    } catch (const Error& e) {
        c.expect(e.code() == ErrorCode::UnknownVerb, "dance error code");
    }
    int enumerated = 0;
    const std::vector<Verb> verbs{Verb::Mine, Verb::Craft, Verb::Smelt, Verb::Kill, Verb::Cook,
                                  Verb::Equip, Verb::Build, Verb::Give, Verb::MoveTo};
    for (Verb v : verbs)
        for (int mask = 0; mask < 8; ++mask)
            for (const auto& item : fixtures::fuzz_items()) {
                AgentAction a;
                a.verb = v;
                if (mask & 1) {
                    a.kind = AgentAction::Kind::Delegate;
                    a.target = AgentId("workerB");
                }
                if (v == Verb::MoveTo) {
                    if (item != "log" || (mask & 2)) continue;
                    a.position = Position{1, 2, 3};
                } else {
                    a.item = item;
                    if (mask & 2) {
                        a.quantity = 7;
                        a.item = singular_item(item);
                    }
                    if ((mask & 4) || v == Verb::Build) a.position = Position{-1, 64, 9};
                    if (v == Verb::Give) a.recipient = AgentId("leader");
                }
                ++enumerated;
                c.expect(parse_todo(render(a)) == a, render(a));
            }
    SplitMix64 rng(4);
    for (int i = 0; i < 10000; ++i) {
        const auto a = fixtures::random_action(rng);
        try {
            c.expect(parse_todo(render(a)) == a, render(a));
        } catch (const Error& e) {
            c.expect(false, render(a) + ": " + e.what());
        }
    }
    if (c.v.ok) c.v.detail = std::to_string(enumerated) + " enumerated, 10000 random";
    return c.v;
}

Verdict table1a_ordering() {
    const auto toa = run_org("toa:3", Mode::NonObstructive, "collection:stone:50", 42).report;
    const auto goa = run_org("goa:3", Mode::RoundBased, "collection:stone:50", 42).report;
    const auto coa = run_org("coa:3", Mode::Relay, "collection:stone:50", 42).report;
    Verdict v;
    v.ok = toa.success && goa.success && coa.success && toa.time_cost_min < goa.time_cost_min &&
           goa.time_cost_min < coa.time_cost_min;
    v.detail = "ToA " + fmt(toa.time_cost_min) + " < GoA-RB " + fmt(goa.time_cost_min) + " < CoA-relay " +
               fmt(coa.time_cost_min) + " min";
    return v;
}

Verdict table1b_ordering() {
    Checker c;
    std::string detail;
    for (int logs : {50, 100}) {
        const std::string task = "collection:log:" + std::to_string(logs);
        const auto solo = run_org("solo", Mode::NonObstructive, task, 42).report;
        const auto toa = run_org("toa:3", Mode::NonObstructive, task, 42).report;
        const double speedup = solo.time_cost_min / toa.time_cost_min;
        c.expect(solo.success && toa.success && speedup >= 1.5, task + " speedup " + fmt(speedup));
        detail += std::to_string(logs) + " logs x" + fmt(speedup) + ", ";
    }
    const nlohmann::json injector{{"injector", {{"probability", 0.02}}}};
    int solo_nan = 0, team_ok = 0;
    const int seeds = 5;
    for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
        const auto solo = run_org("solo", Mode::NonObstructive, "collection:iron:10", seed, injector).report;
        const auto team = run_org("toa:3", Mode::NonObstructive, "collection:iron:10", seed, injector).report;
        c.expect(solo.is_nan() && solo.abort_reason == "nan_rule", "solo iron seed " + std::to_string(seed));
        c.expect(team.success, "4-agent iron seed " + std::to_string(seed));
        solo_nan += solo.is_nan();
        team_ok += team.success;
    }
    detail += "iron: solo NaN " + std::to_string(solo_nan) + "/" + std::to_string(seeds) + ", 4 agents ok " +
              std::to_string(team_ok) + "/" + std::to_string(seeds);
    if (c.v.ok) c.v.detail = detail;
    else c.v.detail += " (" + detail + ")";
    return c.v;
}

Verdict non_obstruction_dominance() {
    Checker c;
    SplitMix64 rng(77);
    int heterogeneous = 0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t agents = 1 + rng.below(5), rounds = 1 + rng.below(6);
        std::vector<std::vector<int>> m(rounds, std::vector<int>(agents));
        bool hetero = false;
        long long work = 0, rb = 0;
        for (auto& round : m) {
            // Every third round is uniform.
            const int base = 1 + int(rng.below(20));
            const bool uniform = rng.below(3) == 0;
            for (auto& x : round) x = uniform ? base : 1 + int(rng.below(30));
            hetero |= *std::max_element(round.begin(), round.end()) != *std::min_element(round.begin(), round.end());
            work += std::accumulate(round.begin(), round.end(), 0LL);
            rb += *std::max_element(round.begin(), round.end());
        }
        heterogeneous += hetero;
        const Tick t_rb = simulate_duration_matrix(m, Mode::RoundBased);
        const Tick t_no = simulate_duration_matrix(m, Mode::NonObstructive);
        const long long ticks = work * kTicksPerMinute;
        const Tick no_oracle = Tick((ticks + agents - 1) / agents);
        c.expect(t_rb == Tick(rb) * kTicksPerMinute, "round-based oracle, matrix " + std::to_string(i));
        c.expect(t_no == no_oracle, "non-obstructive oracle, matrix " + std::to_string(i));
        const Tick t_relay = simulate_duration_matrix(m, Mode::Relay);
        c.expect(t_relay == Tick(ticks), "relay oracle, matrix " + std::to_string(i));
        c.expect(t_no <= t_rb && t_rb <= t_relay, "NO <= RB <= relay, matrix " + std::to_string(i));
        if (hetero) c.expect(t_no < t_rb, "NO not faster on heterogeneous matrix " + std::to_string(i));
    }
    if (c.v.ok) c.v.detail = "100 matrices, " + std::to_string(heterogeneous) + " heterogeneous";
    return c.v;
}

Verdict shelter_end_to_end() {
    const std::uint64_t seed = 42;
    const auto r = run_org("toa:3", Mode::NonObstructive, "shelter", seed);
    const auto config = RunConfig::defaults();
    auto world = generate_world(seed, *config.world);
    for (const auto& e : r.artifacts.world_final.at("edits")) {
        const auto& p = e.at("position");
        world.set_block(Position{p[0].get<int>(), p[1].get<int>(), p[2].get<int>()}, e.at("block").get<std::string>());
    }
    const auto bp = ShelterBlueprint::from(ShelterSpec{});
    const auto check = verify_shelter(world, bp);
    const auto audit = stage_order_audit(r.artifacts.events, bp);
    Verdict v;
    v.ok = r.report.success && check.complete && audit.empty();
    v.detail = "TC " + fmt(r.report.time_cost_min) + " min, missing " + std::to_string(check.missing.size()) +
               ", wrong " + std::to_string(check.wrong_material.size()) + ", order violations " +
               std::to_string(audit.size());
    return v;
}

Verdict nan_rule() {
    Checker c;
    const NanPolicy policy;
    int cells = 0;
    for (int stall = 0; stall <= 80; ++stall)
        for (int attempts = 0; attempts <= 10; ++attempts)
            for (Tick extra : {Tick(0), Tick(1)}) {
                ProgressTracker t;
                t.record_progress(5000);
                t.record_attempts(attempts);
                const Tick stalled = Tick(stall) * kTicksPerMinute + extra;
                const bool want = stalled > Tick(40) * kTicksPerMinute && attempts > 5;
                c.expect(nan_check(t, 5000 + stalled, policy) == want,
                         "stall " + std::to_string(stalled) + " attempts " + std::to_string(attempts));
                ++cells;
            }
    if (c.v.ok) c.v.detail = std::to_string(cells) + " fixtures over the 4-cell table";
    return c.v;
}

Verdict determinism() {
    const auto a = run_org("toa:3", Mode::RoundBased, "collection:stone:20", 42);
    const auto b = run_org("toa:3", Mode::RoundBased, "collection:stone:20", 42);
    const auto d = run_org("toa:3", Mode::RoundBased, "collection:stone:20", 43);
    Verdict v;
    const bool same = events_to_jsonl(a.artifacts.events) == events_to_jsonl(b.artifacts.events) &&
                      a.report.to_json().dump() == b.report.to_json().dump() && a.artifacts.pool_jsonl == b.artifacts.pool_jsonl;
    const bool differs = events_to_jsonl(a.artifacts.events) != events_to_jsonl(d.artifacts.events);
    v.ok = same && differs;
    v.detail = std::string(same ? "identical" : "DIFFERENT") + " logs for equal seeds, " +
               (differs ? "different" : "IDENTICAL") + " log for another seed";
    return v;
}

Verdict mpt_accounting() {
    std::vector<Event> events{Event{0, 1, "scheduler", "run_start",
                                    {{"agents", {"leader", "workerA", "workerB"}},
                                     {"org", "tree"},
                                     {"mode", "nonobstructive"},
                                     {"task", "collection-stone-50"},
                                     {"seed", 42},
                                     {"config_hash", "0"}}}};
    std::uint64_t seq = 2;
    for (const auto& [who, n] : std::vector<std::pair<std::string, int>>{{"leader", 4}, {"workerA", 3}, {"workerB", 4}})
        for (int i = 0; i < n; ++i, ++seq) events.push_back(Event{seq * 30, seq, who, "plan", {{"ticks", 30}}});
    events.push_back(Event{900, seq, "scheduler", "goal", nlohmann::json::object()});
    const auto r = collect_metrics(events_from_jsonl(events_to_jsonl(events)));
    Verdict v;
    v.ok = r.mean_prompt_times == 11.0 / 3.0 && r.per_agent_prompts.at("leader") == 4 &&
           r.per_agent_prompts.at("workerA") == 3 && r.per_agent_prompts.at("workerB") == 4;
    v.detail = "mPT " + fmt(r.mean_prompt_times) + " from 4/3/4";
    return v;
}

Verdict conservation() {
    Checker c;
    const auto config = fixtures::small_config();
    SplitMix64 rng(12);
    int moved = 0;
    for (int seq = 0; seq < 1000; ++seq) {
        auto w = fixtures::conservation_world(config, std::uint64_t(seq));
        const auto start = fixtures::item_totals(w);
        const int steps = 1 + int(rng.below(12));
        for (int s = 0; s < steps; ++s) {
            const auto [who, p] = fixtures::random_primitive(rng, config);
            moved += w.execute(who, p).ok;
        }
        c.expect(fixtures::item_totals(w) == start, "sequence " + std::to_string(seq));
    }
    if (c.v.ok) c.v.detail = "1000 sequences, " + std::to_string(moved) + " successful primitives";
    return c.v;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double budget_s;
        Verdict (*check)();
    };
    const std::vector<Criterion> criteria{
        {"organization properties", 1, organization_properties},
        {"oracle split fidelity", 1, oracle_splits},
        {"monitor fixtures", 1, monitor_fixtures},
        {"grammar round-trip", 5, grammar_round_trip},
        {"structure ordering on 50 stones", 10, table1a_ordering},
        {"team vs solo ordering", 60, table1b_ordering},
        {"non-obstruction dominance", 5, non_obstruction_dominance},
        {"shelter end to end", 30, shelter_end_to_end},
        {"NaN rule", 1, nan_rule},
        {"determinism", 10, determinism},
        {"mPT accounting", 1, mpt_accounting},
        {"item conservation", 5, conservation},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& c = criteria[i];
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget_s) {
            v.ok = false;
            v.detail += "; over the " + fmt(c.budget_s) + " s budget";
        }
        failed += !v.ok;
        std::cout << (v.ok ? "PASS" : "FAIL") << " " << (i + 1) << ". " << c.name << ": " << v.detail << " (" << fmt(secs)
                  << " s)\n";
    }
    return failed == 0 ? 0 : 1;
}
