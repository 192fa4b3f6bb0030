#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mcs/protocol.hpp"
#include "mcs/trust.hpp"

namespace mcs {

// Adversarial actions a scenario can inject at a given (task, slot, user).
enum class Injection {
    double_report,     // submit a second, different report in the same slot
    replay_spk,        // resend the previous slot's report under a new slot
    tamper_theta,      // alter the credit update in flight
    forged_threshold,  // raise the report's threshold above the proven one
};
const char* injection_name(Injection k);

struct ScenarioCustomer {
    std::string name;
    int64_t P0 = 100;
};

struct ScenarioUser {
    std::string name;
    int64_t P0 = 100;
    std::vector<GridCell> route;
};

struct ScenarioTask {
    size_t customer = 0;  // roster index
    std::string task;     // sensing instruction, kept short
    std::vector<GridCell> area;
    uint64_t expires = 1000;
    double gamma = 1.0;
    uint64_t quota = 3;
};

struct ScenarioInjection {
    size_t task = 0;  // index into tasks
    uint64_t slot = 1;
    size_t user = 0;  // index into users
    Injection kind = Injection::double_report;
};

struct ScenarioConfig {
    uint64_t seed = 0;
    uint32_t rows = 3, cols = 3;
    uint64_t V = 256;
    uint64_t slots = 1;
    std::vector<ScenarioCustomer> customers;
    std::vector<ScenarioUser> users;
    std::vector<ScenarioTask> tasks;
    std::vector<ScenarioInjection> injections;
};

// Structural validation: indices in range, cells inside the grid, names
// unique and nonempty, replay injections no earlier than slot 2.
void check_scenario(const ScenarioConfig& cfg);

struct TraceEventRow {
    uint64_t num = 0, tau = 0;
    std::string identity;  // who the authority named
};

struct CreditRow {
    std::string user;
    int64_t P0 = 0, sum_theta = 0, final_balance = 0;
    bool clamped = false;
};

struct CheckRow {
    bool ok = false;
    std::string what;
};

struct PhaseTime {
    std::string phase;
    double ms = 0;
};

struct RunReport {
    std::map<MsgKind, size_t> sizes;  // encoded bytes, first instance per kind
    std::vector<TraceEventRow> traces;
    std::vector<CreditRow> credits;
    std::vector<CheckRow> checks;
    std::vector<PhaseTime> timings;  // wall clock, informational only
    size_t matches = 0, reports_accepted = 0, reports_rejected = 0, reports_traced = 0;
    bool all_ok = true;
};

// Runs the full five-phase flow for the configured roster: registration,
// task posting, matching and task decryption, slot-by-slot reporting with
// injections, then selection, opening, trust evaluation, and credit
// updates. Every internal cross-check lands in RunReport::checks.
RunReport run_scenario(const ScenarioConfig& cfg);

// Deterministic renderings (no wall-clock content): same config and seed,
// same bytes. Timings render separately.
std::string render_report(const RunReport& r);
std::string render_csv(const RunReport& r);
std::string render_timings(const RunReport& r);

}  // namespace mcs
