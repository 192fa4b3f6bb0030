#include "mcs/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>

#include "mcs/bytes.hpp"
#include "mcs/messages.hpp"

namespace mcs {

const char* injection_name(Injection k) {
    switch (k) {
        case Injection::double_report: return "double-report";
        case Injection::replay_spk: return "replay";
        case Injection::tamper_theta: return "tamper-theta";
        case Injection::forged_threshold: return "forged-threshold";
    }
    throw GroupError("scenario: unknown injection");
}

void check_scenario(const ScenarioConfig& cfg) {
    if (cfg.rows == 0 || cfg.cols == 0) throw GroupError("scenario: empty grid");
    if (cfg.V == 0) throw GroupError("scenario: V must be positive");
    if (cfg.slots == 0) throw GroupError("scenario: need at least one slot");
    if (cfg.customers.empty() || cfg.users.empty())
        throw GroupError("scenario: roster must name customers and users");

    std::set<std::string> names;
    auto claim = [&](const std::string& n) {
        if (n.empty()) throw GroupError("scenario: empty party name");
        if (!names.insert(n).second) throw GroupError("scenario: duplicate party name");
    };
    for (const auto& c : cfg.customers) claim(c.name);
    for (const auto& u : cfg.users) {
        claim(u.name);
        if (u.route.empty()) throw GroupError("scenario: user route is empty");
        for (const GridCell& c : u.route)
            if (c.row >= cfg.rows || c.col >= cfg.cols)
                throw GroupError("scenario: route cell outside the grid");
    }
    for (const auto& t : cfg.tasks) {
        if (t.customer >= cfg.customers.size())
            throw GroupError("scenario: task names an unknown customer");
        if (t.task.empty()) throw GroupError("scenario: task text is empty");
        if (t.area.empty()) throw GroupError("scenario: task area is empty");
        if (t.quota == 0) throw GroupError("scenario: task quota is zero");
        if (!(t.gamma > 0)) throw GroupError("scenario: gamma must be positive");
        for (const GridCell& c : t.area)
            if (c.row >= cfg.rows || c.col >= cfg.cols)
                throw GroupError("scenario: area cell outside the grid");
    }
    for (const auto& j : cfg.injections) {
        if (j.task >= cfg.tasks.size()) throw GroupError("scenario: injection names no task");
        if (j.user >= cfg.users.size()) throw GroupError("scenario: injection names no user");
        if (j.slot == 0 || j.slot > cfg.slots)
            throw GroupError("scenario: injection slot out of range");
        if (j.kind == Injection::replay_spk && j.slot < 2)
            throw GroupError("scenario: replay needs an earlier slot to copy");
    }
}

namespace {

GridRegion region_from(uint32_t rows, uint32_t cols, const std::vector<GridCell>& cells) {
    GridRegion g(rows, cols);
    for (const GridCell& c : cells) g.add(c);
    return g;
}

bool columns_overlap(const std::vector<GridCell>& a, const std::vector<GridCell>& b) {
    std::set<uint32_t> ca;
    for (const GridCell& c : a) ca.insert(c.col);
    for (const GridCell& c : b)
        if (ca.count(c.col)) return true;
    return false;
}

struct ReporterInfo {
    size_t user = 0;
    size_t task = 0;
    double value = 0;
    Bytes data;
};

class Stopwatch {
public:
    double lap() {
        auto now = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(now - t0_).count();
        t0_ = now;
        return ms;
    }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

}  // namespace

RunReport run_scenario(const ScenarioConfig& cfg) {
    check_scenario(cfg);
    RunReport rep;
    auto note = [&](bool ok, std::string what) {
        rep.checks.push_back({ok, std::move(what)});
        if (!ok) rep.all_ok = false;
    };
    auto size_of = [&](MsgKind k, const Bytes& enc) { rep.sizes.emplace(k, enc.size()); };
    auto injection_at = [&](size_t task, uint64_t slot, size_t user,
                            Injection kind) -> const ScenarioInjection* {
        for (const auto& j : cfg.injections)
            if (j.task == task && j.slot == slot && j.user == user && j.kind == kind) return &j;
        return nullptr;
    };

    Stopwatch clock;
    GroupContext G(Profile::p160);
    RandomSource root(cfg.seed);
    RandomSource crypto = root.fork("crypto");
    RandomSource values = root.fork("values");
    RandomSource thresholds = root.fork("thresholds");
    ServiceSetup su = [&] {
        RandomSource r = root.fork("setup");
        return service_setup(G, cfg.V, GridRegion(cfg.rows, cfg.cols), r);
    }();
    TrustAuthority ta(G, su.pp, su.sk.alpha);
    Provider prov(G, su.pp, su.sk.beta);
    rep.timings.push_back({"setup", clock.lap()});

    std::vector<Customer> customers;
    customers.reserve(cfg.customers.size());
    std::vector<User> users;
    users.reserve(cfg.users.size());
    for (const auto& c : cfg.customers) {
        customers.emplace_back(G, su.pp, to_bytes(c.name));
        RegRequest rq = customers.back().begin_registration(crypto);
        size_of(MsgKind::reg_request, encode_reg_request(G, rq));
        RegResponse rs = ta.register_party(rq, c.P0, crypto);
        size_of(MsgKind::reg_response, encode_reg_response(G, rs));
        customers.back().finish_registration(rs);
    }
    for (const auto& u : cfg.users) {
        users.emplace_back(G, su.pp, to_bytes(u.name));
        RegRequest rq = users.back().begin_registration(crypto);
        RegResponse rs = ta.register_party(rq, u.P0, crypto);
        users.back().finish_registration(rs);
    }
    rep.timings.push_back({"registration", clock.lap()});

    // task posting, matching, and task recovery
    std::vector<uint64_t> task_num(cfg.tasks.size(), 0);
    for (size_t t = 0; t < cfg.tasks.size(); ++t) {
        const ScenarioTask& st = cfg.tasks[t];
        TaskPost post = customers[st.customer].post_task(
            to_bytes(st.task), region_from(cfg.rows, cfg.cols, st.area), st.expires,
            fixed_from_double(st.gamma), st.quota, crypto);
        size_of(MsgKind::task_post, encode_task_post(G, post));
        TaskRelease rel = prov.accept_task(post, 0);
        customers[st.customer].task_posted(rel.num);
        task_num[t] = rel.num;
    }
    for (size_t iu = 0; iu < cfg.users.size(); ++iu) {
        MatchRequest req =
            users[iu].request_tasks(region_from(cfg.rows, cfg.cols, cfg.users[iu].route), crypto);
        size_of(MsgKind::match_request, encode_match_request(G, req));
        std::vector<MatchResponse> resp = prov.match_user(req, 0);
        rep.matches += resp.size();
        if (!resp.empty())
            size_of(MsgKind::match_response, encode_match_response(G, resp.front()));
        else
            size_of(MsgKind::match_failure, encode_match_failure(MatchFailure{}));
        std::set<uint64_t> got;
        for (const MatchResponse& r : resp) got.insert(r.num);
        for (size_t t = 0; t < cfg.tasks.size(); ++t) {
            bool expect = columns_overlap(cfg.users[iu].route, cfg.tasks[t].area);
            bool have = got.count(task_num[t]) > 0;
            std::ostringstream what;
            what << (expect ? "match " : "no-match ") << cfg.users[iu].name << " task " << t;
            note(expect == have, what.str());
        }
        for (const MatchResponse& r : resp) {
            User::DecodedTask dt = users[iu].decrypt_task(r);
            size_t t = size_t(std::find(task_num.begin(), task_num.end(), r.num) -
                              task_num.begin());
            bool ok = dt.task == to_bytes(cfg.tasks[t].task) &&
                      dt.u.encode() ==
                          customers[cfg.tasks[t].customer].task_key(r.num).encode();
            std::ostringstream what;
            what << "recover " << cfg.users[iu].name << " task " << t;
            note(ok, what.str());
        }
    }
    rep.timings.push_back({"allocation", clock.lap()});

    // Slot-by-slot reporting with injections, then selection and credit.
    // Each (slot, task) cycle runs to completion before the next task so a
    // user reporting to several tasks commits each credit update on top of
    // the previous one; a credit update fixes the balance that the report
    // committed, so interleaved reports from one credential state would let
    // the last update win.
    std::map<Bytes, ReporterInfo> reporters;                  // by Y encoding
    std::map<std::pair<size_t, size_t>, Report> last_report;  // by (user, task)
    std::vector<int64_t> sum_theta(cfg.users.size(), 0);
    double report_ms = 0, credit_ms = 0;
    for (uint64_t slot = 1; slot <= cfg.slots; ++slot) {
        for (size_t t = 0; t < cfg.tasks.size(); ++t) {
            clock.lap();
            uint64_t num = task_num[t];
            size_t accepted_here = 0;
            for (size_t iu = 0; iu < cfg.users.size(); ++iu) {
                if (!users[iu].matched_tasks().count(num)) continue;
                int64_t P = users[iu].balance();
                if (P < 1) continue;
                int64_t qmin = std::max<int64_t>(0, P - int64_t(cfg.V));
                int64_t Q = qmin + int64_t(thresholds.below(uint64_t(P - qmin)));
                double value = 40.0 + double(values.below(21));
                Bytes data = to_bytes("v=" + std::to_string(int(value)));

                if (const auto* j = injection_at(t, slot, iu, Injection::forged_threshold)) {
                    (void)j;
                    Report forged = users[iu].make_report(num, data, slot, Q, crypto);
                    forged.Q = users[iu].balance();  // claim Q >= P
                    ReportOutcome out = prov.accept_report(forged);
                    rep.reports_rejected++;
                    std::ostringstream what;
                    what << "inject forged-threshold " << cfg.users[iu].name << " task " << t
                         << " slot " << slot;
                    note(out.status == ReportStatus::rejected_proof, what.str());
                    continue;  // the forged attempt was this user's shot at the slot
                }

                Report r = users[iu].make_report(num, data, slot, Q, crypto);
                size_of(MsgKind::report, encode_report(G, r));
                ReportOutcome out = prov.accept_report(r);
                {
                    std::ostringstream what;
                    what << "report " << cfg.users[iu].name << " task " << t << " slot "
                         << slot;
                    note(out.status == ReportStatus::accepted, what.str());
                }
                Report previous;  // kept for the replay injection before overwrite
                bool have_previous = false;
                if (auto it = last_report.find({iu, t}); it != last_report.end()) {
                    previous = it->second;
                    have_previous = true;
                }
                if (out.status == ReportStatus::accepted) {
                    rep.reports_accepted++;
                    accepted_here++;
                    reporters[r.Y.encode()] = {iu, t, value, data};
                    last_report[{iu, t}] = r;
                } else {
                    rep.reports_rejected++;
                }

                if (injection_at(t, slot, iu, Injection::double_report)) {
                    Bytes data2 = to_bytes("v=" + std::to_string(int(value) + 60));
                    Report second = users[iu].make_report(num, data2, slot, Q, crypto);
                    ReportOutcome dup = prov.accept_report(second);
                    rep.reports_traced++;
                    std::ostringstream what;
                    what << "inject double-report " << cfg.users[iu].name << " task " << t
                         << " slot " << slot;
                    if (dup.status != ReportStatus::traced) {
                        note(false, what.str());
                    } else {
                        size_of(MsgKind::trace, encode_trace(G, TraceRequest{dup.W}));
                        const Bytes& who = ta.trace(dup.W);
                        note(who == users[iu].identity(), what.str());
                        rep.traces.push_back(
                            {num, slot, std::string(who.begin(), who.end())});
                    }
                }
                if (injection_at(t, slot, iu, Injection::replay_spk)) {
                    std::ostringstream what;
                    what << "inject replay " << cfg.users[iu].name << " task " << t
                         << " slot " << slot;
                    if (!have_previous || previous.tau == slot) {
                        note(false, what.str() + " (nothing to replay)");
                    } else {
                        Report replayed = previous;
                        replayed.tau = slot;
                        ReportOutcome rr = prov.accept_report(replayed);
                        rep.reports_rejected++;
                        note(rr.status == ReportStatus::rejected_proof, what.str());
                    }
                }
            }
            report_ms += clock.lap();

            if (accepted_here == 0) continue;
            const ScenarioTask& st = cfg.tasks[t];
            std::vector<SelectedReport> sel = prov.select_reports(num, slot);
            if (!sel.empty())
                size_of(MsgKind::selected_report, encode_selected_report(G, sel.front()));

            std::vector<Customer::Opened> opened = customers[st.customer].open_reports(sel);
            bool open_ok = true;
            for (size_t i = 0; i < sel.size(); ++i) {
                const Report* ledger = prov.find_report(num, slot, sel[i].Y.encode());
                const auto& info = reporters.at(sel[i].Y.encode());
                open_ok = open_ok && opened[i].decoded && opened[i].data == info.data &&
                          ledger != nullptr && opened[i].X.equal(ledger->X);
            }
            {
                std::ostringstream what;
                what << "open task " << t << " slot " << slot;
                note(open_ok, what.str());
            }

            // trust evaluation over the selected reports
            TrustConfig tc;
            tc.cells = st.area;
            tc.weights.assign(st.area.size(), 1.0 / double(st.area.size()));
            tc.gamma = st.gamma;
            std::vector<ReportCells> prov_cells;
            std::vector<double> vals;
            std::vector<int64_t> Qs;
            for (const SelectedReport& s : sel) {
                const auto& info = reporters.at(s.Y.encode());
                std::vector<GridCell> cells;
                for (const GridCell& c : cfg.users[info.user].route)
                    if (std::find(st.area.begin(), st.area.end(), c) != st.area.end())
                        cells.push_back(c);
                if (cells.empty())
                    for (const GridCell& c : st.area)
                        for (const GridCell& rc : cfg.users[info.user].route)
                            if (c.col == rc.col) {
                                cells.push_back(c);
                                break;
                            }
                prov_cells.push_back({cells});
                vals.push_back(info.value);
                Qs.push_back(s.Q);
            }
            SimilarityMatrix V = compute_similarities(prov_cells, vals, tc);
            TrustOutcome trust = trust_levels(prov_cells, V, Qs, tc);

            for (size_t i = 0; i < sel.size(); ++i) {
                const auto& info = reporters.at(sel[i].Y.encode());
                TrustResponse tr{fixed_from_double(trust.eps[i]), sel[i].Y};
                size_of(MsgKind::trust_response, encode_trust_response(G, tr));
                CreditUpdate upd = prov.assign_credit(num, slot, tr, crypto);
                size_of(MsgKind::credit_update, encode_credit_update(G, upd));
                bool theta_ok = upd.theta == credit_delta(tr.eps, sel[i].Q);

                if (injection_at(t, slot, info.user, Injection::tamper_theta)) {
                    CreditUpdate bent = upd;
                    bent.theta += 7;
                    bool rejected = false;
                    try {
                        users[info.user].apply_credit(bent);
                    } catch (const GroupError&) {
                        rejected = true;
                    }
                    std::ostringstream what;
                    what << "inject tamper-theta " << cfg.users[info.user].name << " task "
                         << t << " slot " << slot;
                    note(rejected, what.str());
                    // the honest update still goes through afterwards
                }
                users[info.user].apply_credit(upd);
                sum_theta[info.user] += upd.theta;
                std::ostringstream what;
                what << "credit " << cfg.users[info.user].name << " task " << t << " slot "
                     << slot << " theta " << upd.theta;
                note(theta_ok, what.str());
            }
            credit_ms += clock.lap();
        }
    }
    rep.timings.push_back({"reporting", report_ms});
    rep.timings.push_back({"selection+credit", credit_ms});

    for (size_t iu = 0; iu < cfg.users.size(); ++iu) {
        int64_t expect = cfg.users[iu].P0 + sum_theta[iu];
        int64_t shown = users[iu].balance();
        bool ok = shown == std::max<int64_t>(expect, 0) &&
                  users[iu].credential().P == expect &&
                  users[iu].balance_clamped() == (expect < 0);
        rep.credits.push_back({cfg.users[iu].name, cfg.users[iu].P0, sum_theta[iu], shown,
                               users[iu].balance_clamped()});
        note(ok, "balance " + cfg.users[iu].name);
    }
    return rep;
}

std::string render_report(const RunReport& r) {
    std::ostringstream out;
    out << "run summary\n";
    out << "matches: " << r.matches << "\n";
    out << "reports: " << r.reports_accepted << " accepted, " << r.reports_rejected
        << " rejected, " << r.reports_traced << " traced\n";
    out << "message sizes (payload bytes):\n";
    for (const auto& [kind, bytes] : r.sizes)
        out << "  " << msg_kind_name(kind) << ": " << bytes << "\n";
    if (!r.traces.empty()) {
        out << "traces:\n";
        for (const auto& t : r.traces)
            out << "  task " << t.num << " slot " << t.tau << ": " << t.identity << "\n";
    }
    out << "credits:\n";
    for (const auto& c : r.credits)
        out << "  " << c.user << ": P0=" << c.P0 << " theta=" << c.sum_theta
            << " final=" << c.final_balance << (c.clamped ? " (clamped)" : "") << "\n";
    out << "checks:\n";
    for (const auto& c : r.checks)
        out << "  " << (c.ok ? "ok: " : "FAIL: ") << c.what << "\n";
    out << "result: " << (r.all_ok ? "PASS" : "FAIL") << "\n";
    return out.str();
}

std::string render_csv(const RunReport& r) {
    std::ostringstream out;
    out << "record,name,value\n";
    out << "count,matches," << r.matches << "\n";
    out << "count,accepted," << r.reports_accepted << "\n";
    out << "count,rejected," << r.reports_rejected << "\n";
    out << "count,traced," << r.reports_traced << "\n";
    for (const auto& [kind, bytes] : r.sizes)
        out << "size," << msg_kind_name(kind) << "," << bytes << "\n";
    for (const auto& t : r.traces)
        out << "trace," << t.num << ":" << t.tau << "," << t.identity << "\n";
    for (const auto& c : r.credits) {
        out << "credit," << c.user << "," << c.final_balance << "\n";
        out << "credit-theta," << c.user << "," << c.sum_theta << "\n";
    }
    for (const auto& c : r.checks)
        out << "check," << c.what << "," << (c.ok ? "ok" : "FAIL") << "\n";
    out << "result,all," << (r.all_ok ? "PASS" : "FAIL") << "\n";
    return out.str();
}

std::string render_timings(const RunReport& r) {
    std::ostringstream out;
    out << "phase timings (wall clock, informational):\n";
    for (const auto& t : r.timings) {
        out << "  " << t.phase << ": ";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f ms", t.ms);
        out << buf << "\n";
    }
    return out.str();
}

}  // namespace mcs
