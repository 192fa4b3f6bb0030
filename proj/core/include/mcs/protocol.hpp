#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mcs/bbs.hpp"
#include "mcs/geo.hpp"
#include "mcs/group.hpp"
#include "mcs/messages.hpp"
#include "mcs/pre.hpp"
#include "mcs/zkp.hpp"

namespace mcs {

/* The five-phase crowdsensing protocol: setup, registration, task
 * allocation, data reporting, credit management.  One authority anchors
 * both credential families; the provider re-anchors credit credentials
 * under its own key at the first credit update. */

struct ServiceParams {
    Profile profile = Profile::p160;
    uint64_t V = 0;  // widest provable balance-threshold gap
    GridRegion grid{1, 1};
    AccessBases ab;
    CreditBases cb;
    SourceElement T;   // g^alpha, access anchor
    SourceElement Th;  // h^alpha, credit anchor at issue time
    SourceElement S;   // h^beta, credit anchor after a provider update
    TargetElement H, Gt, Gcal;
    RangeParams rp;  // public part
    PairingTable tab;
    SpkBases sb;
};

struct ServiceSecrets {
    Scalar alpha;  // authority
    Scalar beta;   // provider
};

struct ServiceSetup {
    ServiceParams pp;
    ServiceSecrets sk;
};

// Deterministic for a fixed rng stream; persistence stores the seed.
ServiceSetup service_setup(const GroupContext& G, uint64_t V, GridRegion grid,
                           RandomSource& rng);

struct Credential {
    SourceElement A;  // access pair (A, e) on (s, a, I)
    Scalar e, s;
    SourceElement B;  // credit pair (B, f) on (t, a, I, P)
    Scalar f, t;
    Scalar a, I;
    int64_t P = 0;  // balance the credit credential binds (signed)
    SourceElement Ahat, RK;
    TargetElement egA;             // pair(g, Ahat), cached for report tags
    bool provider_anchor = false;  // B verifies under S instead of Th
    bool clamped = false;          // a penalty drove the balance below zero
};

/* Registration state machine shared by users and customers.  The identity
 * scalar bound into credentials is a hash of the identity bytes. */
class Party {
public:
    Party(const GroupContext& G, const ServiceParams& pp, Bytes identity);

    const Bytes& identity() const { return id_; }
    RegRequest begin_registration(RandomSource& rng);
    void finish_registration(const RegResponse& r);
    bool registered() const { return registered_; }
    const Credential& credential() const;
    int64_t balance() const;  // floored at zero
    bool balance_clamped() const;

protected:
    const GroupContext& G_;
    const ServiceParams& pp_;
    Bytes id_;
    Scalar ids_;

private:
    Scalar sp_, tp_;

protected:
    Credential cred_;
    bool registered_ = false;
    bool pending_ = false;
};

class TrustAuthority {
public:
    TrustAuthority(const GroupContext& G, const ServiceParams& pp, Scalar alpha);

    // Issues both credentials blind; throws on duplicate identity or a bad proof.
    RegResponse register_party(const RegRequest& rq, int64_t P0, RandomSource& rng);

    // Resolves a double-reporting tag to the registered identity.
    const Bytes& trace(const TargetElement& W) const;
    size_t record_count() const { return recs_.size(); }

    // Append-only (identity, P0, Ahat) rows; load recomputes the tag cache.
    void save_records(const std::string& path) const;
    size_t load_records(const std::string& path);

private:
    struct Rec {
        Bytes I;
        int64_t P0 = 0;
        SourceElement Ahat;
        TargetElement egA;
    };
    const GroupContext& G_;
    const ServiceParams& pp_;
    Scalar alpha_;
    BbsKey access_key_, credit_key_;
    std::vector<Rec> recs_;
};

struct TaskRelease {
    uint64_t num = 0;
    uint64_t expires = 0;
    int64_t gamma = 0;
};

enum class ReportStatus : uint8_t {
    accepted,
    rejected_unknown_task,
    rejected_proof,
    rejected_duplicate,  // same identifier pair resubmitted; no trace
    traced,              // double report; W identifies the sender
};

const char* report_status_name(ReportStatus s);

struct ReportOutcome {
    ReportStatus status = ReportStatus::accepted;
    TargetElement W;  // set when status == traced
};

// W = (Z2^{X1} / Z1^{X2})^{1/(X1-X2)}; throws when the identifiers collide.
TargetElement trace_tag(const GroupContext& G, const Report& r1, const Report& r2);

class Provider {
public:
    Provider(const GroupContext& G, const ServiceParams& pp, Scalar beta);

    // Verifies the embedded credential proof, assigns a task number.
    TaskRelease accept_task(const TaskPost& post, uint64_t now);
    // One response per unexpired task whose area meets the route; empty
    // means the caller sends a failure message.
    std::vector<MatchResponse> match_user(const MatchRequest& req, uint64_t now);
    ReportOutcome accept_report(const Report& rep);
    // Top-quota reports of the slot by claimed threshold, ties by identifier.
    std::vector<SelectedReport> select_reports(uint64_t num, uint64_t tau) const;
    // Builds the blind credit update for the report identified by tr.Y.
    CreditUpdate assign_credit(uint64_t num, uint64_t tau, const TrustResponse& tr,
                               RandomSource& rng);

    size_t task_count() const { return tasks_.size(); }
    uint64_t task_quota(uint64_t num) const;
    size_t slot_size(uint64_t num, uint64_t tau) const;
    const Report* find_report(uint64_t num, uint64_t tau, const Bytes& y_enc) const;

private:
    struct Entry {
        Report rep;
        Bytes y_enc, x_enc;
    };
    const GroupContext& G_;
    const ServiceParams& pp_;
    Scalar beta_;
    BbsKey credit_key_;
    uint64_t next_num_ = 1;
    std::map<uint64_t, TaskPost> tasks_;
    std::map<std::pair<uint64_t, uint64_t>, std::vector<Entry>> ledger_;
};

class Customer : public Party {
public:
    using Party::Party;

    TaskPost post_task(const Bytes& task, const GridRegion& area, uint64_t expires,
                       int64_t gamma, uint64_t quota, RandomSource& rng);
    // Binds the provider's task number to the oldest unbound post.
    void task_posted(uint64_t num);

    struct Opened {
        TargetElement m;
        Bytes data;           // decoded payload; empty when decoding failed
        bool decoded = false;
        Scalar X;  // recomputed identifier for the integrity cross-check
    };
    std::vector<Opened> open_reports(const std::vector<SelectedReport>& sel) const;

    const SourceElement& task_key(uint64_t num) const;  // u = g^k
    const Bytes& task_data(uint64_t num) const;

private:
    struct PendingTask {
        Scalar k;
        Bytes task;
        SourceElement u;
    };
    std::vector<PendingTask> unnumbered_;
    std::map<uint64_t, PendingTask> tasks_;
};

class User : public Party {
public:
    using Party::Party;

    MatchRequest request_tasks(const GridRegion& route, RandomSource& rng);

    struct DecodedTask {
        uint64_t num = 0;
        Bytes task;
        SourceElement u;
        int64_t gamma = 0;
        uint64_t expires = 0;
    };
    // Unmasks c3 and splits it into task bytes and the report key u.
    DecodedTask decrypt_task(const MatchResponse& r);

    Report make_report(uint64_t num, const Bytes& data, uint64_t tau, int64_t Q,
                       RandomSource& rng);
    // Verifies the update against the provider anchor and adjusts the balance.
    void apply_credit(const CreditUpdate& upd);

    const std::map<uint64_t, DecodedTask>& matched_tasks() const { return tasks_; }

private:
    Scalar nu_;
    bool nu_live_ = false;
    std::map<uint64_t, DecodedTask> tasks_;
    struct PendingReport {
        uint64_t num = 0, tau = 0;
        Bytes y_enc;
        Scalar t_fresh;
        int64_t P_at = 0;
    };
    std::vector<PendingReport> pending_;
};

}  // namespace mcs
