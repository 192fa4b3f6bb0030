#include "mcs/protocol.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

namespace mcs {

namespace {

Bytes u64_be(uint64_t v) {
    Bytes out(8);
    for (int i = 0; i < 8; ++i) out[i] = uint8_t(v >> (8 * (7 - i)));
    return out;
}

// Cache maintenance (tag precomputation, key sanity pairings) runs inside a
// discarded counter scope so phase tallies cover protocol work only.
template <class F>
decltype(auto) uncounted(F&& f) {
    OpCounts bin;
    CounterScope scope(bin);
    return f();
}

Scalar identity_scalar(const GroupContext& G, const Bytes& id) {
    return G.hash_to_scalar("mcs/identity", {id});
}

BbsKey make_access_key(const ServiceParams& pp) {
    BbsKey k;
    k.pairbase = pp.ab.g;
    k.base = pp.ab.g0;
    k.gens = {pp.ab.g2, pp.ab.g3};  // messages (a, I)
    k.blind = pp.ab.g1;
    k.y = pp.T;
    return k;
}

BbsKey make_credit_key(const ServiceParams& pp, const SourceElement& anchor) {
    BbsKey k;
    k.pairbase = pp.cb.h;
    k.base = pp.cb.h0;
    k.gens = {pp.cb.h2, pp.cb.h3, pp.cb.h4};  // messages (a, I, P)
    k.blind = pp.cb.h1;
    k.y = anchor;
    return k;
}

}  // namespace

ServiceSetup service_setup(const GroupContext& G, uint64_t V, GridRegion grid,
                           RandomSource& rng) {
    if (V == 0) throw GroupError("setup: range width must be positive");
    ServiceSetup out;
    ServiceParams& pp = out.pp;
    pp.profile = G.profile();
    pp.V = V;
    pp.grid = std::move(grid);
    pp.ab.g = G.generator("mcs/gen/g", {}, Side::both);
    pp.ab.g0 = G.hash_to_source("mcs/gen/g0", {}, Side::left);
    pp.ab.g1 = G.hash_to_source("mcs/gen/g1", {}, Side::left);
    pp.ab.g2 = G.hash_to_source("mcs/gen/g2", {}, Side::left);
    pp.ab.g3 = G.hash_to_source("mcs/gen/g3", {}, Side::left);
    pp.cb.h = G.generator("mcs/gen/h", {}, Side::both);
    pp.cb.h0 = G.hash_to_source("mcs/gen/h0", {}, Side::left);
    pp.cb.h1 = G.hash_to_source("mcs/gen/h1", {}, Side::left);
    pp.cb.h2 = G.hash_to_source("mcs/gen/h2", {}, Side::left);
    pp.cb.h3 = G.hash_to_source("mcs/gen/h3", {}, Side::left);
    pp.cb.h4 = G.hash_to_source("mcs/gen/h4", {}, Side::left);
    out.sk.alpha = G.random_nonzero_scalar(rng);
    out.sk.beta = G.random_nonzero_scalar(rng);
    pp.T = pp.ab.g.exp(out.sk.alpha);
    pp.Th = pp.cb.h.exp(out.sk.alpha).narrowed(Side::right);
    pp.S = pp.cb.h.exp(out.sk.beta).narrowed(Side::right);
    SourceElement y = G.hash_to_source("mcs/gen/y", {}, Side::both);
    SourceElement y1 = G.hash_to_source("mcs/gen/y1", {}, Side::left);
    SourceElement y2 = G.hash_to_source("mcs/gen/y2", {}, Side::left);
    pp.rp = gen_range_params(G, V, y, y1, y2, rng);
    pp.tab = build_pairing_table(G, pp.ab, pp.cb, pp.rp, pp.T, pp.Th, pp.S);
    pp.rp = range_public_part(pp.rp);
    pp.H = G.pair(pp.cb.h, pp.cb.h);
    pp.Gt = G.pair(pp.ab.g, pp.ab.g);
    pp.Gcal = G.hash_to_gt("mcs/gen/gcal", {});
    pp.sb = SpkBases{pp.cb, pp.H, pp.Gt, pp.Gcal};
    return out;
}

Party::Party(const GroupContext& G, const ServiceParams& pp, Bytes identity)
    : G_(G), pp_(pp), id_(std::move(identity)), ids_(identity_scalar(G, id_)) {
    if (id_.empty()) throw GroupError("registration: empty identity");
}

const Credential& Party::credential() const {
    if (!registered_) throw GroupError("registration: no credential yet");
    return cred_;
}

int64_t Party::balance() const { return std::max<int64_t>(cred_.P, 0); }

bool Party::balance_clamped() const { return cred_.clamped; }

RegRequest Party::begin_registration(RandomSource& rng) {
    if (registered_) throw GroupError("registration: already registered");
    sp_ = G_.random_scalar(rng);
    tp_ = G_.random_scalar(rng);
    cred_.a = G_.random_nonzero_scalar(rng);
    RegRequest rq;
    rq.I = id_;
    rq.C = pp_.ab.g1.exp(sp_).mul(pp_.ab.g2.exp(cred_.a));
    rq.Cp = pp_.cb.h1.exp(tp_).mul(pp_.cb.h2.exp(cred_.a));
    rq.Ahat = pp_.ab.g.exp(cred_.a);
    cred_.Ahat = rq.Ahat;
    rq.pk1 = prove_pk1(G_, pp_.ab, pp_.cb, Pk1Witness{sp_, tp_, cred_.a},
                       Pk1Statement{rq.C, rq.Cp, rq.Ahat}, reg_request_context(G_, rq), rng);
    pending_ = true;
    return rq;
}

void Party::finish_registration(const RegResponse& r) {
    if (!pending_) throw GroupError("registration: no request outstanding");
    Scalar s = sp_.add(r.s2);
    Scalar t = tp_.add(r.t2);
    if (!bbs_verify(G_, make_access_key(pp_), {cred_.a, ids_}, BbsSignature{r.A, r.e, s}))
        throw GroupError("registration: access credential rejected");
    if (!bbs_verify(G_, make_credit_key(pp_, pp_.Th),
                    {cred_.a, ids_, G_.scalar_from_i64(r.P0)}, BbsSignature{r.B, r.f, t}))
        throw GroupError("registration: credit credential rejected");
    uncounted([&] {
        cred_.egA = G_.pair(pp_.ab.g, cred_.Ahat);
        if (!G_.pair(pp_.T, r.RK).equal(cred_.egA))
            throw GroupError("registration: re-encryption key rejected");
    });
    cred_.A = r.A;
    cred_.e = r.e;
    cred_.s = s;
    cred_.B = r.B;
    cred_.f = r.f;
    cred_.t = t;
    cred_.I = ids_;
    cred_.P = r.P0;
    cred_.RK = r.RK;
    cred_.provider_anchor = false;
    cred_.clamped = false;
    registered_ = true;
    pending_ = false;
}

TrustAuthority::TrustAuthority(const GroupContext& G, const ServiceParams& pp, Scalar alpha)
    : G_(G), pp_(pp), alpha_(std::move(alpha)) {
    access_key_ = make_access_key(pp_);
    access_key_.x = alpha_;
    access_key_.has_secret = true;
    credit_key_ = make_credit_key(pp_, pp_.Th);
    credit_key_.x = alpha_;
    credit_key_.has_secret = true;
}

RegResponse TrustAuthority::register_party(const RegRequest& rq, int64_t P0,
                                           RandomSource& rng) {
    if (P0 < 0) throw GroupError("registration: negative starting balance");
    for (const Rec& r : recs_)
        if (r.I == rq.I) throw GroupError("registration: duplicate identity");
    if (!verify_pk1(G_, pp_.ab, pp_.cb, Pk1Statement{rq.C, rq.Cp, rq.Ahat}, rq.pk1,
                    reg_request_context(G_, rq)))
        throw GroupError("registration: proof rejected");
    Scalar I = identity_scalar(G_, rq.I);
    BbsBlindResult acc = bbs_blind_sign(G_, access_key_, rq.C, {{1, I}},
                                        BlindIssueAuth{true}, rng);
    BbsBlindResult cre =
        bbs_blind_sign(G_, credit_key_, rq.Cp, {{1, I}, {2, G_.scalar_from_i64(P0)}},
                       BlindIssueAuth{true}, rng);
    RegResponse resp;
    resp.A = acc.A;
    resp.e = acc.e;
    resp.s2 = acc.s2;
    resp.B = cre.A;
    resp.f = cre.e;
    resp.t2 = cre.s2;
    resp.P0 = P0;
    resp.RK = rq.Ahat.exp(alpha_.inverse());
    Rec rec;
    rec.I = rq.I;
    rec.P0 = P0;
    rec.Ahat = rq.Ahat;
    rec.egA = uncounted([&] { return G_.pair(pp_.ab.g, rq.Ahat); });
    recs_.push_back(std::move(rec));
    return resp;
}

const Bytes& TrustAuthority::trace(const TargetElement& W) const {
    for (const Rec& r : recs_)
        if (r.egA.equal(W)) return r.I;
    throw GroupError("trace: tag matches no registered party");
}

void TrustAuthority::save_records(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw GroupError("records: cannot open file");
    for (const Rec& r : recs_) {
        Bytes row;
        row.push_back(uint8_t(r.I.size() >> 8));
        row.push_back(uint8_t(r.I.size()));
        row.insert(row.end(), r.I.begin(), r.I.end());
        Bytes p0 = u64_be(uint64_t(r.P0));
        row.insert(row.end(), p0.begin(), p0.end());
        Bytes a = r.Ahat.encode();
        row.insert(row.end(), a.begin(), a.end());
        out.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size()));
    }
    if (!out) throw GroupError("records: write failed");
}

size_t TrustAuthority::load_records(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw GroupError("records: cannot open file");
    Bytes all{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    size_t off = 0, added = 0;
    auto need = [&](size_t n) {
        if (all.size() - off < n) throw GroupError("records: truncated");
    };
    while (off < all.size()) {
        need(2);
        size_t len = size_t(all[off]) << 8 | all[off + 1];
        off += 2;
        need(len + 8 + G_.source_bytes());
        Rec r;
        r.I.assign(all.begin() + off, all.begin() + off + len);
        off += len;
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = v << 8 | all[off + i];
        off += 8;
        r.P0 = int64_t(v);
        r.Ahat = G_.decode_source(Bytes(all.begin() + off, all.begin() + off + G_.source_bytes()),
                                  Side::right);
        off += G_.source_bytes();
        for (const Rec& e : recs_)
            if (e.I == r.I) throw GroupError("records: duplicate identity");
        r.egA = uncounted([&] { return G_.pair(pp_.ab.g, r.Ahat); });
        recs_.push_back(std::move(r));
        ++added;
    }
    return added;
}

const char* report_status_name(ReportStatus s) {
    switch (s) {
        case ReportStatus::accepted: return "accepted";
        case ReportStatus::rejected_unknown_task: return "rejected-unknown-task";
        case ReportStatus::rejected_proof: return "rejected-proof";
        case ReportStatus::rejected_duplicate: return "rejected-duplicate";
        case ReportStatus::traced: return "traced";
    }
    throw GroupError("report: unknown status");
}

TargetElement trace_tag(const GroupContext& G, const Report& r1, const Report& r2) {
    (void)G;
    if (!r1.Y.equal(r2.Y)) throw GroupError("trace: identifier mismatch");
    if (r1.X.equal(r2.X)) throw GroupError("trace: report identifiers collide");
    TargetElement num = r2.Z.exp(r1.X).div(r1.Z.exp(r2.X));
    return num.exp(r1.X.sub(r2.X).inverse());
}

Provider::Provider(const GroupContext& G, const ServiceParams& pp, Scalar beta)
    : G_(G), pp_(pp), beta_(std::move(beta)) {
    credit_key_ = make_credit_key(pp_, pp_.S);
    credit_key_.x = beta_;
    credit_key_.has_secret = true;
}

TaskRelease Provider::accept_task(const TaskPost& post, uint64_t now) {
    if (post.expires <= now) throw GroupError("task: already expired");
    if (post.area.n != pp_.grid.cols()) throw GroupError("task: grid mismatch");
    if (post.quota == 0) throw GroupError("task: zero quota");
    if (post.gamma <= 0) throw GroupError("task: trust bound must be positive");
    if (!verify_credential(G_, ProofKind::pk2, pp_.ab, pp_.tab, pp_.T, post.pk2,
                           task_post_context(G_, post)))
        throw GroupError("task: proof rejected");
    uint64_t num = next_num_++;
    tasks_.emplace(num, post);
    return TaskRelease{num, post.expires, post.gamma};
}

std::vector<MatchResponse> Provider::match_user(const MatchRequest& req, uint64_t now) {
    if (req.route.n != pp_.grid.cols()) throw GroupError("match: grid mismatch");
    if (!verify_credential(G_, ProofKind::pk3, pp_.ab, pp_.tab, pp_.T, req.pk3,
                           match_request_context(G_, req)))
        throw GroupError("match: proof rejected");
    std::vector<MatchResponse> out;
    Scalar ib = beta_.inverse();
    for (const auto& [num, t] : tasks_) {
        if (t.expires <= now) continue;
        if (!match(req.route, t.area)) continue;
        MatchResponse r;
        r.num = num;
        r.c2 = t.c2;
        r.c3 = t.c3;
        r.c4 = G_.pair(req.mu, t.c1).exp(ib);
        r.expires = t.expires;
        r.gamma = t.gamma;
        out.push_back(std::move(r));
    }
    return out;
}

ReportOutcome Provider::accept_report(const Report& rep) {
    if (tasks_.find(rep.num) == tasks_.end())
        return ReportOutcome{ReportStatus::rejected_unknown_task, {}};
    SpkStatement st;
    st.Cp = rep.Cp;
    st.Q = G_.scalar_from_i64(rep.Q);
    st.X = rep.X;
    st.Y = rep.Y;
    st.Z = rep.Z;
    st.num = u64_be(rep.num);
    Bytes ctx = report_context(G_, rep);
    bool ok = verify_spk(G_, pp_.sb, pp_.rp, pp_.tab, pp_.S, pp_.tab.K0p, st, rep.spk, ctx) ||
              verify_spk(G_, pp_.sb, pp_.rp, pp_.tab, pp_.Th, pp_.tab.K0, st, rep.spk, ctx);
    if (!ok) return ReportOutcome{ReportStatus::rejected_proof, {}};
    auto& slot = ledger_[{rep.num, rep.tau}];
    Bytes y = rep.Y.encode();
    Bytes x = rep.X.encode();
    for (const Entry& e : slot) {
        if (e.y_enc != y) continue;
        if (e.x_enc == x) return ReportOutcome{ReportStatus::rejected_duplicate, {}};
        return ReportOutcome{ReportStatus::traced, trace_tag(G_, e.rep, rep)};
    }
    slot.push_back(Entry{rep, std::move(y), std::move(x)});
    return ReportOutcome{ReportStatus::accepted, {}};
}

std::vector<SelectedReport> Provider::select_reports(uint64_t num, uint64_t tau) const {
    auto ti = tasks_.find(num);
    if (ti == tasks_.end()) throw GroupError("reports: unknown task");
    auto it = ledger_.find({num, tau});
    if (it == ledger_.end() || it->second.empty()) throw GroupError("reports: empty slot");
    std::vector<const Entry*> order;
    order.reserve(it->second.size());
    for (const Entry& e : it->second) order.push_back(&e);
    std::sort(order.begin(), order.end(), [](const Entry* a, const Entry* b) {
        if (a->rep.Q != b->rep.Q) return a->rep.Q > b->rep.Q;
        return a->y_enc < b->y_enc;
    });
    size_t w = std::min<size_t>(ti->second.quota, order.size());
    std::vector<SelectedReport> out;
    out.reserve(w);
    for (size_t i = 0; i < w; ++i) {
        const Report& r = order[i]->rep;
        out.push_back(SelectedReport{r.num, r.D, r.Dp, r.Y, r.Q, r.tau});
    }
    return out;
}

CreditUpdate Provider::assign_credit(uint64_t num, uint64_t tau, const TrustResponse& tr,
                                     RandomSource& rng) {
    auto ti = tasks_.find(num);
    if (ti == tasks_.end()) throw GroupError("credit: unknown task");
    if (tr.eps < -ti->second.gamma || tr.eps > ti->second.gamma)
        throw GroupError("credit: trust level out of range");
    auto it = ledger_.find({num, tau});
    if (it == ledger_.end()) throw GroupError("credit: empty slot");
    const Entry* hit = nullptr;
    Bytes y = tr.Y.encode();
    for (const Entry& e : it->second)
        if (e.y_enc == y) {
            hit = &e;
            break;
        }
    if (!hit) throw GroupError("credit: unknown report");
    int64_t theta = credit_delta(tr.eps, hit->rep.Q);
    BbsBlindResult res = bbs_blind_sign(G_, credit_key_, hit->rep.Cp,
                                        {{2, G_.scalar_from_i64(theta)}}, BlindIssueAuth{true},
                                        rng);
    CreditUpdate upd;
    upd.B = res.A;
    upd.t2 = res.s2;
    upd.f = res.e;
    upd.theta = theta;
    upd.Y = tr.Y;
    return upd;
}

uint64_t Provider::task_quota(uint64_t num) const {
    auto it = tasks_.find(num);
    if (it == tasks_.end()) throw GroupError("reports: unknown task");
    return it->second.quota;
}

size_t Provider::slot_size(uint64_t num, uint64_t tau) const {
    auto it = ledger_.find({num, tau});
    return it == ledger_.end() ? 0 : it->second.size();
}

const Report* Provider::find_report(uint64_t num, uint64_t tau, const Bytes& y_enc) const {
    auto it = ledger_.find({num, tau});
    if (it == ledger_.end()) return nullptr;
    for (const Entry& e : it->second)
        if (e.y_enc == y_enc) return &e.rep;
    return nullptr;
}

TaskPost Customer::post_task(const Bytes& task, const GridRegion& area, uint64_t expires,
                             int64_t gamma, uint64_t quota, RandomSource& rng) {
    if (!registered()) throw GroupError("task: not registered");
    if (gamma <= 0) throw GroupError("task: trust bound must be positive");
    if (quota == 0) throw GroupError("task: zero quota");
    if (area.rows() != pp_.grid.rows() || area.cols() != pp_.grid.cols())
        throw GroupError("task: grid mismatch");
    if (task.empty() || task.size() + G_.source_bytes() > gt_payload_capacity(G_))
        throw GroupError("task: data does not fit the message space");
    PendingTask pt;
    pt.k = G_.random_nonzero_scalar(rng);
    Scalar r1 = G_.random_nonzero_scalar(rng);
    Scalar r2 = G_.random_nonzero_scalar(rng);
    pt.task = task;
    pt.u = pp_.ab.g.exp(pt.k);
    TaskPost post;
    post.c1 = pp_.S.exp(r2);
    post.c2 = pp_.T.exp(r1);
    Bytes payload = task;
    Bytes ue = pt.u.encode();
    payload.insert(payload.end(), ue.begin(), ue.end());
    post.c3 = gt_encode_payload(G_, payload).mul(pp_.Gt.exp(r1)).mul(pp_.H.exp(r2));
    post.expires = expires;
    post.area = encode_region(G_, area, rng).second;
    post.gamma = gamma;
    post.quota = quota;
    post.pk2 = prove_credential(G_, ProofKind::pk2, pp_.ab, pp_.tab, pp_.T,
                                CredentialWitness{cred_.A, cred_.e, cred_.s, cred_.a, cred_.I},
                                task_post_context(G_, post), rng);
    unnumbered_.push_back(std::move(pt));
    return post;
}

void Customer::task_posted(uint64_t num) {
    if (unnumbered_.empty()) throw GroupError("task: no post outstanding");
    if (tasks_.count(num)) throw GroupError("task: number already bound");
    tasks_.emplace(num, std::move(unnumbered_.front()));
    unnumbered_.erase(unnumbered_.begin());
}

std::vector<Customer::Opened> Customer::open_reports(
    const std::vector<SelectedReport>& sel) const {
    std::vector<Opened> out;
    out.reserve(sel.size());
    PreParams prep{pp_.ab.g, pp_.Gt};
    for (const SelectedReport& r : sel) {
        auto it = tasks_.find(r.num);
        if (it == tasks_.end()) throw GroupError("reports: not this customer's task");
        PreCiphertext ct;
        ct.stage = PreStage::first_level;
        ct.head_src = r.D;
        ct.body = r.Dp;
        Opened o;
        o.m = pre_decrypt(G_, prep, ct, it->second.k);
        o.X = G_.hash_to_scalar("mcs/report/x", {u64_be(r.num), o.m.encode(), u64_be(r.tau)});
        try {
            o.data = gt_decode_payload(G_, o.m);
            o.decoded = true;
        } catch (const GroupError&) {
            o.decoded = false;
        }
        out.push_back(std::move(o));
    }
    return out;
}

const SourceElement& Customer::task_key(uint64_t num) const {
    auto it = tasks_.find(num);
    if (it == tasks_.end()) throw GroupError("reports: not this customer's task");
    return it->second.u;
}

const Bytes& Customer::task_data(uint64_t num) const {
    auto it = tasks_.find(num);
    if (it == tasks_.end()) throw GroupError("reports: not this customer's task");
    return it->second.task;
}

MatchRequest User::request_tasks(const GridRegion& route, RandomSource& rng) {
    if (!registered()) throw GroupError("match: not registered");
    if (route.rows() != pp_.grid.rows() || route.cols() != pp_.grid.cols())
        throw GroupError("match: grid mismatch");
    nu_ = G_.random_nonzero_scalar(rng);
    nu_live_ = true;
    MatchRequest req;
    req.mu = pp_.cb.h.exp(nu_);
    req.route = encode_user_route(G_, route, rng).second;
    req.pk3 = prove_credential(G_, ProofKind::pk3, pp_.ab, pp_.tab, pp_.T,
                               CredentialWitness{cred_.A, cred_.e, cred_.s, cred_.a, cred_.I},
                               match_request_context(G_, req), rng);
    return req;
}

User::DecodedTask User::decrypt_task(const MatchResponse& r) {
    if (!nu_live_) throw GroupError("match: no request outstanding");
    TargetElement unmasked = r.c3.mul(r.c4.exp(nu_.inverse().neg()))
                                 .mul(G_.pair(r.c2, cred_.RK).exp(cred_.a.inverse().neg()));
    Bytes payload = gt_decode_payload(G_, unmasked);
    if (payload.size() <= G_.source_bytes())
        throw GroupError("match: task payload too short");
    size_t split = payload.size() - G_.source_bytes();
    DecodedTask dt;
    dt.num = r.num;
    dt.task.assign(payload.begin(), payload.begin() + split);
    dt.u = G_.decode_source(Bytes(payload.begin() + split, payload.end()), Side::right);
    dt.gamma = r.gamma;
    dt.expires = r.expires;
    tasks_[r.num] = dt;
    return dt;
}

Report User::make_report(uint64_t num, const Bytes& data, uint64_t tau, int64_t Q,
                         RandomSource& rng) {
    auto it = tasks_.find(num);
    if (it == tasks_.end()) throw GroupError("report: no matched task");
    if (Q >= cred_.P) throw GroupError("report: threshold must stay below the balance");
    if (data.empty() || data.size() > gt_payload_capacity(G_))
        throw GroupError("report: data does not fit the message space");
    TargetElement m = gt_encode_payload(G_, data);
    Report rep;
    rep.num = num;
    rep.tau = tau;
    rep.Q = Q;
    PreCiphertext ct = pre_encrypt(G_, PreParams{pp_.ab.g, pp_.Gt}, m, it->second.u, rng);
    rep.D = ct.head_src;
    rep.Dp = ct.body;
    Scalar tf = G_.random_scalar(rng);
    Scalar P = G_.scalar_from_i64(cred_.P);
    rep.Cp = pp_.cb.h1.exp(tf)
                 .mul(pp_.cb.h2.exp(cred_.a))
                 .mul(pp_.cb.h3.exp(cred_.I))
                 .mul(pp_.cb.h4.exp(P));
    rep.X = G_.hash_to_scalar("mcs/report/x", {u64_be(num), m.encode(), u64_be(tau)});
    Scalar v = G_.prf(cred_.a, {u64_be(num), id_, u64_be(tau)});
    rep.Y = pp_.H.exp(v);
    rep.Z = cred_.egA.mul(pp_.Gcal.exp(rep.X.mul(v)));
    SpkWitness w;
    w.B = cred_.B;
    w.f = cred_.f;
    w.t = cred_.t;
    w.tp = tf;
    w.a = cred_.a;
    w.I = cred_.I;
    w.P = P;
    w.v = v;
    SpkStatement st;
    st.Cp = rep.Cp;
    st.Q = G_.scalar_from_i64(Q);
    st.X = rep.X;
    st.Y = rep.Y;
    st.Z = rep.Z;
    st.num = u64_be(num);
    const SourceElement& W = cred_.provider_anchor ? pp_.S : pp_.Th;
    const TargetElement& K0W = cred_.provider_anchor ? pp_.tab.K0p : pp_.tab.K0;
    rep.spk = prove_spk(G_, pp_.sb, pp_.rp, pp_.tab, W, K0W, w, st,
                        report_context(G_, rep), rng);
    pending_.push_back(PendingReport{num, tau, rep.Y.encode(), tf, cred_.P});
    return rep;
}

void User::apply_credit(const CreditUpdate& upd) {
    Bytes y = upd.Y.encode();
    auto it = std::find_if(pending_.begin(), pending_.end(),
                           [&](const PendingReport& p) { return p.y_enc == y; });
    if (it == pending_.end()) throw GroupError("credit: no report awaiting an update");
    Scalar t = it->t_fresh.add(upd.t2);
    int64_t P_new = it->P_at + upd.theta;
    if (!bbs_verify(G_, make_credit_key(pp_, pp_.S),
                    {cred_.a, cred_.I, G_.scalar_from_i64(P_new)},
                    BbsSignature{upd.B, upd.f, t}))
        throw GroupError("credit: update rejected");
    cred_.B = upd.B;
    cred_.f = upd.f;
    cred_.t = t;
    cred_.P = P_new;
    cred_.provider_anchor = true;
    cred_.clamped = P_new < 0;
    pending_.erase(it);
}

}  // namespace mcs
