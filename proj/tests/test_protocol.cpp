#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "proto_env.hpp"

using namespace mcs;
using proto_env::Env;

namespace {

Env& env() {
    static Env e;
    return e;
}

Bytes uid(const char* prefix) {
    static int n = 0;
    return to_bytes(std::string(prefix) + "/" + std::to_string(n++));
}

struct Actors {
    Customer cust;
    User user;
    uint64_t num = 0;
};

// One customer task plus one user matched to it, starting balances P0.
Actors matched_pair(RandomSource& rng, int64_t P0 = 100, int64_t gamma = kFixedOne,
                    uint64_t quota = 3, uint64_t expires = 1000) {
    Env& e = env();
    Actors a{Customer(e.G, e.su.pp, uid("cust")), User(e.G, e.su.pp, uid("user")), 0};
    e.enroll(a.cust, P0, rng);
    e.enroll(a.user, P0, rng);
    TaskPost post =
        a.cust.post_task(to_bytes("count the potholes"), e.rect(0, 0, 2, 2), expires, gamma,
                         quota, rng);
    TaskRelease rel = e.prov.accept_task(post, 1);
    a.cust.task_posted(rel.num);
    a.num = rel.num;
    MatchRequest req = a.user.request_tasks(e.rect(1, 0, 1, 1), rng);
    auto resp = e.prov.match_user(req, 1);
    REQUIRE(!resp.empty());
    for (const MatchResponse& r : resp)
        if (r.num == rel.num) a.user.decrypt_task(r);
    return a;
}

}  // namespace

TEST_CASE("setup is deterministic per seed") {
    GroupContext G(Profile::p160);
    RandomSource r1(42), r2(42), r3(43);
    ServiceSetup a = service_setup(G, 16, GridRegion(2, 2), r1);
    ServiceSetup b = service_setup(G, 16, GridRegion(2, 2), r2);
    ServiceSetup c = service_setup(G, 16, GridRegion(2, 2), r3);
    CHECK(a.pp.T.encode() == b.pp.T.encode());
    CHECK(a.pp.S.encode() == b.pp.S.encode());
    CHECK(a.pp.rp.digit.at(7).encode() == b.pp.rp.digit.at(7).encode());
    CHECK(a.sk.alpha.equal(b.sk.alpha));
    CHECK_FALSE(a.pp.T.encode() == c.pp.T.encode());
    // published params carry no issuer secret
    CHECK_FALSE(a.pp.rp.has_secret);
    CHECK(a.pp.rp.V == 16);
    CHECK_THROWS_AS(service_setup(G, 0, GridRegion(2, 2), r1), GroupError);
}

TEST_CASE("registration issues verifiable credentials") {
    Env& e = env();
    RandomSource rng(0x726567);

    User u(e.G, e.su.pp, uid("user"));
    CHECK_THROWS_AS(u.credential(), GroupError);
    RegRequest rq = u.begin_registration(rng);
    RegResponse rs = e.ta.register_party(rq, 100, rng);
    u.finish_registration(rs);
    CHECK(u.registered());
    CHECK(u.balance() == 100);
    CHECK_FALSE(u.balance_clamped());

    // the re-encryption key pairs back to the registered tag
    const Credential& cred = u.credential();
    CHECK(e.G.pair(e.su.pp.T, cred.RK).equal(e.G.pair(e.su.pp.ab.g, cred.Ahat)));
    CHECK(e.G.pair(e.su.pp.T, cred.RK).equal(cred.egA));

    // duplicate identity is refused
    User twin(e.G, e.su.pp, u.identity());
    RegRequest rq2 = twin.begin_registration(rng);
    CHECK_THROWS_AS(e.ta.register_party(rq2, 100, rng), GroupError);

    // a tampered share breaks the issued credential
    User v(e.G, e.su.pp, uid("user"));
    RegRequest rqv = v.begin_registration(rng);
    RegResponse rsv = e.ta.register_party(rqv, 100, rng);
    RegResponse bad = rsv;
    bad.s2 = bad.s2.add(e.G.scalar_one());
    CHECK_THROWS_AS(v.finish_registration(bad), GroupError);
    v.finish_registration(rsv);

    // proofs do not transplant across registration requests
    User w(e.G, e.su.pp, uid("user"));
    RegRequest rqw = w.begin_registration(rng);
    RegRequest frank = rqw;
    frank.pk1 = rqv.pk1;
    CHECK_THROWS_AS(e.ta.register_party(frank, 100, rng), GroupError);

    CHECK_THROWS_AS(e.ta.register_party(rqw, -5, rng), GroupError);
    CHECK_THROWS_AS(User(e.G, e.su.pp, Bytes{}), GroupError);
    CHECK_THROWS_AS(v.begin_registration(rng), GroupError);
    User idle(e.G, e.su.pp, uid("user"));
    CHECK_THROWS_AS(idle.finish_registration(rsv), GroupError);
}

TEST_CASE("task posting and matching") {
    Env& e = env();
    RandomSource rng(0x7461736b);
    Customer cust(e.G, e.su.pp, uid("cust"));
    User hit(e.G, e.su.pp, uid("user"));
    User miss(e.G, e.su.pp, uid("user"));
    e.enroll(cust, 50, rng);
    e.enroll(hit, 50, rng);
    e.enroll(miss, 50, rng);

    // task A covers columns {0,1}, task B column 2 only
    Bytes task_a = to_bytes("noise levels downtown");
    TaskPost post_a = cust.post_task(task_a, e.rect(0, 0, 2, 1), 10, kFixedOne, 2, rng);
    TaskPost post_b =
        cust.post_task(to_bytes("traffic on the bypass"), e.rect(0, 2, 2, 2), 10, kFixedOne, 2,
                       rng);
    TaskRelease rel_a = e.prov.accept_task(post_a, 1);
    TaskRelease rel_b = e.prov.accept_task(post_b, 1);
    cust.task_posted(rel_a.num);
    cust.task_posted(rel_b.num);
    CHECK(rel_b.num == rel_a.num + 1);

    // the route crosses task A's columns only
    MatchRequest req = hit.request_tasks(e.rect(2, 0, 2, 0), rng);
    auto resp = e.prov.match_user(req, 1);
    REQUIRE(resp.size() == 1);
    CHECK(resp[0].num == rel_a.num);

    User::DecodedTask dt = hit.decrypt_task(resp[0]);
    CHECK(dt.task == task_a);
    CHECK(dt.u.encode() == cust.task_key(rel_a.num).encode());
    CHECK(dt.gamma == kFixedOne);

    // disjoint route: no responses, caller reports failure
    MatchRequest far = miss.request_tasks(e.rect(0, 2, 1, 2), rng);
    // column 2 belongs to task B though, so drop B by expiry first
    auto resp_far = e.prov.match_user(far, 11);
    CHECK(resp_far.empty());

    // expired tasks are never returned
    auto resp_late = e.prov.match_user(hit.request_tasks(e.rect(2, 0, 2, 0), rng), 10);
    CHECK(resp_late.empty());
    CHECK_THROWS_AS(e.prov.accept_task(post_a, 10), GroupError);

    // a proof minted for one posting does not cover an altered one
    TaskPost altered = post_a;
    altered.quota = 9;
    CHECK_THROWS_AS(e.prov.accept_task(altered, 1), GroupError);
    MatchRequest moved = req;
    moved.mu = e.su.pp.cb.h.exp(e.G.scalar_from_u64(3));
    CHECK_THROWS_AS(e.prov.match_user(moved, 1), GroupError);

    // malformed postings are refused up front
    CHECK_THROWS_AS(cust.post_task(task_a, e.rect(0, 0, 1, 1), 10, kFixedOne, 0, rng),
                    GroupError);
    CHECK_THROWS_AS(cust.post_task(task_a, e.rect(0, 0, 1, 1), 10, 0, 2, rng), GroupError);
    CHECK_THROWS_AS(cust.post_task(task_a, GridRegion(2, 2), 10, kFixedOne, 2, rng),
                    GroupError);
    CHECK_THROWS_AS(cust.post_task(Bytes(200, 0x41), e.rect(0, 0, 1, 1), 10, kFixedOne, 2, rng),
                    GroupError);
    CHECK_THROWS_AS(cust.post_task(Bytes{}, e.rect(0, 0, 1, 1), 10, kFixedOne, 2, rng),
                    GroupError);
}

TEST_CASE("report lifecycle and double-report tracing") {
    Env& e = env();
    RandomSource rng(0x726570);
    Actors a = matched_pair(rng);

    Report rep = a.user.make_report(a.num, to_bytes("41 potholes"), 1, 40, rng);
    ReportOutcome out = e.prov.accept_report(rep);
    CHECK(out.status == ReportStatus::accepted);

    // byte-identical resubmission: duplicate, no trace
    CHECK(e.prov.accept_report(rep).status == ReportStatus::rejected_duplicate);

    // same slot, different data: traced to the registered identity
    Report greedy = a.user.make_report(a.num, to_bytes("izzy counted 7"), 1, 40, rng);
    ReportOutcome traced = e.prov.accept_report(greedy);
    REQUIRE(traced.status == ReportStatus::traced);
    CHECK(e.ta.trace(traced.W) == a.user.identity());
    CHECK(e.prov.slot_size(a.num, 1) == 1);

    // fresh slot: accepted again (per-slot scoping)
    Report later = a.user.make_report(a.num, to_bytes("41 potholes"), 2, 40, rng);
    CHECK(e.prov.accept_report(later).status == ReportStatus::accepted);

    // unknown task number
    Report ghost = rep;
    ghost.num = 9999;
    CHECK(e.prov.accept_report(ghost).status == ReportStatus::rejected_unknown_task);

    // tampering with a bound field breaks the proof
    Report bent = a.user.make_report(a.num, to_bytes("41 potholes"), 3, 40, rng);
    bent.tau = 4;
    CHECK(e.prov.accept_report(bent).status == ReportStatus::rejected_proof);
    Report shifted = a.user.make_report(a.num, to_bytes("41 potholes"), 5, 40, rng);
    shifted.Q = 10;
    CHECK(e.prov.accept_report(shifted).status == ReportStatus::rejected_proof);

    // client refuses thresholds at or above the balance
    CHECK_THROWS_AS(a.user.make_report(a.num, to_bytes("x"), 6, 100, rng), GroupError);
    CHECK_THROWS_AS(a.user.make_report(a.num, to_bytes("x"), 6, 150, rng), GroupError);

    // trace preconditions
    CHECK_THROWS_AS(trace_tag(e.G, rep, rep), GroupError);  // identical identifiers
    Report other = later;
    CHECK_THROWS_AS(trace_tag(e.G, rep, other), GroupError);  // different Y

    // a forced identifier collision between two honest users accuses nobody
    Actors b = matched_pair(rng);
    Report foreign = b.user.make_report(b.num, to_bytes("unrelated"), 1, 40, rng);
    Report forged = foreign;
    forged.Y = rep.Y;
    TargetElement W = trace_tag(e.G, rep, forged);
    CHECK_THROWS_AS(e.ta.trace(W), GroupError);
}

TEST_CASE("report selection follows thresholds then identifiers") {
    Env& e = env();
    RandomSource rng(0x73656c);
    Env& ev = e;
    Customer cust(ev.G, ev.su.pp, uid("cust"));
    ev.enroll(cust, 50, rng);
    TaskPost post = cust.post_task(to_bytes("queue lengths"), ev.rect(0, 0, 2, 2), 50,
                                   kFixedOne, 2, rng);
    TaskRelease rel = ev.prov.accept_task(post, 1);
    cust.task_posted(rel.num);

    auto reporter = [&](int64_t Q) {
        User u(ev.G, ev.su.pp, uid("user"));
        ev.enroll(u, 100, rng);
        auto resp = ev.prov.match_user(u.request_tasks(ev.rect(0, 0, 0, 0), rng), 1);
        REQUIRE(!resp.empty());
        for (const MatchResponse& r : resp)
            if (r.num == rel.num) u.decrypt_task(r);
        Report rep = u.make_report(rel.num, to_bytes("n=" + std::to_string(Q)), 1, Q, rng);
        REQUIRE(ev.prov.accept_report(rep).status == ReportStatus::accepted);
        return rep;
    };

    CHECK_THROWS_AS(ev.prov.select_reports(rel.num, 1), GroupError);  // empty slot

    reporter(5);
    reporter(9);
    reporter(2);
    auto sel = ev.prov.select_reports(rel.num, 1);
    REQUIRE(sel.size() == 2);  // quota w = 2
    CHECK(sel[0].Q == 9);
    CHECK(sel[1].Q == 5);

    // fewer reports than the quota: all of them
    Report lone = reporter(7);
    (void)lone;
    auto sel2 = ev.prov.select_reports(rel.num, 1);
    CHECK(sel2.size() == 2);

    // ties break on the identifier encoding, ascending
    Report t1 = reporter(9);
    Report t2 = reporter(9);
    auto sel3 = ev.prov.select_reports(rel.num, 1);
    REQUIRE(sel3.size() == 2);
    CHECK(sel3[0].Q == 9);
    CHECK(sel3[1].Q == 9);
    CHECK(sel3[0].Y.encode() < sel3[1].Y.encode());

    // deterministic on repeat
    auto sel4 = ev.prov.select_reports(rel.num, 1);
    CHECK(sel3[0].Y.encode() == sel4[0].Y.encode());
    CHECK(sel3[1].Y.encode() == sel4[1].Y.encode());

    CHECK_THROWS_AS(ev.prov.select_reports(9999, 1), GroupError);
}

TEST_CASE("customers open exactly what was reported") {
    Env& e = env();
    RandomSource rng(0x6f70656e);
    Actors a = matched_pair(rng);

    Bytes payload = to_bytes("temperature 18.4C");
    Report rep = a.user.make_report(a.num, payload, 1, 30, rng);
    REQUIRE(e.prov.accept_report(rep).status == ReportStatus::accepted);

    auto sel = e.prov.select_reports(a.num, 1);
    REQUIRE(sel.size() == 1);
    auto opened = a.cust.open_reports(sel);
    REQUIRE(opened.size() == 1);
    CHECK(opened[0].decoded);
    CHECK(opened[0].data == payload);

    // the recovered data hashes back to the report identifier
    CHECK(opened[0].X.equal(rep.X));
    const Report* stored = e.prov.find_report(a.num, 1, rep.Y.encode());
    REQUIRE(stored != nullptr);
    CHECK(opened[0].X.equal(stored->X));

    // a different customer's key opens to an unrelated element
    Actors b = matched_pair(rng);
    std::vector<SelectedReport> borrowed = sel;
    for (SelectedReport& s : borrowed) s.num = b.num;
    auto wrong = b.cust.open_reports(borrowed);
    REQUIRE(wrong.size() == 1);
    CHECK_FALSE(wrong[0].m.equal(opened[0].m));
    CHECK_FALSE(wrong[0].X.equal(rep.X));

    std::vector<SelectedReport> foreign = sel;
    foreign[0].num = 9999;
    CHECK_THROWS_AS(b.cust.open_reports(foreign), GroupError);
}

TEST_CASE("credit updates adjust balances exactly") {
    Env& e = env();
    RandomSource rng(0x637264);
    Actors a = matched_pair(rng);  // P0 = 100, gamma = 1.0

    Report rep = a.user.make_report(a.num, to_bytes("7 of 9"), 1, 7, rng);
    REQUIRE(e.prov.accept_report(rep).status == ReportStatus::accepted);

    // eps = 0.5, Q = 7: theta = INT(3.5) = 4
    TrustResponse tr{fixed_from_double(0.5), rep.Y};
    CreditUpdate upd = e.prov.assign_credit(a.num, 1, tr, rng);
    CHECK(upd.theta == 4);
    a.user.apply_credit(upd);
    CHECK(a.user.balance() == 104);
    CHECK(a.user.credential().provider_anchor);

    // the re-anchored credential keeps reporting
    Report rep2 = a.user.make_report(a.num, to_bytes("still 7"), 2, 7, rng);
    REQUIRE(e.prov.accept_report(rep2).status == ReportStatus::accepted);

    // a zero trust level refreshes the credential without moving the balance
    SourceElement old_B = a.user.credential().B;
    CreditUpdate zero = e.prov.assign_credit(a.num, 2, TrustResponse{0, rep2.Y}, rng);
    CHECK(zero.theta == 0);
    a.user.apply_credit(zero);
    CHECK(a.user.balance() == 104);
    CHECK_FALSE(a.user.credential().B.equal(old_B));

    // adversarial updates
    Report rep3 = a.user.make_report(a.num, to_bytes("third"), 3, 7, rng);
    REQUIRE(e.prov.accept_report(rep3).status == ReportStatus::accepted);
    CHECK_THROWS_AS(e.prov.assign_credit(a.num, 3, TrustResponse{fixed_from_double(1.5), rep3.Y}, rng),
                    GroupError);  // eps beyond gamma
    CHECK_THROWS_AS(
        e.prov.assign_credit(a.num, 3, TrustResponse{0, e.G.hash_to_gt("nope", {})}, rng),
        GroupError);  // unknown report
    CreditUpdate good = e.prov.assign_credit(a.num, 3, TrustResponse{fixed_from_double(-0.5), rep3.Y}, rng);
    CHECK(good.theta == -4);
    CreditUpdate bent = good;
    bent.theta = 0;
    CHECK_THROWS_AS(a.user.apply_credit(bent), GroupError);
    CreditUpdate bent2 = good;
    bent2.t2 = bent2.t2.add(e.G.scalar_one());
    CHECK_THROWS_AS(a.user.apply_credit(bent2), GroupError);
    a.user.apply_credit(good);
    CHECK(a.user.balance() == 100);
    CHECK_THROWS_AS(a.user.apply_credit(good), GroupError);  // nothing pending
}

TEST_CASE("penalties clamp the balance at zero") {
    Env& e = env();
    RandomSource rng(0x636c616d);
    Actors a = matched_pair(rng, 10, 2 * kFixedOne);  // P0 = 10, gamma = 2.0

    Report rep = a.user.make_report(a.num, to_bytes("bogus"), 1, 8, rng);
    REQUIRE(e.prov.accept_report(rep).status == ReportStatus::accepted);
    CreditUpdate upd =
        e.prov.assign_credit(a.num, 1, TrustResponse{fixed_from_double(-2.0), rep.Y}, rng);
    CHECK(upd.theta == -16);
    a.user.apply_credit(upd);
    CHECK(a.user.balance() == 0);
    CHECK(a.user.balance_clamped());
    // with nothing to stake, further reporting is impossible
    CHECK_THROWS_AS(a.user.make_report(a.num, to_bytes("x"), 2, 1, rng), GroupError);
}

TEST_CASE("a stale credential still satisfies the report proof") {
    Env& e = env();
    RandomSource rng(0x7374616c);
    Actors a = matched_pair(rng);
    Credential stale = a.user.credential();

    Report rep = a.user.make_report(a.num, to_bytes("before"), 1, 20, rng);
    REQUIRE(e.prov.accept_report(rep).status == ReportStatus::accepted);
    CreditUpdate upd =
        e.prov.assign_credit(a.num, 1, TrustResponse{fixed_from_double(1.0), rep.Y}, rng);
    a.user.apply_credit(upd);
    REQUIRE(a.user.balance() == 120);

    /* The provider cannot tell a pre-update credential from the live one;
     * nothing revokes the old (B, f, t).  Rebuild a report from the stale
     * copy: it verifies under the issue-time anchor and is accepted. */
    const SourceElement& u = a.user.matched_tasks().at(a.num).u;
    Bytes data = to_bytes("after, on stale paper");
    TargetElement m = gt_encode_payload(e.G, data);
    Report old;
    old.num = a.num;
    old.tau = 9;
    old.Q = 20;
    PreCiphertext ct = pre_encrypt(e.G, PreParams{e.su.pp.ab.g, e.su.pp.Gt}, m, u, rng);
    old.D = ct.head_src;
    old.Dp = ct.body;
    Scalar tf = e.G.random_scalar(rng);
    Scalar P = e.G.scalar_from_i64(stale.P);
    const CreditBases& cb = e.su.pp.cb;
    old.Cp = cb.h1.exp(tf).mul(cb.h2.exp(stale.a)).mul(cb.h3.exp(stale.I)).mul(cb.h4.exp(P));
    Bytes num_be(8, 0);
    for (int i = 0; i < 8; ++i) num_be[i] = uint8_t(a.num >> (8 * (7 - i)));
    Bytes tau_be(8, 0);
    tau_be[7] = 9;
    old.X = e.G.hash_to_scalar("mcs/report/x", {num_be, m.encode(), tau_be});
    Scalar v = e.G.prf(stale.a, {num_be, a.user.identity(), tau_be});
    old.Y = e.su.pp.H.exp(v);
    old.Z = stale.egA.mul(e.su.pp.Gcal.exp(old.X.mul(v)));
    SpkWitness w{stale.B, stale.f, stale.t, tf, stale.a, stale.I, P, v};
    SpkStatement st{old.Cp, e.G.scalar_from_i64(old.Q), old.X, old.Y, old.Z, num_be};
    old.spk = prove_spk(e.G, e.su.pp.sb, e.su.pp.rp, e.su.pp.tab, e.su.pp.Th, e.su.pp.tab.K0,
                        w, st, report_context(e.G, old), rng);
    CHECK(e.prov.accept_report(old).status == ReportStatus::accepted);
}

TEST_CASE("record store round trips and rejects corruption") {
    GroupContext G(Profile::p160);
    RandomSource seedr(77);
    ServiceSetup su = service_setup(G, 16, GridRegion(2, 2), seedr);
    TrustAuthority ta(G, su.pp, su.sk.alpha);
    RandomSource rng(0x7265636f);

    User u1(G, su.pp, to_bytes("store/u1"));
    User u2(G, su.pp, to_bytes("store/u2"));
    u1.finish_registration(ta.register_party(u1.begin_registration(rng), 30, rng));
    u2.finish_registration(ta.register_party(u2.begin_registration(rng), 40, rng));

    std::string path = "ta_records.bin";
    ta.save_records(path);

    TrustAuthority fresh(G, su.pp, su.sk.alpha);
    CHECK(fresh.load_records(path) == 2);
    CHECK(fresh.record_count() == 2);
    CHECK(fresh.trace(u1.credential().egA) == to_bytes("store/u1"));
    CHECK(fresh.trace(u2.credential().egA) == to_bytes("store/u2"));

    // loading the same rows twice trips the duplicate check
    CHECK_THROWS_AS(fresh.load_records(path), GroupError);

    // truncated rows are rejected
    {
        std::ifstream in(path, std::ios::binary);
        std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(all.data(), std::streamsize(all.size() - 3));
    }
    TrustAuthority broken(G, su.pp, su.sk.alpha);
    CHECK_THROWS_AS(broken.load_records(path), GroupError);
    CHECK_THROWS_AS(broken.load_records("no_such_file.bin"), GroupError);
    std::remove(path.c_str());
}
