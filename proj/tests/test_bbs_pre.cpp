#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mcs/bbs.hpp"
#include "mcs/pre.hpp"

using namespace mcs;

namespace {

const GroupContext& ctx() {
    static GroupContext G(Profile::p160);
    return G;
}

BbsKey test_key(RandomSource& rng, size_t nmsgs) {
    const GroupContext& G = ctx();
    std::vector<SourceElement> gens;
    for (size_t i = 0; i < nmsgs; ++i)
        gens.push_back(G.hash_to_source("bbs-test/gen", {Bytes{uint8_t(i)}}, Side::left));
    return bbs_keygen(G, G.hash_to_source("bbs-test/pairbase", {}, Side::both),
                      G.hash_to_source("bbs-test/base", {}, Side::left), std::move(gens),
                      G.hash_to_source("bbs-test/blind", {}, Side::left), rng);
}

std::vector<Scalar> random_msgs(RandomSource& rng, size_t n) {
    std::vector<Scalar> m;
    for (size_t i = 0; i < n; ++i) m.push_back(ctx().random_scalar(rng));
    return m;
}

}  // namespace

TEST_CASE("bbs completeness over random vectors and keys") {
    const GroupContext& G = ctx();
    RandomSource rng(21);
    for (int t = 0; t < 100; ++t) {
        BbsKey key = test_key(rng, 3);
        std::vector<Scalar> msgs = random_msgs(rng, 3);
        BbsSignature sig = bbs_sign(G, key, msgs, rng);
        CHECK(bbs_verify(G, bbs_public_part(key), msgs, sig));
    }
}

TEST_CASE("bbs signature equals the direct formula evaluation") {
    const GroupContext& G = ctx();
    RandomSource rng(22);
    BbsKey key = test_key(rng, 2);
    std::vector<Scalar> msgs = random_msgs(rng, 2);
    BbsSignature sig = bbs_sign(G, key, msgs, rng);

    // recompute A from (x, e, s, messages) by brute exponentiation
    SourceElement prod =
        key.base.mul(key.gens[0].exp(msgs[0])).mul(key.gens[1].exp(msgs[1])).mul(
            key.blind.exp(sig.s));
    SourceElement want = prod.exp(key.x.add(sig.e).inverse());
    CHECK(want.equal(sig.A));
}

TEST_CASE("bbs binding: any single perturbation breaks verification") {
    const GroupContext& G = ctx();
    RandomSource rng(23);
    BbsKey key = test_key(rng, 3);
    std::vector<Scalar> msgs = random_msgs(rng, 3);
    BbsSignature sig = bbs_sign(G, key, msgs, rng);
    Scalar one = G.scalar_one();

    for (size_t i = 0; i < msgs.size(); ++i) {
        std::vector<Scalar> tampered = msgs;
        tampered[i] = tampered[i].add(one);
        CHECK_FALSE(bbs_verify(G, key, tampered, sig));
    }
    // swap two distinct messages
    if (!msgs[0].equal(msgs[1])) {
        std::vector<Scalar> swapped = msgs;
        std::swap(swapped[0], swapped[1]);
        CHECK_FALSE(bbs_verify(G, key, swapped, sig));
    }
    BbsSignature bad = sig;
    bad.e = bad.e.add(one);
    CHECK_FALSE(bbs_verify(G, key, msgs, bad));
    bad = sig;
    bad.s = bad.s.add(one);
    CHECK_FALSE(bbs_verify(G, key, msgs, bad));
    bad = sig;
    bad.A = bad.A.mul(key.base);
    CHECK_FALSE(bbs_verify(G, key, msgs, bad));

    // cross-key rejection
    BbsKey other = test_key(rng, 3);
    other.gens = key.gens;
    other.base = key.base;
    other.blind = key.blind;
    other.pairbase = key.pairbase;
    other.y = other.pairbase.exp(other.x);
    CHECK_FALSE(bbs_verify(G, other, msgs, sig));

    CHECK_THROWS_AS(bbs_verify(G, key, random_msgs(rng, 2), sig), GroupError);
}

TEST_CASE("bbs blind issuance composes into a full signature") {
    const GroupContext& G = ctx();
    RandomSource rng(24);
    BbsKey key = test_key(rng, 2);  // messages (m0 hidden, m1 issuer-known)

    Scalar s_prime = G.random_scalar(rng);
    Scalar m0 = G.random_scalar(rng);
    Scalar m1 = G.random_scalar(rng);
    // requester commits to the hidden message and its blind share
    SourceElement C = key.blind.exp(s_prime).mul(key.gens[0].exp(m0));

    BbsBlindResult part =
        bbs_blind_sign(G, key, C, {{1, m1}}, BlindIssueAuth{true}, rng);
    BbsSignature sig{part.A, part.e, s_prime.add(part.s2)};
    CHECK(bbs_verify(G, key, {m0, m1}, sig));

    // issuer tampering with the known message breaks the requester's check
    BbsBlindResult bad =
        bbs_blind_sign(G, key, C, {{1, m1.add(G.scalar_one())}}, BlindIssueAuth{true}, rng);
    BbsSignature bad_sig{bad.A, bad.e, s_prime.add(bad.s2)};
    CHECK_FALSE(bbs_verify(G, key, {m0, m1}, bad_sig));

    CHECK_THROWS_AS(bbs_blind_sign(G, key, C, {}, BlindIssueAuth{false}, rng), GroupError);
    CHECK_THROWS_AS(bbs_blind_sign(G, key, C, {{7, m1}}, BlindIssueAuth{true}, rng), GroupError);
}

TEST_CASE("bbs blind issuance: issuer contribution is independent of the hidden share") {
    const GroupContext& G = ctx();
    RandomSource key_rng(25);
    BbsKey key = test_key(key_rng, 2);
    Scalar m0 = G.hash_to_scalar("m0", {}), m1 = G.hash_to_scalar("m1", {});

    // same issuer randomness, two different hidden shares
    Scalar s1 = G.hash_to_scalar("s1", {}), s2 = G.hash_to_scalar("s2", {});
    SourceElement C1 = key.blind.exp(s1).mul(key.gens[0].exp(m0));
    SourceElement C2 = key.blind.exp(s2).mul(key.gens[0].exp(m0));

    RandomSource issuer1(99), issuer2(99);
    BbsBlindResult r1 = bbs_blind_sign(G, key, C1, {{1, m1}}, BlindIssueAuth{true}, issuer1);
    BbsBlindResult r2 = bbs_blind_sign(G, key, C2, {{1, m1}}, BlindIssueAuth{true}, issuer2);

    // (e, s″) drawn identically: no function of the hidden share
    CHECK(r1.e.equal(r2.e));
    CHECK(r1.s2.equal(r2.s2));
    // commitments (the only s′-dependent bytes) differ
    CHECK_FALSE(C1.encode() == C2.encode());
    // both complete to valid signatures
    CHECK(bbs_verify(G, key, {m0, m1}, {r1.A, r1.e, s1.add(r1.s2)}));
    CHECK(bbs_verify(G, key, {m0, m1}, {r2.A, r2.e, s2.add(r2.s2)}));
}

TEST_CASE("pre delegation chain round-trips") {
    const GroupContext& G = ctx();
    RandomSource rng(26);
    PreParams params = pre_params(G, G.hash_to_source("pre-test/g", {}, Side::both));
    PreKeyPair alice = pre_keygen(G, params, rng);
    PreKeyPair bob = pre_keygen(G, params, rng);

    TargetElement m = params.Z.exp(G.random_scalar(rng));
    PreCiphertext c = pre_encrypt(G, params, m, alice.pk, rng);

    SUBCASE("first-level decryption") {
        CHECK(pre_decrypt(G, params, c, alice.sk).equal(m));
    }

    SUBCASE("re-encryption to the delegatee") {
        SourceElement rk = pre_rekey(G, alice.sk, bob.pk);
        // rk = g^{b/a}: pair(pk_a, rk) = pair(g,g)^b
        CHECK(G.pair(alice.pk, rk).equal(params.Z.exp(bob.sk)));
        PreCiphertext c2 = pre_reencrypt(G, c, rk);
        CHECK(pre_decrypt(G, params, c2, bob.sk).equal(m));
        CHECK_FALSE(pre_decrypt(G, params, c2, alice.sk).equal(m));
        CHECK_THROWS_AS(pre_reencrypt(G, c2, rk), GroupError);
    }

    SUBCASE("self-delegation key is the base") {
        SourceElement rk = pre_rekey(G, alice.sk, alice.pk);
        CHECK(rk.equal(params.g));
    }

    SUBCASE("wrong re-encryption key yields a different plaintext") {
        PreKeyPair carol = pre_keygen(G, params, rng);
        SourceElement rk_wrong = pre_rekey(G, carol.sk, bob.pk);
        PreCiphertext c2 = pre_reencrypt(G, c, rk_wrong);
        CHECK_FALSE(pre_decrypt(G, params, c2, bob.sk).equal(m));
    }

    SUBCASE("probabilistic encryption") {
        for (int i = 0; i < 100; ++i) {
            PreCiphertext c2 = pre_encrypt(G, params, m, alice.pk, rng);
            CHECK_FALSE(c2.head_src.equal(c.head_src));
        }
    }

    SUBCASE("identity message") {
        PreCiphertext cid = pre_encrypt(G, params, G.one(), alice.pk, rng);
        CHECK(pre_decrypt(G, params, cid, alice.sk).is_one());
    }

    SUBCASE("zero keys are rejected") {
        CHECK_THROWS_AS(pre_rekey(G, G.scalar_zero(), bob.pk), GroupError);
        CHECK_THROWS_AS(pre_decrypt(G, params, c, G.scalar_zero()), GroupError);
    }
}
