#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "mcs/bgn.hpp"

using namespace mcs;

namespace {

// Exact primality for the test sizes, independent of the library's check.
bool prime_by_trial_division(uint64_t v) {
    if (v < 2) return false;
    for (uint64_t d = 2; d * d <= v; ++d)
        if (v % d == 0) return false;
    return true;
}

EcA mul_pt(const FpCtx& C, const EcA& P, uint64_t k) {
    if (P.inf || k == 0) return EcA{};
    EcJ J, R;
    ecj_from_affine(C, J, P);
    mp_limb_t kl = k;
    ec_mul(C, R, J, &kl, 1);
    if (ecj_is_inf(C, R)) return EcA{};
    EcA out;
    ec_normalize(C, out, R);
    return out;
}

bool pt_equal(const FpCtx& C, const EcA& a, const EcA& b) {
    if (a.inf || b.inf) return a.inf == b.inf;
    return fe_equal(C, a.x, b.x) && fe_equal(C, a.y, b.y);
}

const uint64_t kMmax = 1024;

const BgnParams& params() {
    static BgnParams pp = [] {
        RandomSource rng(Bytes{'b', 'g', 'n', 's'});
        return bgn_setup(32, kMmax, rng);
    }();
    return pp;
}

}  // namespace

TEST_CASE("setup invariants") {
    const BgnParams& pp = params();
    const FpCtx& C = pp.curve().F;

    CHECK(prime_by_trial_division(pp.q1()));
    CHECK(prime_by_trial_division(pp.q2()));
    CHECK(pp.q1() != pp.q2());
    CHECK((pp.q1() >> 31) == 1);  // exact 32-bit primes
    CHECK((pp.q2() >> 31) == 1);
    CHECK(pp.n() == pp.q1() * pp.q2());
    CHECK(pp.max_value() == kMmax);
    CHECK(pp.bound() == 2 * kMmax * kMmax);  // 2^21

    CHECK(!pp.l().inf);
    CHECK(!mul_pt(C, pp.l(), pp.q1()).inf);
    CHECK(!mul_pt(C, pp.l(), pp.q2()).inf);
    CHECK(mul_pt(C, pp.l(), pp.n()).inf);

    // l1 = [q2] l has order q1
    CHECK(pt_equal(C, pp.l1(), mul_pt(C, pp.l(), pp.q2())));
    CHECK(!pp.l1().inf);
    CHECK(mul_pt(C, pp.l1(), pp.q1()).inf);

    Fe2 e;
    pairing(pp.curve(), e, pp.l(), pp.l());
    CHECK(!fe2_is_one(C, e));

    BgnParams pub = pp.public_part();
    CHECK(pp.has_secret());
    CHECK(!pub.has_secret());
    CHECK(pub.n() == pp.n());
    CHECK_THROWS_AS(pub.q1(), BgnError);
    RandomSource rng(Bytes{'p', 'u', 'b'});
    CHECK_THROWS_AS(bgn_decrypt(pub, bgn_encrypt(pub, 5, rng)), BgnError);

    RandomSource srng(Bytes{'s', 'e', 't'});
    CHECK_THROWS_AS(bgn_setup(15, 16, srng), BgnError);
    CHECK_THROWS_AS(bgn_setup(33, 16, srng), BgnError);
    CHECK_THROWS_AS(bgn_setup(32, 0, srng), BgnError);
    // 2*(2*1024^2) needs 23 bits, too wide for 16-bit primes
    CHECK_THROWS_AS(bgn_setup(16, 1024, srng), BgnError);

    BgnParams small = bgn_setup(16, 32, srng);
    CHECK(bgn_decrypt(small, bgn_encrypt(small, 7, srng)) == 7);
}

TEST_CASE("encrypt decrypt round trip") {
    const BgnParams& pp = params();
    const FpCtx& C = pp.curve().F;
    RandomSource rng(Bytes{'r', 't'});

    for (int t = 0; t < 100; ++t) {
        uint64_t v = rng.below(kMmax + 1);
        CHECK(bgn_decrypt(pp, bgn_encrypt(pp, v, rng)) == int64_t(v));
    }
    CHECK(bgn_decrypt(pp, bgn_encrypt(pp, 0, rng)) == 0);
    CHECK(bgn_decrypt(pp, bgn_encrypt(pp, kMmax, rng)) == int64_t(kMmax));
    CHECK_THROWS_AS(bgn_encrypt(pp, kMmax + 1, rng), BgnError);

    // a zero encryption is a pure blinding element of order q1
    BgnCiphertext z = bgn_encrypt(pp, 0, rng);
    CHECK(mul_pt(C, z.p, pp.q1()).inf);
}

TEST_CASE("ciphertexts are blinded") {
    const BgnParams& pp = params();
    RandomSource rng(Bytes{'b', 'l'});
    std::set<Bytes> seen;
    for (int t = 0; t < 100; ++t) seen.insert(bgn_encode(pp, bgn_encrypt(pp, 42, rng)));
    CHECK(seen.size() == 100);
}

TEST_CASE("additive homomorphism") {
    const BgnParams& pp = params();
    RandomSource rng(Bytes{'h', 'o', 'm'});

    for (int t = 0; t < 100; ++t) {
        uint64_t v1 = rng.below(kMmax + 1), v2 = rng.below(kMmax + 1);
        BgnCiphertext c1 = bgn_encrypt(pp, v1, rng);
        BgnCiphertext c2 = bgn_encrypt(pp, v2, rng);
        CHECK(bgn_decrypt(pp, bgn_add(pp, c1, c2)) == int64_t(v1 + v2));
        CHECK(bgn_decrypt(pp, bgn_sub(pp, c1, c2)) == int64_t(v1) - int64_t(v2));
    }

    BgnCiphertext a = bgn_encrypt(pp, 3, rng);
    BgnCiphertext chain = bgn_add(pp, bgn_add(pp, a, a), a);
    CHECK(bgn_decrypt(pp, chain) == 9);

    BgnCiphertext tgt = bgn_distance_ct(pp, a, a, a, a);
    CHECK_THROWS_AS(bgn_add(pp, a, tgt), BgnError);
    CHECK_THROWS_AS(bgn_sub(pp, tgt, a), BgnError);
    // target-level addition keeps the homomorphism
    CHECK(bgn_decrypt(pp, bgn_add(pp, tgt, tgt)) == 0);
}

TEST_CASE("squared distance ciphertext") {
    const BgnParams& pp = params();
    RandomSource rng(Bytes{'d', 'i', 's', 't'});

    auto enc = [&](uint64_t v) { return bgn_encrypt(pp, v, rng); };

    BgnCiphertext same = bgn_distance_ct(pp, enc(77), enc(901), enc(77), enc(901));
    CHECK(bgn_decrypt(pp, same) == 0);

    BgnCiphertext d = bgn_distance_ct(pp, enc(5), enc(5), enc(8), enc(9));
    CHECK(bgn_decrypt(pp, d) == 25);

    for (int t = 0; t < 100; ++t) {
        int64_t cx = int64_t(rng.below(kMmax + 1)), cy = int64_t(rng.below(kMmax + 1));
        int64_t ux = int64_t(rng.below(kMmax + 1)), uy = int64_t(rng.below(kMmax + 1));
        BgnCiphertext z = bgn_distance_ct(pp, enc(uint64_t(cx)), enc(uint64_t(cy)),
                                          enc(uint64_t(ux)), enc(uint64_t(uy)));
        CHECK(bgn_decrypt(pp, z) == (cx - ux) * (cx - ux) + (cy - uy) * (cy - uy));
    }

    BgnCiphertext tgt = bgn_distance_ct(pp, enc(1), enc(1), enc(1), enc(1));
    CHECK_THROWS_AS(bgn_distance_ct(pp, tgt, enc(1), enc(1), enc(1)), BgnError);
}

TEST_CASE("containment decision") {
    const BgnParams& pp = params();
    RandomSource rng(Bytes{'d', 'e', 'c'});

    auto enc = [&](uint64_t v) { return bgn_encrypt(pp, v, rng); };
    auto zb = [&](uint64_t cx, uint64_t cy, uint64_t ux, uint64_t uy) {
        return bgn_distance_ct(pp, enc(cx), enc(cy), enc(ux), enc(uy));
    };

    CHECK(bgn_decide(pp, zb(0, 0, 3, 4), enc(6)));    // 25 < 36
    CHECK(!bgn_decide(pp, zb(0, 0, 3, 4), enc(5)));   // 25 < 25 fails: strict
    CHECK(!bgn_decide(pp, zb(0, 0, 0, 6), enc(6)));   // 36 < 36 fails
    CHECK(!bgn_decide(pp, zb(0, 0, 0, 0), enc(0)));   // R = 0 never contains
    CHECK(!bgn_decide(pp, zb(0, 0, 1, 0), enc(0)));
    CHECK(bgn_decide(pp, zb(10, 10, 10, 10), enc(1)));  // 0 < 1

    BgnCiphertext z = zb(0, 0, 1, 1), r = enc(4);
    CHECK_THROWS_AS(bgn_decide(pp, r, r), BgnError);
    CHECK_THROWS_AS(bgn_decide(pp, z, z), BgnError);
}

TEST_CASE("discrete log bound is enforced") {
    const BgnParams& pp = params();
    RandomSource rng(Bytes{'o', 'o', 'b'});

    BgnCiphertext step = bgn_encrypt(pp, kMmax, rng);
    BgnCiphertext acc = step;
    for (uint64_t k = 1; k * kMmax <= pp.bound() + kMmax; ++k) acc = bgn_add(pp, acc, step);
    CHECK_THROWS_AS(bgn_decrypt(pp, acc), BgnError);

    // squaring the oversized value through a pairing overruns the target side
    BgnCiphertext z = bgn_distance_ct(pp, acc, step, bgn_encrypt(pp, 0, rng), step);
    CHECK_THROWS_AS(bgn_decrypt(pp, z), BgnError);
}

TEST_CASE("wire form") {
    const BgnParams& pp = params();
    const size_t w = pp.curve().F.bytes;
    RandomSource rng(Bytes{'w', 'f'});

    BgnCiphertext c = bgn_encrypt(pp, 321, rng);
    Bytes enc = bgn_encode(pp, c);
    CHECK(enc.size() == 2 + 2 * w);
    BgnCiphertext dec = bgn_decode(pp, enc);
    CHECK(bgn_decrypt(pp, dec) == 321);
    CHECK(bgn_encode(pp, dec) == enc);

    BgnCiphertext inf = bgn_sub(pp, c, c);
    CHECK(inf.p.inf);
    Bytes ienc = bgn_encode(pp, inf);
    CHECK(bgn_decode(pp, ienc).p.inf);
    CHECK(bgn_decrypt(pp, bgn_decode(pp, ienc)) == 0);

    BgnCiphertext t = bgn_distance_ct(pp, c, c, bgn_encrypt(pp, 320, rng), c);
    Bytes tenc = bgn_encode(pp, t);
    CHECK(tenc.size() == 1 + 2 * w);
    CHECK(bgn_decrypt(pp, bgn_decode(pp, tenc)) == 1);

    Bytes bad = enc;
    bad[0] = 7;
    CHECK_THROWS_AS(bgn_decode(pp, bad), BgnError);
    CHECK_THROWS_AS(bgn_decode(pp, Bytes{}), BgnError);
    CHECK_THROWS_AS(bgn_decode(pp, Bytes(enc.begin(), enc.end() - 1)), BgnError);
    bad = enc;
    bad.push_back(0);
    CHECK_THROWS_AS(bgn_decode(pp, bad), BgnError);

    bad = enc;  // coordinate >= q
    for (size_t i = 2; i < 2 + w; ++i) bad[i] = 0xff;
    CHECK_THROWS_AS(bgn_decode(pp, bad), BgnError);

    bad = enc;  // knock the point off the curve
    bad.back() ^= 1;
    CHECK_THROWS_AS(bgn_decode(pp, bad), BgnError);

    bad = enc;  // (0,0) is on the curve but 2-torsion, outside the odd-order group
    std::fill(bad.begin() + 2, bad.end(), 0);
    bad[1] = 1;
    CHECK_THROWS_AS(bgn_decode(pp, bad), BgnError);

    bad = tenc;  // perturbed target values leave the pairing subgroup
    bad.back() ^= 1;
    CHECK_THROWS_AS(bgn_decode(pp, bad), BgnError);

    // inf flag with nonzero coordinates
    bad = ienc;
    bad[5] = 9;
    CHECK_THROWS_AS(bgn_decode(pp, bad), BgnError);
}

TEST_CASE("pipeline matches the plaintext predicate") {
    const BgnParams& pp = params();
    RandomSource rng(Bytes{'p', 'i', 'p', 'e'});

    auto enc = [&](uint64_t v) { return bgn_encrypt(pp, v, rng); };
    size_t mismatches = 0, inside = 0;
    for (int t = 0; t < 2000; ++t) {
        int64_t cx = int64_t(rng.below(kMmax + 1)), cy = int64_t(rng.below(kMmax + 1));
        int64_t ux = int64_t(rng.below(kMmax + 1)), uy = int64_t(rng.below(kMmax + 1));
        int64_t R = int64_t(rng.below(kMmax + 1));
        BgnCiphertext z =
            bgn_distance_ct(pp, enc(uint64_t(cx)), enc(uint64_t(cy)), enc(uint64_t(ux)),
                            enc(uint64_t(uy)));
        bool got = bgn_decide(pp, z, enc(uint64_t(R)));
        int64_t d2 = (cx - ux) * (cx - ux) + (cy - uy) * (cy - uy);
        bool want = d2 < R * R;
        if (got != want) ++mismatches;
        if (want) ++inside;
    }
    CHECK(mismatches == 0);
    CHECK(inside > 100);  // the sample exercises both outcomes
}

TEST_CASE("setup and encryption are deterministic under a seed") {
    RandomSource a(Bytes{'d', 'e', 't', 'b'});
    RandomSource b(Bytes{'d', 'e', 't', 'b'});
    BgnParams p1 = bgn_setup(32, 64, a);
    BgnParams p2 = bgn_setup(32, 64, b);
    CHECK(p1.n() == p2.n());
    CHECK(p1.q1() == p2.q1());
    CHECK(pt_equal(p1.curve().F, p1.l(), p2.l()));
    CHECK(bgn_encode(p1, bgn_encrypt(p1, 11, a)) == bgn_encode(p2, bgn_encrypt(p2, 11, b)));
}
