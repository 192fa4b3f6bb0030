#include "mcs/bgn.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace mcs {

namespace {

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
    return uint64_t((unsigned __int128)a * b % m);
}

uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m) {
    uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

constexpr uint64_t kMrBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

// Deterministic Miller-Rabin, exact below 2^64 with the fixed base set.
bool is_prime_u64(uint64_t v) {
    if (v < 2) return false;
    for (uint64_t p : kMrBases)
        if (v % p == 0) return v == p;
    uint64_t d = v - 1;
    int s = 0;
    while (!(d & 1)) {
        d >>= 1;
        ++s;
    }
    for (uint64_t a : kMrBases) {
        uint64_t x = powmod_u64(a, d, v);
        if (x == 1 || x == v - 1) continue;
        bool composite = true;
        for (int i = 1; i < s && composite; ++i) {
            x = mulmod_u64(x, x, v);
            if (x == v - 1) composite = false;
        }
        if (composite) return false;
    }
    return true;
}

uint64_t random_prime(unsigned bits, RandomSource& rng) {
    for (;;) {
        uint64_t v = rng.u64();
        if (bits < 64) v &= (1ull << bits) - 1;
        v |= 1ull << (bits - 1);
        v |= 1;
        if (is_prime_u64(v)) return v;
    }
}

Bytes u64_be(uint64_t v) {
    Bytes out(8);
    for (int i = 7; i >= 0; --i) {
        out[size_t(i)] = uint8_t(v);
        v >>= 8;
    }
    return out;
}

EcA ec_mul_u64(const FpCtx& C, const EcA& P, uint64_t k) {
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

EcA ec_neg_a(const FpCtx& C, const EcA& P) {
    EcA r = P;
    if (!r.inf) fe_neg(C, r.y, P.y);
    return r;
}

// Affine addition with the degenerate cases spelled out.
EcA ec_add_a(const FpCtx& C, const EcA& a, const EcA& b) {
    if (a.inf) return b;
    if (b.inf) return a;
    EcJ J, R;
    ecj_from_affine(C, J, a);
    if (fe_equal(C, a.x, b.x)) {
        if (!fe_equal(C, a.y, b.y) || fe_is_zero(C, a.y)) return EcA{};  // b = -a
        ec_dbl(C, R, J);
    } else {
        ec_add_mixed(C, R, J, b);
    }
    if (ecj_is_inf(C, R)) return EcA{};
    EcA out;
    ec_normalize(C, out, R);
    return out;
}

std::string point_key(const FpCtx& C, const EcA& P) {
    if (P.inf) return std::string(1, '\0');
    Bytes bx, by;
    fe_to_bytes(C, bx, P.x);
    fe_to_bytes(C, by, P.y);
    std::string k(bx.begin(), bx.end());
    k.append(by.begin(), by.end());
    return k;
}

std::string gt_key(const FpCtx& C, const Fe2& z) {
    Bytes ba, bb;
    fe_to_bytes(C, ba, z.a);
    fe_to_bytes(C, bb, z.b);
    std::string k(ba.begin(), ba.end());
    k.append(bb.begin(), bb.end());
    return k;
}

uint64_t bsgs_steps(uint64_t bound) {
    auto s = uint64_t(std::sqrt(double(bound + 1)));
    while (s * s < bound + 1) ++s;
    return std::max<uint64_t>(s, 1);
}

}  // namespace

uint64_t BgnParams::q1() const {
    if (!sec_) throw BgnError("bgn: secret part required");
    return sec_->q1;
}

uint64_t BgnParams::q2() const {
    if (!sec_) throw BgnError("bgn: secret part required");
    return sec_->q2;
}

BgnParams BgnParams::public_part() const {
    BgnParams p = *this;
    p.sec_.reset();
    return p;
}

BgnParams bgn_setup(unsigned lambda_bits, uint64_t m_max, RandomSource& rng) {
    if (lambda_bits < 16 || lambda_bits > 32)
        throw BgnError("bgn: lambda outside the test profile range");
    if (m_max == 0) throw BgnError("bgn: max value must be positive");

    auto core = std::make_shared<BgnParams::Core>();
    auto sec = std::make_shared<BgnParams::Secret>();
    sec->q1 = random_prime(lambda_bits, rng);
    do {
        sec->q2 = random_prime(lambda_bits, rng);
    } while (sec->q2 == sec->q1);
    core->n = sec->q1 * sec->q2;
    core->m_max = m_max;
    core->bound = 2 * m_max * m_max;
    // symmetric-range residues must be unique inside either prime subgroup
    if (2 * core->bound >= std::min(sec->q1, sec->q2))
        throw BgnError("bgn: decryption bound too large for lambda");

    core->cv = make_pairing_curve(u64_be(core->n), 192);
    const FpCtx& C = core->cv.F;

    // full-order generator whose self-pairing survives both projections
    EcA eb;
    Fe2 gb;
    for (uint64_t salt = 0;; ++salt) {
        EcA cand = hash_to_point(core->cv, "mcs/bgn/gen", {u64_be(salt)});
        eb = ec_mul_u64(C, cand, sec->q1);
        if (eb.inf || ec_mul_u64(C, cand, sec->q2).inf) continue;
        Fe2 e;
        pairing(core->cv, e, cand, cand);
        mp_limb_t q1l = sec->q1, q2l = sec->q2;
        Fe2 eq2;
        fe2_pow(C, gb, e, &q1l, 1);
        fe2_pow(C, eq2, e, &q2l, 1);
        if (fe2_is_one(C, gb) || fe2_is_one(C, eq2)) continue;
        core->l = cand;
        break;
    }
    core->l1 = ec_mul_u64(C, core->l, sec->q2);

    const uint64_t steps = bsgs_steps(core->bound);
    {
        auto& t = sec->ec;
        t.base = eb;
        t.steps = steps;
        EcA acc;  // point at infinity
        for (uint64_t j = 0; j < steps; ++j) {
            t.baby.emplace(point_key(C, acc), uint32_t(j));
            acc = ec_add_a(C, acc, t.base);
        }
        t.giant = ec_neg_a(C, ec_mul_u64(C, t.base, steps));
    }
    {
        auto& t = sec->gt;
        t.base = gb;
        t.steps = steps;
        Fe2 acc;
        fe2_set_one(C, acc);
        for (uint64_t j = 0; j < steps; ++j) {
            t.baby.emplace(gt_key(C, acc), uint32_t(j));
            fe2_mul(C, acc, acc, t.base);
        }
        Fe2 gs;
        mp_limb_t sl = steps;
        fe2_pow(C, gs, t.base, &sl, 1);
        fe2_conj(C, t.giant, gs);  // target subgroup is unitary: conj = inverse
    }

    BgnParams pp;
    pp.core_ = std::move(core);
    pp.sec_ = std::move(sec);
    return pp;
}

BgnCiphertext bgn_encrypt(const BgnParams& pp, uint64_t value, RandomSource& rng) {
    if (value > pp.max_value()) throw BgnError("bgn: plaintext out of bound");
    const FpCtx& C = pp.curve().F;
    uint64_t r = rng.below(pp.n());
    BgnCiphertext c;
    c.level = BgnLevel::source;
    c.p = ec_add_a(C, ec_mul_u64(C, pp.l(), value), ec_mul_u64(C, pp.l1(), r));
    return c;
}

BgnCiphertext bgn_add(const BgnParams& pp, const BgnCiphertext& a, const BgnCiphertext& b) {
    if (a.level != b.level) throw BgnError("bgn: level mismatch");
    const FpCtx& C = pp.curve().F;
    BgnCiphertext c;
    c.level = a.level;
    if (a.level == BgnLevel::source)
        c.p = ec_add_a(C, a.p, b.p);
    else
        fe2_mul(C, c.z, a.z, b.z);
    return c;
}

BgnCiphertext bgn_sub(const BgnParams& pp, const BgnCiphertext& a, const BgnCiphertext& b) {
    if (a.level != b.level) throw BgnError("bgn: level mismatch");
    const FpCtx& C = pp.curve().F;
    BgnCiphertext c;
    c.level = a.level;
    if (a.level == BgnLevel::source) {
        c.p = ec_add_a(C, a.p, ec_neg_a(C, b.p));
    } else {
        Fe2 binv;
        fe2_conj(C, binv, b.z);
        fe2_mul(C, c.z, a.z, binv);
    }
    return c;
}

BgnCiphertext bgn_distance_ct(const BgnParams& pp, const BgnCiphertext& Cx,
                              const BgnCiphertext& Cy, const BgnCiphertext& Ux,
                              const BgnCiphertext& Uy) {
    for (const BgnCiphertext* c : {&Cx, &Cy, &Ux, &Uy})
        if (c->level != BgnLevel::source) throw BgnError("bgn: source-level inputs required");
    const FpCtx& C = pp.curve().F;
    EcA dx = ec_add_a(C, Cx.p, ec_neg_a(C, Ux.p));
    EcA dy = ec_add_a(C, Cy.p, ec_neg_a(C, Uy.p));
    Fe2 X, Y;
    pairing(pp.curve(), X, dx, dx);
    pairing(pp.curve(), Y, dy, dy);
    BgnCiphertext out;
    out.level = BgnLevel::target;
    fe2_mul(C, out.z, X, Y);
    return out;
}

int64_t bgn_decrypt(const BgnParams& pp, const BgnCiphertext& c) {
    if (!pp.has_secret()) throw BgnError("bgn: secret part required");
    const FpCtx& C = pp.curve().F;
    const auto& S = *pp.sec_;
    const uint64_t bound = pp.bound();

    /* Representations j + i*steps are unique within the prime subgroup and
     * 2*bound < q1, q2, so the first table hit is the discrete log; a hit
     * beyond the bound means the value is undecryptable. */
    auto scan_ec = [&](EcA w) -> std::optional<uint64_t> {
        for (uint64_t i = 0; i * S.ec.steps <= bound; ++i) {
            auto it = S.ec.baby.find(point_key(C, w));
            if (it != S.ec.baby.end()) {
                uint64_t v = i * S.ec.steps + it->second;
                if (v <= bound) return v;
                return std::nullopt;
            }
            w = ec_add_a(C, w, S.ec.giant);
        }
        return std::nullopt;
    };
    auto scan_gt = [&](Fe2 w) -> std::optional<uint64_t> {
        for (uint64_t i = 0; i * S.gt.steps <= bound; ++i) {
            auto it = S.gt.baby.find(gt_key(C, w));
            if (it != S.gt.baby.end()) {
                uint64_t v = i * S.gt.steps + it->second;
                if (v <= bound) return v;
                return std::nullopt;
            }
            fe2_mul(C, w, w, S.gt.giant);
        }
        return std::nullopt;
    };

    std::optional<uint64_t> pos, neg;
    if (c.level == BgnLevel::source) {
        EcA A = ec_mul_u64(C, c.p, S.q1);
        pos = scan_ec(A);
        if (!pos) neg = scan_ec(ec_neg_a(C, A));
    } else {
        Fe2 w;
        mp_limb_t q1l = S.q1;
        fe2_pow(C, w, c.z, &q1l, 1);
        pos = scan_gt(w);
        if (!pos) {
            Fe2 wi;
            fe2_conj(C, wi, w);
            neg = scan_gt(wi);
        }
    }
    if (pos) return int64_t(*pos);
    if (neg) return -int64_t(*neg);
    throw BgnError("bgn: discrete log out of bound");
}

bool bgn_decide(const BgnParams& pp, const BgnCiphertext& Zp, const BgnCiphertext& CR) {
    if (Zp.level != BgnLevel::target || CR.level != BgnLevel::source)
        throw BgnError("bgn: level mismatch");
    int64_t d2 = bgn_decrypt(pp, Zp);
    int64_t R = bgn_decrypt(pp, CR);
    return (__int128)d2 < (__int128)R * R;  // strict: the boundary is outside
}

Bytes bgn_encode(const BgnParams& pp, const BgnCiphertext& c) {
    const FpCtx& C = pp.curve().F;
    Bytes out;
    out.push_back(uint8_t(c.level));
    if (c.level == BgnLevel::source) {
        out.push_back(c.p.inf ? 0 : 1);
        if (c.p.inf) {
            out.insert(out.end(), 2 * C.bytes, 0);
        } else {
            Bytes bx, by;
            fe_to_bytes(C, bx, c.p.x);
            fe_to_bytes(C, by, c.p.y);
            out.insert(out.end(), bx.begin(), bx.end());
            out.insert(out.end(), by.begin(), by.end());
        }
    } else {
        Bytes ba, bb;
        fe_to_bytes(C, ba, c.z.a);
        fe_to_bytes(C, bb, c.z.b);
        out.insert(out.end(), ba.begin(), ba.end());
        out.insert(out.end(), bb.begin(), bb.end());
    }
    return out;
}

BgnCiphertext bgn_decode(const BgnParams& pp, const Bytes& in) {
    const FpCtx& C = pp.curve().F;
    const size_t w = C.bytes;
    if (in.empty()) throw BgnError("bgn: ciphertext truncated");
    BgnCiphertext c;
    if (in[0] == uint8_t(BgnLevel::source)) {
        if (in.size() != 2 + 2 * w) throw BgnError("bgn: ciphertext length");
        c.level = BgnLevel::source;
        if (in[1] == 0) {
            for (size_t i = 2; i < in.size(); ++i)
                if (in[i]) throw BgnError("bgn: malformed identity encoding");
            c.p = EcA{};
            return c;
        }
        if (in[1] != 1) throw BgnError("bgn: malformed point flag");
        c.p.inf = false;
        if (!fe_from_bytes(C, c.p.x, in.data() + 2, w) ||
            !fe_from_bytes(C, c.p.y, in.data() + 2 + w, w))
            throw BgnError("bgn: coordinate out of field");
        if (!ec_on_curve(C, c.p) || !point_in_subgroup(pp.curve(), c.p))
            throw BgnError("bgn: point outside the group");
        return c;
    }
    if (in[0] == uint8_t(BgnLevel::target)) {
        if (in.size() != 1 + 2 * w) throw BgnError("bgn: ciphertext length");
        c.level = BgnLevel::target;
        if (!fe_from_bytes(C, c.z.a, in.data() + 1, w) ||
            !fe_from_bytes(C, c.z.b, in.data() + 1 + w, w))
            throw BgnError("bgn: coordinate out of field");
        if (!in_target_subgroup(pp.curve(), c.z)) throw BgnError("bgn: value outside the group");
        return c;
    }
    throw BgnError("bgn: unknown level byte");
}

}  // namespace mcs
