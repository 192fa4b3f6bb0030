#include "mcs/fp.hpp"

#include <cstring>
#include <stdexcept>

namespace mcs {

namespace {

mp_limb_t inv_limb(mp_limb_t m) {
    // Newton iteration for m^{-1} mod 2^64 (m odd); 3 correct bits double each step.
    mp_limb_t x = m;
    for (int i = 0; i < 5; ++i) x *= 2 - m * x;
    return x;
}

void mpz_to_limbs(Limbs& out, const mpz_t v, int n) {
    out.fill(0);
    if (mpz_size(v) > size_t(n)) throw std::invalid_argument("fp: value exceeds limb budget");
    mpn_copyi(out.data(), mpz_limbs_read(v), mpz_size(v));
}

}  // namespace

void FpCtx::init(const mpz_t m) {
    if (mpz_sgn(m) <= 0 || mpz_even_p(m)) throw std::invalid_argument("fp: modulus must be odd positive");
    n = int((mpz_sizeinbase(m, 2) + GMP_NUMB_BITS - 1) / GMP_NUMB_BITS);
    if (n > kMaxLimbs) throw std::invalid_argument("fp: modulus too wide");
    bits = unsigned(mpz_sizeinbase(m, 2));
    bytes = (bits + 7) / 8;
    mpz_to_limbs(mod, m, n);
    n0inv = mp_limb_t(0) - inv_limb(mod[0]);

    mpz_t t, r;
    mpz_init(t);
    mpz_init(r);
    mpz_setbit(r, mp_bitcnt_t(64) * n);  // R = 2^(64n)
    mpz_mod(t, r, m);
    mpz_to_limbs(one.v, t, n);
    mpz_mul(t, r, r);
    mpz_mod(t, t, m);
    mpz_to_limbs(rr, t, n);

    mpz_sub_ui(t, m, 2);
    mpz_to_limbs(modm2, t, n);
    mpz_add_ui(t, m, 1);
    mpz_fdiv_q_2exp(t, t, 2);
    mpz_to_limbs(sqrt_exp, t, n);
    mpz_sub_ui(t, m, 1);
    mpz_fdiv_q_2exp(t, t, 1);
    mpz_to_limbs(legendre_exp, t, n);
    mpz_clear(t);
    mpz_clear(r);
}

void FpCtx::init_from_bytes(const Bytes& be) {
    mpz_t m;
    mpz_init(m);
    mpz_import(m, be.size(), 1, 1, 1, 0, be.data());
    init(m);
    mpz_clear(m);
}

void mont_mul(const FpCtx& C, mp_limb_t* r, const mp_limb_t* a, const mp_limb_t* b) {
    const int n = C.n;
    mp_limb_t t[2 * kMaxLimbs + 2];
    std::memset(t, 0, sizeof(mp_limb_t) * (size_t(n) * 2 + 2));
    mp_limb_t* tp = t;
    for (int i = 0; i < n; ++i) {
        mp_limb_t cy = mpn_addmul_1(tp, a, n, b[i]);
        mp_limb_t s = tp[n] + cy;
        mp_limb_t c2 = s < cy;
        tp[n] = s;
        tp[n + 1] += c2;

        mp_limb_t m = tp[0] * C.n0inv;
        cy = mpn_addmul_1(tp, C.mod.data(), n, m);
        s = tp[n] + cy;
        c2 = s < cy;
        tp[n] = s;
        tp[n + 1] += c2;
        ++tp;  // tp[0] is now zero; slide the window
    }
    if (tp[n] != 0 || mpn_cmp(tp, C.mod.data(), n) >= 0)
        mpn_sub_n(r, tp, C.mod.data(), n);
    else
        mpn_copyi(r, tp, n);
}

unsigned limbs_bits(const mp_limb_t* a, int n) {
    for (int i = n - 1; i >= 0; --i) {
        if (a[i]) return unsigned(64 * i) + unsigned(64 - __builtin_clzll(a[i]));
    }
    return 0;
}

void fe_pow(const FpCtx& C, Fe& r, const Fe& base, const mp_limb_t* e, int elimbs) {
    unsigned ebits = limbs_bits(e, elimbs);
    if (ebits == 0) {
        r = C.one;
        return;
    }
    // Fixed 4-bit window, most-significant nibble first.
    Fe table[16];
    table[0] = C.one;
    table[1] = base;
    for (int i = 2; i < 16; ++i) fe_mul(C, table[i], table[i - 1], base);

    int top = int((ebits - 1) / 4);
    Fe acc = table[(e[(top * 4) / 64] >> ((top * 4) % 64)) & 0xf];
    for (int w = top - 1; w >= 0; --w) {
        fe_sqr(C, acc, acc);
        fe_sqr(C, acc, acc);
        fe_sqr(C, acc, acc);
        fe_sqr(C, acc, acc);
        unsigned bitpos = unsigned(w * 4);
        mp_limb_t nib = (e[bitpos / 64] >> (bitpos % 64)) & 0xf;
        if (nib) fe_mul(C, acc, acc, table[nib]);
    }
    r = acc;
}

void fe_inv(const FpCtx& C, Fe& r, const Fe& a) {
    if (fe_is_zero(C, a)) throw std::domain_error("fp: inverse of zero");
    fe_pow(C, r, a, C.modm2.data(), C.n);
}

bool fe_is_square(const FpCtx& C, const Fe& a) {
    if (fe_is_zero(C, a)) return true;
    Fe t;
    fe_pow(C, t, a, C.legendre_exp.data(), C.n);
    return fe_equal(C, t, C.one);
}

bool fe_sqrt(const FpCtx& C, Fe& r, const Fe& a) {
    if (fe_is_zero(C, a)) {
        r = a;
        return true;
    }
    Fe s, chk;
    fe_pow(C, s, a, C.sqrt_exp.data(), C.n);
    fe_sqr(C, chk, s);
    if (!fe_equal(C, chk, a)) return false;
    r = s;
    return true;
}

void fe_from_u64(const FpCtx& C, Fe& r, uint64_t v) {
    Fe plain{};
    plain.v[0] = v;
    mont_mul(C, r.v.data(), plain.v.data(), C.rr.data());
}

void fe_from_mpz(const FpCtx& C, Fe& r, const mpz_t v) {
    mpz_t t, m;
    mpz_init(t);
    mpz_init(m);
    mpz_import(m, size_t(C.n), -1, sizeof(mp_limb_t), 0, 0, C.mod.data());
    mpz_mod(t, v, m);
    Fe plain{};
    mpn_copyi(plain.v.data(), mpz_limbs_read(t), mpz_size(t));
    mont_mul(C, r.v.data(), plain.v.data(), C.rr.data());
    mpz_clear(t);
    mpz_clear(m);
}

void fe_to_mpz(const FpCtx& C, mpz_t out, const Fe& a) {
    Limbs plain = fe_canonical(C, a);
    mpz_import(out, size_t(C.n), -1, sizeof(mp_limb_t), 0, 0, plain.data());
}

Limbs fe_canonical(const FpCtx& C, const Fe& a) {
    Fe one_plain{};
    one_plain.v[0] = 1;
    Fe out;
    mont_mul(C, out.v.data(), a.v.data(), one_plain.v.data());
    return out.v;
}

bool fe_canonical_is_odd(const FpCtx& C, const Fe& a) {
    return (fe_canonical(C, a)[0] & 1) != 0;
}

void fe_to_bytes(const FpCtx& C, Bytes& out, const Fe& a) {
    Limbs plain = fe_canonical(C, a);
    size_t start = out.size();
    out.resize(start + C.bytes);
    for (size_t i = 0; i < C.bytes; ++i) {
        size_t byte_ix = C.bytes - 1 - i;  // big-endian output
        out[start + byte_ix] = uint8_t(plain[i / 8] >> (8 * (i % 8)));
    }
}

bool fe_from_bytes(const FpCtx& C, Fe& r, const uint8_t* p, size_t len) {
    if (len != C.bytes) return false;
    Fe plain{};
    for (size_t i = 0; i < len; ++i) {
        size_t byte_ix = len - 1 - i;
        plain.v[i / 8] |= mp_limb_t(p[byte_ix]) << (8 * (i % 8));
    }
    if (mpn_cmp(plain.v.data(), C.mod.data(), C.n) >= 0) return false;
    mont_mul(C, r.v.data(), plain.v.data(), C.rr.data());
    return true;
}

int limbs_cmp(const Limbs& a, const Limbs& b, int n) {
    return mpn_cmp(a.data(), b.data(), n);
}

bool limbs_is_zero(const Limbs& a, int n) { return mpn_zero_p(a.data(), n); }

void mpz_from_bytes(mpz_t r, const uint8_t* p, size_t len) {
    if (len == 0) {
        mpz_set_ui(r, 0);
        return;
    }
    mpz_import(r, len, 1, 1, 1, 0, p);
}

Bytes mpz_to_bytes(const mpz_t v, size_t width) {
    if (mpz_sgn(v) < 0) throw std::invalid_argument("fp: negative value in byte encoding");
    size_t need = (mpz_sizeinbase(v, 2) + 7) / 8;
    if (mpz_sgn(v) == 0) need = 0;
    if (need > width) throw std::invalid_argument("fp: value too wide for byte encoding");
    Bytes out(width, 0);
    if (need) {
        size_t count = 0;
        mpz_export(out.data() + (width - need), &count, 1, 1, 1, 0, v);
    }
    return out;
}

}  // namespace mcs
