#pragma once

#include <gmp.h>

#include <array>
#include <cstdint>

#include "mcs/bytes.hpp"

namespace mcs {

// Large enough for a 1536-bit base field on 64-bit limbs.
constexpr int kMaxLimbs = 24;
using Limbs = std::array<mp_limb_t, kMaxLimbs>;

// Field element in Montgomery form. Meaningful only together with its FpCtx;
// all elements of one field share the context's active limb count.
struct Fe {
    Limbs v{};
};

// Immutable description of one odd-modulus field (base field or scalar field).
// Montgomery arithmetic with R = 2^(64n).
struct FpCtx {
    int n = 0;             // active limbs
    unsigned bits = 0;     // bit length of the modulus
    size_t bytes = 0;      // canonical byte width = ceil(bits/8)
    Limbs mod{};
    Limbs rr{};            // R^2 mod m
    Limbs modm2{};         // m - 2 (Fermat inversion exponent)
    Limbs sqrt_exp{};      // (m+1)/4, valid when m ≡ 3 (mod 4)
    Limbs legendre_exp{};  // (m-1)/2
    Fe one{};              // R mod m
    mp_limb_t n0inv = 0;   // -m^{-1} mod 2^64

    void init(const mpz_t m);
    void init_from_bytes(const Bytes& be);
};

void mont_mul(const FpCtx& C, mp_limb_t* r, const mp_limb_t* a, const mp_limb_t* b);

inline void fe_mul(const FpCtx& C, Fe& r, const Fe& a, const Fe& b) {
    mont_mul(C, r.v.data(), a.v.data(), b.v.data());
}

inline void fe_sqr(const FpCtx& C, Fe& r, const Fe& a) {
    mont_mul(C, r.v.data(), a.v.data(), a.v.data());
}

inline void fe_add(const FpCtx& C, Fe& r, const Fe& a, const Fe& b) {
    mp_limb_t cy = mpn_add_n(r.v.data(), a.v.data(), b.v.data(), C.n);
    if (cy || mpn_cmp(r.v.data(), C.mod.data(), C.n) >= 0)
        mpn_sub_n(r.v.data(), r.v.data(), C.mod.data(), C.n);
}

inline void fe_sub(const FpCtx& C, Fe& r, const Fe& a, const Fe& b) {
    mp_limb_t bw = mpn_sub_n(r.v.data(), a.v.data(), b.v.data(), C.n);
    if (bw) mpn_add_n(r.v.data(), r.v.data(), C.mod.data(), C.n);
}

inline bool fe_is_zero(const FpCtx& C, const Fe& a) {
    return mpn_zero_p(a.v.data(), C.n);
}

inline void fe_neg(const FpCtx& C, Fe& r, const Fe& a) {
    if (fe_is_zero(C, a)) {
        r = a;
    } else {
        mpn_sub_n(r.v.data(), C.mod.data(), a.v.data(), C.n);
    }
}

inline bool fe_equal(const FpCtx& C, const Fe& a, const Fe& b) {
    return mpn_cmp(a.v.data(), b.v.data(), C.n) == 0;
}

inline void fe_double(const FpCtx& C, Fe& r, const Fe& a) { fe_add(C, r, a, a); }

// r = base^e where e is a little-endian limb array (plain integer, not Montgomery).
void fe_pow(const FpCtx& C, Fe& r, const Fe& base, const mp_limb_t* e, int elimbs);
void fe_inv(const FpCtx& C, Fe& r, const Fe& a);

// Square root for m ≡ 3 (mod 4); returns false when a is not a square.
bool fe_sqrt(const FpCtx& C, Fe& r, const Fe& a);
bool fe_is_square(const FpCtx& C, const Fe& a);

void fe_from_u64(const FpCtx& C, Fe& r, uint64_t v);
void fe_from_mpz(const FpCtx& C, Fe& r, const mpz_t v);
void fe_to_mpz(const FpCtx& C, mpz_t out, const Fe& a);

// Canonical (non-Montgomery) residue, little-endian limbs.
Limbs fe_canonical(const FpCtx& C, const Fe& a);
bool fe_canonical_is_odd(const FpCtx& C, const Fe& a);

// Fixed-width big-endian encoding of the canonical residue.
void fe_to_bytes(const FpCtx& C, Bytes& out, const Fe& a);
// Rejects inputs of the wrong width or value ≥ modulus.
bool fe_from_bytes(const FpCtx& C, Fe& r, const uint8_t* p, size_t len);

// Plain integer comparison helpers on little-endian limb arrays.
int limbs_cmp(const Limbs& a, const Limbs& b, int n);
bool limbs_is_zero(const Limbs& a, int n);
unsigned limbs_bits(const mp_limb_t* a, int n);

// Big-endian byte conversions for arbitrary mpz values.
void mpz_from_bytes(mpz_t r, const uint8_t* p, size_t len);
Bytes mpz_to_bytes(const mpz_t v, size_t width);

}  // namespace mcs
