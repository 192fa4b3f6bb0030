#pragma once

#include "mcs/fp.hpp"

namespace mcs {

/* F_q^2 = F_q[i]/(i^2+1), valid because every profile uses q = 3 (mod 4).
 * Elements are a + b*i with both coefficients in Montgomery form. */
struct Fe2 {
    Fe a, b;
};

inline void fe2_set_one(const FpCtx& C, Fe2& r) {
    r.a = C.one;
    mpn_zero(r.b.v.data(), C.n);
}

inline bool fe2_is_zero(const FpCtx& C, const Fe2& x) {
    return fe_is_zero(C, x.a) && fe_is_zero(C, x.b);
}

inline bool fe2_is_one(const FpCtx& C, const Fe2& x) {
    return fe_equal(C, x.a, C.one) && fe_is_zero(C, x.b);
}

inline bool fe2_equal(const FpCtx& C, const Fe2& x, const Fe2& y) {
    return fe_equal(C, x.a, y.a) && fe_equal(C, x.b, y.b);
}

inline void fe2_add(const FpCtx& C, Fe2& r, const Fe2& x, const Fe2& y) {
    fe_add(C, r.a, x.a, y.a);
    fe_add(C, r.b, x.b, y.b);
}

inline void fe2_sub(const FpCtx& C, Fe2& r, const Fe2& x, const Fe2& y) {
    fe_sub(C, r.a, x.a, y.a);
    fe_sub(C, r.b, x.b, y.b);
}

inline void fe2_neg(const FpCtx& C, Fe2& r, const Fe2& x) {
    fe_neg(C, r.a, x.a);
    fe_neg(C, r.b, x.b);
}

inline void fe2_conj(const FpCtx& C, Fe2& r, const Fe2& x) {
    r.a = x.a;
    fe_neg(C, r.b, x.b);
}

// Karatsuba: (a+bi)(c+di) = (ac - bd) + ((a+b)(c+d) - ac - bd) i.
inline void fe2_mul(const FpCtx& C, Fe2& r, const Fe2& x, const Fe2& y) {
    Fe ac, bd, s1, s2, cross;
    fe_mul(C, ac, x.a, y.a);
    fe_mul(C, bd, x.b, y.b);
    fe_add(C, s1, x.a, x.b);
    fe_add(C, s2, y.a, y.b);
    fe_mul(C, cross, s1, s2);
    fe_sub(C, cross, cross, ac);
    fe_sub(C, cross, cross, bd);
    fe_sub(C, r.a, ac, bd);
    r.b = cross;
}

// (a+bi)^2 = (a+b)(a-b) + 2ab i.
inline void fe2_sqr(const FpCtx& C, Fe2& r, const Fe2& x) {
    Fe s, d, ab;
    fe_add(C, s, x.a, x.b);
    fe_sub(C, d, x.a, x.b);
    fe_mul(C, ab, x.a, x.b);
    fe_mul(C, r.a, s, d);
    fe_double(C, r.b, ab);
}

// Multiply by a base-field scalar on both coefficients.
inline void fe2_mul_fe(const FpCtx& C, Fe2& r, const Fe2& x, const Fe& k) {
    fe_mul(C, r.a, x.a, k);
    fe_mul(C, r.b, x.b, k);
}

/* Full inversion: (a+bi)^-1 = (a - bi)/(a^2 + b^2).  Works for any nonzero
 * element of F_q^2, not just norm-one subgroup members. */
void fe2_inv(const FpCtx& C, Fe2& r, const Fe2& x);

void fe2_pow(const FpCtx& C, Fe2& r, const Fe2& base, const mp_limb_t* e, int elimbs);

// Canonical encoding: both coefficients as fixed-width big-endian, a first.
void fe2_to_bytes(const FpCtx& C, Bytes& out, const Fe2& x);
bool fe2_from_bytes(const FpCtx& C, Fe2& r, const uint8_t* p, size_t len);

}  // namespace mcs
