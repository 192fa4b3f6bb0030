#pragma once

#include <vector>

#include "mcs/fp2.hpp"

namespace mcs {

/* Arithmetic on E: y^2 = x^3 + x over F_q.  Affine and Jacobian
 * representations; Z = 0 marks the point at infinity in Jacobian form. */
struct EcA {
    Fe x, y;
    bool inf = true;
};

struct EcJ {
    Fe X, Y, Z;
};

inline bool ecj_is_inf(const FpCtx& C, const EcJ& P) { return fe_is_zero(C, P.Z); }

void ecj_set_inf(const FpCtx& C, EcJ& P);
void ecj_from_affine(const FpCtx& C, EcJ& r, const EcA& P);

void ec_dbl(const FpCtx& C, EcJ& r, const EcJ& P);
void ec_add(const FpCtx& C, EcJ& r, const EcJ& P, const EcJ& Q);
void ec_add_mixed(const FpCtx& C, EcJ& r, const EcJ& P, const EcA& Q);
void ec_neg(const FpCtx& C, EcJ& r, const EcJ& P);

// Scalar is a plain (non-Montgomery) little-endian limb array.
void ec_mul(const FpCtx& C, EcJ& r, const EcJ& P, const mp_limb_t* k, int klimbs);

void ec_normalize(const FpCtx& C, EcA& r, const EcJ& P);
// One shared inversion for the whole batch.
void ec_batch_normalize(const FpCtx& C, std::vector<EcA>& out, const std::vector<EcJ>& in);

bool ec_on_curve(const FpCtx& C, const EcA& P);
bool ec_equal(const FpCtx& C, const EcJ& P, const EcJ& Q);

/* Precomputed multiples of a fixed base: tab[w*15 + d-1] = [d * 16^w] B in
 * affine form, so a scalar multiplication is nibble lookups and mixed adds
 * with no doublings. */
struct FixedBaseTable {
    int windows = 0;
    std::vector<EcA> tab;

    void build(const FpCtx& C, const EcA& base, unsigned max_bits);
    void mul(const FpCtx& C, EcJ& r, const mp_limb_t* k, int klimbs) const;
    bool ready() const { return windows > 0; }
};

}  // namespace mcs
