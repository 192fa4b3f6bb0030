#pragma once

#include <string>
#include <vector>

#include "mcs/ec.hpp"

namespace mcs {

/* Supersingular curve E: y^2 = x^3 + x over F_q with q = c*r - 1 prime,
 * q = 3 (mod 4), #E(F_q) = q + 1 = c*r.  The embedding degree is 2 and the
 * modified Tate pairing e(P, Q) = f_{r,P}(psi(Q))^((q^2-1)/r) with the
 * distortion map psi(x, y) = (-x, iy) is symmetric and non-degenerate on the
 * order-r subgroup, so the same engine serves both the prime-order protocol
 * groups and the composite-order homomorphic scheme.  r may be any odd number
 * coprime to c; the Miller loop tolerates inputs of any order dividing r. */
struct Curve {
    FpCtx F;        // base field F_q
    Limbs r_l{};    // subgroup order, plain little-endian limbs
    int r_n = 0;
    unsigned r_bits = 0;
    Bytes r_be;     // canonical big-endian encoding of r
    Limbs c_l{};    // cofactor c = (q+1)/r, plain
    int c_n = 0;
    Bytes q_be;
    EcA base;       // derived point of order r with e(base, base) != 1
};

/* Deterministically construct the curve for subgroup order r: scan cofactors
 * c = c0, c0+4, ... (c0 = 2^(qbits - bits(r)), 4 | c, gcd(c, r) = 1) until
 * q = c*r - 1 is prime.  4 | c forces q = 3 (mod 4). */
Curve make_pairing_curve(const Bytes& r_be, unsigned qbits);

// Cached profile curves; the subgroup order is the smallest prime above 2^159
// (respectively 2^255) and q lands at 512 (respectively 1536) bits.
const Curve& curve_p160();
const Curve& curve_p256();

void pairing(const Curve& cv, Fe2& out, const EcA& P, const EcA& Q);

// Maps f to the order-r target subgroup: f^((q^2-1)/r) = (conj(f)/f)^c.
void final_exp(const Curve& cv, Fe2& out, const Fe2& f);

bool point_in_subgroup(const Curve& cv, const EcA& P);
bool in_target_subgroup(const Curve& cv, const Fe2& z);

/* Try-and-increment onto the order-r subgroup (cofactor-cleared, never the
 * identity).  Deterministic in (curve, tag, parts). */
EcA hash_to_point(const Curve& cv, const std::string& tag, const std::vector<Bytes>& parts);

// Hash straight into the target subgroup, skipping counters that land on 1.
void hash_to_target(const Curve& cv, Fe2& out, const std::string& tag,
                    const std::vector<Bytes>& parts);

}  // namespace mcs
