#include "mcs/ec.hpp"

#include <stdexcept>

namespace mcs {

void ecj_set_inf(const FpCtx& C, EcJ& P) {
    P.X = C.one;
    P.Y = C.one;
    mpn_zero(P.Z.v.data(), C.n);
}

void ecj_from_affine(const FpCtx& C, EcJ& r, const EcA& P) {
    if (P.inf) {
        ecj_set_inf(C, r);
        return;
    }
    r.X = P.x;
    r.Y = P.y;
    r.Z = C.one;
}

/* dbl-2007-bl with a = 1: M = 3X^2 + Z^4. */
void ec_dbl(const FpCtx& C, EcJ& r, const EcJ& P) {
    if (ecj_is_inf(C, P) || fe_is_zero(C, P.Y)) {
        ecj_set_inf(C, r);
        return;
    }
    Fe XX, YY, YYYY, ZZ, S, M, T;
    fe_sqr(C, XX, P.X);
    fe_sqr(C, YY, P.Y);
    fe_sqr(C, YYYY, YY);
    fe_sqr(C, ZZ, P.Z);

    // S = 4*X*YY
    fe_mul(C, S, P.X, YY);
    fe_double(C, S, S);
    fe_double(C, S, S);

    // M = 3*XX + ZZ^2
    fe_double(C, M, XX);
    fe_add(C, M, M, XX);
    fe_sqr(C, T, ZZ);
    fe_add(C, M, M, T);

    Fe Z3;
    fe_mul(C, Z3, P.Y, P.Z);
    fe_double(C, Z3, Z3);

    Fe X3, Y3;
    fe_sqr(C, X3, M);
    fe_sub(C, X3, X3, S);
    fe_sub(C, X3, X3, S);

    fe_sub(C, Y3, S, X3);
    fe_mul(C, Y3, Y3, M);
    Fe Y8;
    fe_double(C, Y8, YYYY);
    fe_double(C, Y8, Y8);
    fe_double(C, Y8, Y8);
    fe_sub(C, Y3, Y3, Y8);

    r.X = X3;
    r.Y = Y3;
    r.Z = Z3;
}

void ec_add_mixed(const FpCtx& C, EcJ& r, const EcJ& P, const EcA& Q) {
    if (Q.inf) {
        r = P;
        return;
    }
    if (ecj_is_inf(C, P)) {
        ecj_from_affine(C, r, Q);
        return;
    }
    Fe ZZ, U2, S2, H, Rr;
    fe_sqr(C, ZZ, P.Z);
    fe_mul(C, U2, Q.x, ZZ);
    fe_mul(C, S2, Q.y, P.Z);
    fe_mul(C, S2, S2, ZZ);
    fe_sub(C, H, U2, P.X);
    fe_sub(C, Rr, S2, P.Y);

    if (fe_is_zero(C, H)) {
        if (fe_is_zero(C, Rr)) {
            ec_dbl(C, r, P);
        } else {
            ecj_set_inf(C, r);
        }
        return;
    }

    Fe HH, HHH, V;
    fe_sqr(C, HH, H);
    fe_mul(C, HHH, HH, H);
    fe_mul(C, V, P.X, HH);

    Fe X3, Y3, Z3;
    fe_sqr(C, X3, Rr);
    fe_sub(C, X3, X3, HHH);
    fe_sub(C, X3, X3, V);
    fe_sub(C, X3, X3, V);

    fe_sub(C, Y3, V, X3);
    fe_mul(C, Y3, Y3, Rr);
    Fe T;
    fe_mul(C, T, P.Y, HHH);
    fe_sub(C, Y3, Y3, T);

    fe_mul(C, Z3, P.Z, H);

    r.X = X3;
    r.Y = Y3;
    r.Z = Z3;
}

void ec_add(const FpCtx& C, EcJ& r, const EcJ& P, const EcJ& Q) {
    if (ecj_is_inf(C, P)) {
        r = Q;
        return;
    }
    if (ecj_is_inf(C, Q)) {
        r = P;
        return;
    }
    Fe Z1Z1, Z2Z2, U1, U2, S1, S2, H, Rr;
    fe_sqr(C, Z1Z1, P.Z);
    fe_sqr(C, Z2Z2, Q.Z);
    fe_mul(C, U1, P.X, Z2Z2);
    fe_mul(C, U2, Q.X, Z1Z1);
    fe_mul(C, S1, P.Y, Q.Z);
    fe_mul(C, S1, S1, Z2Z2);
    fe_mul(C, S2, Q.Y, P.Z);
    fe_mul(C, S2, S2, Z1Z1);
    fe_sub(C, H, U2, U1);
    fe_sub(C, Rr, S2, S1);

    if (fe_is_zero(C, H)) {
        if (fe_is_zero(C, Rr)) {
            ec_dbl(C, r, P);
        } else {
            ecj_set_inf(C, r);
        }
        return;
    }

    Fe HH, HHH, V;
    fe_sqr(C, HH, H);
    fe_mul(C, HHH, HH, H);
    fe_mul(C, V, U1, HH);

    Fe X3, Y3, Z3;
    fe_sqr(C, X3, Rr);
    fe_sub(C, X3, X3, HHH);
    fe_sub(C, X3, X3, V);
    fe_sub(C, X3, X3, V);

    fe_sub(C, Y3, V, X3);
    fe_mul(C, Y3, Y3, Rr);
    Fe T;
    fe_mul(C, T, S1, HHH);
    fe_sub(C, Y3, Y3, T);

    fe_mul(C, Z3, P.Z, Q.Z);
    fe_mul(C, Z3, Z3, H);

    r.X = X3;
    r.Y = Y3;
    r.Z = Z3;
}

void ec_neg(const FpCtx& C, EcJ& r, const EcJ& P) {
    r.X = P.X;
    fe_neg(C, r.Y, P.Y);
    r.Z = P.Z;
}

void ec_mul(const FpCtx& C, EcJ& r, const EcJ& P, const mp_limb_t* k, int klimbs) {
    unsigned kbits = limbs_bits(k, klimbs);
    if (kbits == 0 || ecj_is_inf(C, P)) {
        ecj_set_inf(C, r);
        return;
    }
    // 4-bit fixed window.
    EcJ table[16];
    ecj_set_inf(C, table[0]);
    table[1] = P;
    for (int i = 2; i < 16; ++i) ec_add(C, table[i], table[i - 1], P);

    int top = int((kbits - 1) / 4);
    EcJ acc = table[(k[(top * 4) / 64] >> ((top * 4) % 64)) & 0xf];
    for (int w = top - 1; w >= 0; --w) {
        ec_dbl(C, acc, acc);
        ec_dbl(C, acc, acc);
        ec_dbl(C, acc, acc);
        ec_dbl(C, acc, acc);
        unsigned bitpos = unsigned(w * 4);
        mp_limb_t nib = (k[bitpos / 64] >> (bitpos % 64)) & 0xf;
        if (nib) ec_add(C, acc, acc, table[nib]);
    }
    r = acc;
}

void ec_normalize(const FpCtx& C, EcA& r, const EcJ& P) {
    if (ecj_is_inf(C, P)) {
        r.inf = true;
        return;
    }
    Fe zi, zi2, zi3;
    fe_inv(C, zi, P.Z);
    fe_sqr(C, zi2, zi);
    fe_mul(C, zi3, zi2, zi);
    fe_mul(C, r.x, P.X, zi2);
    fe_mul(C, r.y, P.Y, zi3);
    r.inf = false;
}

void ec_batch_normalize(const FpCtx& C, std::vector<EcA>& out, const std::vector<EcJ>& in) {
    size_t m = in.size();
    out.resize(m);
    // Montgomery's trick over the non-infinite entries.
    std::vector<Fe> prefix;
    prefix.reserve(m);
    Fe running = C.one;
    for (size_t i = 0; i < m; ++i) {
        if (!ecj_is_inf(C, in[i])) fe_mul(C, running, running, in[i].Z);
        prefix.push_back(running);
    }
    Fe inv_all;
    fe_inv(C, inv_all, running);
    for (size_t i = m; i-- > 0;) {
        if (ecj_is_inf(C, in[i])) {
            out[i].inf = true;
            continue;
        }
        Fe zi;
        if (i == 0) {
            zi = inv_all;
        } else {
            fe_mul(C, zi, inv_all, prefix[i - 1]);
        }
        fe_mul(C, inv_all, inv_all, in[i].Z);
        Fe zi2, zi3;
        fe_sqr(C, zi2, zi);
        fe_mul(C, zi3, zi2, zi);
        fe_mul(C, out[i].x, in[i].X, zi2);
        fe_mul(C, out[i].y, in[i].Y, zi3);
        out[i].inf = false;
    }
}

bool ec_on_curve(const FpCtx& C, const EcA& P) {
    if (P.inf) return true;
    Fe y2, x3, rhs;
    fe_sqr(C, y2, P.y);
    fe_sqr(C, x3, P.x);
    fe_mul(C, x3, x3, P.x);
    fe_add(C, rhs, x3, P.x);
    return fe_equal(C, y2, rhs);
}

bool ec_equal(const FpCtx& C, const EcJ& P, const EcJ& Q) {
    bool pi = ecj_is_inf(C, P), qi = ecj_is_inf(C, Q);
    if (pi || qi) return pi == qi;
    // X1 Z2^2 == X2 Z1^2 and Y1 Z2^3 == Y2 Z1^3.
    Fe z1z1, z2z2, l, rr;
    fe_sqr(C, z1z1, P.Z);
    fe_sqr(C, z2z2, Q.Z);
    fe_mul(C, l, P.X, z2z2);
    fe_mul(C, rr, Q.X, z1z1);
    if (!fe_equal(C, l, rr)) return false;
    Fe z13, z23;
    fe_mul(C, z13, z1z1, P.Z);
    fe_mul(C, z23, z2z2, Q.Z);
    fe_mul(C, l, P.Y, z23);
    fe_mul(C, rr, Q.Y, z13);
    return fe_equal(C, l, rr);
}

void FixedBaseTable::build(const FpCtx& C, const EcA& base, unsigned max_bits) {
    if (base.inf) throw std::invalid_argument("ec: fixed-base table needs a finite base");
    windows = int((max_bits + 3) / 4);
    std::vector<EcJ> jac;
    jac.reserve(size_t(windows) * 15);
    EcJ B;
    ecj_from_affine(C, B, base);
    for (int w = 0; w < windows; ++w) {
        EcJ d = B;
        for (int v = 1; v <= 15; ++v) {
            jac.push_back(d);
            if (v < 15) ec_add(C, d, d, B);
        }
        // B <- 16 B
        ec_add(C, B, d, B);
    }
    ec_batch_normalize(C, tab, jac);
}

void FixedBaseTable::mul(const FpCtx& C, EcJ& r, const mp_limb_t* k, int klimbs) const {
    unsigned kbits = limbs_bits(k, klimbs);
    if (kbits > unsigned(windows) * 4)
        throw std::invalid_argument("ec: scalar exceeds fixed-base table range");
    EcJ acc;
    ecj_set_inf(C, acc);
    int nw = int((kbits + 3) / 4);
    for (int w = 0; w < nw; ++w) {
        unsigned bitpos = unsigned(w * 4);
        mp_limb_t nib = (k[bitpos / 64] >> (bitpos % 64)) & 0xf;
        if (nib) ec_add_mixed(C, acc, acc, tab[size_t(w) * 15 + size_t(nib) - 1]);
    }
    r = acc;
}

}  // namespace mcs
