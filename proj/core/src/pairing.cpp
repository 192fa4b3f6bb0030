#include "mcs/pairing.hpp"

#include <stdexcept>

#include "mcs/sha.hpp"

namespace mcs {

namespace {

/* Doubling step of the Miller loop: T <- 2T, and the tangent line at the old
 * T evaluated at psi(Q) = (-xQ, i*yQ), up to F_q factors:
 *   l = (M*(Z^2*xQ + X) - 2Y^2) + (Z3*Z^2*yQ) i,  M = 3X^2 + Z^4, Z3 = 2YZ.
 * Returns false when the line is vertical or trivial (pure F_q), in which
 * case the caller skips the multiplication. */
bool dbl_step(const FpCtx& C, EcJ& T, const Fe& xQ, const Fe& yQ, Fe2& l) {
    if (ecj_is_inf(C, T)) return false;
    if (fe_is_zero(C, T.Y)) {
        // Two-torsion: tangent is vertical.
        ecj_set_inf(C, T);
        return false;
    }
    Fe XX, YY, YYYY, ZZ, S, M, T0;
    fe_sqr(C, XX, T.X);
    fe_sqr(C, YY, T.Y);
    fe_sqr(C, YYYY, YY);
    fe_sqr(C, ZZ, T.Z);

    fe_mul(C, S, T.X, YY);
    fe_double(C, S, S);
    fe_double(C, S, S);

    fe_double(C, M, XX);
    fe_add(C, M, M, XX);
    fe_sqr(C, T0, ZZ);
    fe_add(C, M, M, T0);

    Fe Z3;
    fe_mul(C, Z3, T.Y, T.Z);
    fe_double(C, Z3, Z3);

    // Line before overwriting T.
    Fe re, im;
    fe_mul(C, re, ZZ, xQ);
    fe_add(C, re, re, T.X);
    fe_mul(C, re, re, M);
    fe_double(C, T0, YY);
    fe_sub(C, re, re, T0);
    fe_mul(C, im, Z3, ZZ);
    fe_mul(C, im, im, yQ);
    l.a = re;
    l.b = im;

    Fe X3, Y3;
    fe_sqr(C, X3, M);
    fe_sub(C, X3, X3, S);
    fe_sub(C, X3, X3, S);
    fe_sub(C, Y3, S, X3);
    fe_mul(C, Y3, Y3, M);
    fe_double(C, T0, YYYY);
    fe_double(C, T0, T0);
    fe_double(C, T0, T0);
    fe_sub(C, Y3, Y3, T0);

    T.X = X3;
    T.Y = Y3;
    T.Z = Z3;
    return true;
}

/* Addition step: T <- T + P (P affine, the Miller base point), and the line
 * through the old T and P evaluated at psi(Q), up to F_q factors:
 *   l = (Rr*(xQ + xP) - Z3*yP) + (Z3*yQ) i,  Z3 = Z*H.
 * Degenerate configurations (T = O, T = ±P) reduce to verticals or a
 * doubling; verticals are pure F_q and skipped. */
bool add_step(const FpCtx& C, EcJ& T, const EcA& P, const Fe& xQ, const Fe& yQ, Fe2& l) {
    if (ecj_is_inf(C, T)) {
        ecj_from_affine(C, T, P);
        return false;
    }
    Fe ZZ, U2, S2, H, Rr;
    fe_sqr(C, ZZ, T.Z);
    fe_mul(C, U2, P.x, ZZ);
    fe_mul(C, S2, P.y, T.Z);
    fe_mul(C, S2, S2, ZZ);
    fe_sub(C, H, U2, T.X);
    fe_sub(C, Rr, S2, T.Y);

    if (fe_is_zero(C, H)) {
        if (fe_is_zero(C, Rr)) return dbl_step(C, T, xQ, yQ, l);  // T == P
        ecj_set_inf(C, T);  // T == -P
        return false;
    }

    Fe Z3;
    fe_mul(C, Z3, T.Z, H);

    Fe re, im, t;
    fe_add(C, re, xQ, P.x);
    fe_mul(C, re, re, Rr);
    fe_mul(C, t, Z3, P.y);
    fe_sub(C, re, re, t);
    fe_mul(C, im, Z3, yQ);
    l.a = re;
    l.b = im;

    Fe HH, HHH, V, X3, Y3;
    fe_sqr(C, HH, H);
    fe_mul(C, HHH, HH, H);
    fe_mul(C, V, T.X, HH);
    fe_sqr(C, X3, Rr);
    fe_sub(C, X3, X3, HHH);
    fe_sub(C, X3, X3, V);
    fe_sub(C, X3, X3, V);
    fe_sub(C, Y3, V, X3);
    fe_mul(C, Y3, Y3, Rr);
    fe_mul(C, t, T.Y, HHH);
    fe_sub(C, Y3, Y3, t);

    T.X = X3;
    T.Y = Y3;
    T.Z = Z3;
    return true;
}

void reduce_to_fe(const FpCtx& C, Fe& out, const uint8_t* p, size_t len) {
    mpz_t v, m;
    mpz_init(v);
    mpz_init(m);
    mpz_from_bytes(v, p, len);
    mpz_import(m, size_t(C.n), -1, sizeof(mp_limb_t), 0, 0, C.mod.data());
    mpz_mod(v, v, m);
    fe_from_mpz(C, out, v);
    mpz_clear(v);
    mpz_clear(m);
}

}  // namespace

void pairing(const Curve& cv, Fe2& out, const EcA& P, const EcA& Q) {
    const FpCtx& C = cv.F;
    if (P.inf || Q.inf) {
        fe2_set_one(C, out);
        return;
    }
    // Evaluation coordinates of psi(Q) are folded into the line formulas.
    Fe2 f;
    fe2_set_one(C, f);
    EcJ T;
    ecj_from_affine(C, T, P);
    Fe2 l;
    for (int i = int(cv.r_bits) - 2; i >= 0; --i) {
        bool has = dbl_step(C, T, Q.x, Q.y, l);
        fe2_sqr(C, f, f);
        if (has) fe2_mul(C, f, f, l);
        if ((cv.r_l[size_t(i) / 64] >> (unsigned(i) % 64)) & 1) {
            // Final addition meets T = [r-1]P = -P: vertical at P, skip.
            if (i == 0) break;
            if (add_step(C, T, P, Q.x, Q.y, l)) fe2_mul(C, f, f, l);
        }
    }
    final_exp(cv, out, f);
}

void final_exp(const Curve& cv, Fe2& out, const Fe2& f) {
    const FpCtx& C = cv.F;
    // f^(q-1) = conj(f) * f^{-1} since Frobenius is conjugation; then ^c.
    Fe2 fc, fi, u;
    fe2_conj(C, fc, f);
    fe2_inv(C, fi, f);
    fe2_mul(C, u, fc, fi);
    fe2_pow(C, out, u, cv.c_l.data(), cv.c_n);
}

bool point_in_subgroup(const Curve& cv, const EcA& P) {
    if (P.inf) return true;
    if (!ec_on_curve(cv.F, P)) return false;
    EcJ J, R;
    ecj_from_affine(cv.F, J, P);
    ec_mul(cv.F, R, J, cv.r_l.data(), cv.r_n);
    return ecj_is_inf(cv.F, R);
}

bool in_target_subgroup(const Curve& cv, const Fe2& z) {
    if (fe2_is_zero(cv.F, z)) return false;
    Fe2 t;
    fe2_pow(cv.F, t, z, cv.r_l.data(), cv.r_n);
    return fe2_is_one(cv.F, t);
}

EcA hash_to_point(const Curve& cv, const std::string& tag, const std::vector<Bytes>& parts) {
    const FpCtx& C = cv.F;
    for (uint64_t ctr = 0;; ++ctr) {
        Bytes ctr_b;
        put_u64(ctr_b, ctr);
        std::vector<const Bytes*> hp;
        hp.reserve(parts.size() + 3);
        hp.push_back(&cv.q_be);
        hp.push_back(&cv.r_be);
        for (const Bytes& b : parts) hp.push_back(&b);
        hp.push_back(&ctr_b);
        Bytes h = tagged_hash(tag, hp, C.bytes + 17);

        Fe x;
        reduce_to_fe(C, x, h.data(), C.bytes + 16);
        Fe rhs, y;
        fe_sqr(C, rhs, x);
        fe_mul(C, rhs, rhs, x);
        fe_add(C, rhs, rhs, x);
        if (!fe_sqrt(C, y, rhs)) continue;
        if (fe_canonical_is_odd(C, y) != ((h[C.bytes + 16] & 1) != 0)) fe_neg(C, y, y);

        EcA A{x, y, false};
        EcJ J, R;
        ecj_from_affine(C, J, A);
        ec_mul(C, R, J, cv.c_l.data(), cv.c_n);
        if (ecj_is_inf(C, R)) continue;
        EcA out;
        ec_normalize(C, out, R);
        return out;
    }
}

void hash_to_target(const Curve& cv, Fe2& out, const std::string& tag,
                    const std::vector<Bytes>& parts) {
    const FpCtx& C = cv.F;
    for (uint64_t ctr = 0;; ++ctr) {
        Bytes ctr_b;
        put_u64(ctr_b, ctr);
        std::vector<const Bytes*> hp;
        hp.reserve(parts.size() + 3);
        hp.push_back(&cv.q_be);
        hp.push_back(&cv.r_be);
        for (const Bytes& b : parts) hp.push_back(&b);
        hp.push_back(&ctr_b);
        Bytes h = tagged_hash(tag, hp, 2 * (C.bytes + 16));

        Fe2 u;
        reduce_to_fe(C, u.a, h.data(), C.bytes + 16);
        reduce_to_fe(C, u.b, h.data() + C.bytes + 16, C.bytes + 16);
        if (fe2_is_zero(C, u)) continue;
        Fe2 z;
        final_exp(cv, z, u);
        if (fe2_is_one(C, z)) continue;
        out = z;
        return;
    }
}

Curve make_pairing_curve(const Bytes& r_be, unsigned qbits) {
    mpz_t r, c, q;
    mpz_init(r);
    mpz_init(c);
    mpz_init(q);
    mpz_from_bytes(r, r_be.data(), r_be.size());
    if (mpz_sgn(r) <= 0 || mpz_even_p(r))
        throw std::invalid_argument("pairing: subgroup order must be odd positive");
    unsigned rbits = unsigned(mpz_sizeinbase(r, 2));
    if (rbits + 2 >= qbits) throw std::invalid_argument("pairing: field size leaves no cofactor room");

    mpz_set_ui(c, 1);
    mpz_mul_2exp(c, c, qbits - rbits);
    mpz_t g;
    mpz_init(g);
    for (;;) {
        mpz_gcd(g, c, r);
        if (mpz_cmp_ui(g, 1) == 0) {
            mpz_mul(q, c, r);
            mpz_sub_ui(q, q, 1);
            if (mpz_probab_prime_p(q, 32) > 0) break;
        }
        mpz_add_ui(c, c, 4);
    }
    mpz_clear(g);

    Curve cv;
    cv.F.init(q);
    cv.r_n = int(mpz_size(r));
    mpn_copyi(cv.r_l.data(), mpz_limbs_read(r), mpz_size(r));
    cv.r_bits = rbits;
    cv.r_be = mpz_to_bytes(r, (rbits + 7) / 8);
    cv.c_n = int(mpz_size(c));
    if (cv.c_n > kMaxLimbs) throw std::invalid_argument("pairing: cofactor exceeds limb budget");
    mpn_copyi(cv.c_l.data(), mpz_limbs_read(c), mpz_size(c));
    cv.q_be = mpz_to_bytes(q, cv.F.bytes);
    mpz_clear(r);
    mpz_clear(c);
    mpz_clear(q);

    // Derive a probe point and confirm the pairing is non-degenerate on it.
    for (uint64_t salt = 0;; ++salt) {
        Bytes sb;
        put_u64(sb, salt);
        cv.base = hash_to_point(cv, "mcs/curve/base", {sb});
        Fe2 e;
        pairing(cv, e, cv.base, cv.base);
        if (!fe2_is_one(cv.F, e)) break;
    }
    return cv;
}

namespace {

Bytes smallest_prime_above_pow2(unsigned bits) {
    mpz_t p;
    mpz_init(p);
    mpz_set_ui(p, 1);
    mpz_mul_2exp(p, p, bits);
    mpz_nextprime(p, p);
    Bytes out = mpz_to_bytes(p, (mpz_sizeinbase(p, 2) + 7) / 8);
    mpz_clear(p);
    return out;
}

}  // namespace

const Curve& curve_p160() {
    static const Curve cv = make_pairing_curve(smallest_prime_above_pow2(159), 512);
    return cv;
}

const Curve& curve_p256() {
    static const Curve cv = make_pairing_curve(smallest_prime_above_pow2(255), 1536);
    return cv;
}

}  // namespace mcs
