#include "mcs/fp2.hpp"

#include <stdexcept>

namespace mcs {

void fe2_inv(const FpCtx& C, Fe2& r, const Fe2& x) {
    if (fe2_is_zero(C, x)) throw std::domain_error("fp2: inverse of zero");
    Fe a2, b2, norm, ninv;
    fe_sqr(C, a2, x.a);
    fe_sqr(C, b2, x.b);
    fe_add(C, norm, a2, b2);
    fe_inv(C, ninv, norm);
    fe_mul(C, r.a, x.a, ninv);
    Fe nb;
    fe_neg(C, nb, x.b);
    fe_mul(C, r.b, nb, ninv);
}

void fe2_pow(const FpCtx& C, Fe2& r, const Fe2& base, const mp_limb_t* e, int elimbs) {
    unsigned ebits = limbs_bits(e, elimbs);
    if (ebits == 0) {
        fe2_set_one(C, r);
        return;
    }
    Fe2 table[16];
    fe2_set_one(C, table[0]);
    table[1] = base;
    for (int i = 2; i < 16; ++i) fe2_mul(C, table[i], table[i - 1], base);

    int top = int((ebits - 1) / 4);
    Fe2 acc = table[(e[(top * 4) / 64] >> ((top * 4) % 64)) & 0xf];
    for (int w = top - 1; w >= 0; --w) {
        fe2_sqr(C, acc, acc);
        fe2_sqr(C, acc, acc);
        fe2_sqr(C, acc, acc);
        fe2_sqr(C, acc, acc);
        unsigned bitpos = unsigned(w * 4);
        mp_limb_t nib = (e[bitpos / 64] >> (bitpos % 64)) & 0xf;
        if (nib) fe2_mul(C, acc, acc, table[nib]);
    }
    r = acc;
}

void fe2_to_bytes(const FpCtx& C, Bytes& out, const Fe2& x) {
    fe_to_bytes(C, out, x.a);
    fe_to_bytes(C, out, x.b);
}

bool fe2_from_bytes(const FpCtx& C, Fe2& r, const uint8_t* p, size_t len) {
    if (len != 2 * C.bytes) return false;
    if (!fe_from_bytes(C, r.a, p, C.bytes)) return false;
    if (!fe_from_bytes(C, r.b, p + C.bytes, C.bytes)) return false;
    return true;
}

}  // namespace mcs
