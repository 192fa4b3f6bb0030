#include "mcs/pre.hpp"

namespace mcs {

PreParams pre_params(const GroupContext& G, const SourceElement& g) {
    return PreParams{g, G.pair(g, g)};
}

PreKeyPair pre_keygen(const GroupContext& G, const PreParams& params, RandomSource& rng) {
    PreKeyPair kp;
    kp.sk = G.random_nonzero_scalar(rng);
    kp.pk = params.g.exp(kp.sk);
    return kp;
}

SourceElement pre_rekey(const GroupContext& G, const Scalar& sk_a, const SourceElement& pk_b) {
    (void)G;
    if (sk_a.is_zero()) throw GroupError("pre: re-encryption key needs a nonzero secret");
    return pk_b.exp(sk_a.inverse());
}

PreCiphertext pre_encrypt(const GroupContext& G, const PreParams& params, const TargetElement& m,
                          const SourceElement& pk, RandomSource& rng) {
    Scalar k = G.random_nonzero_scalar(rng);
    PreCiphertext c;
    c.stage = PreStage::first_level;
    c.head_src = pk.exp(k);
    c.body = m.mul(params.Z.exp(k));
    return c;
}

PreCiphertext pre_reencrypt(const GroupContext& G, const PreCiphertext& c,
                            const SourceElement& rk) {
    if (c.stage != PreStage::first_level)
        throw GroupError("pre: ciphertext is already re-encrypted");
    PreCiphertext out;
    out.stage = PreStage::reencrypted;
    out.head_tgt = G.pair(c.head_src, rk);
    out.body = c.body;
    return out;
}

TargetElement pre_decrypt(const GroupContext& G, const PreParams& params, const PreCiphertext& c,
                          const Scalar& sk) {
    if (sk.is_zero()) throw GroupError("pre: decryption needs a nonzero secret");
    if (c.stage == PreStage::first_level)
        return c.body.div(G.pair(params.g, c.head_src).exp(sk.inverse()));
    return c.body.div(c.head_tgt.exp(sk.inverse()));
}

}  // namespace mcs
