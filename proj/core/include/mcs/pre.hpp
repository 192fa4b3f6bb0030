#pragma once

#include "mcs/group.hpp"

namespace mcs {

/* Unidirectional proxy re-encryption.  First-level ciphertexts carry a
 * source-group head pk^k; re-encryption by rk = pk_b^{1/a} moves the head
 * into the target group, after which only the delegatee key opens it. */
struct PreParams {
    SourceElement g;  // encryption base
    TargetElement Z;  // pair(g, g), the mask base
};

PreParams pre_params(const GroupContext& G, const SourceElement& g);

struct PreKeyPair {
    Scalar sk;
    SourceElement pk;  // g^sk
};

PreKeyPair pre_keygen(const GroupContext& G, const PreParams& params, RandomSource& rng);

enum class PreStage : uint8_t { first_level, reencrypted };

struct PreCiphertext {
    PreStage stage = PreStage::first_level;
    SourceElement head_src;  // meaningful at first level
    TargetElement head_tgt;  // meaningful after re-encryption
    TargetElement body;      // m * Z^k
};

// rk = pk_b^{1/sk_a}; delegates decryption from a to b.
SourceElement pre_rekey(const GroupContext& G, const Scalar& sk_a, const SourceElement& pk_b);

PreCiphertext pre_encrypt(const GroupContext& G, const PreParams& params, const TargetElement& m,
                          const SourceElement& pk, RandomSource& rng);

// (pk_a^k, body) -> (pair(pk_a^k, rk), body); rejects second re-encryption.
PreCiphertext pre_reencrypt(const GroupContext& G, const PreCiphertext& c, const SourceElement& rk);

/* First level: m = body / pair(g, head)^{1/sk}; re-encrypted:
 * m = body / head^{1/sk}.  A wrong key yields an unrelated element rather
 * than an error; integrity is layered on top by the callers that need it. */
TargetElement pre_decrypt(const GroupContext& G, const PreParams& params, const PreCiphertext& c,
                          const Scalar& sk);

}  // namespace mcs
