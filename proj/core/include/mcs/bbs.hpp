#pragma once

#include <utility>

#include "mcs/group.hpp"

namespace mcs {

/* Multi-message BBS+ signatures.  One instance signs the access credential
 * (A, e, s), a second structurally identical instance signs the credit
 * credential (B, f, t); only the generator family and key differ. */
struct BbsKey {
    SourceElement pairbase;           // verification pairing base; y = pairbase^x
    SourceElement base;               // constant leading term of the product
    std::vector<SourceElement> gens;  // one generator per message
    SourceElement blind;              // generator carrying the blinding scalar
    SourceElement y;                  // public key
    Scalar x;                         // secret; absent on verifier-side copies
    bool has_secret = false;
};

struct BbsSignature {
    SourceElement A;
    Scalar e;
    Scalar s;
};

// Issuer keygen over an already-derived generator family.
BbsKey bbs_keygen(const GroupContext& G, SourceElement pairbase, SourceElement base,
                  std::vector<SourceElement> gens, SourceElement blind, RandomSource& rng);
BbsKey bbs_public_part(const BbsKey& key);

/* A = (base * prod gens[i]^{m_i} * blind^s)^{1/(x+e)} with fresh e, s;
 * e is resampled on the (negligible) x + e = 0 collision. */
BbsSignature bbs_sign(const GroupContext& G, const BbsKey& key, const std::vector<Scalar>& msgs,
                      RandomSource& rng);

// true iff ê(base * prod gens^m * blind^s, pairbase) = ê(A, y * pairbase^e).
bool bbs_verify(const GroupContext& G, const BbsKey& key, const std::vector<Scalar>& msgs,
                const BbsSignature& sig);

/* Blind issuance: the requester supplies a commitment C covering the hidden
 * scalars; the issuer contributes blind^{s″} plus any messages it knows:
 *   A = (base * C * blind^{s″} * prod gens[idx]^{m})^{1/(x+e)}.
 * The requester later combines s = s′ + s″.  Issuance demands evidence that
 * the commitment's shape was proven; the caller passes the outcome of that
 * verification. */
struct BlindIssueAuth {
    bool proof_verified = false;
};

struct BbsBlindResult {
    SourceElement A;
    Scalar e;
    Scalar s2;
};

BbsBlindResult bbs_blind_sign(const GroupContext& G, const BbsKey& key,
                              const SourceElement& commitment,
                              const std::vector<std::pair<size_t, Scalar>>& known,
                              BlindIssueAuth auth, RandomSource& rng);

}  // namespace mcs
