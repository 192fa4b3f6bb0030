#include "mcs/bbs.hpp"

namespace mcs {

BbsKey bbs_keygen(const GroupContext& G, SourceElement pairbase, SourceElement base,
                  std::vector<SourceElement> gens, SourceElement blind, RandomSource& rng) {
    BbsKey k;
    k.pairbase = std::move(pairbase);
    k.base = std::move(base);
    k.gens = std::move(gens);
    k.blind = std::move(blind);
    k.x = G.random_nonzero_scalar(rng);
    k.y = k.pairbase.exp(k.x);
    k.has_secret = true;
    return k;
}

BbsKey bbs_public_part(const BbsKey& key) {
    BbsKey pub = key;
    pub.x = Scalar{};
    pub.has_secret = false;
    return pub;
}

namespace {

Scalar sample_e(const GroupContext& G, const Scalar& x, RandomSource& rng) {
    for (;;) {
        Scalar e = G.random_scalar(rng);
        if (!x.add(e).is_zero()) return e;
    }
}

}  // namespace

BbsSignature bbs_sign(const GroupContext& G, const BbsKey& key, const std::vector<Scalar>& msgs,
                      RandomSource& rng) {
    if (!key.has_secret) throw GroupError("bbs: signing requires the secret key");
    if (msgs.size() != key.gens.size()) throw GroupError("bbs: message count mismatch");
    BbsSignature sig;
    sig.e = sample_e(G, key.x, rng);
    sig.s = G.random_scalar(rng);
    SourceElement prod = key.base;
    for (size_t i = 0; i < msgs.size(); ++i) prod = prod.mul(key.gens[i].exp(msgs[i]));
    prod = prod.mul(key.blind.exp(sig.s));
    sig.A = prod.exp(key.x.add(sig.e).inverse());
    return sig;
}

bool bbs_verify(const GroupContext& G, const BbsKey& key, const std::vector<Scalar>& msgs,
                const BbsSignature& sig) {
    if (msgs.size() != key.gens.size()) throw GroupError("bbs: message count mismatch");
    SourceElement prod = key.base;
    for (size_t i = 0; i < msgs.size(); ++i) prod = prod.mul(key.gens[i].exp(msgs[i]));
    prod = prod.mul(key.blind.exp(sig.s));
    TargetElement lhs = G.pair(prod, key.pairbase);
    TargetElement rhs = G.pair(sig.A, key.y.mul(key.pairbase.exp(sig.e)));
    return lhs.equal(rhs);
}

BbsBlindResult bbs_blind_sign(const GroupContext& G, const BbsKey& key,
                              const SourceElement& commitment,
                              const std::vector<std::pair<size_t, Scalar>>& known,
                              BlindIssueAuth auth, RandomSource& rng) {
    if (!key.has_secret) throw GroupError("bbs: signing requires the secret key");
    if (!auth.proof_verified)
        throw GroupError("bbs: blind issuance requires a verified commitment proof");
    BbsBlindResult out;
    out.e = sample_e(G, key.x, rng);
    out.s2 = G.random_scalar(rng);
    SourceElement prod = key.base.mul(commitment).mul(key.blind.exp(out.s2));
    for (const auto& [idx, m] : known) {
        if (idx >= key.gens.size()) throw GroupError("bbs: known-message index out of range");
        prod = prod.mul(key.gens[idx].exp(m));
    }
    out.A = prod.exp(key.x.add(out.e).inverse());
    return out;
}

}  // namespace mcs
