#include "mcs/zkp.hpp"

#include <string>

#include "mcs/sha.hpp"

namespace mcs {

const char* proof_kind_name(ProofKind k) {
    switch (k) {
        case ProofKind::pk1: return "pk1";
        case ProofKind::pk2: return "pk2";
        case ProofKind::pk3: return "pk3";
        case ProofKind::spk: return "spk";
    }
    throw GroupError("unknown proof kind");
}

namespace {

Bytes context_digest(const Bytes& context) {
    return tagged_hash("mcs/zkp/context", {&context}, 32);
}

Scalar challenge(const GroupContext& G, ProofKind kind, const std::vector<Bytes>& parts) {
    return G.hash_to_scalar(std::string("mcs/zkp/") + proof_kind_name(kind), parts);
}

// Witness sanity checks are not part of the proof systems; keep their group
// operations out of whatever phase tally is active.
struct UncountedGuard {
    OpCounts scratch;
    CounterScope scope;
    UncountedGuard() : scope(scratch) {}
};

void append(std::vector<Bytes>& parts, std::initializer_list<Bytes> more) {
    for (auto& b : more) parts.push_back(b);
}

}  // namespace

Bytes encode_transcript(const GroupContext& G, const ProofTranscript& t) {
    (void)G;
    Bytes out;
    out.push_back(uint8_t(t.kind));
    auto push_u16 = [&out](size_t v) {
        if (v > 0xffff) throw GroupError("transcript: counted list too long");
        out.push_back(uint8_t(v >> 8));
        out.push_back(uint8_t(v & 0xff));
    };
    push_u16(t.aux.size());
    for (const auto& b : t.aux) {
        Bytes e = b.encode();
        out.insert(out.end(), e.begin(), e.end());
    }
    Bytes c = t.c.encode();
    out.insert(out.end(), c.begin(), c.end());
    push_u16(t.z.size());
    for (const auto& z : t.z) {
        Bytes e = z.encode();
        out.insert(out.end(), e.begin(), e.end());
    }
    push_u16(t.context_digest.size());
    out.insert(out.end(), t.context_digest.begin(), t.context_digest.end());
    return out;
}

ProofTranscript decode_transcript(const GroupContext& G, const Bytes& in) {
    size_t off = 0;
    auto need = [&](size_t n) {
        if (in.size() - off < n) throw GroupError("transcript: truncated");
    };
    need(1);
    uint8_t kb = in[off++];
    if (kb < uint8_t(ProofKind::pk1) || kb > uint8_t(ProofKind::spk))
        throw GroupError("transcript: unknown proof kind");
    auto read_u16 = [&]() {
        need(2);
        size_t v = (size_t(in[off]) << 8) | in[off + 1];
        off += 2;
        return v;
    };
    ProofTranscript t;
    t.kind = ProofKind(kb);
    size_t naux = read_u16();
    size_t wg = G.source_bytes();
    for (size_t i = 0; i < naux; i++) {
        need(wg);
        t.aux.push_back(G.decode_source(Bytes(in.begin() + off, in.begin() + off + wg),
                                        Side::left));
        off += wg;
    }
    size_t wp = G.scalar_bytes();
    need(wp);
    t.c = G.decode_scalar(Bytes(in.begin() + off, in.begin() + off + wp));
    off += wp;
    size_t nz = read_u16();
    for (size_t i = 0; i < nz; i++) {
        need(wp);
        t.z.push_back(G.decode_scalar(Bytes(in.begin() + off, in.begin() + off + wp)));
        off += wp;
    }
    size_t nd = read_u16();
    need(nd);
    t.context_digest.assign(in.begin() + off, in.begin() + off + nd);
    off += nd;
    if (off != in.size()) throw GroupError("transcript: trailing bytes");
    return t;
}

RangeParams gen_range_params(const GroupContext& G, uint64_t V, const SourceElement& y,
                             const SourceElement& y1, const SourceElement& y2,
                             RandomSource& rng) {
    RangeParams rp;
    rp.V = V;
    rp.y = y;
    rp.y1 = y1;
    rp.y2 = y2;
    // every i + phi must be invertible so each digit signature exists
    for (;;) {
        rp.phi = G.random_nonzero_scalar(rng);
        bool ok = true;
        for (uint64_t i = 0; i <= V && ok; i++)
            if (G.scalar_from_u64(i).add(rp.phi).is_zero()) ok = false;
        if (ok) break;
    }
    rp.eta = y.exp(rp.phi).narrowed(Side::right);
    rp.digit.reserve(size_t(V) + 1);
    for (uint64_t i = 0; i <= V; i++)
        rp.digit.push_back(y.exp(G.scalar_from_u64(i).add(rp.phi).inverse()).narrowed(Side::left));
    rp.has_secret = true;
    return rp;
}

RangeParams range_public_part(const RangeParams& rp) {
    RangeParams pub = rp;
    pub.phi = Scalar();
    pub.has_secret = false;
    return pub;
}

PairingTable build_pairing_table(const GroupContext& G, const AccessBases& ab,
                                 const CreditBases& cb, const RangeParams& rp,
                                 const SourceElement& T, const SourceElement& Th,
                                 const SourceElement& S) {
    PairingTable t;
    t.E0 = G.pair(ab.g0, ab.g);
    t.E1 = G.pair(ab.g1, ab.g);
    t.E2 = G.pair(ab.g2, ab.g);
    t.E3 = G.pair(ab.g3, ab.g);
    t.E4 = G.pair(ab.g2, S);  // kept for layout parity; the credential relation uses E2T
    t.E2T = G.pair(ab.g2, T);
    t.F0 = G.pair(cb.h0, cb.h);
    t.F1 = G.pair(cb.h1, cb.h);
    t.F2 = G.pair(cb.h2, cb.h);
    t.F3 = G.pair(cb.h3, cb.h);
    t.F4 = G.pair(cb.h4, cb.h);
    t.K = G.pair(rp.y, rp.y);
    t.K0 = G.pair(rp.y1, Th);
    t.K0p = G.pair(rp.y1, S);
    t.K1 = G.pair(rp.y1, cb.h);
    t.K2 = G.pair(rp.y1, rp.y);
    t.K3 = G.pair(rp.y1, rp.eta);
    return t;
}

ProofTranscript prove_pk1(const GroupContext& G, const AccessBases& ab, const CreditBases& cb,
                          const Pk1Witness& w, const Pk1Statement& st, const Bytes& context,
                          RandomSource& rng) {
    {
        UncountedGuard guard;
        if (!ab.g1.exp(w.sp).mul(ab.g2.exp(w.a)).equal(st.C) ||
            !cb.h1.exp(w.tp).mul(cb.h2.exp(w.a)).equal(st.Cp) ||
            !ab.g.exp(w.a).equal(st.Ahat))
            throw GroupError("pk1: witness does not match statement");
    }
    Scalar rho_sp = G.random_scalar(rng);
    Scalar rho_tp = G.random_scalar(rng);
    Scalar rho_a = G.random_scalar(rng);
    SourceElement T1 = ab.g1.exp(rho_sp).mul(ab.g2.exp(rho_a));
    SourceElement T2 = cb.h1.exp(rho_tp).mul(cb.h2.exp(rho_a));
    SourceElement T3 = ab.g.exp(rho_a);

    ProofTranscript t;
    t.kind = ProofKind::pk1;
    t.context_digest = context_digest(context);
    std::vector<Bytes> parts;
    append(parts, {st.C.encode(), st.Cp.encode(), st.Ahat.encode(), T1.encode(), T2.encode(),
                   T3.encode(), t.context_digest});
    t.c = challenge(G, t.kind, parts);
    t.z = {rho_sp.sub(t.c.mul(w.sp)), rho_tp.sub(t.c.mul(w.tp)), rho_a.sub(t.c.mul(w.a))};
    return t;
}

bool verify_pk1(const GroupContext& G, const AccessBases& ab, const CreditBases& cb,
                const Pk1Statement& st, const ProofTranscript& t, const Bytes& context) {
    if (t.kind != ProofKind::pk1 || !t.aux.empty() || t.z.size() != 3) return false;
    if (t.context_digest != context_digest(context)) return false;
    const Scalar &z_sp = t.z[0], &z_tp = t.z[1], &z_a = t.z[2];
    SourceElement T1 = st.C.exp(t.c).mul(ab.g1.exp(z_sp)).mul(ab.g2.exp(z_a));
    SourceElement T2 = st.Cp.exp(t.c).mul(cb.h1.exp(z_tp)).mul(cb.h2.exp(z_a));
    SourceElement T3 = st.Ahat.exp(t.c).mul(ab.g.exp(z_a));
    std::vector<Bytes> parts;
    append(parts, {st.C.encode(), st.Cp.encode(), st.Ahat.encode(), T1.encode(), T2.encode(),
                   T3.encode(), t.context_digest});
    return challenge(G, t.kind, parts).equal(t.c);
}

ProofTranscript prove_credential(const GroupContext& G, ProofKind kind, const AccessBases& ab,
                                 const PairingTable& tab, const SourceElement& T,
                                 const CredentialWitness& w, const Bytes& context,
                                 RandomSource& rng) {
    if (kind != ProofKind::pk2 && kind != ProofKind::pk3)
        throw GroupError("prove_credential: kind must be pk2 or pk3");
    {
        UncountedGuard guard;
        TargetElement lhs = G.pair(w.A, T.mul(ab.g.exp(w.e)));
        TargetElement rhs = G.pair(
            ab.g0.mul(ab.g1.exp(w.s)).mul(ab.g2.exp(w.a)).mul(ab.g3.exp(w.I)), ab.g);
        if (!lhs.equal(rhs)) throw GroupError("prove_credential: credential does not verify");
    }
    Scalar r1 = G.random_scalar(rng);
    Scalar r2 = G.random_scalar(rng);
    SourceElement B1 = ab.g1.exp(r1).mul(ab.g2.exp(r2));
    SourceElement B2 = w.A.mul(ab.g2.exp(r1));
    Scalar d1 = r1.mul(w.e);
    Scalar d2 = r2.mul(w.e);

    Scalar rho_r1 = G.random_scalar(rng), rho_r2 = G.random_scalar(rng);
    Scalar rho_e = G.random_scalar(rng);
    Scalar rho_d1 = G.random_scalar(rng), rho_d2 = G.random_scalar(rng);
    Scalar rho_s = G.random_scalar(rng), rho_a = G.random_scalar(rng),
           rho_I = G.random_scalar(rng);

    SourceElement T1 = ab.g1.exp(rho_r1).mul(ab.g2.exp(rho_r2));
    SourceElement T2 = B1.exp(rho_e.neg()).mul(ab.g1.exp(rho_d1)).mul(ab.g2.exp(rho_d2));
    TargetElement T3 = G.pair(B2, ab.g)
                           .exp(rho_e.neg())
                           .mul(tab.E1.exp(rho_s))
                           .mul(tab.E2.exp(rho_a))
                           .mul(tab.E3.exp(rho_I))
                           .mul(tab.E2T.exp(rho_r1))
                           .mul(tab.E2.exp(rho_d1));

    ProofTranscript t;
    t.kind = kind;
    t.aux = {B1, B2};
    t.context_digest = context_digest(context);
    std::vector<Bytes> parts;
    append(parts, {T.encode(), B1.encode(), B2.encode(), T1.encode(), T2.encode(), T3.encode(),
                   t.context_digest});
    t.c = challenge(G, kind, parts);
    t.z = {rho_r1.sub(t.c.mul(r1)), rho_r2.sub(t.c.mul(r2)), rho_e.sub(t.c.mul(w.e)),
           rho_d1.sub(t.c.mul(d1)), rho_d2.sub(t.c.mul(d2)), rho_s.sub(t.c.mul(w.s)),
           rho_a.sub(t.c.mul(w.a)), rho_I.sub(t.c.mul(w.I))};
    return t;
}

bool verify_credential(const GroupContext& G, ProofKind kind, const AccessBases& ab,
                       const PairingTable& tab, const SourceElement& T,
                       const ProofTranscript& t, const Bytes& context) {
    if (kind != ProofKind::pk2 && kind != ProofKind::pk3)
        throw GroupError("verify_credential: kind must be pk2 or pk3");
    if (t.kind != kind || t.aux.size() != 2 || t.z.size() != 8) return false;
    if (t.context_digest != context_digest(context)) return false;
    const SourceElement &B1 = t.aux[0], &B2 = t.aux[1];
    const Scalar &z_r1 = t.z[0], &z_r2 = t.z[1], &z_e = t.z[2], &z_d1 = t.z[3], &z_d2 = t.z[4];
    const Scalar &z_s = t.z[5], &z_a = t.z[6], &z_I = t.z[7];
    SourceElement T1 = B1.exp(t.c).mul(ab.g1.exp(z_r1)).mul(ab.g2.exp(z_r2));
    SourceElement T2 = B1.exp(z_e.neg()).mul(ab.g1.exp(z_d1)).mul(ab.g2.exp(z_d2));
    TargetElement T3 = G.pair(B2, T)
                           .div(tab.E0)
                           .exp(t.c)
                           .mul(G.pair(B2, ab.g).exp(z_e.neg()))
                           .mul(tab.E1.exp(z_s))
                           .mul(tab.E2.exp(z_a))
                           .mul(tab.E3.exp(z_I))
                           .mul(tab.E2T.exp(z_r1))
                           .mul(tab.E2.exp(z_d1));
    std::vector<Bytes> parts;
    append(parts, {T.encode(), B1.encode(), B2.encode(), T1.encode(), T2.encode(), T3.encode(),
                   t.context_digest});
    return challenge(G, kind, parts).equal(t.c);
}

namespace {

std::vector<Bytes> spk_statement_parts(const SpkStatement& st, const SourceElement& W) {
    return {st.Cp.encode(), st.Q.encode(), st.X.encode(), st.Y.encode(), st.Z.encode(), st.num,
            W.encode()};
}

}  // namespace

ProofTranscript prove_spk(const GroupContext& G, const SpkBases& sb, const RangeParams& rp,
                          const PairingTable& tab, const SourceElement& W,
                          const TargetElement& K0W, const SpkWitness& w, const SpkStatement& st,
                          const Bytes& context, RandomSource& rng) {
    const CreditBases& cb = sb.cb;
    Scalar diff = w.P.sub(st.Q);
    int64_t d = 0;
    try {
        d = G.scalar_to_i64(diff);
    } catch (const GroupError&) {
        throw GroupError("spk: P - Q out of range");
    }
    if (d <= 0 || uint64_t(d) > rp.V) throw GroupError("spk: P - Q out of range");
    {
        UncountedGuard guard;
        bool consistent =
            cb.h1.exp(w.tp).mul(cb.h2.exp(w.a)).mul(cb.h3.exp(w.I)).mul(cb.h4.exp(w.P))
                .equal(st.Cp) &&
            sb.H.exp(w.v).equal(st.Y) &&
            sb.Gt.exp(w.a).mul(sb.Gcal.exp(st.X.mul(w.v))).equal(st.Z);
        if (!consistent) throw GroupError("spk: witness does not match statement");
        TargetElement lhs = G.pair(w.B, W.mul(cb.h.exp(w.f)));
        TargetElement rhs = G.pair(
            cb.h0.mul(cb.h1.exp(w.t)).mul(cb.h2.exp(w.a)).mul(cb.h3.exp(w.I)).mul(
                cb.h4.exp(w.P)),
            cb.h);
        if (!lhs.equal(rhs)) throw GroupError("spk: credit credential does not verify");
    }

    Scalar r1 = G.random_scalar(rng), r2 = G.random_scalar(rng);
    Scalar r3 = G.random_scalar(rng), r4 = G.random_scalar(rng);
    SourceElement B1 = rp.y1.exp(r1).mul(rp.y2.exp(r2));
    SourceElement B2 = w.B.mul(rp.y1.exp(r2));
    SourceElement B3 = rp.y1.exp(r3).mul(rp.y2.exp(r4));
    SourceElement B4 = rp.digit[size_t(d)].mul(rp.y1.exp(r4));
    Scalar d1 = w.f.mul(r1), d2 = w.f.mul(r2);
    Scalar d3 = diff.mul(r3), d4 = diff.mul(r4);

    Scalar rho_r1 = G.random_scalar(rng), rho_r2 = G.random_scalar(rng);
    Scalar rho_r3 = G.random_scalar(rng), rho_r4 = G.random_scalar(rng);
    Scalar rho_f = G.random_scalar(rng), rho_t = G.random_scalar(rng);
    Scalar rho_tp = G.random_scalar(rng), rho_a = G.random_scalar(rng);
    Scalar rho_I = G.random_scalar(rng), rho_P = G.random_scalar(rng);
    Scalar rho_v = G.random_scalar(rng);
    Scalar rho_d1 = G.random_scalar(rng), rho_d2 = G.random_scalar(rng);
    Scalar rho_d3 = G.random_scalar(rng), rho_d4 = G.random_scalar(rng);

    SourceElement T1 =
        cb.h1.exp(rho_tp).mul(cb.h2.exp(rho_a)).mul(cb.h3.exp(rho_I)).mul(cb.h4.exp(rho_P));
    SourceElement T2 = rp.y1.exp(rho_r1).mul(rp.y2.exp(rho_r2));
    SourceElement T3 = B1.exp(rho_f.neg()).mul(rp.y1.exp(rho_d1)).mul(rp.y2.exp(rho_d2));
    TargetElement T4 = G.pair(B2, cb.h)
                           .exp(rho_f.neg())
                           .mul(K0W.exp(rho_r2))
                           .mul(tab.K1.exp(rho_d2))
                           .mul(tab.F1.exp(rho_t))
                           .mul(tab.F2.exp(rho_a))
                           .mul(tab.F3.exp(rho_I))
                           .mul(tab.F4.exp(rho_P));
    SourceElement T5 = rp.y1.exp(rho_r3).mul(rp.y2.exp(rho_r4));
    SourceElement T6 = B3.exp(rho_P.neg()).mul(rp.y1.exp(rho_d3)).mul(rp.y2.exp(rho_d4));
    TargetElement T7 = G.pair(B4, rp.y)
                           .exp(rho_P.neg())
                           .mul(tab.K2.exp(rho_d4))
                           .mul(tab.K3.exp(rho_r4));
    TargetElement T8 = sb.H.exp(rho_v);
    TargetElement T9 = sb.Gt.exp(rho_a).mul(sb.Gcal.exp(st.X.mul(rho_v)));

    ProofTranscript t;
    t.kind = ProofKind::spk;
    t.aux = {B1, B2, B3, B4};
    t.context_digest = context_digest(context);
    std::vector<Bytes> parts = spk_statement_parts(st, W);
    append(parts, {B1.encode(), B2.encode(), B3.encode(), B4.encode(), T1.encode(), T2.encode(),
                   T3.encode(), T4.encode(), T5.encode(), T6.encode(), T7.encode(), T8.encode(),
                   T9.encode(), t.context_digest});
    t.c = challenge(G, t.kind, parts);
    t.z = {rho_r1.sub(t.c.mul(r1)), rho_r2.sub(t.c.mul(r2)), rho_r3.sub(t.c.mul(r3)),
           rho_r4.sub(t.c.mul(r4)), rho_f.sub(t.c.mul(w.f)),  rho_t.sub(t.c.mul(w.t)),
           rho_tp.sub(t.c.mul(w.tp)), rho_a.sub(t.c.mul(w.a)), rho_I.sub(t.c.mul(w.I)),
           rho_P.sub(t.c.mul(w.P)), rho_v.sub(t.c.mul(w.v)), rho_d1.sub(t.c.mul(d1)),
           rho_d2.sub(t.c.mul(d2)), rho_d3.sub(t.c.mul(d3)), rho_d4.sub(t.c.mul(d4))};
    return t;
}

bool verify_spk(const GroupContext& G, const SpkBases& sb, const RangeParams& rp,
                const PairingTable& tab, const SourceElement& W, const TargetElement& K0W,
                const SpkStatement& st, const ProofTranscript& t, const Bytes& context) {
    const CreditBases& cb = sb.cb;
    if (t.kind != ProofKind::spk || t.aux.size() != 4 || t.z.size() != 15) return false;
    if (t.context_digest != context_digest(context)) return false;
    const SourceElement &B1 = t.aux[0], &B2 = t.aux[1], &B3 = t.aux[2], &B4 = t.aux[3];
    const Scalar &z_r1 = t.z[0], &z_r2 = t.z[1], &z_r3 = t.z[2], &z_r4 = t.z[3];
    const Scalar &z_f = t.z[4], &z_t = t.z[5], &z_tp = t.z[6], &z_a = t.z[7], &z_I = t.z[8];
    const Scalar &z_P = t.z[9], &z_v = t.z[10];
    const Scalar &z_d1 = t.z[11], &z_d2 = t.z[12], &z_d3 = t.z[13], &z_d4 = t.z[14];

    SourceElement T1 = st.Cp.exp(t.c)
                           .mul(cb.h1.exp(z_tp))
                           .mul(cb.h2.exp(z_a))
                           .mul(cb.h3.exp(z_I))
                           .mul(cb.h4.exp(z_P));
    SourceElement T2 = B1.exp(t.c).mul(rp.y1.exp(z_r1)).mul(rp.y2.exp(z_r2));
    SourceElement T3 = B1.exp(z_f.neg()).mul(rp.y1.exp(z_d1)).mul(rp.y2.exp(z_d2));
    TargetElement T4 = G.pair(B2, W)
                           .div(tab.F0)
                           .exp(t.c)
                           .mul(G.pair(B2, cb.h).exp(z_f.neg()))
                           .mul(K0W.exp(z_r2))
                           .mul(tab.K1.exp(z_d2))
                           .mul(tab.F1.exp(z_t))
                           .mul(tab.F2.exp(z_a))
                           .mul(tab.F3.exp(z_I))
                           .mul(tab.F4.exp(z_P));
    SourceElement T5 = B3.exp(t.c).mul(rp.y1.exp(z_r3)).mul(rp.y2.exp(z_r4));
    SourceElement T6 = B3.exp(st.Q.mul(t.c).neg())
                           .mul(B3.exp(z_P.neg()))
                           .mul(rp.y1.exp(z_d3))
                           .mul(rp.y2.exp(z_d4));
    TargetElement T7 = G.pair(B4, rp.eta.mul(rp.y.exp(st.Q.neg())))
                           .div(tab.K)
                           .exp(t.c)
                           .mul(G.pair(B4, rp.y).exp(z_P.neg()))
                           .mul(tab.K2.exp(z_d4))
                           .mul(tab.K3.exp(z_r4));
    TargetElement T8 = st.Y.exp(t.c).mul(sb.H.exp(z_v));
    TargetElement T9 = st.Z.exp(t.c).mul(sb.Gt.exp(z_a)).mul(sb.Gcal.exp(st.X.mul(z_v)));

    std::vector<Bytes> parts = spk_statement_parts(st, W);
    append(parts, {B1.encode(), B2.encode(), B3.encode(), B4.encode(), T1.encode(), T2.encode(),
                   T3.encode(), T4.encode(), T5.encode(), T6.encode(), T7.encode(), T8.encode(),
                   T9.encode(), t.context_digest});
    return challenge(G, t.kind, parts).equal(t.c);
}

}  // namespace mcs
