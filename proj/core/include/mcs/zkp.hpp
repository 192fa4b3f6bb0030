#pragma once

#include <cstdint>
#include <vector>

#include "group.hpp"
#include "rng.hpp"

namespace mcs {

// Non-interactive sigma-protocol transcripts (Fiat-Shamir). Three proof
// families share one transcript shape:
//   PK1  well-formedness of the registration commitments (C, C', A-hat)
//   PK2/PK3  possession of an access credential (A, e) on (s, a, I)
//   SPK  possession of a credit credential (B, f) on (t, a, I, P), consistency
//        of a fresh commitment C', the range claim P - Q in (0, V], and the
//        report-tag equations Y = H^v, Z = Gt^a * Gcal^{X v}
// Responses follow z = rho - c*w; verifiers reconstruct the commitments as
// T' = Statement^c * prod(base^z) and recompute the challenge.

enum class ProofKind : uint8_t { pk1 = 1, pk2 = 2, pk3 = 3, spk = 4 };

const char* proof_kind_name(ProofKind k);

struct ProofTranscript {
    ProofKind kind = ProofKind::pk1;
    std::vector<SourceElement> aux;  // B1.. blinded elements; empty for PK1
    Scalar c;
    std::vector<Scalar> z;
    Bytes context_digest;
};

Bytes encode_transcript(const GroupContext& G, const ProofTranscript& t);
ProofTranscript decode_transcript(const GroupContext& G, const Bytes& in);

// Generator families. Access credentials live over (g, g0..g3), credit
// credentials over (h, h0..h4); the gi/hi carry left side tags, g and h both.
struct AccessBases {
    SourceElement g, g0, g1, g2, g3;
};
struct CreditBases {
    SourceElement h, h0, h1, h2, h3, h4;
};

// Set-membership range parameters: eta = y^phi and digit signatures
// digit[i] = y^{1/(i+phi)} for i in [0, V]; membership of d is shown by
// pair(digit[d], eta * y^d) = pair(y, y).
struct RangeParams {
    uint64_t V = 0;
    SourceElement y, y1, y2, eta;
    std::vector<SourceElement> digit;
    Scalar phi;  // issuer secret, absent on public copies
    bool has_secret = false;
};

RangeParams gen_range_params(const GroupContext& G, uint64_t V, const SourceElement& y,
                             const SourceElement& y1, const SourceElement& y2, RandomSource& rng);
RangeParams range_public_part(const RangeParams& rp);

// Precomputed pairing values used by credential verification. Ei pairs gi
// with g, Fi pairs hi with h. E4 = pair(g2, S) is kept for table parity with
// the published layout although the credential relation pairs g2 with T; E2T
// is the entry that relation actually consumes. K0/K0p anchor the credit
// relation under Th (authority key) or S (provider key); the caller picks.
struct PairingTable {
    TargetElement E0, E1, E2, E3, E4, E2T;
    TargetElement F0, F1, F2, F3, F4;
    TargetElement K, K0, K0p, K1, K2, K3;
};

PairingTable build_pairing_table(const GroupContext& G, const AccessBases& ab,
                                 const CreditBases& cb, const RangeParams& rp,
                                 const SourceElement& T, const SourceElement& Th,
                                 const SourceElement& S);

// PK1: C = g1^{s'} g2^a, C' = h1^{t'} h2^a, Ahat = g^a with shared a.
struct Pk1Statement {
    SourceElement C, Cp, Ahat;
};
struct Pk1Witness {
    Scalar sp, tp, a;
};

ProofTranscript prove_pk1(const GroupContext& G, const AccessBases& ab, const CreditBases& cb,
                          const Pk1Witness& w, const Pk1Statement& st, const Bytes& context,
                          RandomSource& rng);
bool verify_pk1(const GroupContext& G, const AccessBases& ab, const CreditBases& cb,
                const Pk1Statement& st, const ProofTranscript& t, const Bytes& context);

// PK2/PK3: knowledge of (A, e, s, a, I) with pair(A, T g^e) = pair(g0 g1^s g2^a g3^I, g).
struct CredentialWitness {
    SourceElement A;
    Scalar e, s, a, I;
};

ProofTranscript prove_credential(const GroupContext& G, ProofKind kind, const AccessBases& ab,
                                 const PairingTable& tab, const SourceElement& T,
                                 const CredentialWitness& w, const Bytes& context,
                                 RandomSource& rng);
bool verify_credential(const GroupContext& G, ProofKind kind, const AccessBases& ab,
                       const PairingTable& tab, const SourceElement& T,
                       const ProofTranscript& t, const Bytes& context);

// SPK statement: fresh commitment C' = h1^{t'} h2^a h3^I h4^P, declared
// threshold Q, report digest X, and tags Y = H^v, Z = Gt^a * Gcal^{X v}.
struct SpkBases {
    CreditBases cb;
    TargetElement H, Gt, Gcal;
};
struct SpkStatement {
    SourceElement Cp;
    Scalar Q, X;
    TargetElement Y, Z;
    Bytes num;  // task number, bound into the challenge
};
struct SpkWitness {
    SourceElement B;
    Scalar f, t;  // credit credential pair
    Scalar tp, a, I, P, v;
};

// W is the key the credential is anchored under (Th or S) and K0W the
// matching table entry (K0 or K0p).
ProofTranscript prove_spk(const GroupContext& G, const SpkBases& sb, const RangeParams& rp,
                          const PairingTable& tab, const SourceElement& W,
                          const TargetElement& K0W, const SpkWitness& w, const SpkStatement& st,
                          const Bytes& context, RandomSource& rng);
bool verify_spk(const GroupContext& G, const SpkBases& sb, const RangeParams& rp,
                const PairingTable& tab, const SourceElement& W, const TargetElement& K0W,
                const SpkStatement& st, const ProofTranscript& t, const Bytes& context);

}  // namespace mcs
