#include "mcs/messages.hpp"

#include <cmath>
#include <cstring>

#include "mcs/bytes.hpp"

namespace mcs {

namespace {

// Sequential reader; every slice is bounds-checked against the buffer.
struct Cursor {
    const Bytes& b;
    size_t off = 0;

    Bytes take(size_t n) {
        if (b.size() - off < n) throw GroupError("msg: truncated");
        Bytes out(b.begin() + off, b.begin() + off + n);
        off += n;
        return out;
    }
    uint16_t u16() {
        Bytes t = take(2);
        return uint16_t(t[0]) << 8 | t[1];
    }
    uint64_t u64() {
        Bytes t = take(8);
        uint64_t v = 0;
        for (uint8_t c : t) v = v << 8 | c;
        return v;
    }
    int64_t i64() { return int64_t(u64()); }
    uint8_t u8() { return take(1)[0]; }
    void done() const {
        if (off != b.size()) throw GroupError("msg: trailing bytes");
    }
};

Scalar take_scalar(const GroupContext& G, Cursor& c) {
    return G.decode_scalar(c.take(G.scalar_bytes()));
}

SourceElement take_source(const GroupContext& G, Cursor& c, Side s) {
    return G.decode_source(c.take(G.source_bytes()), s);
}

TargetElement take_target(const GroupContext& G, Cursor& c) {
    return G.decode_target(c.take(G.target_bytes()));
}

/* A transcript's extent is recoverable from its own counters, so embedded
 * proofs need no outer length prefix. */
ProofTranscript take_transcript(const GroupContext& G, Cursor& c) {
    size_t start = c.off;
    c.u8();
    size_t aux = c.u16();
    c.take(aux * G.source_bytes() + G.scalar_bytes());
    size_t zs = c.u16();
    c.take(zs * G.scalar_bytes());
    size_t dlen = c.u16();
    c.take(dlen);
    Bytes slice(c.b.begin() + start, c.b.begin() + c.off);
    return decode_transcript(G, slice);
}

ObfuscatedMatrix take_matrix(const GroupContext& G, Cursor& c, MatrixRole origin) {
    size_t start = c.off;
    size_t n = c.u16();
    c.take(size_t(n) * n * G.scalar_bytes());
    Bytes slice(c.b.begin() + start, c.b.begin() + c.off);
    return decode_matrix(G, slice, origin);
}

Bytes take_identity(Cursor& c) {
    size_t len = c.u16();
    return c.take(len);
}

void put_identity(Bytes& out, const Bytes& I) {
    if (I.size() > 0xffff) throw GroupError("msg: identity too long");
    put_u16(out, uint16_t(I.size()));
    put_bytes(out, I);
}

}  // namespace

const char* msg_kind_name(MsgKind k) {
    switch (k) {
        case MsgKind::reg_request: return "reg-request";
        case MsgKind::reg_response: return "reg-response";
        case MsgKind::task_post: return "task-post";
        case MsgKind::match_request: return "match-request";
        case MsgKind::match_response: return "match-response";
        case MsgKind::match_failure: return "match-failure";
        case MsgKind::report: return "report";
        case MsgKind::trace: return "trace";
        case MsgKind::selected_report: return "selected-report";
        case MsgKind::trust_response: return "trust-response";
        case MsgKind::credit_update: return "credit-update";
    }
    throw GroupError("msg: unknown kind");
}

int64_t fixed_from_double(double v) {
    double scaled = v * double(kFixedOne);
    if (!(scaled >= -9.2e18 && scaled <= 9.2e18)) throw GroupError("msg: fixed overflow");
    return int64_t(std::llround(scaled));
}

double fixed_to_double(int64_t v) { return double(v) / double(kFixedOne); }

int64_t credit_delta(int64_t eps_fixed, int64_t Q) {
    __int128 prod = __int128(eps_fixed) * Q;
    __int128 half = __int128(1) << 31;
    __int128 adj = prod >= 0 ? prod + half : prod - half;
    return int64_t(adj / (__int128(1) << 32));
}

size_t gt_payload_capacity(const GroupContext& G) {
    return 2 * (G.target_bytes() / 2 - 1) - 2;
}

TargetElement gt_encode_payload(const GroupContext& G, const Bytes& payload) {
    if (payload.empty()) throw GroupError("msg: empty payload");
    if (payload.size() > gt_payload_capacity(G)) throw GroupError("msg: payload too long");
    size_t half = G.target_bytes() / 2;
    Bytes stream;
    put_u16(stream, uint16_t(payload.size()));
    put_bytes(stream, payload);
    stream.resize(2 * (half - 1), 0);
    Bytes enc(G.target_bytes(), 0);
    std::memcpy(enc.data() + 1, stream.data(), half - 1);
    std::memcpy(enc.data() + half + 1, stream.data() + half - 1, half - 1);
    return G.decode_target(enc);
}

Bytes gt_decode_payload(const GroupContext& G, const TargetElement& m) {
    Bytes enc = m.encode();
    size_t half = G.target_bytes() / 2;
    if (enc[0] != 0 || enc[half] != 0) throw GroupError("msg: not a payload element");
    Bytes stream(enc.begin() + 1, enc.begin() + half);
    stream.insert(stream.end(), enc.begin() + half + 1, enc.end());
    size_t len = size_t(stream[0]) << 8 | stream[1];
    if (len == 0 || len > gt_payload_capacity(G)) throw GroupError("msg: not a payload element");
    for (size_t i = 2 + len; i < stream.size(); ++i)
        if (stream[i] != 0) throw GroupError("msg: not a payload element");
    return Bytes(stream.begin() + 2, stream.begin() + 2 + len);
}

Bytes reg_request_context(const GroupContext& G, const RegRequest& m) {
    (void)G;
    Bytes out;
    put_identity(out, m.I);
    put_bytes(out, m.C.encode());
    put_bytes(out, m.Cp.encode());
    put_bytes(out, m.Ahat.encode());
    return out;
}

Bytes task_post_context(const GroupContext& G, const TaskPost& m) {
    (void)G;
    Bytes out;
    put_bytes(out, m.c1.encode());
    put_bytes(out, m.c2.encode());
    put_bytes(out, m.c3.encode());
    put_u64(out, m.expires);
    put_bytes(out, encode_matrix(m.area));
    put_i64(out, m.gamma);
    put_u64(out, m.quota);
    return out;
}

Bytes match_request_context(const GroupContext& G, const MatchRequest& m) {
    (void)G;
    Bytes out;
    put_bytes(out, m.mu.encode());
    put_bytes(out, encode_matrix(m.route));
    return out;
}

Bytes report_context(const GroupContext& G, const Report& m) {
    (void)G;
    Bytes out;
    put_bytes(out, m.D.encode());
    put_bytes(out, m.Dp.encode());
    put_u64(out, m.tau);
    return out;
}

Bytes encode_reg_request(const GroupContext& G, const RegRequest& m) {
    Bytes out = reg_request_context(G, m);
    put_bytes(out, encode_transcript(G, m.pk1));
    return out;
}

RegRequest decode_reg_request(const GroupContext& G, const Bytes& in) {
    Cursor c{in};
    RegRequest m;
    m.I = take_identity(c);
    m.C = take_source(G, c, Side::left);
    m.Cp = take_source(G, c, Side::left);
    m.Ahat = take_source(G, c, Side::right);
    m.pk1 = take_transcript(G, c);
    c.done();
    return m;
}

Bytes encode_reg_response(const GroupContext& G, const RegResponse& m) {
    (void)G;
    Bytes out;
    put_bytes(out, m.A.encode());
    put_bytes(out, m.B.encode());
    put_bytes(out, m.s2.encode());
    put_bytes(out, m.t2.encode());
    put_bytes(out, m.e.encode());
    put_bytes(out, m.f.encode());
    put_i64(out, m.P0);
    put_bytes(out, m.RK.encode());
    return out;
}

RegResponse decode_reg_response(const GroupContext& G, const Bytes& in) {
    Cursor c{in};
    RegResponse m;
    m.A = take_source(G, c, Side::left);
    m.B = take_source(G, c, Side::left);
    m.s2 = take_scalar(G, c);
    m.t2 = take_scalar(G, c);
    m.e = take_scalar(G, c);
    m.f = take_scalar(G, c);
    m.P0 = c.i64();
    m.RK = take_source(G, c, Side::right);
    c.done();
    return m;
}

Bytes encode_task_post(const GroupContext& G, const TaskPost& m) {
    Bytes out = task_post_context(G, m);
    put_bytes(out, encode_transcript(G, m.pk2));
    return out;
}

TaskPost decode_task_post(const GroupContext& G, const Bytes& in) {
    Cursor c{in};
    TaskPost m;
    m.c1 = take_source(G, c, Side::right);
    m.c2 = take_source(G, c, Side::left);
    m.c3 = take_target(G, c);
    m.expires = c.u64();
    m.area = take_matrix(G, c, MatrixRole::area);
    m.gamma = c.i64();
    m.quota = c.u64();
    m.pk2 = take_transcript(G, c);
    c.done();
    return m;
}

Bytes encode_match_request(const GroupContext& G, const MatchRequest& m) {
    Bytes out = match_request_context(G, m);
    put_bytes(out, encode_transcript(G, m.pk3));
    return out;
}

MatchRequest decode_match_request(const GroupContext& G, const Bytes& in) {
    Cursor c{in};
    MatchRequest m;
    m.mu = take_source(G, c, Side::left);
    m.route = take_matrix(G, c, MatrixRole::user);
    m.pk3 = take_transcript(G, c);
    c.done();
    return m;
}

Bytes encode_match_response(const GroupContext& G, const MatchResponse& m) {
    (void)G;
    Bytes out;
    put_u64(out, m.num);
    put_bytes(out, m.c2.encode());
    put_bytes(out, m.c3.encode());
    put_bytes(out, m.c4.encode());
    put_u64(out, m.expires);
    put_i64(out, m.gamma);
    return out;
}

MatchResponse decode_match_response(const GroupContext& G, const Bytes& in) {
    Cursor c{in};
    MatchResponse m;
    m.num = c.u64();
    m.c2 = take_source(G, c, Side::left);
    m.c3 = take_target(G, c);
    m.c4 = take_target(G, c);
    m.expires = c.u64();
    m.gamma = c.i64();
    c.done();
    return m;
}

Bytes encode_match_failure(const MatchFailure& m) { return Bytes{m.flag}; }

MatchFailure decode_match_failure(const Bytes& in) {
    Cursor c{in};
    MatchFailure m;
    m.flag = c.u8();
    if (m.flag != 1) throw GroupError("msg: bad failure flag");
    c.done();
    return m;
}

Bytes encode_report(const GroupContext& G, const Report& m) {
    Bytes out;
    put_u64(out, m.num);
    put_bytes(out, m.D.encode());
    put_bytes(out, m.Dp.encode());
    put_bytes(out, m.Cp.encode());
    put_bytes(out, m.X.encode());
    put_bytes(out, m.Y.encode());
    put_bytes(out, m.Z.encode());
    put_i64(out, m.Q);
    put_u64(out, m.tau);
    put_bytes(out, encode_transcript(G, m.spk));
    return out;
}

Report decode_report(const GroupContext& G, const Bytes& in) {
    Cursor c{in};
    Report m;
    m.num = c.u64();
    m.D = take_source(G, c, Side::right);
    m.Dp = take_target(G, c);
    m.Cp = take_source(G, c, Side::left);
    m.X = take_scalar(G, c);
    m.Y = take_target(G, c);
    m.Z = take_target(G, c);
    m.Q = c.i64();
    m.tau = c.u64();
    m.spk = take_transcript(G, c);
    c.done();
    return m;
}

Bytes encode_trace(const GroupContext& G, const TraceRequest& m) {
    (void)G;
    return m.W.encode();
}

TraceRequest decode_trace(const GroupContext& G, const Bytes& in) {
    Cursor c{in};
    TraceRequest m;
    m.W = take_target(G, c);
    c.done();
    return m;
}

Bytes encode_selected_report(const GroupContext& G, const SelectedReport& m) {
    (void)G;
    Bytes out;
    put_u64(out, m.num);
    put_bytes(out, m.D.encode());
    put_bytes(out, m.Dp.encode());
    put_bytes(out, m.Y.encode());
    put_i64(out, m.Q);
    put_u64(out, m.tau);
    return out;
}

SelectedReport decode_selected_report(const GroupContext& G, const Bytes& in) {
    Cursor c{in};
    SelectedReport m;
    m.num = c.u64();
    m.D = take_source(G, c, Side::right);
    m.Dp = take_target(G, c);
    m.Y = take_target(G, c);
    m.Q = c.i64();
    m.tau = c.u64();
    c.done();
    return m;
}

Bytes encode_trust_response(const GroupContext& G, const TrustResponse& m) {
    (void)G;
    Bytes out;
    put_i64(out, m.eps);
    put_bytes(out, m.Y.encode());
    return out;
}

TrustResponse decode_trust_response(const GroupContext& G, const Bytes& in) {
    Cursor c{in};
    TrustResponse m;
    m.eps = c.i64();
    m.Y = take_target(G, c);
    c.done();
    return m;
}

Bytes encode_credit_update(const GroupContext& G, const CreditUpdate& m) {
    (void)G;
    Bytes out;
    put_bytes(out, m.B.encode());
    put_bytes(out, m.t2.encode());
    put_bytes(out, m.f.encode());
    put_i64(out, m.theta);
    put_bytes(out, m.Y.encode());
    return out;
}

CreditUpdate decode_credit_update(const GroupContext& G, const Bytes& in) {
    Cursor c{in};
    CreditUpdate m;
    m.B = take_source(G, c, Side::left);
    m.t2 = take_scalar(G, c);
    m.f = take_scalar(G, c);
    m.theta = c.i64();
    m.Y = take_target(G, c);
    c.done();
    return m;
}

Bytes frame_message(MsgKind k, const Bytes& payload) {
    Bytes out{uint8_t(k), kMsgVersion};
    put_bytes(out, payload);
    return out;
}

std::pair<MsgKind, Bytes> unframe_message(const Bytes& in) {
    if (in.size() < 2) throw GroupError("msg: truncated");
    uint8_t k = in[0];
    if (k < uint8_t(MsgKind::reg_request) || k > uint8_t(MsgKind::credit_update))
        throw GroupError("msg: unknown kind");
    if (in[1] != kMsgVersion) throw GroupError("msg: unsupported version");
    return {MsgKind(k), Bytes(in.begin() + 2, in.end())};
}

}  // namespace mcs
