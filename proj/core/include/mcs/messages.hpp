#pragma once

#include <cstdint>
#include <utility>

#include "mcs/geo.hpp"
#include "mcs/group.hpp"
#include "mcs/zkp.hpp"

namespace mcs {

/* Wire formats for every message the five phases exchange.  Encoders emit
 * the payload only; frame_message prepends the one-byte kind and a version
 * byte.  All integers are fixed-width big-endian: counters and slots as
 * unsigned 64-bit, credit amounts as two's-complement signed 64-bit, and
 * trust levels as signed Q32.32 fixed point so replays are byte-identical. */

enum class MsgKind : uint8_t {
    reg_request = 1,
    reg_response = 2,
    task_post = 3,
    match_request = 4,
    match_response = 5,
    match_failure = 6,
    report = 7,
    trace = 8,
    selected_report = 9,
    trust_response = 10,
    credit_update = 11,
};

const char* msg_kind_name(MsgKind k);

inline constexpr uint8_t kMsgVersion = 1;

// Signed Q32.32 fixed point used for trust levels and their bounds.
inline constexpr int64_t kFixedOne = int64_t(1) << 32;
int64_t fixed_from_double(double v);
double fixed_to_double(int64_t v);

// theta = INT(eps * Q), rounding halves away from zero; eps is Q32.32.
int64_t credit_delta(int64_t eps_fixed, int64_t Q);

struct RegRequest {
    Bytes I;
    SourceElement C, Cp, Ahat;
    ProofTranscript pk1;
};

struct RegResponse {
    SourceElement A, B;
    Scalar s2, t2, e, f;
    int64_t P0 = 0;
    SourceElement RK;
};

struct TaskPost {
    SourceElement c1, c2;
    TargetElement c3;
    uint64_t expires = 0;
    ObfuscatedMatrix area;  // N-hat
    int64_t gamma = 0;      // Q32.32 trust bound
    uint64_t quota = 0;     // w, reports wanted per slot
    ProofTranscript pk2;
};

struct MatchRequest {
    SourceElement mu;
    ObfuscatedMatrix route;  // N-tilde
    ProofTranscript pk3;
};

struct MatchResponse {
    uint64_t num = 0;
    SourceElement c2;
    TargetElement c3, c4;
    uint64_t expires = 0;
    int64_t gamma = 0;
};

struct MatchFailure {
    uint8_t flag = 1;
};

struct Report {
    uint64_t num = 0;
    SourceElement D;
    TargetElement Dp;
    SourceElement Cp;
    Scalar X;
    TargetElement Y, Z;
    int64_t Q = 0;
    uint64_t tau = 0;
    ProofTranscript spk;
};

struct TraceRequest {
    TargetElement W;
};

struct SelectedReport {
    uint64_t num = 0;
    SourceElement D;
    TargetElement Dp, Y;
    int64_t Q = 0;
    uint64_t tau = 0;
};

struct TrustResponse {
    int64_t eps = 0;  // Q32.32, within [-gamma, gamma]
    TargetElement Y;
};

struct CreditUpdate {
    SourceElement B;
    Scalar t2, f;
    int64_t theta = 0;
    TargetElement Y;
};

/* Byte payloads ride inside target-group elements: a 16-bit length header
 * plus the data, split across the two field coordinates with their leading
 * byte held at zero.  Capacity is gt_payload_capacity(G) bytes. */
size_t gt_payload_capacity(const GroupContext& G);
TargetElement gt_encode_payload(const GroupContext& G, const Bytes& payload);
Bytes gt_decode_payload(const GroupContext& G, const TargetElement& m);

/* Challenge contexts: the fields of the carrying message that the embedded
 * proof must be bound to, in wire order.  Registration and task messages
 * bind everything ahead of the transcript; reports bind the ciphertext pair
 * and the slot (the rest sits in the SPK statement itself). */
Bytes reg_request_context(const GroupContext& G, const RegRequest& m);
Bytes task_post_context(const GroupContext& G, const TaskPost& m);
Bytes match_request_context(const GroupContext& G, const MatchRequest& m);
Bytes report_context(const GroupContext& G, const Report& m);

Bytes encode_reg_request(const GroupContext& G, const RegRequest& m);
RegRequest decode_reg_request(const GroupContext& G, const Bytes& in);
Bytes encode_reg_response(const GroupContext& G, const RegResponse& m);
RegResponse decode_reg_response(const GroupContext& G, const Bytes& in);
Bytes encode_task_post(const GroupContext& G, const TaskPost& m);
TaskPost decode_task_post(const GroupContext& G, const Bytes& in);
Bytes encode_match_request(const GroupContext& G, const MatchRequest& m);
MatchRequest decode_match_request(const GroupContext& G, const Bytes& in);
Bytes encode_match_response(const GroupContext& G, const MatchResponse& m);
MatchResponse decode_match_response(const GroupContext& G, const Bytes& in);
Bytes encode_match_failure(const MatchFailure& m);
MatchFailure decode_match_failure(const Bytes& in);
Bytes encode_report(const GroupContext& G, const Report& m);
Report decode_report(const GroupContext& G, const Bytes& in);
Bytes encode_trace(const GroupContext& G, const TraceRequest& m);
TraceRequest decode_trace(const GroupContext& G, const Bytes& in);
Bytes encode_selected_report(const GroupContext& G, const SelectedReport& m);
SelectedReport decode_selected_report(const GroupContext& G, const Bytes& in);
Bytes encode_trust_response(const GroupContext& G, const TrustResponse& m);
TrustResponse decode_trust_response(const GroupContext& G, const Bytes& in);
Bytes encode_credit_update(const GroupContext& G, const CreditUpdate& m);
CreditUpdate decode_credit_update(const GroupContext& G, const Bytes& in);

Bytes frame_message(MsgKind k, const Bytes& payload);
std::pair<MsgKind, Bytes> unframe_message(const Bytes& in);

}  // namespace mcs
