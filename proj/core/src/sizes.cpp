#include "mcs/sizes.hpp"

#include <vector>

namespace mcs {

namespace {

enum class Fld {
    identity,  // length-prefixed bytes
    src,
    tgt,
    scl,
    credit,
    num,
    expires,
    gamma,
    quota,
    tau,
    matrix,  // n^2 scalars plus a dimension header
    flag,    // one bit, rounded up to a byte on the wire
    pk1,     // c + 3 responses
    pk23,    // 2 aux elements, c + 8 responses
    spk,     // 4 aux elements, c + 15 responses
};

struct Ent {
    Fld f;
    uint32_t cnt;
};

const std::vector<Ent>& schema(MsgKind k) {
    static const std::vector<Ent> reg_request{
        {Fld::identity, 1}, {Fld::src, 3}, {Fld::pk1, 1}};
    static const std::vector<Ent> reg_response{
        {Fld::src, 2}, {Fld::scl, 4}, {Fld::credit, 1}, {Fld::src, 1}};
    static const std::vector<Ent> task_post{{Fld::src, 2},   {Fld::tgt, 1},
                                            {Fld::expires, 1}, {Fld::matrix, 1},
                                            {Fld::gamma, 1},   {Fld::quota, 1},
                                            {Fld::pk23, 1}};
    static const std::vector<Ent> match_request{{Fld::src, 1}, {Fld::matrix, 1}, {Fld::pk23, 1}};
    static const std::vector<Ent> match_response{
        {Fld::num, 1}, {Fld::src, 1}, {Fld::tgt, 2}, {Fld::expires, 1}, {Fld::gamma, 1}};
    static const std::vector<Ent> match_failure{{Fld::flag, 1}};
    static const std::vector<Ent> report{{Fld::num, 1}, {Fld::src, 1},    {Fld::tgt, 1},
                                         {Fld::src, 1}, {Fld::scl, 1},    {Fld::tgt, 2},
                                         {Fld::credit, 1}, {Fld::tau, 1}, {Fld::spk, 1}};
    static const std::vector<Ent> trace{{Fld::tgt, 1}};
    static const std::vector<Ent> selected_report{
        {Fld::num, 1}, {Fld::src, 1}, {Fld::tgt, 2}, {Fld::credit, 1}, {Fld::tau, 1}};
    static const std::vector<Ent> trust_response{{Fld::gamma, 1}, {Fld::tgt, 1}};
    static const std::vector<Ent> credit_update{
        {Fld::src, 1}, {Fld::scl, 2}, {Fld::credit, 1}, {Fld::tgt, 1}};
    switch (k) {
        case MsgKind::reg_request: return reg_request;
        case MsgKind::reg_response: return reg_response;
        case MsgKind::task_post: return task_post;
        case MsgKind::match_request: return match_request;
        case MsgKind::match_response: return match_response;
        case MsgKind::match_failure: return match_failure;
        case MsgKind::report: return report;
        case MsgKind::trace: return trace;
        case MsgKind::selected_report: return selected_report;
        case MsgKind::trust_response: return trust_response;
        case MsgKind::credit_update: return credit_update;
    }
    throw GroupError("sizes: unknown kind");
}

// kind byte, three u16 counters, 32-byte context digest
constexpr uint64_t kProofHeaderBits = 8 * (1 + 2 + 2 + 2 + 32);

}  // namespace

SizeModel symbolic_size_model() {
    SizeModel m;
    m.wp = 160;
    m.wG = 512;
    m.wGT = 1024;
    m.framed = false;
    return m;
}

SizeModel wire_size_model(const GroupContext& G) {
    SizeModel m;
    m.wp = 8 * G.scalar_bytes();
    m.wG = 8 * G.source_bytes();
    m.wGT = 8 * G.target_bytes();
    m.credit_bits = 64;
    m.num_bits = 64;
    m.expires_bits = 64;
    m.gamma_bits = 64;
    m.quota_bits = 64;
    m.tau_bits = 64;
    m.framed = true;
    return m;
}

uint64_t SizeBreakdown::total_bits(const SizeModel& m) const {
    return element_bits + framing_bits + matrix_cells * m.wp + id_count * m.id_bits +
           credit_count * m.credit_bits + num_count * m.num_bits +
           expires_count * m.expires_bits + gamma_count * m.gamma_bits +
           quota_count * m.quota_bits + tau_count * m.tau_bits;
}

std::string SizeBreakdown::formula(const SizeModel& m) const {
    std::string s = std::to_string(element_bits + framing_bits);
    if (matrix_cells > 0) s += " + " + std::to_string(m.wp) + "*n^2";
    auto term = [&](uint64_t cnt, const char* sym) {
        if (cnt == 1)
            s += std::string(" + ") + sym;
        else if (cnt > 1)
            s += " + " + std::to_string(cnt) + std::string(sym);
    };
    term(id_count, "|I|");
    term(credit_count, "|P0|");
    term(num_count, "|num|");
    term(expires_count, "|expires|");
    term(gamma_count, "|gamma|");
    term(quota_count, "|w|");
    term(tau_count, "|tau|");
    return s;
}

SizeBreakdown account_message(MsgKind k, const SizeModel& m, uint64_t n) {
    SizeBreakdown b;
    for (const Ent& e : schema(k)) {
        switch (e.f) {
            case Fld::identity:
                b.id_count += e.cnt;
                if (m.framed) b.framing_bits += 16 * e.cnt;
                break;
            case Fld::src: b.element_bits += e.cnt * m.wG; break;
            case Fld::tgt: b.element_bits += e.cnt * m.wGT; break;
            case Fld::scl: b.element_bits += e.cnt * m.wp; break;
            case Fld::credit: b.credit_count += e.cnt; break;
            case Fld::num: b.num_count += e.cnt; break;
            case Fld::expires: b.expires_count += e.cnt; break;
            case Fld::gamma: b.gamma_count += e.cnt; break;
            case Fld::quota: b.quota_count += e.cnt; break;
            case Fld::tau: b.tau_count += e.cnt; break;
            case Fld::matrix:
                b.matrix_cells += e.cnt * n * n;
                if (m.framed) b.framing_bits += 16 * e.cnt;
                break;
            case Fld::flag: b.element_bits += e.cnt * (m.framed ? 8 : 1); break;
            case Fld::pk1:
                b.element_bits += e.cnt * 4 * m.wp;
                if (m.framed) b.framing_bits += e.cnt * kProofHeaderBits;
                break;
            case Fld::pk23:
                b.element_bits += e.cnt * (2 * m.wG + 9 * m.wp);
                if (m.framed) b.framing_bits += e.cnt * kProofHeaderBits;
                break;
            case Fld::spk:
                b.element_bits += e.cnt * (4 * m.wG + 16 * m.wp);
                if (m.framed) b.framing_bits += e.cnt * kProofHeaderBits;
                break;
        }
    }
    return b;
}

}  // namespace mcs
