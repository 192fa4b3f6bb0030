#pragma once

#include <cstdint>
#include <string>

#include "mcs/group.hpp"
#include "mcs/messages.hpp"

namespace mcs {

/* Message-size accounting.  One schema table drives two views: the symbolic
 * widths (|p| = 160, |G| = 512, |GT| = 1024, variable fields left as
 * symbols) and the wire view, where widths come from the live group context
 * and framing bytes (length prefixes, proof headers) are included so the
 * total equals the encoder output exactly. */
struct SizeModel {
    uint64_t wp = 0;   // bits per Zp scalar
    uint64_t wG = 0;   // bits per source-group element
    uint64_t wGT = 0;  // bits per target-group element
    uint64_t id_bits = 0;
    uint64_t credit_bits = 0;  // P0 / Q / theta
    uint64_t num_bits = 0;
    uint64_t expires_bits = 0;
    uint64_t gamma_bits = 0;  // gamma and trust levels
    uint64_t quota_bits = 0;
    uint64_t tau_bits = 0;
    bool framed = false;
};

SizeModel symbolic_size_model();
// id_bits is per-instance; callers set it before totalling a registration.
SizeModel wire_size_model(const GroupContext& G);

struct SizeBreakdown {
    uint64_t element_bits = 0;  // group elements, scalars, proof bodies, flags
    uint64_t framing_bits = 0;  // prefixes and headers, zero when unframed
    uint64_t matrix_cells = 0;  // n^2 scalar entries
    uint64_t id_count = 0;
    uint64_t credit_count = 0;
    uint64_t num_count = 0;
    uint64_t expires_count = 0;
    uint64_t gamma_count = 0;
    uint64_t quota_count = 0;
    uint64_t tau_count = 0;

    uint64_t total_bits(const SizeModel& m) const;
    // "4512 + 160*n^2 + |expires| + |gamma| + |w|" at the model's widths
    std::string formula(const SizeModel& m) const;
};

SizeBreakdown account_message(MsgKind k, const SizeModel& m, uint64_t n = 0);

}  // namespace mcs
