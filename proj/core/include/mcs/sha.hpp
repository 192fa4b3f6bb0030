#pragma once

#include <initializer_list>

#include "mcs/bytes.hpp"

namespace mcs {

// One-shot SHAKE256 squeeze of `out_len` bytes over the raw input.
Bytes shake256(const uint8_t* data, size_t len, size_t out_len);
inline Bytes shake256(const Bytes& data, size_t out_len) {
    return shake256(data.data(), data.size(), out_len);
}

// Domain-separated, boundary-safe hashing: the digest covers
//   "mcs1" | u32(|tag|) | tag | u32(#parts) | (u64(|part|) | part)*
// so distinct tags and distinct part splits can never collide byte-wise.
Bytes tagged_hash(std::string_view tag, const std::vector<const Bytes*>& parts, size_t out_len);
Bytes tagged_hash(std::string_view tag, std::initializer_list<const Bytes*> parts,
                  size_t out_len);
Bytes tagged_hash(std::string_view tag, const std::vector<Bytes>& parts, size_t out_len);

}  // namespace mcs
