#pragma once

#include <cstdint>
#include <string_view>

#include "mcs/bytes.hpp"

namespace mcs {

// Deterministic random byte stream keyed by a seed (SHAKE256 in counter mode).
// fork(label) derives an independent stream; the same (seed, fork path) always
// replays the same bytes, which is what makes scenario runs reproducible.
class RandomSource {
public:
    explicit RandomSource(uint64_t seed);
    explicit RandomSource(const Bytes& seed);

    RandomSource fork(std::string_view label) const;
    RandomSource fork(std::string_view label, uint64_t index) const;

    void fill(uint8_t* out, size_t n);
    Bytes bytes(size_t n);
    uint64_t u64();
    // Uniform in [0, bound) by rejection; bound must be nonzero.
    uint64_t below(uint64_t bound);

private:
    struct RawKey {};
    RandomSource(RawKey, Bytes key);
    void refill();

    Bytes key_;
    uint64_t block_ = 0;
    Bytes buf_;
    size_t pos_ = 0;
};

}  // namespace mcs
