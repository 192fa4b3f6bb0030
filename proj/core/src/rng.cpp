#include "mcs/rng.hpp"

#include <stdexcept>

#include "mcs/sha.hpp"

namespace mcs {

static constexpr size_t kBlockBytes = 4096;

RandomSource::RandomSource(RawKey, Bytes key) : key_(std::move(key)) {}

RandomSource::RandomSource(uint64_t seed) {
    Bytes s;
    put_u64(s, seed);
    key_ = tagged_hash("mcs/rng/seed64", {&s}, 32);
}

RandomSource::RandomSource(const Bytes& seed) {
    key_ = tagged_hash("mcs/rng/seed", {&seed}, 32);
}

RandomSource RandomSource::fork(std::string_view label) const {
    Bytes lb = to_bytes(label);
    return RandomSource(RawKey{}, tagged_hash("mcs/rng/fork", {&key_, &lb}, 32));
}

RandomSource RandomSource::fork(std::string_view label, uint64_t index) const {
    Bytes lb = to_bytes(label);
    Bytes ix;
    put_u64(ix, index);
    return RandomSource(RawKey{}, tagged_hash("mcs/rng/fork", {&key_, &lb, &ix}, 32));
}

void RandomSource::refill() {
    Bytes input = key_;
    put_u64(input, block_++);
    buf_ = shake256(input, kBlockBytes);
    pos_ = 0;
}

void RandomSource::fill(uint8_t* out, size_t n) {
    while (n > 0) {
        if (pos_ == buf_.size()) refill();
        size_t take = std::min(n, buf_.size() - pos_);
        std::copy(buf_.begin() + pos_, buf_.begin() + pos_ + take, out);
        pos_ += take;
        out += take;
        n -= take;
    }
}

Bytes RandomSource::bytes(size_t n) {
    Bytes out(n);
    fill(out.data(), n);
    return out;
}

uint64_t RandomSource::u64() {
    uint8_t b[8];
    fill(b, 8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = v << 8 | b[i];
    return v;
}

uint64_t RandomSource::below(uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("RandomSource::below: zero bound");
    // Rejection sampling on the top of the range keeps the draw exactly uniform.
    uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
        uint64_t v = u64();
        if (v < limit) return v % bound;
    }
}

}  // namespace mcs
