#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mcs {

using Bytes = std::vector<uint8_t>;

inline void put_u16(Bytes& out, uint16_t v) {
    out.push_back(uint8_t(v >> 8));
    out.push_back(uint8_t(v));
}

inline void put_u32(Bytes& out, uint32_t v) {
    for (int i = 3; i >= 0; --i) out.push_back(uint8_t(v >> (8 * i)));
}

inline void put_u64(Bytes& out, uint64_t v) {
    for (int i = 7; i >= 0; --i) out.push_back(uint8_t(v >> (8 * i)));
}

inline void put_i64(Bytes& out, int64_t v) { put_u64(out, uint64_t(v)); }

inline void put_bytes(Bytes& out, const uint8_t* p, size_t n) { out.insert(out.end(), p, p + n); }
inline void put_bytes(Bytes& out, const Bytes& b) { out.insert(out.end(), b.begin(), b.end()); }
inline void put_bytes(Bytes& out, std::string_view s) {
    out.insert(out.end(), s.begin(), s.end());
}

// Cursor over an immutable byte buffer; reads throw std::out_of_range past the end.
class ByteReader {
public:
    explicit ByteReader(const Bytes& b) : data_(b.data()), size_(b.size()) {}
    ByteReader(const uint8_t* p, size_t n) : data_(p), size_(n) {}

    size_t remaining() const { return size_ - pos_; }
    bool done() const { return pos_ == size_; }

    uint8_t u8() { return take(1)[0]; }
    uint16_t u16() {
        const uint8_t* p = take(2);
        return uint16_t(p[0]) << 8 | p[1];
    }
    uint32_t u32() {
        const uint8_t* p = take(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = v << 8 | p[i];
        return v;
    }
    uint64_t u64() {
        const uint8_t* p = take(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = v << 8 | p[i];
        return v;
    }
    int64_t i64() { return int64_t(u64()); }
    Bytes bytes(size_t n) {
        const uint8_t* p = take(n);
        return Bytes(p, p + n);
    }

private:
    const uint8_t* take(size_t n);
    const uint8_t* data_;
    size_t size_;
    size_t pos_ = 0;
};

std::string to_hex(const Bytes& b);
Bytes from_hex(std::string_view hex);

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

}  // namespace mcs
