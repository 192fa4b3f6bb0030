#include "mcs/sha.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace mcs {

const uint8_t* ByteReader::take(size_t n) {
    if (size_ - pos_ < n) throw std::out_of_range("ByteReader: truncated input");
    const uint8_t* p = data_ + pos_;
    pos_ += n;
    return p;
}

std::string to_hex(const Bytes& b) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(b.size() * 2);
    for (uint8_t v : b) {
        s.push_back(digits[v >> 4]);
        s.push_back(digits[v & 15]);
    }
    return s;
}

static int hex_val(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("from_hex: bad digit");
}

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2) throw std::invalid_argument("from_hex: odd length");
    Bytes out(hex.size() / 2);
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = uint8_t(hex_val(hex[2 * i]) << 4 | hex_val(hex[2 * i + 1]));
    return out;
}

Bytes shake256(const uint8_t* data, size_t len, size_t out_len) {
    Bytes out(out_len);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("shake256: ctx alloc failed");
    bool ok = EVP_DigestInit_ex(ctx, EVP_shake256(), nullptr) == 1 &&
              EVP_DigestUpdate(ctx, data, len) == 1 &&
              EVP_DigestFinalXOF(ctx, out.data(), out.size()) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok) throw std::runtime_error("shake256: digest failed");
    return out;
}

static Bytes frame(std::string_view tag, const Bytes* const* parts, size_t nparts) {
    Bytes buf;
    put_bytes(buf, std::string_view("mcs1"));
    put_u32(buf, uint32_t(tag.size()));
    put_bytes(buf, tag);
    put_u32(buf, uint32_t(nparts));
    for (size_t i = 0; i < nparts; ++i) {
        put_u64(buf, parts[i]->size());
        put_bytes(buf, *parts[i]);
    }
    return buf;
}

Bytes tagged_hash(std::string_view tag, const std::vector<const Bytes*>& parts, size_t out_len) {
    Bytes buf = frame(tag, parts.data(), parts.size());
    return shake256(buf, out_len);
}

Bytes tagged_hash(std::string_view tag, std::initializer_list<const Bytes*> parts,
                  size_t out_len) {
    Bytes buf = frame(tag, parts.begin(), parts.size());
    return shake256(buf, out_len);
}

Bytes tagged_hash(std::string_view tag, const std::vector<Bytes>& parts, size_t out_len) {
    std::vector<const Bytes*> ptrs;
    ptrs.reserve(parts.size());
    for (const Bytes& p : parts) ptrs.push_back(&p);
    Bytes buf = frame(tag, ptrs.data(), ptrs.size());
    return shake256(buf, out_len);
}

}  // namespace mcs
