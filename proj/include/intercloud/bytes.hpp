#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace intercloud {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);  // throws std::invalid_argument on bad input

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

// Canonical binary encoding, used everywhere a byte-exact representation is
// needed (signing inputs, digests, golden-value tests, file formats).
//
//   u8            1 byte
//   u32 / u64     big-endian, fixed width
//   i64           two's complement, big-endian, fixed width
//   bytes         u32 length prefix + raw bytes
//   tag           ASCII string encoded as `bytes` (domain separation)
//   raw           fixed-width bytes, no prefix (e.g. 32-byte digests)
//   list<T>       u32 count prefix + elements in order
//
// Struct fields are encoded in declaration order. There is no padding and
// no versioning inside the encoding itself; tags carry version suffixes.
class Encoder {
public:
    Encoder& u8(std::uint8_t v) {
        buf_.push_back(v);
        return *this;
    }
    Encoder& u32(std::uint32_t v) {
        for (int shift = 24; shift >= 0; shift -= 8)
            buf_.push_back(static_cast<std::uint8_t>(v >> shift));
        return *this;
    }
    Encoder& u64(std::uint64_t v) {
        for (int shift = 56; shift >= 0; shift -= 8)
            buf_.push_back(static_cast<std::uint8_t>(v >> shift));
        return *this;
    }
    Encoder& i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }
    Encoder& raw(ByteView data) {
        buf_.insert(buf_.end(), data.begin(), data.end());
        return *this;
    }
    Encoder& bytes(ByteView data);
    Encoder& tag(std::string_view t);

    const Bytes& view() const { return buf_; }
    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

struct DecodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Decoder {
public:
    explicit Decoder(ByteView data) : data_(data) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    Bytes bytes();
    Bytes raw(std::size_t n);
    void expect_tag(std::string_view t);
    bool done() const { return pos_ == data_.size(); }
    void finish();  // throws DecodeError on trailing bytes

private:
    void need(std::size_t n);
    ByteView data_;
    std::size_t pos_ = 0;
};

}  // namespace intercloud
