#include "intercloud/bytes.hpp"

namespace intercloud {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}
}  // namespace

std::string to_hex(ByteView data) {
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0x0f]);
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0)
        throw std::invalid_argument("from_hex: odd-length input");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_value(hex[i]);
        int lo = hex_value(hex[i + 1]);
        if (hi < 0 || lo < 0)
            throw std::invalid_argument("from_hex: non-hex character");
        out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
    }
    return out;
}

Encoder& Encoder::bytes(ByteView data) {
    u32(static_cast<std::uint32_t>(data.size()));
    return raw(data);
}

Encoder& Encoder::tag(std::string_view t) {
    u32(static_cast<std::uint32_t>(t.size()));
    buf_.insert(buf_.end(), t.begin(), t.end());
    return *this;
}

void Decoder::need(std::size_t n) {
    if (data_.size() - pos_ < n)
        throw DecodeError("decoder: truncated input");
}

std::uint8_t Decoder::u8() {
    need(1);
    return data_[pos_++];
}

std::uint32_t Decoder::u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = v << 8 | data_[pos_++];
    return v;
}

std::uint64_t Decoder::u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = v << 8 | data_[pos_++];
    return v;
}

Bytes Decoder::bytes() {
    std::uint32_t n = u32();
    return raw(n);
}

Bytes Decoder::raw(std::size_t n) {
    need(n);
    Bytes out(data_.begin() + pos_, data_.begin() + pos_ + n);
    pos_ += n;
    return out;
}

void Decoder::expect_tag(std::string_view t) {
    Bytes got = bytes();
    if (std::string_view(reinterpret_cast<const char*>(got.data()), got.size()) != t)
        throw DecodeError("decoder: tag mismatch");
}

void Decoder::finish() {
    if (!done()) throw DecodeError("decoder: trailing bytes");
}

}  // namespace intercloud
