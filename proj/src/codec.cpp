#include "girit/codec.hpp"

#include <boost/crc.hpp>

namespace girit::codec {

auto crc64(std::string_view bytes) -> std::uint64_t
{
    boost::crc_optimal<64, 0x42F0E1EBA9EA3693ULL, ~0ULL, ~0ULL, true, true> crc;
    crc.process_bytes(bytes.data(), bytes.size());
    return crc.checksum();
}

auto crc64(std::initializer_list<std::string_view> parts) -> std::uint64_t
{
    boost::crc_optimal<64, 0x42F0E1EBA9EA3693ULL, ~0ULL, ~0ULL, true, true> crc;
    for (auto part : parts) {
        crc.process_bytes(part.data(), part.size());
    }
    return crc.checksum();
}

auto hex64(std::uint64_t value) -> std::string
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

void put_varint(std::string& out, std::uint64_t value)
{
    while (value >= 0x80) {
        out.push_back(static_cast<char>((value & 0x7F) | 0x80));
        value >>= 7;
    }
    out.push_back(static_cast<char>(value));
}

void put_u32(std::string& out, std::uint32_t value)
{
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
    }
}

void put_u64(std::string& out, std::uint64_t value)
{
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
    }
}

void put_bytes(std::string& out, std::string_view bytes)
{
    put_varint(out, bytes.size());
    out.append(bytes);
}

auto Reader::varint() -> std::optional<std::uint64_t>
{
    std::uint64_t value = 0;
    for (int shift = 0; shift < 64; shift += 7) {
        if (pos_ >= data_.size()) {
            return std::nullopt;
        }
        auto const byte = static_cast<unsigned char>(data_[pos_++]);
        value |= static_cast<std::uint64_t>(byte & 0x7F) << shift;
        if ((byte & 0x80) == 0) {
            return value;
        }
    }
    return std::nullopt;
}

auto Reader::u32() -> std::optional<std::uint32_t>
{
    if (remaining() < 4) {
        return std::nullopt;
    }
    std::uint32_t value = 0;
    for (int i = 0; i < 4; ++i) {
        value |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
    }
    return value;
}

auto Reader::u64() -> std::optional<std::uint64_t>
{
    if (remaining() < 8) {
        return std::nullopt;
    }
    std::uint64_t value = 0;
    for (int i = 0; i < 8; ++i) {
        value |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
    }
    return value;
}

auto Reader::bytes(std::size_t count) -> std::optional<std::string_view>
{
    if (remaining() < count) {
        return std::nullopt;
    }
    auto view = data_.substr(pos_, count);
    pos_ += count;
    return view;
}

}  // namespace girit::codec
