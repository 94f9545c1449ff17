#pragma once

// Byte-level encoding helpers shared by the on-disk formats.

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>

namespace girit::codec {

/// CRC-64/XZ (ECMA-182 polynomial, reflected, inverted).
[[nodiscard]] auto crc64(std::string_view bytes) -> std::uint64_t;
/// Checksum of the concatenation of `parts`.
[[nodiscard]] auto crc64(std::initializer_list<std::string_view> parts) -> std::uint64_t;

/// Rendered as 16 lowercase hex digits.
[[nodiscard]] auto hex64(std::uint64_t value) -> std::string;

void put_varint(std::string& out, std::uint64_t value);
void put_u32(std::string& out, std::uint32_t value);
void put_u64(std::string& out, std::uint64_t value);
void put_bytes(std::string& out, std::string_view bytes);

/// Bounds-checked little-endian reader over a byte buffer.
/// Every getter returns nullopt on truncation instead of reading past the end.
class Reader {
public:
    explicit Reader(std::string_view data) : data_(data) {}

    [[nodiscard]] auto varint() -> std::optional<std::uint64_t>;
    [[nodiscard]] auto u32() -> std::optional<std::uint32_t>;
    [[nodiscard]] auto u64() -> std::optional<std::uint64_t>;
    [[nodiscard]] auto bytes(std::size_t count) -> std::optional<std::string_view>;

    [[nodiscard]] auto position() const noexcept -> std::size_t { return pos_; }
    [[nodiscard]] auto remaining() const noexcept -> std::size_t { return data_.size() - pos_; }
    [[nodiscard]] auto at_end() const noexcept -> bool { return pos_ == data_.size(); }

private:
    std::string_view data_;
    std::size_t pos_ = 0;
};

}  // namespace girit::codec
