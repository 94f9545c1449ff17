#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace girit::utf8 {

/// Offset of the first byte that starts an ill-formed sequence, if any.
/// Follows the Unicode well-formedness table (no overlongs, no surrogates,
/// nothing above U+10FFFF).
[[nodiscard]] auto find_invalid(std::string_view bytes) -> std::optional<std::size_t>;

[[nodiscard]] inline auto is_valid(std::string_view bytes) -> bool
{
    return !find_invalid(bytes).has_value();
}

/// Incremental validator for data arriving in arbitrary chunks.
/// A multi-byte sequence may straddle two `feed` calls.
class StreamValidator {
public:
    /// Validates the next chunk. Returns the absolute offset of the first bad
    /// byte, counted from the first byte ever fed.
    auto feed(std::string_view chunk) -> std::optional<std::uint64_t>;

    /// Reports a sequence left incomplete at end of input.
    [[nodiscard]] auto finish() const -> std::optional<std::uint64_t>;

    [[nodiscard]] auto bytes_seen() const noexcept -> std::uint64_t { return seen_; }

private:
    std::uint64_t seen_ = 0;
    std::uint64_t sequence_start_ = 0;
    int needed_ = 0;
    unsigned char lower_ = 0x80;
    unsigned char upper_ = 0xBF;
};

}  // namespace girit::utf8
