#include "girit/utf8.hpp"

namespace girit::utf8 {

auto StreamValidator::feed(std::string_view chunk) -> std::optional<std::uint64_t>
{
    for (char ch : chunk) {
        auto const byte = static_cast<unsigned char>(ch);
        std::uint64_t const offset = seen_++;
        if (needed_ == 0) {
            sequence_start_ = offset;
            lower_ = 0x80;
            upper_ = 0xBF;
            if (byte <= 0x7F) {
                continue;
            }
            if (byte >= 0xC2 && byte <= 0xDF) {
                needed_ = 1;
            } else if (byte >= 0xE0 && byte <= 0xEF) {
                needed_ = 2;
                if (byte == 0xE0) { lower_ = 0xA0; }
                if (byte == 0xED) { upper_ = 0x9F; }
            } else if (byte >= 0xF0 && byte <= 0xF4) {
                needed_ = 3;
                if (byte == 0xF0) { lower_ = 0x90; }
                if (byte == 0xF4) { upper_ = 0x8F; }
            } else {
                return offset;
            }
            continue;
        }
        if (byte < lower_ || byte > upper_) {
            return sequence_start_;
        }
        lower_ = 0x80;
        upper_ = 0xBF;
        --needed_;
    }
    return std::nullopt;
}

auto StreamValidator::finish() const -> std::optional<std::uint64_t>
{
    if (needed_ != 0) {
        return sequence_start_;
    }
    return std::nullopt;
}

auto find_invalid(std::string_view bytes) -> std::optional<std::size_t>
{
    StreamValidator validator;
    if (auto bad = validator.feed(bytes)) {
        return static_cast<std::size_t>(*bad);
    }
    if (auto bad = validator.finish()) {
        return static_cast<std::size_t>(*bad);
    }
    return std::nullopt;
}

}  // namespace girit::utf8
