#include "girit/analysis.hpp"

#include "girit/codec.hpp"
#include "girit/error.hpp"
#include "girit/utf8.hpp"

#include <unicode/normalizer2.h>
#include <unicode/bytestream.h>
#include <unicode/uchar.h>
#include <unicode/uscript.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <sstream>

namespace girit {

namespace {

constexpr UChar32 kZwnj = 0x200C;
constexpr UChar32 kZwj = 0x200D;

enum class CharClass { word, joiner, separator };

auto classify(UChar32 cp) -> CharClass
{
    if (cp < 0x80) {
        bool const alnum = (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
        return alnum ? CharClass::word : CharClass::separator;
    }
    if (cp == kZwj || cp == kZwnj) {
        return CharClass::joiner;
    }
    auto const mask = U_GET_GC_MASK(cp);
    if ((mask & (U_GC_L_MASK | U_GC_M_MASK | U_GC_ND_MASK)) != 0) {
        return CharClass::word;
    }
    return CharClass::separator;
}

auto is_letter_or_mark(UChar32 cp) -> bool
{
    if (cp < 0x80) {
        return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    }
    return (U_GET_GC_MASK(cp) & (U_GC_L_MASK | U_GC_M_MASK)) != 0;
}

auto next_code_point(std::string_view text, std::size_t& pos) -> UChar32
{
    UChar32 cp = 0;
    auto const length = static_cast<int32_t>(text.size());
    auto index = static_cast<int32_t>(pos);
    U8_NEXT(reinterpret_cast<uint8_t const*>(text.data()), index, length, cp);
    pos = static_cast<std::size_t>(index);
    return cp < 0 ? static_cast<UChar32>(0xFFFD) : cp;
}

auto normalizer_for(NormalizationForm form) -> icu::Normalizer2 const*
{
    UErrorCode status = U_ZERO_ERROR;
    icu::Normalizer2 const* result = nullptr;
    switch (form) {
    case NormalizationForm::none: return nullptr;
    case NormalizationForm::nfc: result = icu::Normalizer2::getNFCInstance(status); break;
    case NormalizationForm::nfd: result = icu::Normalizer2::getNFDInstance(status); break;
    case NormalizationForm::nfkc: result = icu::Normalizer2::getNFKCInstance(status); break;
    case NormalizationForm::nfkd: result = icu::Normalizer2::getNFKDInstance(status); break;
    }
    if (U_FAILURE(status) || result == nullptr) {
        throw Error(std::string("ICU normalizer unavailable: ") + u_errorName(status));
    }
    return result;
}

auto is_ascii(std::string_view text) -> bool
{
    return std::all_of(text.begin(), text.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

auto apply_form(std::string_view text, NormalizationForm form) -> std::string
{
    auto const* normalizer = normalizer_for(form);
    if (normalizer == nullptr || is_ascii(text)) {
        return std::string(text);
    }
    UErrorCode status = U_ZERO_ERROR;
    icu::StringPiece piece(text.data(), static_cast<int32_t>(text.size()));
    if (normalizer->isNormalizedUTF8(piece, status) && U_SUCCESS(status)) {
        return std::string(text);
    }
    status = U_ZERO_ERROR;
    std::string out;
    icu::StringByteSink<std::string> sink(&out);
    normalizer->normalizeUTF8(0, piece, sink, nullptr, status);
    if (U_FAILURE(status)) {
        throw Error(std::string("ICU normalization failed: ") + u_errorName(status));
    }
    return out;
}

auto lowercase_latin(std::string_view text) -> std::string
{
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto const c = static_cast<unsigned char>(text[pos]);
        if (c < 0x80) {
            out.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c + ('a' - 'A') : c));
            ++pos;
            continue;
        }
        UChar32 cp = next_code_point(text, pos);
        UErrorCode status = U_ZERO_ERROR;
        if (uscript_getScript(cp, &status) == USCRIPT_LATIN && U_SUCCESS(status)) {
            cp = u_tolower(cp);
        }
        char buffer[U8_MAX_LENGTH];
        int32_t length = 0;
        [[maybe_unused]] UBool error = false;
        U8_APPEND(reinterpret_cast<uint8_t*>(buffer), length, U8_MAX_LENGTH, cp, error);
        out.append(buffer, static_cast<std::size_t>(length));
    }
    return out;
}

auto normalize_once(std::string_view token, AnalyzerConfig const& cfg) -> std::string
{
    std::string result = apply_form(token, cfg.normalization);
    if (cfg.lowercase_latin) {
        result = lowercase_latin(result);
    }
    return result;
}

}  // namespace

auto to_string(NormalizationForm form) -> std::string_view
{
    switch (form) {
    case NormalizationForm::none: return "none";
    case NormalizationForm::nfc: return "NFC";
    case NormalizationForm::nfd: return "NFD";
    case NormalizationForm::nfkc: return "NFKC";
    case NormalizationForm::nfkd: return "NFKD";
    }
    return "none";
}

auto parse_normalization_form(std::string_view name) -> NormalizationForm
{
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    if (upper == "NONE") { return NormalizationForm::none; }
    if (upper == "NFC") { return NormalizationForm::nfc; }
    if (upper == "NFD") { return NormalizationForm::nfd; }
    if (upper == "NFKC") { return NormalizationForm::nfkc; }
    if (upper == "NFKD") { return NormalizationForm::nfkd; }
    throw ValidationError("unknown normalization form: " + std::string(name));
}

auto AnalyzerConfig::canonical() const -> std::string
{
    std::string out = "analyzer-v1\n";
    out += "lowercase_latin=" + std::string(lowercase_latin ? "1" : "0") + "\n";
    out += "normalization=" + std::string(to_string(normalization)) + "\n";
    out += "min_token_length=" + std::to_string(min_token_length) + "\n";
    out += "stopwords=" + std::to_string(stopwords.size()) + "\n";
    for (auto const& word : stopwords) {
        out += word;
        out += '\n';
    }
    return out;
}

auto AnalyzerConfig::fingerprint() const -> std::string
{
    return codec::hex64(codec::crc64(canonical()));
}

auto parse_analyzer_canonical(std::string_view text) -> AnalyzerConfig
{
    std::istringstream in{std::string(text)};
    std::string line;
    auto expect = [&](std::string_view key) -> std::string {
        if (!std::getline(in, line) || line.rfind(std::string(key) + "=", 0) != 0) {
            throw FormatError("bad analyzer description, expected " + std::string(key));
        }
        return line.substr(key.size() + 1);
    };
    if (!std::getline(in, line) || line != "analyzer-v1") {
        throw FormatError("bad analyzer description header");
    }
    AnalyzerConfig cfg;
    cfg.lowercase_latin = expect("lowercase_latin") == "1";
    cfg.normalization = parse_normalization_form(expect("normalization"));
    try {
        cfg.min_token_length = std::stoul(expect("min_token_length"));
        auto const count = std::stoul(expect("stopwords"));
        for (std::size_t i = 0; i < count; ++i) {
            if (!std::getline(in, line)) {
                throw FormatError("truncated stopword list in analyzer description");
            }
            cfg.stopwords.insert(line);
        }
    } catch (std::logic_error const&) {
        throw FormatError("bad number in analyzer description");
    }
    return cfg;
}

namespace detail {

void for_each_token(std::string_view text, void* state, void (*emit)(void*, std::string_view))
{
    std::size_t pos = 0;
    std::size_t token_begin = 0;
    std::size_t token_end = 0;
    bool in_token = false;
    // Joiners are held back until the following code point shows whether they
    // sit between two letters.
    std::size_t pending_joiner_end = 0;
    bool pending_joiner = false;
    UChar32 previous = 0;

    auto flush = [&]() {
        if (in_token && token_end > token_begin) {
            emit(state, text.substr(token_begin, token_end - token_begin));
        }
        in_token = false;
        pending_joiner = false;
    };

    while (pos < text.size()) {
        std::size_t const start = pos;
        UChar32 const cp = next_code_point(text, pos);
        switch (classify(cp)) {
        case CharClass::word:
            if (pending_joiner) {
                if (is_letter_or_mark(cp)) {
                    token_end = pending_joiner_end;
                    pending_joiner = false;
                } else {
                    flush();
                }
            }
            if (!in_token) {
                in_token = true;
                token_begin = start;
            }
            token_end = pos;
            break;
        case CharClass::joiner:
            if (in_token && !pending_joiner && is_letter_or_mark(previous)) {
                pending_joiner = true;
                pending_joiner_end = pos;
            } else {
                flush();
            }
            break;
        case CharClass::separator:
            flush();
            break;
        }
        previous = cp;
    }
    flush();
}

auto passes_filters(std::string_view term, AnalyzerConfig const& cfg) -> bool
{
    if (term.empty()) {
        return false;
    }
    if (!cfg.stopwords.empty() && cfg.stopwords.find(std::string(term)) != cfg.stopwords.end()) {
        return false;
    }
    if (cfg.min_token_length > 1 && code_point_count(term) < cfg.min_token_length) {
        return false;
    }
    return true;
}

}  // namespace detail

auto tokenize(std::string_view text) -> std::vector<std::string>
{
    std::vector<std::string> tokens;
    detail::for_each_token(text, &tokens, [](void* raw, std::string_view token) {
        static_cast<std::vector<std::string>*>(raw)->emplace_back(token);
    });
    return tokens;
}

auto normalize(std::string_view token, AnalyzerConfig const& cfg) -> std::string
{
    // Normalization forms and Latin lowercasing interact for a handful of
    // compatibility characters; iterate to the fixed point.
    std::string current = normalize_once(token, cfg);
    for (int round = 0; round < 4; ++round) {
        std::string next = normalize_once(current, cfg);
        if (next == current) {
            break;
        }
        current = std::move(next);
    }
    return current;
}

auto analyze(std::string_view text, AnalyzerConfig const& cfg) -> std::vector<std::string>
{
    std::vector<std::string> terms;
    analyze_each(text, cfg, [&](std::string term) { terms.push_back(std::move(term)); });
    return terms;
}

auto code_point_count(std::string_view text) -> std::size_t
{
    return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) {
        return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
    }));
}

auto load_stopwords(std::istream& in, AnalyzerConfig const& cfg) -> std::set<std::string>
{
    AnalyzerConfig plain = cfg;
    plain.stopwords.clear();
    std::set<std::string> words;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        auto const first = line.find_first_not_of(" \t\r\n");
        if (first == std::string::npos) {
            continue;
        }
        auto const last = line.find_last_not_of(" \t\r\n");
        std::string_view entry(line.data() + first, last - first + 1);
        if (!utf8::is_valid(entry)) {
            throw FormatError("invalid UTF-8 in stopword list", "line " + std::to_string(line_number));
        }
        words.insert(normalize(entry, plain));
    }
    return words;
}

}  // namespace girit
