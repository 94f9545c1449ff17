#pragma once

#include <cstdint>
#include <istream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace girit {

enum class NormalizationForm : std::uint8_t { none, nfc, nfd, nfkc, nfkd };

[[nodiscard]] auto to_string(NormalizationForm form) -> std::string_view;
[[nodiscard]] auto parse_normalization_form(std::string_view name) -> NormalizationForm;

/// Text analysis settings. One configuration is fixed for an index and every
/// query run against it; the fingerprint guards that.
struct AnalyzerConfig {
    bool lowercase_latin = true;
    NormalizationForm normalization = NormalizationForm::nfc;
    /// Terms in normalized form.
    std::set<std::string> stopwords;
    /// Minimum length in code points.
    std::size_t min_token_length = 1;

    /// Canonical textual form; stable across runs and platforms.
    [[nodiscard]] auto canonical() const -> std::string;
    /// CRC-64 of `canonical()`, rendered as 16 hex digits.
    [[nodiscard]] auto fingerprint() const -> std::string;

    friend auto operator==(AnalyzerConfig const&, AnalyzerConfig const&) -> bool = default;
};

/// Parses the output of `AnalyzerConfig::canonical`.
[[nodiscard]] auto parse_analyzer_canonical(std::string_view text) -> AnalyzerConfig;

/// Splits text into maximal runs of letters, combining marks and decimal
/// digits. ZWJ and ZWNJ stay inside a token only when both neighbours are
/// letters or marks; every other code point separates tokens.
[[nodiscard]] auto tokenize(std::string_view text) -> std::vector<std::string>;

/// Unicode normalization followed by lowercasing of Latin-script letters.
/// Idempotent.
[[nodiscard]] auto normalize(std::string_view token, AnalyzerConfig const& cfg) -> std::string;

/// tokenize, normalize, drop stopwords, drop tokens shorter than the minimum.
[[nodiscard]] auto analyze(std::string_view text, AnalyzerConfig const& cfg) -> std::vector<std::string>;

/// Visits analyzed terms without materializing the whole sequence.
template<typename Sink>
void analyze_each(std::string_view text, AnalyzerConfig const& cfg, Sink&& sink);

/// Number of Unicode code points in valid UTF-8.
[[nodiscard]] auto code_point_count(std::string_view text) -> std::size_t;

/// Reads a stopword list: UTF-8, one term per line, '#' starts a comment.
/// Entries are normalized with `cfg` so membership tests see analyzer output.
[[nodiscard]] auto load_stopwords(std::istream& in, AnalyzerConfig const& cfg) -> std::set<std::string>;

namespace detail {
void for_each_token(std::string_view text, void* state, void (*emit)(void*, std::string_view));
auto passes_filters(std::string_view term, AnalyzerConfig const& cfg) -> bool;
}  // namespace detail

template<typename Sink>
void analyze_each(std::string_view text, AnalyzerConfig const& cfg, Sink&& sink)
{
    struct State {
        AnalyzerConfig const* cfg;
        Sink* sink;
    } state{&cfg, &sink};
    detail::for_each_token(text, &state, [](void* raw, std::string_view token) {
        auto& s = *static_cast<State*>(raw);
        std::string term = normalize(token, *s.cfg);
        if (detail::passes_filters(term, *s.cfg)) {
            (*s.sink)(std::move(term));
        }
    });
}

}  // namespace girit
