#pragma once

#include "girit/analysis.hpp"
#include "girit/query_bag.hpp"

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace girit {

/// A TREC topic: <num>, <title>, <desc>, <narr>.
struct Topic {
    std::string qid;
    std::string title;
    std::string description;
    std::string narrative;

    friend auto operator==(Topic const&, Topic const&) -> bool = default;
};

/// Which topic fields form the query.
enum class FieldSelection : std::uint8_t { T, TD, TDN };

[[nodiscard]] auto to_string(FieldSelection fields) -> std::string_view;
[[nodiscard]] auto parse_field_selection(std::string_view name) -> FieldSelection;

using WarningSink = std::function<void(std::string const&)>;

/// Parses <top> blocks. Field tags match case-insensitively; a field's text
/// runs until the next tag, so an unclosed <narr> ends at </top>. A repeated
/// opening tag of the field just read closes it. A leading "Number:" label
/// in <num> is dropped.
///
/// Missing <desc>/<narr> produce a warning and an empty field. Missing <num>,
/// empty title, duplicate qid and unclosed <top> are FormatErrors.
[[nodiscard]] auto parse_topics(std::string_view bytes, WarningSink const& warn = {}) -> std::vector<Topic>;

/// Inverse of parse_topics for fields without markup characters.
void write_topics(std::ostream& out, std::vector<Topic> const& topics);

/// Concatenates the selected fields (T, D, N order), analyzes them and counts
/// term multiplicity into qtf. An empty bag is reported through `warn`.
[[nodiscard]] auto build_query(Topic const& topic, FieldSelection fields, AnalyzerConfig const& cfg,
                               WarningSink const& warn = {}) -> QueryBag;

}  // namespace girit
