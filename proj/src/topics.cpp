#include "girit/topics.hpp"

#include "girit/error.hpp"
#include "girit/utf8.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <unordered_set>

namespace girit {

namespace {

auto is_space(char c) -> bool
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

auto trim(std::string_view text) -> std::string
{
    while (!text.empty() && is_space(text.front())) { text.remove_prefix(1); }
    while (!text.empty() && is_space(text.back())) { text.remove_suffix(1); }
    return std::string(text);
}

struct Tag {
    std::size_t begin;
    std::size_t end;
    std::string name;
    bool closing;
};

auto next_tag(std::string_view text, std::size_t from) -> std::optional<Tag>
{
    while (true) {
        std::size_t const open = text.find('<', from);
        if (open == std::string_view::npos) {
            return std::nullopt;
        }
        std::size_t const close = text.find_first_of("<>", open + 1);
        if (close == std::string_view::npos) {
            return std::nullopt;
        }
        if (text[close] == '<') {
            from = close;
            continue;
        }
        std::size_t p = open + 1;
        while (p < close && is_space(text[p])) { ++p; }
        bool closing = false;
        if (p < close && text[p] == '/') {
            closing = true;
            ++p;
        }
        std::size_t const name_begin = p;
        while (p < close && std::isalnum(static_cast<unsigned char>(text[p]))) { ++p; }
        while (p < close && is_space(text[p])) { ++p; }
        if (p == name_begin || p != close) {
            from = open + 1;
            continue;
        }
        std::string name = trim(text.substr(name_begin, close - name_begin));
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
        return Tag{open, close + 1, std::move(name), closing};
    }
}

auto line_of(std::string_view text, std::size_t offset) -> std::string
{
    return "line " + std::to_string(1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

auto strip_number_label(std::string value) -> std::string
{
    std::string lower = value.substr(0, 7);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "number:") {
        return trim(std::string_view(value).substr(7));
    }
    return value;
}

}  // namespace

auto to_string(FieldSelection fields) -> std::string_view
{
    switch (fields) {
    case FieldSelection::T: return "T";
    case FieldSelection::TD: return "TD";
    case FieldSelection::TDN: return "TDN";
    }
    return "TD";
}

auto parse_field_selection(std::string_view name) -> FieldSelection
{
    if (name == "T") { return FieldSelection::T; }
    if (name == "TD") { return FieldSelection::TD; }
    if (name == "TDN") { return FieldSelection::TDN; }
    throw ValidationError("unknown field selection '" + std::string(name) + "' (expected T, TD or TDN)");
}

auto parse_topics(std::string_view bytes, WarningSink const& warn) -> std::vector<Topic>
{
    if (auto bad = utf8::find_invalid(bytes)) {
        throw Utf8Error(*bad);
    }
    std::vector<Topic> topics;
    std::unordered_set<std::string> seen;
    std::size_t pos = 0;

    while (auto tag = next_tag(bytes, pos)) {
        if (tag->name != "top" || tag->closing) {
            pos = tag->end;
            continue;
        }
        std::size_t const top_begin = tag->begin;
        Topic topic;
        bool has_num = false;
        bool has_title = false;
        bool has_desc = false;
        bool has_narr = false;
        std::string open_field;
        std::size_t content_begin = 0;
        bool closed = false;

        auto commit = [&](std::size_t content_end) {
            if (open_field.empty()) {
                return;
            }
            std::string value = trim(bytes.substr(content_begin, content_end - content_begin));
            if (open_field == "num") {
                topic.qid = strip_number_label(std::move(value));
                has_num = true;
            } else if (open_field == "title") {
                topic.title = std::move(value);
                has_title = true;
            } else if (open_field == "desc") {
                topic.description = std::move(value);
                has_desc = true;
            } else if (open_field == "narr") {
                topic.narrative = std::move(value);
                has_narr = true;
            }
            open_field.clear();
        };

        pos = tag->end;
        while (auto inner = next_tag(bytes, pos)) {
            pos = inner->end;
            if (inner->name == "top") {
                commit(inner->begin);
                if (!inner->closing) {
                    throw FormatError("unclosed <top> (next <top> begins)", line_of(bytes, top_begin));
                }
                closed = true;
                break;
            }
            bool const is_field = inner->name == "num" || inner->name == "title" || inner->name == "desc" ||
                                  inner->name == "narr";
            if (!is_field) {
                continue;
            }
            if (inner->closing) {
                if (inner->name == open_field) {
                    commit(inner->begin);
                }
                continue;
            }
            if (inner->name == open_field) {
                // "<narr> ... <narr>": the repeated opening tag acts as the close.
                commit(inner->begin);
                continue;
            }
            commit(inner->begin);
            open_field = inner->name;
            content_begin = inner->end;
        }
        if (!closed) {
            throw FormatError("unclosed <top>", line_of(bytes, top_begin));
        }
        if (!has_num || topic.qid.empty()) {
            throw FormatError("topic without <num>", line_of(bytes, top_begin));
        }
        if (!has_title || topic.title.empty()) {
            throw FormatError("topic " + topic.qid + " has an empty title", line_of(bytes, top_begin));
        }
        if (!seen.insert(topic.qid).second) {
            throw FormatError("duplicate qid " + topic.qid, line_of(bytes, top_begin));
        }
        if (warn && !has_desc) {
            warn("topic " + topic.qid + " has no <desc>; using empty description");
        }
        if (warn && !has_narr) {
            warn("topic " + topic.qid + " has no <narr>; using empty narrative");
        }
        topics.push_back(std::move(topic));
    }
    return topics;
}

void write_topics(std::ostream& out, std::vector<Topic> const& topics)
{
    for (auto const& topic : topics) {
        out << "<top>\n"
            << "<num>" << topic.qid << "</num>\n"
            << "<title>" << topic.title << "</title>\n"
            << "<desc>" << topic.description << "</desc>\n"
            << "<narr>" << topic.narrative << "</narr>\n"
            << "</top>\n\n";
    }
}

auto build_query(Topic const& topic, FieldSelection fields, AnalyzerConfig const& cfg, WarningSink const& warn)
    -> QueryBag
{
    std::string text = topic.title;
    if (fields != FieldSelection::T) {
        text += '\n';
        text += topic.description;
    }
    if (fields == FieldSelection::TDN) {
        text += '\n';
        text += topic.narrative;
    }
    QueryBag bag;
    bag.qid = topic.qid;
    bag.analyzer_fingerprint = cfg.fingerprint();
    analyze_each(text, cfg, [&](std::string term) { ++bag.terms[std::move(term)]; });
    if (bag.empty() && warn) {
        warn("query " + topic.qid + " has no terms after analysis");
    }
    return bag;
}

}  // namespace girit
