#include "girit/expansion.hpp"

#include "girit/error.hpp"
#include "girit/utf8.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace girit {

auto Thesaurus::synonyms(std::string_view headword) const -> std::vector<std::string> const*
{
    if (auto it = entries.find(std::string(headword)); it != entries.end()) {
        return &it->second;
    }
    return nullptr;
}

void ExpansionPolicy::validate() const
{
    if (!(expanded_term_weight > 0.0) || !std::isfinite(expanded_term_weight)) {
        throw ValidationError("expanded_term_weight must be > 0");
    }
}

auto load_thesaurus(std::string_view bytes, AnalyzerConfig const& cfg) -> Thesaurus
{
    if (auto bad = utf8::find_invalid(bytes)) {
        throw Utf8Error(*bad);
    }
    Thesaurus thesaurus;
    std::size_t line_number = 0;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        std::size_t end = bytes.find('\n', pos);
        if (end == std::string_view::npos) {
            end = bytes.size();
        }
        std::string_view line = bytes.substr(pos, end - pos);
        pos = end + 1;
        ++line_number;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.find_first_not_of(" \t") == std::string_view::npos || line.front() == '#') {
            continue;
        }
        std::string const where = "line " + std::to_string(line_number);
        auto const tab = line.find('\t');
        if (tab == std::string_view::npos) {
            throw FormatError("thesaurus line has no TAB separator", where);
        }
        auto const head_terms = analyze(line.substr(0, tab), cfg);
        if (line.substr(0, tab).find_first_not_of(" ") == std::string_view::npos) {
            throw FormatError("empty headword", where);
        }
        if (head_terms.empty()) {
            continue;
        }
        if (head_terms.size() > 1) {
            throw FormatError("headword must be a single term", where);
        }
        std::string const& head = head_terms.front();
        auto& synonyms = thesaurus.entries[head];
        std::string_view rest = line.substr(tab + 1);
        while (true) {
            auto const bar = rest.find('|');
            for (auto& term : analyze(rest.substr(0, bar), cfg)) {
                if (term != head && std::find(synonyms.begin(), synonyms.end(), term) == synonyms.end()) {
                    synonyms.push_back(std::move(term));
                }
            }
            if (bar == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(bar + 1);
        }
    }
    return thesaurus;
}

void write_thesaurus(std::ostream& out, Thesaurus const& thesaurus)
{
    for (auto const& [head, synonyms] : thesaurus.entries) {
        out << head << '\t';
        for (std::size_t i = 0; i < synonyms.size(); ++i) {
            out << (i == 0 ? "" : "|") << synonyms[i];
        }
        out << '\n';
    }
}

auto expand_query(QueryBag const& bag, Thesaurus const& thesaurus, ExpansionPolicy const& policy) -> QueryBag
{
    policy.validate();
    QueryBag expanded = bag;
    auto const added_qtf = static_cast<std::uint32_t>(std::ceil(policy.expanded_term_weight));

    std::vector<std::pair<std::string, std::uint32_t>> order(bag.terms.begin(), bag.terms.end());
    std::stable_sort(order.begin(), order.end(), [](auto const& a, auto const& b) { return a.second > b.second; });

    std::size_t added = 0;
    for (auto const& [term, qtf] : order) {
        if (added >= policy.max_added_per_query) {
            break;
        }
        auto const* synonyms = thesaurus.synonyms(term);
        if (synonyms == nullptr) {
            continue;
        }
        std::size_t added_for_term = 0;
        for (auto const& synonym : *synonyms) {
            if (added >= policy.max_added_per_query ||
                (policy.max_synonyms_per_term && added_for_term >= *policy.max_synonyms_per_term)) {
                break;
            }
            if (expanded.terms.emplace(synonym, added_qtf).second) {
                ++added;
                ++added_for_term;
            }
        }
    }
    return expanded;
}

auto added_terms(QueryBag const& original, QueryBag const& expanded)
    -> std::vector<std::pair<std::string, std::uint32_t>>
{
    std::vector<std::pair<std::string, std::uint32_t>> result;
    for (auto const& [term, qtf] : expanded.terms) {
        if (original.terms.find(term) == original.terms.end()) {
            result.emplace_back(term, qtf);
        }
    }
    return result;
}

auto expanded_topic(Topic const& topic, QueryBag const& original, QueryBag const& expanded) -> Topic
{
    Topic result = topic;
    for (auto const& [term, qtf] : added_terms(original, expanded)) {
        for (std::uint32_t i = 0; i < qtf; ++i) {
            result.title += ' ';
            result.title += term;
        }
    }
    return result;
}

auto expansion_stats(std::vector<Topic> const& original, std::vector<Topic> const& expanded, FieldSelection fields,
                     AnalyzerConfig const& cfg) -> ExpansionSummary
{
    if (original.size() != expanded.size()) {
        throw FormatError("original and expanded topic files list different numbers of queries");
    }
    ExpansionSummary summary;
    std::size_t total = 0;
    for (std::size_t i = 0; i < original.size(); ++i) {
        if (original[i].qid != expanded[i].qid) {
            throw FormatError("qid mismatch between topic files: " + original[i].qid + " vs " + expanded[i].qid);
        }
        auto const before = build_query(original[i], fields, cfg);
        auto const after = build_query(expanded[i], fields, cfg);
        std::size_t const count = added_terms(before, after).size();
        summary.added_per_query.emplace_back(original[i].qid, count);
        total += count;
    }
    if (!original.empty()) {
        summary.mean_added = static_cast<double>(total) / static_cast<double>(original.size());
    }
    return summary;
}

void write_expansion_summary(std::ostream& out, ExpansionSummary const& summary)
{
    char mean[32];
    std::snprintf(mean, sizeof mean, "%.2f", summary.mean_added);
    out << "queries: " << summary.added_per_query.size() << '\n' << "mean_added_terms: " << mean << '\n';
    for (auto const& [qid, count] : summary.added_per_query) {
        out << "added." << qid << ": " << count << '\n';
    }
}

}  // namespace girit
