#pragma once

#include "girit/analysis.hpp"
#include "girit/query_bag.hpp"
#include "girit/topics.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace girit {

/// Headword -> synonyms, all in analyzer-normalized form. Not symmetric.
struct Thesaurus {
    std::map<std::string, std::vector<std::string>> entries;

    [[nodiscard]] auto synonyms(std::string_view headword) const -> std::vector<std::string> const*;

    friend auto operator==(Thesaurus const&, Thesaurus const&) -> bool = default;
};

struct ExpansionPolicy {
    std::size_t max_added_per_query = 6;
    /// Cap on terms added on behalf of a single headword; unbounded when empty.
    std::optional<std::size_t> max_synonyms_per_term;
    /// qtf of an added term is ceil(weight).
    double expanded_term_weight = 1.0;
    /// Which fields the bag was built from; carried along for reports.
    FieldSelection fields_expanded = FieldSelection::TD;

    void validate() const;
};

/// Reads "headword<TAB>syn1|syn2|..." lines. Blank lines and lines starting
/// with '#' are skipped. Terms go through `analyze`, so a multi-word synonym
/// contributes each of its words; a headword must analyze to one term.
/// Duplicate headwords merge in first-seen order; self-synonyms are dropped.
[[nodiscard]] auto load_thesaurus(std::string_view bytes, AnalyzerConfig const& cfg) -> Thesaurus;

void write_thesaurus(std::ostream& out, Thesaurus const& thesaurus);

/// Adds synonyms of the bag's terms. Original terms are visited by descending
/// qtf, then lexicographically; each contributes its synonyms in thesaurus
/// order, skipping terms already in the bag, until the per-query cap is hit.
[[nodiscard]] auto expand_query(QueryBag const& bag, Thesaurus const& thesaurus, ExpansionPolicy const& policy)
    -> QueryBag;

/// Terms of `expanded` that are not in `original`, with their qtf.
[[nodiscard]] auto added_terms(QueryBag const& original, QueryBag const& expanded)
    -> std::vector<std::pair<std::string, std::uint32_t>>;

/// Rewrites a topic so that building its bag with the same fields and
/// analyzer reproduces `expanded`: added terms are appended to the title.
[[nodiscard]] auto expanded_topic(Topic const& topic, QueryBag const& original, QueryBag const& expanded) -> Topic;

struct ExpansionSummary {
    std::vector<std::pair<std::string, std::size_t>> added_per_query;
    double mean_added = 0.0;
};

/// Counts terms added per query by comparing bags built from the original and
/// expanded topic files. Both must list the same qids in the same order.
[[nodiscard]] auto expansion_stats(std::vector<Topic> const& original, std::vector<Topic> const& expanded,
                                   FieldSelection fields, AnalyzerConfig const& cfg) -> ExpansionSummary;

void write_expansion_summary(std::ostream& out, ExpansionSummary const& summary);

}  // namespace girit
