#pragma once

#include "girit/corpus.hpp"
#include "girit/index.hpp"
#include "girit/models.hpp"
#include "girit/query_bag.hpp"

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace girit {

struct RankedEntry {
    std::string docid;
    std::size_t rank = 0;
    double score = 0.0;

    friend auto operator==(RankedEntry const&, RankedEntry const&) -> bool = default;
};

/// Top-k documents for one query: scores nonincreasing, ties by ascending
/// docid, ranks 1..k.
struct RankedList {
    std::string qid;
    std::vector<RankedEntry> entries;

    friend auto operator==(RankedList const&, RankedList const&) -> bool = default;
};

inline constexpr std::size_t kDefaultCutoff = 1000;

/// Disjunctive term-at-a-time ranking over the index. Every document holding
/// at least one query term is scored; the best `cutoff` are returned.
///
/// Throws AnalyzerMismatchError when the query was analyzed with a different
/// configuration than the index, and ScoringDomainError (with qid, term and
/// docid attached) when a formula leaves its domain.
[[nodiscard]] auto rank(Index const& index, QueryBag const& query, ModelId model, ModelParams const& params,
                        std::size_t cutoff = kDefaultCutoff) -> RankedList;

/// Reference ranking for small collections: recounts every statistic from
/// the raw documents and scores each document independently.
[[nodiscard]] auto oracle_rank(std::vector<RawDocument> const& docs, AnalyzerConfig const& cfg,
                               QueryBag const& query, ModelId model, ModelParams const& params,
                               std::size_t cutoff = kDefaultCutoff) -> RankedList;

/// "qid Q0 docid rank score tag" lines, score with six decimals.
void write_run(std::ostream& out, std::vector<RankedList> const& lists, std::string const& tag);

}  // namespace girit
