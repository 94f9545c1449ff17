#pragma once

#include "girit/models.hpp"
#include "girit/retrieval.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace girit {

/// Relevance judgments: qid -> docid -> grade (>= 0). Grade >= 1 is relevant.
class QrelSet {
public:
    /// Throws FormatError on a duplicate (qid, docid) pair or negative grade.
    void add(std::string const& qid, std::string const& docid, int grade);

    [[nodiscard]] auto relevant(std::string const& qid) const -> std::set<std::string> const&;
    [[nodiscard]] auto qids() const -> std::vector<std::string>;
    [[nodiscard]] auto contains(std::string const& qid) const -> bool { return judgments_.count(qid) != 0; }
    [[nodiscard]] auto judgments() const noexcept -> std::map<std::string, std::map<std::string, int>> const&
    {
        return judgments_;
    }
    [[nodiscard]] auto total_relevant() const -> std::size_t;

private:
    std::map<std::string, std::map<std::string, int>> judgments_;
    std::map<std::string, std::set<std::string>> relevant_;
};

/// "qid iter docid grade" lines, whitespace separated; blank lines ignored.
[[nodiscard]] auto parse_qrels(std::string_view bytes) -> QrelSet;
void write_qrels(std::ostream& out, QrelSet const& qrels);

/// Reads a six-column run file. Entries of each query are ordered by the rank
/// column; queries keep their first-appearance order.
[[nodiscard]] auto parse_run(std::string_view bytes) -> std::vector<RankedList>;

struct QueryEval {
    std::string qid;
    std::size_t relevant = 0;
    std::size_t relevant_retrieved = 0;
    double recall = 0.0;
    double precision = 0.0;
    double average_precision = 0.0;
};

struct EvalResult {
    std::size_t cutoff = kDefaultCutoff;
    std::vector<QueryEval> queries;
    std::size_t total_relevant = 0;
    std::size_t total_relevant_retrieved = 0;
    /// Mean of per-query recall.
    double mean_recall = 0.0;
    /// total_relevant_retrieved / total_relevant.
    double micro_recall = 0.0;
    double map = 0.0;
    /// Queries judged but with no relevant document; excluded from all means.
    std::vector<std::string> skipped_no_relevant;
    /// Run queries with no judgments; excluded.
    std::vector<std::string> skipped_unjudged;
};

using EvalWarning = std::function<void(std::string const&)>;

/// Every judged query with at least one relevant document is evaluated; one
/// missing from the run scores zero.
[[nodiscard]] auto recall_at(std::vector<RankedList> const& run, QrelSet const& qrels, std::size_t cutoff,
                             EvalWarning const& warn = {}) -> EvalResult;
[[nodiscard]] auto average_precision(std::vector<RankedList> const& run, QrelSet const& qrels, std::size_t cutoff,
                                     EvalWarning const& warn = {}) -> EvalResult;
/// Recall, precision at cutoff and AP in one pass.
[[nodiscard]] auto evaluate(std::vector<RankedList> const& run, QrelSet const& qrels, std::size_t cutoff,
                            EvalWarning const& warn = {}) -> EvalResult;

/// "key: value" summary followed by one "query.<qid>" block per query.
void write_eval_text(std::ostream& out, EvalResult const& result, std::string const& model);
void write_eval_csv(std::ostream& out, EvalResult const& result);

/// Aggregate counts read back from write_eval_text output.
struct EvalSummary {
    std::string model;
    std::size_t cutoff = 0;
    std::size_t total_relevant = 0;
    std::size_t total_relevant_retrieved = 0;
    double map = 0.0;
};
[[nodiscard]] auto parse_eval_text(std::string_view bytes) -> EvalSummary;

enum class Verdict : std::uint8_t { Improvement, Fail };
[[nodiscard]] auto to_string(Verdict verdict) -> std::string_view;

struct ComparisonRow {
    std::string model;
    std::size_t relevant = 0;
    std::size_t before_retrieved = 0;
    std::string before_pct;
    std::size_t after_retrieved = 0;
    std::string after_pct;
    Verdict verdict = Verdict::Fail;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
};

/// 100 * retrieved / relevant, rounded half-up to one decimal, trailing ".0"
/// dropped ("72", "72.5").
[[nodiscard]] auto format_percentage(std::size_t retrieved, std::size_t relevant) -> std::string;

/// Row per model; Improvement iff strictly more relevant documents retrieved
/// after expansion. Rows follow the published table order when the model set
/// is exactly the 21 known models, else lexicographic.
[[nodiscard]] auto compare(std::map<std::string, EvalSummary> const& before,
                           std::map<std::string, EvalSummary> const& after) -> ComparisonReport;

void write_comparison_text(std::ostream& out, ComparisonReport const& report, std::string const& fields = "TD");
void write_comparison_csv(std::ostream& out, ComparisonReport const& report);

}  // namespace girit
