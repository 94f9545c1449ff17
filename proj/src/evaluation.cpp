#include "girit/evaluation.hpp"

#include "girit/error.hpp"
#include "girit/utf8.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <unordered_set>

namespace girit {

namespace {

auto split_whitespace(std::string_view line) -> std::vector<std::string_view>
{
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) { ++pos; }
        std::size_t const begin = pos;
        while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != '\r') { ++pos; }
        if (pos > begin) {
            fields.push_back(line.substr(begin, pos - begin));
        }
    }
    return fields;
}

template<typename Callback>
void for_each_line(std::string_view bytes, Callback&& callback)
{
    std::size_t pos = 0;
    std::size_t number = 0;
    while (pos < bytes.size()) {
        std::size_t end = bytes.find('\n', pos);
        if (end == std::string_view::npos) {
            end = bytes.size();
        }
        callback(bytes.substr(pos, end - pos), ++number);
        pos = end + 1;
    }
}

template<typename T>
auto parse_number(std::string_view text, T& value) -> bool
{
    auto const* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    return ec == std::errc{} && ptr == end;
}

auto parse_double(std::string_view text, double& value) -> bool
{
    std::string copy(text);
    char* end = nullptr;
    value = std::strtod(copy.c_str(), &end);
    return !copy.empty() && end == copy.c_str() + copy.size();
}

auto fixed(double value, int digits) -> std::string
{
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*f", digits, value);
    return buffer;
}

/// Walks each judged query's ranked list down to the cutoff once.
auto evaluate_impl(std::vector<RankedList> const& run, QrelSet const& qrels, std::size_t cutoff,
                   EvalWarning const& warn) -> EvalResult
{
    if (cutoff == 0) {
        throw ValidationError("evaluation cutoff must be >= 1");
    }
    std::map<std::string, RankedList const*> by_qid;
    EvalResult result;
    result.cutoff = cutoff;
    for (auto const& list : run) {
        if (!qrels.contains(list.qid)) {
            result.skipped_unjudged.push_back(list.qid);
            if (warn) {
                warn("run query " + list.qid + " has no relevance judgments; excluded");
            }
            continue;
        }
        by_qid.emplace(list.qid, &list);
    }

    double recall_sum = 0.0;
    double ap_sum = 0.0;
    for (auto const& qid : qrels.qids()) {
        auto const& relevant = qrels.relevant(qid);
        if (relevant.empty()) {
            result.skipped_no_relevant.push_back(qid);
            if (warn) {
                warn("query " + qid + " has no relevant documents; excluded from means");
            }
            continue;
        }
        QueryEval eval;
        eval.qid = qid;
        eval.relevant = relevant.size();
        double precision_sum = 0.0;
        if (auto it = by_qid.find(qid); it != by_qid.end()) {
            auto const& entries = it->second->entries;
            std::size_t const depth = std::min(cutoff, entries.size());
            for (std::size_t i = 0; i < depth; ++i) {
                if (relevant.count(entries[i].docid) != 0) {
                    ++eval.relevant_retrieved;
                    precision_sum += static_cast<double>(eval.relevant_retrieved) / static_cast<double>(i + 1);
                }
            }
        }
        eval.recall = static_cast<double>(eval.relevant_retrieved) / static_cast<double>(eval.relevant);
        eval.precision = static_cast<double>(eval.relevant_retrieved) / static_cast<double>(cutoff);
        eval.average_precision = precision_sum / static_cast<double>(eval.relevant);
        result.total_relevant += eval.relevant;
        result.total_relevant_retrieved += eval.relevant_retrieved;
        recall_sum += eval.recall;
        ap_sum += eval.average_precision;
        result.queries.push_back(std::move(eval));
    }
    if (!result.queries.empty()) {
        auto const count = static_cast<double>(result.queries.size());
        result.mean_recall = recall_sum / count;
        result.map = ap_sum / count;
        result.micro_recall =
            static_cast<double>(result.total_relevant_retrieved) / static_cast<double>(result.total_relevant);
    }
    return result;
}

}  // namespace

void QrelSet::add(std::string const& qid, std::string const& docid, int grade)
{
    if (grade < 0) {
        throw FormatError("negative relevance grade for (" + qid + ", " + docid + ")");
    }
    auto& judged = judgments_[qid];
    if (!judged.emplace(docid, grade).second) {
        throw FormatError("duplicate judgment for (" + qid + ", " + docid + ")");
    }
    auto& relevant = relevant_[qid];
    if (grade >= 1) {
        relevant.insert(docid);
    }
}

auto QrelSet::relevant(std::string const& qid) const -> std::set<std::string> const&
{
    static std::set<std::string> const none;
    auto it = relevant_.find(qid);
    return it == relevant_.end() ? none : it->second;
}

auto QrelSet::qids() const -> std::vector<std::string>
{
    std::vector<std::string> result;
    result.reserve(judgments_.size());
    for (auto const& [qid, judged] : judgments_) {
        result.push_back(qid);
    }
    return result;
}

auto QrelSet::total_relevant() const -> std::size_t
{
    std::size_t total = 0;
    for (auto const& [qid, docs] : relevant_) {
        total += docs.size();
    }
    return total;
}

auto parse_qrels(std::string_view bytes) -> QrelSet
{
    if (auto bad = utf8::find_invalid(bytes)) {
        throw Utf8Error(*bad);
    }
    QrelSet qrels;
    for_each_line(bytes, [&](std::string_view line, std::size_t number) {
        auto const fields = split_whitespace(line);
        if (fields.empty()) {
            return;
        }
        std::string const where = "line " + std::to_string(number);
        int grade = 0;
        if (fields.size() != 4 || !parse_number(fields[3], grade)) {
            throw FormatError("expected 'qid iter docid grade'", where);
        }
        try {
            qrels.add(std::string(fields[0]), std::string(fields[2]), grade);
        } catch (FormatError const& error) {
            throw FormatError(error.what(), where);
        }
    });
    return qrels;
}

void write_qrels(std::ostream& out, QrelSet const& qrels)
{
    for (auto const& [qid, judged] : qrels.judgments()) {
        for (auto const& [docid, grade] : judged) {
            out << qid << " 0 " << docid << ' ' << grade << '\n';
        }
    }
}

auto parse_run(std::string_view bytes) -> std::vector<RankedList>
{
    if (auto bad = utf8::find_invalid(bytes)) {
        throw Utf8Error(*bad);
    }
    std::vector<RankedList> lists;
    std::map<std::string, std::size_t> position;
    std::map<std::string, std::unordered_set<std::string>> seen;
    for_each_line(bytes, [&](std::string_view line, std::size_t number) {
        auto const fields = split_whitespace(line);
        if (fields.empty()) {
            return;
        }
        std::string const where = "line " + std::to_string(number);
        RankedEntry entry;
        if (fields.size() != 6 || !parse_number(fields[3], entry.rank) || !parse_double(fields[4], entry.score)) {
            throw FormatError("expected 'qid Q0 docid rank score tag'", where);
        }
        std::string qid(fields[0]);
        entry.docid = std::string(fields[2]);
        if (!seen[qid].insert(entry.docid).second) {
            throw FormatError("document " + entry.docid + " listed twice for query " + qid, where);
        }
        auto [it, inserted] = position.emplace(qid, lists.size());
        if (inserted) {
            lists.push_back(RankedList{qid, {}});
        }
        lists[it->second].entries.push_back(std::move(entry));
    });
    for (auto& list : lists) {
        std::stable_sort(list.entries.begin(), list.entries.end(),
                         [](RankedEntry const& a, RankedEntry const& b) { return a.rank < b.rank; });
    }
    return lists;
}

auto recall_at(std::vector<RankedList> const& run, QrelSet const& qrels, std::size_t cutoff, EvalWarning const& warn)
    -> EvalResult
{
    return evaluate_impl(run, qrels, cutoff, warn);
}

auto average_precision(std::vector<RankedList> const& run, QrelSet const& qrels, std::size_t cutoff,
                       EvalWarning const& warn) -> EvalResult
{
    return evaluate_impl(run, qrels, cutoff, warn);
}

auto evaluate(std::vector<RankedList> const& run, QrelSet const& qrels, std::size_t cutoff, EvalWarning const& warn)
    -> EvalResult
{
    return evaluate_impl(run, qrels, cutoff, warn);
}

void write_eval_text(std::ostream& out, EvalResult const& result, std::string const& model)
{
    out << "model: " << model << '\n'
        << "cutoff: " << result.cutoff << '\n'
        << "queries: " << result.queries.size() << '\n'
        << "total_relevant: " << result.total_relevant << '\n'
        << "total_relevant_retrieved: " << result.total_relevant_retrieved << '\n'
        << "micro_recall: " << fixed(result.micro_recall, 6) << '\n'
        << "mean_recall: " << fixed(result.mean_recall, 6) << '\n'
        << "map: " << fixed(result.map, 6) << '\n'
        << "skipped_no_relevant: " << result.skipped_no_relevant.size() << '\n'
        << "skipped_unjudged: " << result.skipped_unjudged.size() << '\n';
    for (auto const& query : result.queries) {
        out << "query." << query.qid << ".relevant: " << query.relevant << '\n'
            << "query." << query.qid << ".relevant_retrieved: " << query.relevant_retrieved << '\n'
            << "query." << query.qid << ".recall: " << fixed(query.recall, 6) << '\n'
            << "query." << query.qid << ".precision: " << fixed(query.precision, 6) << '\n'
            << "query." << query.qid << ".average_precision: " << fixed(query.average_precision, 6) << '\n';
    }
}

void write_eval_csv(std::ostream& out, EvalResult const& result)
{
    out << "qid,relevant,relevant_retrieved,recall,precision_at_cutoff,average_precision\n";
    for (auto const& query : result.queries) {
        out << query.qid << ',' << query.relevant << ',' << query.relevant_retrieved << ','
            << fixed(query.recall, 6) << ',' << fixed(query.precision, 6) << ','
            << fixed(query.average_precision, 6) << '\n';
    }
    out << "all," << result.total_relevant << ',' << result.total_relevant_retrieved << ','
        << fixed(result.mean_recall, 6) << ',' << ',' << fixed(result.map, 6) << '\n';
}

auto parse_eval_text(std::string_view bytes) -> EvalSummary
{
    EvalSummary summary;
    bool has_model = false;
    bool has_relevant = false;
    bool has_retrieved = false;
    for_each_line(bytes, [&](std::string_view line, std::size_t number) {
        auto const colon = line.find(": ");
        if (line.empty() || colon == std::string_view::npos) {
            return;
        }
        auto const key = line.substr(0, colon);
        auto const value = line.substr(colon + 2);
        std::string const where = "line " + std::to_string(number);
        bool ok = true;
        if (key == "model") {
            summary.model = std::string(value);
            has_model = true;
        } else if (key == "cutoff") {
            ok = parse_number(value, summary.cutoff);
        } else if (key == "total_relevant") {
            ok = parse_number(value, summary.total_relevant);
            has_relevant = true;
        } else if (key == "total_relevant_retrieved") {
            ok = parse_number(value, summary.total_relevant_retrieved);
            has_retrieved = true;
        } else if (key == "map") {
            ok = parse_double(value, summary.map);
        }
        if (!ok) {
            throw FormatError("bad value for " + std::string(key), where);
        }
    });
    if (!has_model || !has_relevant || !has_retrieved) {
        throw FormatError("evaluation file lacks model/total_relevant/total_relevant_retrieved");
    }
    return summary;
}

auto to_string(Verdict verdict) -> std::string_view
{
    return verdict == Verdict::Improvement ? "Improvement" : "Fail";
}

auto format_percentage(std::size_t retrieved, std::size_t relevant) -> std::string
{
    if (relevant == 0) {
        return "0";
    }
    // Tenths of a percent, rounded half-up in exact integer arithmetic.
    std::uint64_t const numerator = 2000ULL * retrieved + relevant;
    std::uint64_t const tenths = numerator / (2ULL * relevant);
    std::string out = std::to_string(tenths / 10);
    if (tenths % 10 != 0) {
        out += '.';
        out += static_cast<char>('0' + tenths % 10);
    }
    return out;
}

auto compare(std::map<std::string, EvalSummary> const& before, std::map<std::string, EvalSummary> const& after)
    -> ComparisonReport
{
    for (auto const& [model, summary] : before) {
        if (after.count(model) == 0) {
            throw ValidationError("model " + model + " has no evaluation after expansion");
        }
    }
    for (auto const& [model, summary] : after) {
        if (before.count(model) == 0) {
            throw ValidationError("model " + model + " has no evaluation before expansion");
        }
    }
    std::vector<std::string> order;
    bool table_order = before.size() == kModelCount;
    for (auto model : kReportOrder) {
        table_order = table_order && before.count(std::string(model_name(model))) != 0;
    }
    if (table_order) {
        for (auto model : kReportOrder) {
            order.emplace_back(model_name(model));
        }
    } else {
        for (auto const& [model, summary] : before) {
            order.push_back(model);
        }
    }

    ComparisonReport report;
    for (auto const& model : order) {
        auto const& lhs = before.at(model);
        auto const& rhs = after.at(model);
        if (lhs.total_relevant != rhs.total_relevant) {
            throw ValidationError("model " + model + " was evaluated against different judgments before and after");
        }
        ComparisonRow row;
        row.model = model;
        row.relevant = lhs.total_relevant;
        row.before_retrieved = lhs.total_relevant_retrieved;
        row.before_pct = format_percentage(lhs.total_relevant_retrieved, lhs.total_relevant);
        row.after_retrieved = rhs.total_relevant_retrieved;
        row.after_pct = format_percentage(rhs.total_relevant_retrieved, rhs.total_relevant);
        row.verdict = row.after_retrieved > row.before_retrieved ? Verdict::Improvement : Verdict::Fail;
        report.rows.push_back(std::move(row));
    }
    return report;
}

void write_comparison_text(std::ostream& out, ComparisonReport const& report, std::string const& fields)
{
    std::size_t model_width = std::string_view("IR MODELS").size();
    for (auto const& row : report.rows) {
        model_width = std::max(model_width, row.model.size());
    }
    std::string const before = fields + "(Before Query Expansion)";
    std::string const after = fields + "(After Query Expansion)";
    auto const w = static_cast<int>(model_width);
    out << std::left << std::setw(w) << "" << "  " << std::setw(8) << "" << "  " << std::setw(24) << before
        << "  " << std::setw(24) << after << '\n';
    out << std::left << std::setw(w) << "IR MODELS" << "  " << std::right << std::setw(8) << "Relevant" << "  "
        << std::setw(10) << "Rel.Ret." << "  " << std::setw(12) << "Avg.Ret.(%)" << "  " << std::setw(10)
        << "Rel.Ret." << "  " << std::setw(12) << "Avg.Ret.(%)" << "  " << std::left << "Results" << '\n';
    for (auto const& row : report.rows) {
        out << std::left << std::setw(w) << row.model << "  " << std::right << std::setw(8) << row.relevant << "  "
            << std::setw(10) << row.before_retrieved << "  " << std::setw(12) << row.before_pct << "  "
            << std::setw(10) << row.after_retrieved << "  " << std::setw(12) << row.after_pct << "  " << std::left
            << to_string(row.verdict) << '\n';
    }
}

void write_comparison_csv(std::ostream& out, ComparisonReport const& report)
{
    out << "model,relevant,before_relevant_retrieved,before_pct,after_relevant_retrieved,after_pct,result\n";
    for (auto const& row : report.rows) {
        out << row.model << ',' << row.relevant << ',' << row.before_retrieved << ',' << row.before_pct << ','
            << row.after_retrieved << ',' << row.after_pct << ',' << to_string(row.verdict) << '\n';
    }
}

}  // namespace girit
