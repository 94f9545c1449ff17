#include "girit/retrieval.hpp"

#include "girit/error.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <map>
#include <unordered_map>

namespace girit {

namespace {

struct Candidate {
    std::string const* docid;
    double score;
};

auto better(Candidate const& a, Candidate const& b) -> bool
{
    if (a.score != b.score) {
        return a.score > b.score;
    }
    return *a.docid < *b.docid;
}

auto top_k(std::vector<Candidate>& candidates, std::string qid, std::size_t cutoff) -> RankedList
{
    std::size_t const keep = std::min(cutoff, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                      better);
    RankedList list;
    list.qid = std::move(qid);
    list.entries.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        list.entries.push_back(RankedEntry{*candidates[i].docid, i + 1, candidates[i].score});
    }
    return list;
}

}  // namespace

auto rank(Index const& index, QueryBag const& query, ModelId model, ModelParams const& params, std::size_t cutoff)
    -> RankedList
{
    if (query.analyzer_fingerprint != index.fingerprint()) {
        throw AnalyzerMismatchError("query " + query.qid + " was analyzed with configuration " +
                                    query.analyzer_fingerprint + " but the index uses " + index.fingerprint());
    }
    auto const& stats = index.stats();
    auto const& docs = index.docs();

    std::vector<double> accumulators(docs.size(), 0.0);
    std::vector<std::uint8_t> touched(docs.size(), 0);
    std::vector<DocId> matched;

    TermEvidence evidence;
    evidence.avgdl = stats.avgdl;
    evidence.num_docs = static_cast<double>(stats.num_documents);
    evidence.num_tokens = static_cast<double>(stats.total_tokens);

    for (auto const& [term, qtf] : query.terms) {
        auto const* entry = index.find(term);
        if (entry == nullptr) {
            continue;
        }
        evidence.qtf = qtf;
        evidence.df = static_cast<double>(entry->df);
        evidence.cf = static_cast<double>(entry->cf);
        for (auto const& posting : index.decode(*entry)) {
            evidence.tf = posting.tf;
            evidence.dl = docs.length(posting.doc);
            try {
                accumulators[posting.doc] += score_term(model, evidence, params);
            } catch (ScoringDomainError const& error) {
                throw error.with_context(term, query.qid, docs.docid(posting.doc));
            }
            if (touched[posting.doc] == 0) {
                touched[posting.doc] = 1;
                matched.push_back(posting.doc);
            }
        }
    }

    std::vector<Candidate> candidates;
    candidates.reserve(matched.size());
    for (DocId doc : matched) {
        candidates.push_back(Candidate{&docs.docid(doc), accumulators[doc]});
    }
    return top_k(candidates, query.qid, cutoff);
}

auto oracle_rank(std::vector<RawDocument> const& docs, AnalyzerConfig const& cfg, QueryBag const& query,
                 ModelId model, ModelParams const& params, std::size_t cutoff) -> RankedList
{
    if (query.analyzer_fingerprint != cfg.fingerprint()) {
        throw AnalyzerMismatchError("query " + query.qid + " was analyzed with a different configuration");
    }
    std::vector<std::map<std::string, std::uint64_t>> term_counts;
    term_counts.reserve(docs.size());
    std::vector<double> lengths;
    double total_tokens = 0;
    for (auto const& doc : docs) {
        auto& counts = term_counts.emplace_back();
        double length = 0;
        for (auto& term : analyze(doc.text, cfg)) {
            ++counts[std::move(term)];
            ++length;
        }
        lengths.push_back(length);
        total_tokens += length;
    }
    double const num_docs = static_cast<double>(docs.size());
    double const avgdl = total_tokens / num_docs;

    std::map<std::string, std::pair<double, double>> df_cf;
    for (auto const& [term, qtf] : query.terms) {
        double df = 0;
        double cf = 0;
        for (auto const& counts : term_counts) {
            if (auto it = counts.find(term); it != counts.end()) {
                ++df;
                cf += static_cast<double>(it->second);
            }
        }
        df_cf[term] = {df, cf};
    }

    std::vector<Candidate> candidates;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        bool matches = false;
        for (auto const& [term, qtf] : query.terms) {
            matches = matches || term_counts[d].count(term) != 0;
        }
        if (!matches) {
            continue;
        }
        EvidenceProvider provider = [&](std::string_view term) -> std::optional<TermEvidence> {
            auto it = term_counts[d].find(std::string(term));
            if (it == term_counts[d].end()) {
                return std::nullopt;
            }
            auto const& [df, cf] = df_cf.at(std::string(term));
            TermEvidence ev;
            ev.tf = static_cast<double>(it->second);
            ev.df = df;
            ev.cf = cf;
            ev.dl = lengths[d];
            ev.avgdl = avgdl;
            ev.num_docs = num_docs;
            ev.num_tokens = total_tokens;
            return ev;
        };
        try {
            candidates.push_back(Candidate{&docs[d].docid, score_document(query, provider, model, params)});
        } catch (ScoringDomainError const& error) {
            throw error.with_context({}, query.qid, docs[d].docid);
        }
    }
    return top_k(candidates, query.qid, cutoff);
}

void write_run(std::ostream& out, std::vector<RankedList> const& lists, std::string const& tag)
{
    char score[64];
    for (auto const& list : lists) {
        for (auto const& entry : list.entries) {
            std::snprintf(score, sizeof score, "%.6f", entry.score);
            out << list.qid << " Q0 " << entry.docid << ' ' << entry.rank << ' ' << score << ' ' << tag << '\n';
        }
    }
}

}  // namespace girit
