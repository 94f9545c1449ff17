#pragma once

#include "girit/analysis.hpp"
#include "girit/corpus.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace girit {

/// Dense internal document number, assigned in ingestion order.
using DocId = std::uint32_t;

struct Posting {
    DocId doc = 0;
    std::uint32_t tf = 0;

    friend auto operator==(Posting const&, Posting const&) -> bool = default;
};

struct PostingList {
    std::string term;
    /// Number of documents containing the term.
    std::uint64_t df = 0;
    /// Total occurrences of the term in the collection.
    std::uint64_t cf = 0;
    std::vector<Posting> postings;

    friend auto operator==(PostingList const&, PostingList const&) -> bool = default;
};

struct DocEntry {
    std::string docid;
    /// Document length in analyzed tokens.
    std::uint32_t length = 0;

    friend auto operator==(DocEntry const&, DocEntry const&) -> bool = default;
};

/// Bijection between external docids and internal ids, plus lengths.
class DocTable {
public:
    /// Throws FormatError on a duplicate docid.
    auto add(std::string docid, std::uint32_t length) -> DocId;

    [[nodiscard]] auto size() const noexcept -> std::size_t { return entries_.size(); }
    [[nodiscard]] auto docid(DocId id) const -> std::string const& { return entries_.at(id).docid; }
    [[nodiscard]] auto length(DocId id) const -> std::uint32_t { return entries_.at(id).length; }
    [[nodiscard]] auto find(std::string_view docid) const -> std::optional<DocId>;
    [[nodiscard]] auto entries() const noexcept -> std::span<DocEntry const> { return entries_; }

private:
    std::vector<DocEntry> entries_;
    std::unordered_map<std::string, DocId> by_docid_;
};

struct CollectionStats {
    std::uint64_t num_documents = 0;
    std::uint64_t total_tokens = 0;
    std::uint64_t vocabulary_size = 0;
    double avgdl = 0.0;

    friend auto operator==(CollectionStats const&, CollectionStats const&) -> bool = default;
};

/// Location of one term's compressed postings.
struct LexiconEntry {
    std::string term;
    std::uint64_t df = 0;
    std::uint64_t cf = 0;
    std::uint64_t offset = 0;
    std::uint64_t length = 0;

    friend auto operator==(LexiconEntry const&, LexiconEntry const&) -> bool = default;
};

/// Immutable inverted index. Postings stay delta+varint compressed in memory
/// and are decoded per lookup; concurrent readers need no synchronization.
class Index {
public:
    [[nodiscard]] auto analyzer() const noexcept -> AnalyzerConfig const& { return analyzer_; }
    [[nodiscard]] auto fingerprint() const noexcept -> std::string const& { return fingerprint_; }
    [[nodiscard]] auto stats() const noexcept -> CollectionStats const& { return stats_; }
    [[nodiscard]] auto docs() const noexcept -> DocTable const& { return docs_; }
    [[nodiscard]] auto lexicon() const noexcept -> std::span<LexiconEntry const> { return lexicon_; }

    [[nodiscard]] auto find(std::string_view term) const -> LexiconEntry const*;
    /// Exact match on an already normalized term. Absent terms yield nullopt.
    [[nodiscard]] auto lookup(std::string_view term) const -> std::optional<PostingList>;
    [[nodiscard]] auto decode(LexiconEntry const& entry) const -> std::vector<Posting>;

private:
    friend class IndexBuilder;
    friend auto load_index(std::filesystem::path const& directory) -> Index;
    friend void persist(Index const& index, std::filesystem::path const& directory);

    AnalyzerConfig analyzer_;
    std::string fingerprint_;
    CollectionStats stats_;
    DocTable docs_;
    std::vector<LexiconEntry> lexicon_;
    std::string postings_;
};

struct BuildOptions {
    /// Approximate bound on in-memory posting accumulators before they are
    /// spilled to a sorted run on disk.
    std::size_t memory_budget_bytes = std::size_t{1} << 30;
    /// Where spill runs go; defaults to the system temp directory.
    std::filesystem::path spill_directory;
};

/// Single-writer index construction.
class IndexBuilder {
public:
    explicit IndexBuilder(AnalyzerConfig cfg, BuildOptions options = {});
    IndexBuilder(IndexBuilder const&) = delete;
    auto operator=(IndexBuilder const&) -> IndexBuilder& = delete;
    ~IndexBuilder();

    /// Analyzes and appends one document. Throws on duplicate docid.
    void add(RawDocument const& doc);
    /// Appends a document whose terms were analyzed elsewhere.
    void add_analyzed(std::string docid, std::vector<std::string> terms);

    /// Throws FormatError("empty collection") when no tokens were indexed.
    [[nodiscard]] auto finish() -> Index;

    [[nodiscard]] auto spill_count() const noexcept -> std::size_t { return spills_.size(); }

private:
    void spill();
    void merge_into(Index& index);
    void encode_memory_into(Index& index);

    AnalyzerConfig cfg_;
    BuildOptions options_;
    DocTable docs_;
    std::uint64_t total_tokens_ = 0;
    std::unordered_map<std::string, std::vector<Posting>> accumulators_;
    std::size_t memory_estimate_ = 0;
    std::vector<std::filesystem::path> spills_;
};

[[nodiscard]] auto build_index(std::vector<RawDocument> const& docs, AnalyzerConfig const& cfg,
                               BuildOptions options = {}) -> Index;

inline constexpr std::uint32_t kIndexFormatVersion = 1;

/// Names of the files making up a persisted index.
inline constexpr std::string_view kHeaderFile = "header.bin";
inline constexpr std::string_view kLexiconFile = "lexicon.bin";
inline constexpr std::string_view kPostingsFile = "postings.bin";
inline constexpr std::string_view kDocTableFile = "doctable.bin";

/// Writes the four index files atomically (temp file + rename each).
void persist(Index const& index, std::filesystem::path const& directory);

/// Verifies magic, version, checksums and cross-file consistency.
/// Throws CorruptIndexError on any mismatch.
[[nodiscard]] auto load_index(std::filesystem::path const& directory) -> Index;

/// "key: value" lines.
void write_index_stats(std::ostream& out, Index const& index);

/// Reads only the verified header of a persisted index and returns the
/// analyzer configuration it was built with.
[[nodiscard]] auto read_index_analyzer(std::filesystem::path const& directory) -> AnalyzerConfig;

}  // namespace girit
