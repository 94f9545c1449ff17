#pragma once

#include "girit/analysis.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

namespace girit {

/// One article of a TREC-style collection.
struct RawDocument {
    std::string docid;
    std::string text;

    friend auto operator==(RawDocument const&, RawDocument const&) -> bool = default;
};

struct CorpusStats {
    std::uint64_t num_documents = 0;
    std::uint64_t vocabulary_size = 0;
    std::uint64_t num_tokens = 0;
    /// Sum of document text sizes in bytes.
    std::uint64_t total_bytes = 0;

    friend auto operator==(CorpusStats const&, CorpusStats const&) -> bool = default;
};

/// Pull-based byte source so the parser never needs the whole corpus in memory.
class ByteSource {
public:
    virtual ~ByteSource() = default;
    /// Reads up to `capacity` bytes; returns 0 at end of input.
    virtual auto read(char* buffer, std::size_t capacity) -> std::size_t = 0;
};

/// Wraps a std::istream. The stream must outlive the source.
[[nodiscard]] auto make_stream_source(std::istream& in) -> std::unique_ptr<ByteSource>;

/// Opens a file, transparently inflating gzip content (detected by magic bytes).
[[nodiscard]] auto open_file_source(std::filesystem::path const& path) -> std::unique_ptr<ByteSource>;

struct ParseOptions {
    /// Skip malformed documents instead of failing.
    bool lenient = false;
    /// Upper bound on one <DOC> region; guards against a missing </DOC>.
    std::size_t max_document_bytes = std::size_t{256} << 20;
    /// Receives diagnostics about skipped documents in lenient mode.
    std::function<void(std::string const&)> on_warning;
};

/// Streaming parser for <DOC>/<DOCNO>/<TEXT> markup.
///
/// Tag names match case-insensitively and may carry whitespace inside the
/// angle brackets. Unknown tags inside a document, and anything between
/// recognized regions, are ignored. Memory use is bounded by one document.
class CorpusReader {
public:
    explicit CorpusReader(std::unique_ptr<ByteSource> source, ParseOptions options = {});

    /// Next document in file order, or nullopt at end of input.
    [[nodiscard]] auto next() -> std::optional<RawDocument>;

    /// Bytes consumed from the source so far.
    [[nodiscard]] auto bytes_read() const noexcept -> std::uint64_t { return consumed_ + buffer_.size(); }
    [[nodiscard]] auto documents_read() const noexcept -> std::uint64_t { return yielded_; }
    [[nodiscard]] auto documents_skipped() const noexcept -> std::uint64_t { return skipped_; }

    /// Shares docid uniqueness across several readers (multi-file corpora).
    void share_seen_docids(std::shared_ptr<std::unordered_set<std::string>> seen) { seen_ = std::move(seen); }

private:
    struct Tag {
        std::size_t begin;
        std::size_t end;
        std::string name;
        bool closing;
    };

    auto fill() -> bool;
    auto find_tag(std::size_t from) -> std::optional<Tag>;
    auto find_closing(std::size_t from, std::string_view name) -> std::optional<Tag>;
    auto parse_document(std::size_t doc_begin, std::size_t doc_body) -> std::optional<RawDocument>;
    void validate(std::size_t begin, std::size_t end);
    void discard(std::size_t count);
    [[noreturn]] void fail(std::string const& message, std::uint64_t offset);

    std::unique_ptr<ByteSource> source_;
    ParseOptions options_;
    std::string buffer_;
    std::uint64_t consumed_ = 0;
    bool eof_ = false;
    std::uint64_t yielded_ = 0;
    std::uint64_t skipped_ = 0;
    std::shared_ptr<std::unordered_set<std::string>> seen_;
};

/// Reads several corpus files in the given order; a directory expands to its
/// regular files in lexicographic order.
class MultiFileCorpus {
public:
    MultiFileCorpus(std::vector<std::filesystem::path> const& inputs, ParseOptions options = {});

    [[nodiscard]] auto next() -> std::optional<RawDocument>;
    [[nodiscard]] auto bytes_read() const noexcept -> std::uint64_t;
    [[nodiscard]] auto files() const noexcept -> std::vector<std::filesystem::path> const& { return files_; }

private:
    std::vector<std::filesystem::path> files_;
    std::size_t current_ = 0;
    ParseOptions options_;
    std::unique_ptr<CorpusReader> reader_;
    std::uint64_t finished_bytes_ = 0;
    std::shared_ptr<std::unordered_set<std::string>> seen_;
};

/// Expands directories into sorted regular files; errors on missing paths.
[[nodiscard]] auto expand_corpus_paths(std::vector<std::filesystem::path> const& inputs)
    -> std::vector<std::filesystem::path>;

/// Parses an entire in-memory corpus; convenience for tests and small inputs.
[[nodiscard]] auto parse_corpus(std::string_view bytes, ParseOptions options = {}) -> std::vector<RawDocument>;

/// Writes documents in the markup understood by CorpusReader; re-parsing
/// yields identical records.
void write_corpus(std::ostream& out, std::vector<RawDocument> const& docs);
void write_document(std::ostream& out, RawDocument const& doc);

/// Accumulates collection statistics one document at a time.
class CorpusStatsBuilder {
public:
    explicit CorpusStatsBuilder(AnalyzerConfig cfg) : cfg_(std::move(cfg)) {}
    void add(RawDocument const& doc);
    [[nodiscard]] auto stats() const -> CorpusStats;

private:
    AnalyzerConfig cfg_;
    CorpusStats stats_;
    std::unordered_set<std::string> vocabulary_;
};

[[nodiscard]] auto corpus_stats(std::vector<RawDocument> const& docs, AnalyzerConfig const& cfg) -> CorpusStats;

/// "key: value" lines.
void write_stats_text(std::ostream& out, CorpusStats const& stats);
/// Header plus one data row.
void write_stats_csv(std::ostream& out, CorpusStats const& stats);

}  // namespace girit
