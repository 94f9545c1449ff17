#include "girit/corpus.hpp"

#include "girit/error.hpp"
#include "girit/utf8.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <sstream>

namespace girit {

namespace {

constexpr std::size_t kChunkSize = std::size_t{1} << 16;

class StreamSource final : public ByteSource {
public:
    explicit StreamSource(std::istream& in) : in_(in) {}

    auto read(char* buffer, std::size_t capacity) -> std::size_t override
    {
        in_.read(buffer, static_cast<std::streamsize>(capacity));
        return static_cast<std::size_t>(in_.gcount());
    }

private:
    std::istream& in_;
};

/// zlib's gz reader passes uncompressed files through untouched, so one
/// source handles both cases after it has sniffed the magic bytes.
class GzipFileSource final : public ByteSource {
public:
    explicit GzipFileSource(std::filesystem::path const& path)
        : file_(gzopen(path.c_str(), "rb"))
    {
        if (file_ == nullptr) {
            throw ValidationError("cannot open corpus file: " + path.string());
        }
        gzbuffer(file_, 1U << 20);
        path_ = path.string();
    }

    GzipFileSource(GzipFileSource const&) = delete;
    auto operator=(GzipFileSource const&) -> GzipFileSource& = delete;

    ~GzipFileSource() override { gzclose(file_); }

    auto read(char* buffer, std::size_t capacity) -> std::size_t override
    {
        auto const want = static_cast<unsigned>(std::min<std::size_t>(capacity, 1U << 30));
        int const got = gzread(file_, buffer, want);
        if (got < 0) {
            int code = 0;
            char const* message = gzerror(file_, &code);
            throw FormatError(std::string("decompression failed: ") + message, path_);
        }
        return static_cast<std::size_t>(got);
    }

private:
    gzFile file_;
    std::string path_;
};

auto is_space(char c) -> bool
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

auto is_name_char(char c) -> bool
{
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

auto trim(std::string_view text) -> std::string_view
{
    while (!text.empty() && is_space(text.front())) { text.remove_prefix(1); }
    while (!text.empty() && is_space(text.back())) { text.remove_suffix(1); }
    return text;
}

}  // namespace

auto make_stream_source(std::istream& in) -> std::unique_ptr<ByteSource>
{
    return std::make_unique<StreamSource>(in);
}

auto open_file_source(std::filesystem::path const& path) -> std::unique_ptr<ByteSource>
{
    return std::make_unique<GzipFileSource>(path);
}

CorpusReader::CorpusReader(std::unique_ptr<ByteSource> source, ParseOptions options)
    : source_(std::move(source)),
      options_(std::move(options)),
      seen_(std::make_shared<std::unordered_set<std::string>>())
{}

auto CorpusReader::fill() -> bool
{
    if (eof_) {
        return false;
    }
    std::size_t const old_size = buffer_.size();
    buffer_.resize(old_size + kChunkSize);
    std::size_t const got = source_->read(buffer_.data() + old_size, kChunkSize);
    buffer_.resize(old_size + got);
    if (got == 0) {
        eof_ = true;
        return false;
    }
    return true;
}

void CorpusReader::fail(std::string const& message, std::uint64_t offset)
{
    throw FormatError(message, "byte " + std::to_string(offset));
}

void CorpusReader::validate(std::size_t begin, std::size_t end)
{
    std::string_view region(buffer_.data() + begin, end - begin);
    if (auto bad = utf8::find_invalid(region)) {
        throw Utf8Error(consumed_ + begin + *bad);
    }
}

void CorpusReader::discard(std::size_t count)
{
    buffer_.erase(0, count);
    consumed_ += count;
}

auto CorpusReader::find_tag(std::size_t from) -> std::optional<Tag>
{
    while (true) {
        std::size_t const open = buffer_.find('<', from);
        if (open == std::string::npos) {
            from = std::max(from, buffer_.size());
            if (!fill()) {
                return std::nullopt;
            }
            continue;
        }
        std::size_t close = std::string::npos;
        std::size_t scan = open + 1;
        while (true) {
            std::size_t const hit = buffer_.find_first_of("<>", scan);
            if (hit != std::string::npos) {
                close = hit;
                break;
            }
            scan = buffer_.size();
            if (!fill()) {
                return std::nullopt;
            }
        }
        if (buffer_[close] == '<') {
            from = close;
            continue;
        }
        std::size_t p = open + 1;
        while (p < close && is_space(buffer_[p])) { ++p; }
        bool closing = false;
        if (p < close && buffer_[p] == '/') {
            closing = true;
            ++p;
            while (p < close && is_space(buffer_[p])) { ++p; }
        }
        std::size_t const name_begin = p;
        while (p < close && is_name_char(buffer_[p])) { ++p; }
        if (p == name_begin || (p < close && !is_space(buffer_[p]))) {
            from = open + 1;
            continue;
        }
        std::string name(buffer_.data() + name_begin, p - name_begin);
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::toupper(c); });
        return Tag{open, close + 1, std::move(name), closing};
    }
}

auto CorpusReader::find_closing(std::size_t from, std::string_view name) -> std::optional<Tag>
{
    while (auto tag = find_tag(from)) {
        if (tag->name == name && tag->closing) {
            return tag;
        }
        if (tag->name == "DOC") {
            return std::nullopt;
        }
        if (tag->end > options_.max_document_bytes) {
            return std::nullopt;
        }
        from = tag->end;
    }
    return std::nullopt;
}

auto CorpusReader::parse_document(std::size_t doc_begin, std::size_t doc_body) -> std::optional<RawDocument>
{
    std::uint64_t const doc_offset = consumed_ + doc_begin;
    std::optional<std::string> docno;
    std::string text;
    bool saw_text = false;
    std::size_t pos = doc_body;
    std::size_t doc_end = 0;

    while (true) {
        auto tag = find_tag(pos);
        if (!tag) {
            fail("unclosed <DOC>", doc_offset);
        }
        if (tag->end - doc_begin > options_.max_document_bytes) {
            fail("document exceeds " + std::to_string(options_.max_document_bytes) +
                     " bytes (missing </DOC>?)", doc_offset);
        }
        if (tag->name == "DOC") {
            if (!tag->closing) {
                fail("nested <DOC>", consumed_ + tag->begin);
            }
            doc_end = tag->end;
            break;
        }
        if (tag->closing || (tag->name != "DOCNO" && tag->name != "TEXT")) {
            pos = tag->end;
            continue;
        }
        auto closing = find_closing(tag->end, tag->name);
        if (!closing) {
            fail("unclosed <" + tag->name + ">", consumed_ + tag->begin);
        }
        std::string_view content(buffer_.data() + tag->end, closing->begin - tag->end);
        if (tag->name == "DOCNO") {
            if (docno) {
                fail("more than one <DOCNO> in document", consumed_ + tag->begin);
            }
            docno = std::string(trim(content));
        } else {
            if (saw_text) {
                text.push_back('\n');
            }
            text.append(content);
            saw_text = true;
        }
        pos = closing->end;
    }

    validate(doc_begin, doc_end);
    if (!docno || docno->empty()) {
        fail(docno ? "empty <DOCNO>" : "missing <DOCNO>", doc_offset);
    }
    if (!seen_->insert(*docno).second) {
        fail("duplicate docid '" + *docno + "'", doc_offset);
    }
    discard(doc_end);
    return RawDocument{std::move(*docno), std::move(text)};
}

auto CorpusReader::next() -> std::optional<RawDocument>
{
    while (true) {
        auto tag = find_tag(0);
        if (!tag) {
            try {
                validate(0, buffer_.size());
            } catch (FormatError const&) {
                if (!options_.lenient) { throw; }
            }
            discard(buffer_.size());
            return std::nullopt;
        }
        try {
            validate(0, tag->begin);
            if (tag->name != "DOC") {
                discard(tag->end);
                continue;
            }
            if (tag->closing) {
                fail("</DOC> without matching <DOC>", consumed_ + tag->begin);
            }
            discard(tag->begin);
            auto doc = parse_document(0, tag->end - tag->begin);
            ++yielded_;
            return doc;
        } catch (FormatError const& error) {
            if (!options_.lenient) {
                throw;
            }
            ++skipped_;
            if (options_.on_warning) {
                options_.on_warning(std::string("skipping malformed document: ") + error.what());
            }
            // Resynchronize at the next <DOC> after the current position.
            std::size_t from = 1;
            std::optional<Tag> resync;
            while ((resync = find_tag(from))) {
                if (resync->name == "DOC" && !resync->closing) {
                    break;
                }
                from = resync->end;
                if (from > options_.max_document_bytes) {
                    discard(from);
                    from = 0;
                }
            }
            discard(resync ? resync->begin : buffer_.size());
        }
    }
}

auto expand_corpus_paths(std::vector<std::filesystem::path> const& inputs) -> std::vector<std::filesystem::path>
{
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    for (auto const& input : inputs) {
        if (fs::is_directory(input)) {
            std::vector<fs::path> entries;
            for (auto const& entry : fs::directory_iterator(input)) {
                if (entry.is_regular_file()) {
                    entries.push_back(entry.path());
                }
            }
            std::sort(entries.begin(), entries.end(), [](fs::path const& a, fs::path const& b) {
                return a.filename().string() < b.filename().string();
            });
            files.insert(files.end(), entries.begin(), entries.end());
        } else if (fs::is_regular_file(input)) {
            files.push_back(input);
        } else {
            throw ValidationError("corpus path does not exist: " + input.string());
        }
    }
    return files;
}

MultiFileCorpus::MultiFileCorpus(std::vector<std::filesystem::path> const& inputs, ParseOptions options)
    : files_(expand_corpus_paths(inputs)),
      options_(std::move(options)),
      seen_(std::make_shared<std::unordered_set<std::string>>())
{}

auto MultiFileCorpus::next() -> std::optional<RawDocument>
{
    while (true) {
        if (!reader_) {
            if (current_ >= files_.size()) {
                return std::nullopt;
            }
            reader_ = std::make_unique<CorpusReader>(open_file_source(files_[current_]), options_);
            reader_->share_seen_docids(seen_);
        }
        try {
            if (auto doc = reader_->next()) {
                return doc;
            }
        } catch (FormatError const& error) {
            throw FormatError(error.what(), files_[current_].string());
        }
        finished_bytes_ += reader_->bytes_read();
        reader_.reset();
        ++current_;
    }
}

auto MultiFileCorpus::bytes_read() const noexcept -> std::uint64_t
{
    return finished_bytes_ + (reader_ ? reader_->bytes_read() : 0);
}

auto parse_corpus(std::string_view bytes, ParseOptions options) -> std::vector<RawDocument>
{
    std::istringstream in{std::string(bytes)};
    CorpusReader reader(make_stream_source(in), std::move(options));
    std::vector<RawDocument> docs;
    while (auto doc = reader.next()) {
        docs.push_back(std::move(*doc));
    }
    return docs;
}

void write_document(std::ostream& out, RawDocument const& doc)
{
    out << "<DOC>\n<DOCNO>" << doc.docid << "</DOCNO>\n<TEXT>" << doc.text << "</TEXT>\n</DOC>\n";
}

void write_corpus(std::ostream& out, std::vector<RawDocument> const& docs)
{
    for (auto const& doc : docs) {
        write_document(out, doc);
    }
}

void CorpusStatsBuilder::add(RawDocument const& doc)
{
    ++stats_.num_documents;
    stats_.total_bytes += doc.text.size();
    analyze_each(doc.text, cfg_, [&](std::string term) {
        ++stats_.num_tokens;
        vocabulary_.insert(std::move(term));
    });
}

auto CorpusStatsBuilder::stats() const -> CorpusStats
{
    CorpusStats result = stats_;
    result.vocabulary_size = vocabulary_.size();
    return result;
}

auto corpus_stats(std::vector<RawDocument> const& docs, AnalyzerConfig const& cfg) -> CorpusStats
{
    CorpusStatsBuilder builder(cfg);
    for (auto const& doc : docs) {
        builder.add(doc);
    }
    return builder.stats();
}

void write_stats_text(std::ostream& out, CorpusStats const& stats)
{
    out << "num_documents: " << stats.num_documents << '\n'
        << "vocabulary_size: " << stats.vocabulary_size << '\n'
        << "num_tokens: " << stats.num_tokens << '\n'
        << "total_bytes: " << stats.total_bytes << '\n';
}

void write_stats_csv(std::ostream& out, CorpusStats const& stats)
{
    out << "num_documents,vocabulary_size,num_tokens,total_bytes\n"
        << stats.num_documents << ',' << stats.vocabulary_size << ',' << stats.num_tokens << ','
        << stats.total_bytes << '\n';
}

}  // namespace girit
