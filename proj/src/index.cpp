#include "girit/index.hpp"

#include "girit/codec.hpp"
#include "girit/error.hpp"
#include "girit/io.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#ifdef __GLIBC__
#include <malloc.h>
#endif
#include <queue>
#include <unistd.h>

namespace girit {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kTermOverhead = 96;

constexpr std::string_view kHeaderMagic = "GIRITHDR";
constexpr std::string_view kLexiconMagic = "GIRITLEX";
constexpr std::string_view kPostingsMagic = "GIRITPST";
constexpr std::string_view kDocTableMagic = "GIRITDOC";

void encode_postings(std::string& out, std::vector<Posting> const& postings)
{
    DocId previous = 0;
    bool first = true;
    for (auto const& posting : postings) {
        codec::put_varint(out, first ? posting.doc : posting.doc - previous);
        codec::put_varint(out, posting.tf);
        previous = posting.doc;
        first = false;
    }
}

void write_framed(fs::path const& path, std::string_view magic, std::string_view payload)
{
    std::string prefix(magic);
    codec::put_u32(prefix, kIndexFormatVersion);
    std::string trailer;
    codec::put_u64(trailer, codec::crc64({prefix, payload}));
    io::write_file_atomic(path, {prefix, payload, trailer});
}

/// Checks magic, version and checksum; returns the payload.
auto unframe(std::string const& bytes, std::string_view magic, std::string_view name) -> std::string_view
{
    std::string const where(name);
    if (bytes.size() < magic.size() + 4 + 8) {
        throw CorruptIndexError("truncated file", where);
    }
    if (std::string_view(bytes).substr(0, magic.size()) != magic) {
        throw CorruptIndexError("bad magic", where);
    }
    codec::Reader reader(std::string_view(bytes).substr(magic.size(), 4));
    auto const version = reader.u32().value();
    if (version != kIndexFormatVersion) {
        throw CorruptIndexError("format version mismatch: file has " + std::to_string(version) + ", expected " +
                                    std::to_string(kIndexFormatVersion), where);
    }
    std::string_view const body(bytes.data(), bytes.size() - 8);
    codec::Reader trailer(std::string_view(bytes).substr(bytes.size() - 8));
    if (codec::crc64(body) != trailer.u64().value()) {
        throw CorruptIndexError("checksum mismatch", where);
    }
    return body.substr(magic.size() + 4);
}

template<typename T>
auto require(std::optional<T> value, std::string_view file) -> T
{
    if (!value) {
        throw CorruptIndexError("truncated record", std::string(file));
    }
    return *value;
}

auto unique_spill_path(fs::path const& directory) -> fs::path
{
    static std::atomic<std::uint64_t> counter{0};
    return directory / ("girit-spill-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + ".run");
}

/// Sequential reader over one sorted spill run.
class SpillRun {
public:
    explicit SpillRun(fs::path const& path) : in_(path, std::ios::binary)
    {
        if (!in_) {
            throw Error("cannot reopen spill file " + path.string());
        }
        advance();
    }

    [[nodiscard]] auto exhausted() const noexcept -> bool { return exhausted_; }
    [[nodiscard]] auto term() const noexcept -> std::string const& { return term_; }

    /// Appends the current term's postings and moves to the next term.
    void take(std::vector<Posting>& out)
    {
        out.insert(out.end(), postings_.begin(), postings_.end());
        advance();
    }

private:
    auto varint() -> std::optional<std::uint64_t>
    {
        std::uint64_t value = 0;
        for (int shift = 0; shift < 64; shift += 7) {
            int const c = in_.get();
            if (c == std::char_traits<char>::eof()) {
                return std::nullopt;
            }
            value |= static_cast<std::uint64_t>(c & 0x7F) << shift;
            if ((c & 0x80) == 0) {
                return value;
            }
        }
        return std::nullopt;
    }

    void advance()
    {
        auto const length = varint();
        if (!length) {
            exhausted_ = true;
            return;
        }
        term_.resize(*length);
        in_.read(term_.data(), static_cast<std::streamsize>(*length));
        auto const count = varint().value_or(0);
        postings_.clear();
        postings_.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            auto const doc = varint();
            auto const tf = varint();
            if (!doc || !tf) {
                throw Error("truncated spill run");
            }
            postings_.push_back(Posting{static_cast<DocId>(*doc), static_cast<std::uint32_t>(*tf)});
        }
    }

    std::ifstream in_;
    std::string term_;
    std::vector<Posting> postings_;
    bool exhausted_ = false;
};

}  // namespace

auto DocTable::add(std::string docid, std::uint32_t length) -> DocId
{
    auto const id = static_cast<DocId>(entries_.size());
    auto [it, inserted] = by_docid_.emplace(docid, id);
    if (!inserted) {
        throw FormatError("duplicate docid '" + docid + "'");
    }
    entries_.push_back(DocEntry{std::move(docid), length});
    return id;
}

auto DocTable::find(std::string_view docid) const -> std::optional<DocId>
{
    if (auto it = by_docid_.find(std::string(docid)); it != by_docid_.end()) {
        return it->second;
    }
    return std::nullopt;
}

auto Index::find(std::string_view term) const -> LexiconEntry const*
{
    auto it = std::lower_bound(lexicon_.begin(), lexicon_.end(), term,
                               [](LexiconEntry const& entry, std::string_view t) { return entry.term < t; });
    if (it == lexicon_.end() || it->term != term) {
        return nullptr;
    }
    return &*it;
}

auto Index::decode(LexiconEntry const& entry) const -> std::vector<Posting>
{
    std::vector<Posting> postings;
    postings.reserve(entry.df);
    codec::Reader reader(std::string_view(postings_).substr(entry.offset, entry.length));
    DocId doc = 0;
    for (std::uint64_t i = 0; i < entry.df; ++i) {
        auto const gap = reader.varint();
        auto const tf = reader.varint();
        if (!gap || !tf) {
            throw CorruptIndexError("postings for '" + entry.term + "' are truncated");
        }
        doc = i == 0 ? static_cast<DocId>(*gap) : static_cast<DocId>(doc + *gap);
        postings.push_back(Posting{doc, static_cast<std::uint32_t>(*tf)});
    }
    return postings;
}

auto Index::lookup(std::string_view term) const -> std::optional<PostingList>
{
    auto const* entry = find(term);
    if (entry == nullptr) {
        return std::nullopt;
    }
    return PostingList{entry->term, entry->df, entry->cf, decode(*entry)};
}

IndexBuilder::IndexBuilder(AnalyzerConfig cfg, BuildOptions options)
    : cfg_(std::move(cfg)), options_(std::move(options))
{
    if (options_.spill_directory.empty()) {
        options_.spill_directory = fs::temp_directory_path();
    }
}

IndexBuilder::~IndexBuilder()
{
    std::error_code ignored;
    for (auto const& path : spills_) {
        fs::remove(path, ignored);
    }
}

void IndexBuilder::add(RawDocument const& doc)
{
    add_analyzed(doc.docid, analyze(doc.text, cfg_));
}

void IndexBuilder::add_analyzed(std::string docid, std::vector<std::string> terms)
{
    std::sort(terms.begin(), terms.end());
    auto const length = static_cast<std::uint32_t>(terms.size());
    DocId const id = docs_.add(std::move(docid), length);
    total_tokens_ += length;

    for (std::size_t i = 0; i < terms.size();) {
        std::size_t j = i + 1;
        while (j < terms.size() && terms[j] == terms[i]) {
            ++j;
        }
        auto [it, inserted] = accumulators_.try_emplace(std::move(terms[i]));
        if (inserted) {
            memory_estimate_ += it->first.size() + kTermOverhead;
        }
        auto& postings = it->second;
        std::size_t const capacity = postings.capacity();
        postings.push_back(Posting{id, static_cast<std::uint32_t>(j - i)});
        memory_estimate_ += (postings.capacity() - capacity) * sizeof(Posting);
        i = j;
    }
    if (memory_estimate_ > options_.memory_budget_bytes) {
        spill();
    }
}

void IndexBuilder::spill()
{
    if (accumulators_.empty()) {
        return;
    }
    std::vector<decltype(accumulators_)::iterator> order;
    order.reserve(accumulators_.size());
    for (auto it = accumulators_.begin(); it != accumulators_.end(); ++it) {
        order.push_back(it);
    }
    std::sort(order.begin(), order.end(), [](auto a, auto b) { return a->first < b->first; });

    if (!options_.spill_directory.empty()) {
        fs::create_directories(options_.spill_directory);
    }
    auto const path = unique_spill_path(options_.spill_directory);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot create spill file " + path.string());
    }
    std::string record;
    for (auto it : order) {
        record.clear();
        codec::put_bytes(record, it->first);
        codec::put_varint(record, it->second.size());
        for (auto const& posting : it->second) {
            codec::put_varint(record, posting.doc);
            codec::put_varint(record, posting.tf);
        }
        out.write(record.data(), static_cast<std::streamsize>(record.size()));
    }
    out.close();
    if (!out) {
        throw Error("failed writing spill file " + path.string());
    }
    spills_.push_back(path);
    accumulators_ = {};
    memory_estimate_ = 0;
#ifdef __GLIBC__
    // Small posting vectors live in the main heap; hand the freed pages back.
    malloc_trim(0);
#endif
}

void IndexBuilder::encode_memory_into(Index& index)
{
    std::vector<decltype(accumulators_)::iterator> order;
    order.reserve(accumulators_.size());
    for (auto it = accumulators_.begin(); it != accumulators_.end(); ++it) {
        order.push_back(it);
    }
    std::sort(order.begin(), order.end(), [](auto a, auto b) { return a->first < b->first; });
    index.lexicon_.reserve(order.size());
    for (auto it : order) {
        LexiconEntry entry;
        entry.term = it->first;
        entry.df = it->second.size();
        for (auto const& posting : it->second) {
            entry.cf += posting.tf;
        }
        entry.offset = index.postings_.size();
        encode_postings(index.postings_, it->second);
        entry.length = index.postings_.size() - entry.offset;
        index.lexicon_.push_back(std::move(entry));
    }
    accumulators_.clear();
}

void IndexBuilder::merge_into(Index& index)
{
    std::vector<std::unique_ptr<SpillRun>> runs;
    runs.reserve(spills_.size());
    std::uintmax_t spilled_bytes = 0;
    for (auto const& path : spills_) {
        runs.push_back(std::make_unique<SpillRun>(path));
        spilled_bytes += fs::file_size(path);
    }
    // Runs store absolute ids, so their size bounds the delta-coded postings.
    // Untouched reserved pages cost no resident memory.
    index.postings_.reserve(static_cast<std::size_t>(spilled_bytes));
    // Min-heap on (term, run number); equal terms leave in run order, which
    // is ascending document order.
    auto greater = [&](std::size_t a, std::size_t b) {
        int const cmp = runs[a]->term().compare(runs[b]->term());
        return cmp > 0 || (cmp == 0 && a > b);
    };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(greater)> heap(greater);
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (!runs[i]->exhausted()) {
            heap.push(i);
        }
    }
    std::vector<Posting> merged;
    while (!heap.empty()) {
        std::string const term = runs[heap.top()]->term();
        merged.clear();
        while (!heap.empty() && runs[heap.top()]->term() == term) {
            std::size_t const run = heap.top();
            heap.pop();
            runs[run]->take(merged);
            if (!runs[run]->exhausted()) {
                heap.push(run);
            }
        }
        LexiconEntry entry;
        entry.term = term;
        entry.df = merged.size();
        for (auto const& posting : merged) {
            entry.cf += posting.tf;
        }
        entry.offset = index.postings_.size();
        encode_postings(index.postings_, merged);
        entry.length = index.postings_.size() - entry.offset;
        index.lexicon_.push_back(std::move(entry));
    }
}

auto IndexBuilder::finish() -> Index
{
    if (docs_.size() == 0 || total_tokens_ == 0) {
        throw FormatError("empty collection");
    }
    Index index;
    index.analyzer_ = cfg_;
    index.fingerprint_ = cfg_.fingerprint();
    if (spills_.empty()) {
        encode_memory_into(index);
    } else {
        spill();
        merge_into(index);
        std::error_code ignored;
        for (auto const& path : spills_) {
            fs::remove(path, ignored);
        }
        spills_.clear();
    }
    index.docs_ = std::move(docs_);
    index.stats_.num_documents = index.docs_.size();
    index.stats_.total_tokens = total_tokens_;
    index.stats_.vocabulary_size = index.lexicon_.size();
    index.stats_.avgdl = static_cast<double>(total_tokens_) / static_cast<double>(index.stats_.num_documents);
    docs_ = DocTable{};
    total_tokens_ = 0;
    return index;
}

auto build_index(std::vector<RawDocument> const& docs, AnalyzerConfig const& cfg, BuildOptions options) -> Index
{
    IndexBuilder builder(cfg, std::move(options));
    for (auto const& doc : docs) {
        builder.add(doc);
    }
    return builder.finish();
}

void persist(Index const& index, fs::path const& directory)
{
    fs::create_directories(directory);

    std::string header;
    codec::put_bytes(header, index.analyzer_.canonical());
    codec::put_bytes(header, index.fingerprint_);
    codec::put_u64(header, index.stats_.num_documents);
    codec::put_u64(header, index.stats_.total_tokens);
    codec::put_u64(header, index.stats_.vocabulary_size);

    std::string lexicon;
    codec::put_varint(lexicon, index.lexicon_.size());
    for (auto const& entry : index.lexicon_) {
        codec::put_bytes(lexicon, entry.term);
        codec::put_varint(lexicon, entry.df);
        codec::put_varint(lexicon, entry.cf);
        codec::put_varint(lexicon, entry.offset);
        codec::put_varint(lexicon, entry.length);
    }

    std::string doctable;
    codec::put_varint(doctable, index.docs_.size());
    for (auto const& entry : index.docs_.entries()) {
        codec::put_bytes(doctable, entry.docid);
        codec::put_varint(doctable, entry.length);
    }

    write_framed(directory / kLexiconFile, kLexiconMagic, lexicon);
    write_framed(directory / kPostingsFile, kPostingsMagic, index.postings_);
    write_framed(directory / kDocTableFile, kDocTableMagic, doctable);
    // Header last: a directory with a header is complete.
    write_framed(directory / kHeaderFile, kHeaderMagic, header);
}

auto load_index(fs::path const& directory) -> Index
{
    auto read = [&](std::string_view name) {
        auto const path = directory / name;
        if (!fs::exists(path)) {
            throw CorruptIndexError("missing index file", path.string());
        }
        return io::read_file(path);
    };
    std::string const header_bytes = read(kHeaderFile);
    std::string const lexicon_bytes = read(kLexiconFile);
    std::string postings_bytes = read(kPostingsFile);
    std::string const doctable_bytes = read(kDocTableFile);

    Index index;

    codec::Reader header(unframe(header_bytes, kHeaderMagic, kHeaderFile));
    auto const canonical = require(header.bytes(require(header.varint(), kHeaderFile)), kHeaderFile);
    auto const fingerprint = require(header.bytes(require(header.varint(), kHeaderFile)), kHeaderFile);
    index.stats_.num_documents = require(header.u64(), kHeaderFile);
    index.stats_.total_tokens = require(header.u64(), kHeaderFile);
    index.stats_.vocabulary_size = require(header.u64(), kHeaderFile);
    if (!header.at_end()) {
        throw CorruptIndexError("trailing bytes", std::string(kHeaderFile));
    }
    try {
        index.analyzer_ = parse_analyzer_canonical(canonical);
    } catch (Error const& error) {
        throw CorruptIndexError(error.what(), std::string(kHeaderFile));
    }
    index.fingerprint_ = std::string(fingerprint);
    if (index.analyzer_.fingerprint() != index.fingerprint_) {
        throw CorruptIndexError("analyzer fingerprint does not match its description", std::string(kHeaderFile));
    }

    {
        // Strip the frame in place; the postings file is the bulk of the index.
        auto const payload = unframe(postings_bytes, kPostingsMagic, kPostingsFile);
        auto const skip = static_cast<std::size_t>(payload.data() - postings_bytes.data());
        postings_bytes.resize(skip + payload.size());
        postings_bytes.erase(0, skip);
        index.postings_ = std::move(postings_bytes);
    }

    codec::Reader lexicon(unframe(lexicon_bytes, kLexiconMagic, kLexiconFile));
    auto const term_count = require(lexicon.varint(), kLexiconFile);
    if (term_count != index.stats_.vocabulary_size) {
        throw CorruptIndexError("vocabulary size disagrees with header", std::string(kLexiconFile));
    }
    index.lexicon_.reserve(term_count);
    std::uint64_t cf_total = 0;
    for (std::uint64_t i = 0; i < term_count; ++i) {
        LexiconEntry entry;
        entry.term = std::string(require(lexicon.bytes(require(lexicon.varint(), kLexiconFile)), kLexiconFile));
        entry.df = require(lexicon.varint(), kLexiconFile);
        entry.cf = require(lexicon.varint(), kLexiconFile);
        entry.offset = require(lexicon.varint(), kLexiconFile);
        entry.length = require(lexicon.varint(), kLexiconFile);
        if (entry.offset + entry.length > index.postings_.size() || entry.df == 0 || entry.df > entry.cf ||
            entry.df > index.stats_.num_documents) {
            throw CorruptIndexError("inconsistent lexicon entry for '" + entry.term + "'", std::string(kLexiconFile));
        }
        if (!index.lexicon_.empty() && !(index.lexicon_.back().term < entry.term)) {
            throw CorruptIndexError("lexicon is not sorted", std::string(kLexiconFile));
        }
        cf_total += entry.cf;
        index.lexicon_.push_back(std::move(entry));
    }
    if (!lexicon.at_end()) {
        throw CorruptIndexError("trailing bytes", std::string(kLexiconFile));
    }

    codec::Reader doctable(unframe(doctable_bytes, kDocTableMagic, kDocTableFile));
    auto const doc_count = require(doctable.varint(), kDocTableFile);
    if (doc_count != index.stats_.num_documents || doc_count == 0) {
        throw CorruptIndexError("document count disagrees with header", std::string(kDocTableFile));
    }
    std::uint64_t length_total = 0;
    for (std::uint64_t i = 0; i < doc_count; ++i) {
        auto docid = std::string(require(doctable.bytes(require(doctable.varint(), kDocTableFile)), kDocTableFile));
        auto const length = require(doctable.varint(), kDocTableFile);
        length_total += length;
        try {
            index.docs_.add(std::move(docid), static_cast<std::uint32_t>(length));
        } catch (FormatError const& error) {
            throw CorruptIndexError(error.what(), std::string(kDocTableFile));
        }
    }
    if (!doctable.at_end()) {
        throw CorruptIndexError("trailing bytes", std::string(kDocTableFile));
    }
    if (length_total != index.stats_.total_tokens || cf_total != index.stats_.total_tokens) {
        throw CorruptIndexError("token totals disagree across files");
    }
    index.stats_.avgdl =
        static_cast<double>(index.stats_.total_tokens) / static_cast<double>(index.stats_.num_documents);
    return index;
}

void write_index_stats(std::ostream& out, Index const& index)
{
    auto const& stats = index.stats();
    out << "num_documents: " << stats.num_documents << '\n'
        << "total_tokens: " << stats.total_tokens << '\n'
        << "vocabulary_size: " << stats.vocabulary_size << '\n'
        << "avgdl: " << stats.avgdl << '\n'
        << "analyzer_fingerprint: " << index.fingerprint() << '\n'
        << "format_version: " << kIndexFormatVersion << '\n';
}

auto read_index_analyzer(fs::path const& directory) -> AnalyzerConfig
{
    auto const path = directory / kHeaderFile;
    if (!fs::exists(path)) {
        throw CorruptIndexError("missing index file", path.string());
    }
    std::string const bytes = io::read_file(path);
    codec::Reader header(unframe(bytes, kHeaderMagic, kHeaderFile));
    auto const canonical = require(header.bytes(require(header.varint(), kHeaderFile)), kHeaderFile);
    try {
        return parse_analyzer_canonical(canonical);
    } catch (Error const& error) {
        throw CorruptIndexError(error.what(), std::string(kHeaderFile));
    }
}

}  // namespace girit
