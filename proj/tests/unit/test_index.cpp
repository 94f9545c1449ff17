#include "girit/index.hpp"
#include "girit/error.hpp"

#include "girit/io.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <sstream>

using namespace girit;
namespace fs = std::filesystem;

namespace {

struct Recount {
    std::map<std::string, std::map<std::string, std::uint32_t>> tf;  // term -> docid -> tf
    std::map<std::string, std::uint32_t> dl;
    std::uint64_t tokens = 0;
};

auto recount(std::vector<RawDocument> const& docs, AnalyzerConfig const& cfg) -> Recount
{
    Recount r;
    for (auto const& doc : docs) {
        auto const terms = analyze(doc.text, cfg);
        r.dl[doc.docid] = static_cast<std::uint32_t>(terms.size());
        r.tokens += terms.size();
        for (auto const& term : terms) {
            ++r.tf[term][doc.docid];
        }
    }
    return r;
}

auto file_bytes(fs::path const& dir) -> std::map<std::string, std::string>
{
    std::map<std::string, std::string> files;
    for (auto name : {kHeaderFile, kLexiconFile, kPostingsFile, kDocTableFile}) {
        files[std::string(name)] = io::read_file(dir / name);
    }
    return files;
}

void expect_same_index(Index const& a, Index const& b)
{
    EXPECT_EQ(a.fingerprint(), b.fingerprint());
    EXPECT_EQ(a.stats().num_documents, b.stats().num_documents);
    EXPECT_EQ(a.stats().total_tokens, b.stats().total_tokens);
    EXPECT_EQ(a.stats().vocabulary_size, b.stats().vocabulary_size);
    EXPECT_EQ(a.stats().avgdl, b.stats().avgdl);
    ASSERT_EQ(a.docs().size(), b.docs().size());
    for (DocId d = 0; d < a.docs().size(); ++d) {
        EXPECT_EQ(a.docs().docid(d), b.docs().docid(d));
        EXPECT_EQ(a.docs().length(d), b.docs().length(d));
    }
    ASSERT_EQ(a.lexicon().size(), b.lexicon().size());
    for (std::size_t i = 0; i < a.lexicon().size(); ++i) {
        auto const& term = a.lexicon()[i].term;
        auto const pa = a.lookup(term);
        auto const pb = b.lookup(term);
        ASSERT_TRUE(pa && pb);
        EXPECT_EQ(pa->df, pb->df);
        EXPECT_EQ(pa->cf, pb->cf);
        ASSERT_EQ(pa->postings.size(), pb->postings.size());
        for (std::size_t k = 0; k < pa->postings.size(); ++k) {
            EXPECT_EQ(pa->postings[k].doc, pb->postings[k].doc);
            EXPECT_EQ(pa->postings[k].tf, pb->postings[k].tf);
        }
    }
}

}  // namespace

TEST(BuildIndex, TwoDocumentExample)
{
    auto const index = build_index({{"d1", "a b"}, {"d2", "a"}}, {});
    auto const a = index.lookup("a");
    ASSERT_TRUE(a);
    EXPECT_EQ(a->df, 2U);
    EXPECT_EQ(a->cf, 2U);
    auto const b = index.lookup("b");
    ASSERT_TRUE(b);
    EXPECT_EQ(b->df, 1U);
    EXPECT_EQ(b->cf, 1U);
    EXPECT_EQ(index.stats().num_documents, 2U);
    EXPECT_EQ(index.stats().total_tokens, 3U);
    EXPECT_DOUBLE_EQ(index.stats().avgdl, 1.5);
    EXPECT_FALSE(index.lookup("zzz").has_value());
    EXPECT_EQ(index.docs().find("d2"), DocId{1});
}

TEST(BuildIndex, EmptyCollectionAndDuplicates)
{
    EXPECT_THROW((void)build_index({}, {}), FormatError);
    EXPECT_THROW((void)build_index({{"d1", "a"}, {"d1", "b"}}, {}), Error);
}

TEST(BuildIndex, MatchesRecountOracle)
{
    std::mt19937_64 rng(17);
    auto const docs = fixture::random_corpus(rng, fixture::make_vocabulary(800), 1000, 0, 60);
    AnalyzerConfig const cfg;
    auto const index = build_index(docs, cfg);
    auto const oracle = recount(docs, cfg);

    EXPECT_EQ(index.stats().num_documents, docs.size());
    EXPECT_EQ(index.stats().total_tokens, oracle.tokens);
    EXPECT_EQ(index.stats().vocabulary_size, oracle.tf.size());
    EXPECT_EQ(index.lexicon().size(), oracle.tf.size());

    std::uint64_t sum_cf = 0;
    for (auto const& [term, per_doc] : oracle.tf) {
        auto const list = index.lookup(term);
        ASSERT_TRUE(list) << term;
        std::uint64_t cf = 0;
        for (auto const& [docid, tf] : per_doc) {
            cf += tf;
        }
        EXPECT_EQ(list->df, per_doc.size());
        EXPECT_EQ(list->cf, cf);
        EXPECT_GE(list->df, 1U);
        EXPECT_LE(list->df, docs.size());
        EXPECT_LE(list->df, list->cf);
        DocId previous = 0;
        for (std::size_t k = 0; k < list->postings.size(); ++k) {
            auto const& p = list->postings[k];
            if (k > 0) {
                EXPECT_GT(p.doc, previous);
            }
            previous = p.doc;
            EXPECT_EQ(p.tf, per_doc.at(index.docs().docid(p.doc)));
        }
        sum_cf += list->cf;
    }
    EXPECT_EQ(sum_cf, index.stats().total_tokens);
    std::uint64_t sum_dl = 0;
    for (DocId d = 0; d < index.docs().size(); ++d) {
        EXPECT_EQ(index.docs().docid(d), docs[d].docid);
        EXPECT_EQ(index.docs().length(d), oracle.dl.at(docs[d].docid));
        sum_dl += index.docs().length(d);
    }
    EXPECT_EQ(sum_dl, index.stats().total_tokens);
    EXPECT_NEAR(index.stats().avgdl * static_cast<double>(index.stats().num_documents),
                static_cast<double>(index.stats().total_tokens), 1e-9);
}

TEST(Persist, RoundTripIsObservationallyIdentical)
{
    fixture::TempDir dir;
    auto const index = build_index({{"d1", "a b"}, {"d2", "a"}}, {});
    persist(index, dir.path());
    auto const loaded = load_index(dir.path());
    expect_same_index(index, loaded);
    EXPECT_EQ(read_index_analyzer(dir.path()), index.analyzer());
}

TEST(Persist, DoubleRoundTripIsByteIdentical)
{
    fixture::TempDir dir;
    std::mt19937_64 rng(23);
    AnalyzerConfig cfg;
    cfg.stopwords = {"ax"};
    auto const index = build_index(fixture::random_corpus(rng, fixture::make_vocabulary(600), 1000, 1, 50), cfg);
    persist(index, dir / "one");
    auto const loaded = load_index(dir / "one");
    persist(loaded, dir / "two");
    EXPECT_EQ(file_bytes(dir / "one"), file_bytes(dir / "two"));
    expect_same_index(index, loaded);
    EXPECT_EQ(loaded.analyzer(), cfg);
}

TEST(Persist, SpillingBuildIsByteIdentical)
{
    fixture::TempDir dir;
    std::mt19937_64 rng(29);
    auto const docs = fixture::random_corpus(rng, fixture::make_vocabulary(3000), 1500, 5, 80);
    BuildOptions tight;
    tight.memory_budget_bytes = 64 << 10;
    tight.spill_directory = dir / "spill";
    IndexBuilder builder({}, tight);
    for (auto const& doc : docs) {
        builder.add(doc);
    }
    EXPECT_GT(builder.spill_count(), 2U);
    auto const spilled = builder.finish();
    persist(spilled, dir / "spilled");
    persist(build_index(docs, {}), dir / "memory");
    EXPECT_EQ(file_bytes(dir / "spilled"), file_bytes(dir / "memory"));
    EXPECT_TRUE(fs::is_empty(dir / "spill"));
}

TEST(Persist, DetectsCorruption)
{
    fixture::TempDir dir;
    std::mt19937_64 rng(31);
    persist(build_index(fixture::random_corpus(rng, fixture::make_vocabulary(100), 50, 1, 20), {}), dir / "ok");
    auto const original = file_bytes(dir / "ok");

    for (auto const& [name, bytes] : original) {
        for (std::size_t pos : {std::size_t{0}, std::size_t{9}, bytes.size() / 2, bytes.size() - 1}) {
            fs::copy(dir / "ok", dir / "bad", fs::copy_options::recursive | fs::copy_options::overwrite_existing);
            std::string tampered = bytes;
            tampered[pos] = static_cast<char>(tampered[pos] ^ 0x20);
            io::write_file_atomic(dir / "bad" / name, tampered);
            EXPECT_THROW((void)load_index(dir / "bad"), CorruptIndexError) << name << " @" << pos;
        }
        fs::copy(dir / "ok", dir / "bad", fs::copy_options::recursive | fs::copy_options::overwrite_existing);
        io::write_file_atomic(dir / "bad" / name, std::string_view(bytes).substr(0, bytes.size() - 3));
        EXPECT_THROW((void)load_index(dir / "bad"), CorruptIndexError) << name << " truncated";
    }

    fs::copy(dir / "ok", dir / "bad", fs::copy_options::recursive | fs::copy_options::overwrite_existing);
    std::string header = original.at(std::string(kHeaderFile));
    header[8] = 2;
    io::write_file_atomic(dir / "bad" / kHeaderFile, header);
    try {
        (void)load_index(dir / "bad");
        FAIL() << "version mismatch accepted";
    } catch (CorruptIndexError const& error) {
        EXPECT_NE(std::string(error.what()).find("version"), std::string::npos);
    }

    fs::remove(dir / "bad" / kPostingsFile);
    EXPECT_THROW((void)load_index(dir / "bad"), CorruptIndexError);
}

TEST(Persist, RebuildIsDeterministic)
{
    fixture::TempDir dir;
    std::mt19937_64 rng(37);
    auto const docs = fixture::random_corpus(rng, fixture::make_vocabulary(300), 200, 0, 30);
    persist(build_index(docs, {}), dir / "a");
    persist(build_index(docs, {}), dir / "b");
    EXPECT_EQ(file_bytes(dir / "a"), file_bytes(dir / "b"));
    std::ostringstream stats;
    write_index_stats(stats, load_index(dir / "a"));
    EXPECT_NE(stats.str().find("num_documents: 200"), std::string::npos);
}
