#include "girit/cli.hpp"
#include "girit/error.hpp"
#include "girit/config.hpp"
#include "girit/io.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace girit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

auto invoke(std::vector<std::string> args) -> Outcome
{
    std::ostringstream out;
    std::ostringstream err;
    args.insert(args.begin(), "girit");
    int const code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

auto directory_bytes(fs::path const& dir) -> std::map<std::string, std::string>
{
    std::map<std::string, std::string> files;
    for (auto const& entry : fs::directory_iterator(dir)) {
        files[entry.path().filename().string()] = io::read_file(entry.path());
    }
    return files;
}

class CliFixture : public ::testing::Test {
protected:
    void SetUp() override
    {
        std::ofstream(dir / "corpus.txt") << "<DOC><DOCNO>d1</DOCNO><TEXT>tv news today</TEXT></DOC>\n"
                                             "<DOC><DOCNO>d2</DOCNO><TEXT>television programme guide</TEXT></DOC>\n"
                                             "<DOC><DOCNO>d3</DOCNO><TEXT>cricket news and tv</TEXT></DOC>\n"
                                             "<DOC><DOCNO>d4</DOCNO><TEXT>weather today</TEXT></DOC>\n";
        std::ofstream(dir / "topics.txt") << "<top><num>1</num><title>tv</title><desc>news</desc></top>\n"
                                             "<top><num>2</num><title>weather</title><desc>today</desc></top>\n";
        std::ofstream(dir / "thesaurus.tsv") << "tv\ttelevision\n";
        std::ofstream(dir / "qrels.txt") << "1 0 d1 1\n1 0 d2 1\n2 0 d4 1\n";
    }

    fixture::TempDir dir;
};

}  // namespace

TEST(Config, ParsesAndRejectsUnknownKeys)
{
    auto const settings = parse_config_text("# experiment\nmodels = BM25, PL2\ncutoff=50\n\nfields = T\n");
    auto const cfg = make_config(settings);
    EXPECT_EQ(cfg.models, (std::vector<ModelId>{ModelId::BM25, ModelId::PL2}));
    EXPECT_EQ(cfg.cutoff, 50U);
    EXPECT_EQ(cfg.fields, FieldSelection::T);
    EXPECT_THROW((void)parse_config_text("colour = red\n"), ValidationError);
    EXPECT_THROW((void)parse_config_text("no equals sign\n"), ValidationError);
    EXPECT_THROW((void)make_config({{"models", "BM26"}}), ValidationError);
    EXPECT_THROW((void)make_config({{"cutoff", "0"}}), ValidationError);
    EXPECT_THROW((void)make_config({{"k1", "-2"}}), ValidationError);
}

TEST(Config, Defaults)
{
    auto const cfg = make_config({});
    EXPECT_EQ(cfg.models.size(), 21U);
    EXPECT_EQ(cfg.fields, FieldSelection::TD);
    EXPECT_EQ(cfg.cutoff, 1000U);
    EXPECT_EQ(cfg.params, ModelParams{});
    EXPECT_EQ(cfg.policy.max_added_per_query, 6U);
    EXPECT_FALSE(cfg.analyzer_overridden);
}

TEST_F(CliFixture, ExitCodes)
{
    EXPECT_EQ(invoke({"index", "--corpus", (dir / "missing").string(), "--index", (dir / "idx").string()}).code, 1);
    EXPECT_FALSE(fs::exists(dir / "idx"));
    EXPECT_EQ(invoke({"bogus"}).code, 1);
    EXPECT_EQ(invoke({"run", "--models", "NotAModel"}).code, 1);
    std::ofstream(dir / "bad.txt") << "<DOC><DOCNO>x</DOCNO><TEXT>unclosed";
    EXPECT_EQ(invoke({"index", "--corpus", (dir / "bad.txt").string(), "--index", (dir / "bad").string()}).code, 2);
}

TEST_F(CliFixture, IndexIsDeterministic)
{
    auto const first = invoke({"index", "--corpus", (dir / "corpus.txt").string(), "--index", (dir / "a").string()});
    ASSERT_EQ(first.code, 0) << first.err;
    EXPECT_NE(first.out.find("num_documents: 4"), std::string::npos);
    for (auto name : {"header.bin", "lexicon.bin", "postings.bin", "doctable.bin"}) {
        EXPECT_TRUE(fs::exists(dir / "a" / name));
    }
    ASSERT_EQ(invoke({"index", "--corpus", (dir / "corpus.txt").string(), "--index", (dir / "b").string()}).code, 0);
    EXPECT_EQ(directory_bytes(dir / "a"), directory_bytes(dir / "b"));
}

TEST_F(CliFixture, ConfigFileWithFlagOverride)
{
    std::ofstream(dir / "exp.conf") << "corpus = " << (dir / "corpus.txt").string() << "\nindex = "
                                    << (dir / "idx").string() << "\ntopics = " << (dir / "topics.txt").string()
                                    << "\nmodels = BM25, InL2, DPH\ncutoff = 1000\noutput = "
                                    << (dir / "runs").string() << "\n";
    auto const conf = (dir / "exp.conf").string();
    ASSERT_EQ(invoke({"index", "--config", conf}).code, 0);
    auto const ran = invoke({"run", "--config", conf, "--cutoff", "1"});
    ASSERT_EQ(ran.code, 0) << ran.err;
    std::size_t files = 0;
    for (auto const& entry : fs::directory_iterator(dir / "runs")) {
        ++files;
        auto const text = io::read_file(entry.path());
        EXPECT_LE(std::count(text.begin(), text.end(), '\n'), 2);
    }
    EXPECT_EQ(files, 3U);
    auto const first = directory_bytes(dir / "runs");
    ASSERT_EQ(invoke({"run", "--config", conf, "--set", "cutoff=1"}).code, 0);
    EXPECT_EQ(directory_bytes(dir / "runs"), first);
    EXPECT_TRUE(fs::exists(dir / "runs" / "girit.BM25.run"));
}

TEST_F(CliFixture, PipelineEndToEnd)
{
    auto const index = (dir / "idx").string();
    ASSERT_EQ(invoke({"index", "--corpus", (dir / "corpus.txt").string(), "--index", index}).code, 0);
    ASSERT_EQ(invoke({"run", "--index", index, "--topics", (dir / "topics.txt").string(), "--models", "BM25,DLH13",
                      "--output", (dir / "before").string()})
                  .code,
              0);
    auto const expanded = invoke({"expand", "--index", index, "--topics", (dir / "topics.txt").string(), "--thesaurus",
                                  (dir / "thesaurus.tsv").string(), "--expanded-topics",
                                  (dir / "expanded.topics").string()});
    ASSERT_EQ(expanded.code, 0) << expanded.err;
    EXPECT_NE(expanded.out.find("mean"), std::string::npos);
    ASSERT_EQ(invoke({"run", "--index", index, "--topics", (dir / "expanded.topics").string(), "--models",
                      "BM25,DLH13", "--output", (dir / "after").string()})
                  .code,
              0);
    for (auto side : {"before", "after"}) {
        auto const eval = invoke({"eval", "--qrels", (dir / "qrels.txt").string(), "--runs", (dir / side).string(),
                                  "--output", (dir / (std::string(side) + "-eval")).string()});
        ASSERT_EQ(eval.code, 0) << eval.err;
    }
    auto const compared = invoke({"compare", "--before", (dir / "before-eval").string(), "--after",
                                  (dir / "after-eval").string(), "--output", (dir / "report").string()});
    ASSERT_EQ(compared.code, 0) << compared.err;
    EXPECT_TRUE(fs::exists(dir / "report" / "comparison.txt"));
    EXPECT_TRUE(fs::exists(dir / "report" / "comparison.csv"));
    EXPECT_NE(compared.out.find("Improvement"), std::string::npos);

    auto const verify = invoke({"verify", "--corpus", (dir / "corpus.txt").string(), "--topics",
                                (dir / "topics.txt").string()});
    EXPECT_EQ(verify.code, 0) << verify.out << verify.err;
}
