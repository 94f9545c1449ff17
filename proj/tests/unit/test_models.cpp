#include "girit/models.hpp"

#include "girit/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace girit;

namespace {

constexpr double kPrinted = 5e-4;  // hand-worked five-decimal examples, some off in the fourth place

auto evidence(double tf, double dl, double avgdl, double n, double df, double cf, double tokens, double qtf = 1)
    -> TermEvidence
{
    TermEvidence ev;
    ev.tf = tf;
    ev.dl = dl;
    ev.avgdl = avgdl;
    ev.num_docs = n;
    ev.df = df;
    ev.cf = cf;
    ev.num_tokens = tokens;
    ev.qtf = qtf;
    return ev;
}

/// Random evidence satisfying the scoring preconditions, tf < dl.
auto draw(std::mt19937_64& rng) -> TermEvidence
{
    std::uniform_int_distribution<int> docs(2, 5000);
    double const n = docs(rng);
    std::uniform_int_distribution<int> len(2, 400);
    double const dl = len(rng);
    std::uniform_real_distribution<double> avg(1.0, 400.0);
    double const avgdl = avg(rng);
    std::uniform_int_distribution<int> df_pick(1, static_cast<int>(n));
    double const df = df_pick(rng);
    std::uniform_int_distribution<int> extra(0, static_cast<int>(3 * df));
    double const cf = df + extra(rng);
    std::uniform_int_distribution<int> tf_pick(1, static_cast<int>(dl) - 1);
    double const tf = tf_pick(rng);
    double const tokens = std::max(n * avgdl, cf + dl);
    return evidence(tf, dl, avgdl, n, df, cf, tokens);
}

}  // namespace

TEST(ModelParams, Defaults)
{
    ModelParams const p;
    EXPECT_EQ(p.c, 1.0);
    EXPECT_EQ(p.k1, 1.2);
    EXPECT_EQ(p.b, 0.75);
    EXPECT_EQ(p.k3, 8.0);
    EXPECT_EQ(p.mu, 2500.0);
    EXPECT_EQ(p.lambda, 0.15);
    EXPECT_NO_THROW(p.validate());
}

TEST(ModelParams, RejectsOutOfRange)
{
    auto bad = [](auto mutate) {
        ModelParams p;
        mutate(p);
        return p;
    };
    EXPECT_THROW(bad([](ModelParams& p) { p.c = 0; }).validate(), ValidationError);
    EXPECT_THROW(bad([](ModelParams& p) { p.k1 = -1; }).validate(), ValidationError);
    EXPECT_THROW(bad([](ModelParams& p) { p.b = 1.5; }).validate(), ValidationError);
    EXPECT_THROW(bad([](ModelParams& p) { p.mu = 0; }).validate(), ValidationError);
    EXPECT_THROW(bad([](ModelParams& p) { p.lambda = 1; }).validate(), ValidationError);
}

TEST(ModelId, ExactlyTwentyOneNamesRoundTrip)
{
    std::set<std::string_view> names;
    for (auto model : kAllModels) {
        names.insert(model_name(model));
        EXPECT_EQ(parse_model(model_name(model)), model);
    }
    EXPECT_EQ(names.size(), 21U);
    std::set<ModelId> reported(kReportOrder.begin(), kReportOrder.end());
    EXPECT_EQ(reported.size(), 21U);
    EXPECT_THROW((void)parse_model("bm25"), ValidationError);
    EXPECT_THROW((void)parse_model("DFRBM25"), ValidationError);
    EXPECT_THROW((void)parse_model(""), ValidationError);
}

TEST(Norm2, Examples)
{
    EXPECT_DOUBLE_EQ(norm2_tfn(3, 10, 10, 1, LogBase::two), 3.0);
    EXPECT_NEAR(norm2_tfn(1, 20, 10, 1, LogBase::two), std::log2(1.5), 1e-15);
    EXPECT_NEAR(norm2_tfn(1, 20, 10, 1, LogBase::two), 0.58496, kPrinted);
    EXPECT_EQ(norm2_tfn(0, 20, 10, 1, LogBase::two), 0.0);
    EXPECT_NEAR(norm2_tfn(2, 10, 10, 1, LogBase::e), 2 * std::log(2.0), 1e-15);
}

TEST(TfIdf, Examples)
{
    ModelParams const p;
    auto ev = evidence(2, 10, 10, 10, 2, 2, 100);
    double const rtf = 1.2 * 2 / (2 + 1.2);
    EXPECT_NEAR(score_term(ModelId::TF_IDF, ev, p), rtf * std::log(6.0), 1e-12);
    EXPECT_NEAR(score_term(ModelId::TF_IDF, ev, p), 1.34384, kPrinted);
    ev.tf = 0;
    EXPECT_EQ(score_tfidf_family(ModelId::TF_IDF, ev, p), 0.0);
    auto ubiquitous = evidence(3, 10, 10, 10, 10, 30, 100);
    EXPECT_EQ(score_term(ModelId::LemurTF_IDF, ubiquitous, p), 0.0);
}

TEST(Bm25, Examples)
{
    ModelParams const p;
    auto ev = evidence(2, 10, 10, 10, 2, 2, 100);
    double const idf = std::log(8.5 / 2.5);
    EXPECT_NEAR(score_term(ModelId::BM25, ev, p), idf * 2.2 * 2 / 3.2, 1e-12);
    EXPECT_NEAR(score_term(ModelId::BM25, ev, p), 1.68270, kPrinted);
    EXPECT_NEAR(score_term(ModelId::DFR_BM25, ev, p), std::log2(8.5 / 2.5) * 2.2 * 2 / 3.2, 1e-12);
    for (double tf : {1.0, 2.0, 7.0}) {
        EXPECT_EQ(score_term(ModelId::BM25, evidence(tf, 10, 10, 2, 1, 1, 20), p), 0.0);
    }
    ev.tf = 0;
    EXPECT_EQ(score_bm25_family(ModelId::BM25, ev, p), 0.0);
    // no clamping of a negative idf
    EXPECT_LT(score_term(ModelId::BM25, evidence(1, 10, 10, 10, 9, 9, 100), p), 0.0);
}

TEST(LanguageModels, Examples)
{
    ModelParams const p;
    auto const hiemstra = evidence(1, 10, 10, 10, 1, 1, 100);
    EXPECT_NEAR(score_term(ModelId::Hiemstra_LM, hiemstra, p), std::log(1 + 15.0 / 8.5), 1e-12);
    EXPECT_NEAR(score_term(ModelId::Hiemstra_LM, hiemstra, p), 1.01697, kPrinted);
    auto zero = hiemstra;
    zero.tf = 0;
    EXPECT_EQ(score_lm_family(ModelId::Hiemstra_LM, zero, p), 0.0);
    double const dirichlet = std::log(1 + 1.0 / 25) + std::log(2500.0 / 2510);
    EXPECT_NEAR(score_term(ModelId::DirichletLM, hiemstra, p), dirichlet, 1e-12);
    EXPECT_NEAR(score_term(ModelId::DirichletLM, hiemstra, p), 0.03523, kPrinted);
    EXPECT_LT(score_term(ModelId::DirichletLM, evidence(1, 5000, 10, 10, 5, 50, 100), p), 0.0);
}

TEST(DfrParametric, Examples)
{
    ModelParams const p;
    auto const inl2 = evidence(2, 10, 10, 3, 1, 2, 30);
    EXPECT_NEAR(score_term(ModelId::InL2, inl2, p), (2.0 / 3.0) * std::log2(4 / 1.5), 1e-12);
    EXPECT_NEAR(score_term(ModelId::InL2, inl2, p), 0.94336, kPrinted);

    // df = N gives lambda_d = 1 and LGD = log2(1 + tfn)
    EXPECT_NEAR(score_term(ModelId::LGD, evidence(1, 10, 10, 5, 5, 9, 50), p), 1.0, 1e-12);

    // cf = N makes lambda = 1; tf = 1 at dl = avgdl makes tfn = 1 = lambda
    double const pl2 = score_term(ModelId::PL2, evidence(1, 10, 10, 4, 2, 4, 40), p);
    EXPECT_NEAR(pl2, 0.5 * std::log2(2 * std::numbers::pi) / 2, 1e-12);
    EXPECT_NEAR(pl2, 0.66257, kPrinted);
}

TEST(DfrParametric, CompositionalForms)
{
    ModelParams p;
    p.c = 1.7;
    auto const ev = evidence(3, 17, 11, 900, 40, 95, 9900, 2);
    double const tfn = 3 * std::log2(1 + 1.7 * 11 / 17);
    double const tfn_e = 3 * std::log(1 + 1.7 * 11 / 17);
    double const gain = 96.0 / (40 * (tfn + 1));
    double const gain_e = 96.0 / (40 * (tfn_e + 1));
    double const ne = 900 * (1 - std::pow(1 - 40.0 / 900, 95));
    EXPECT_NEAR(score_term(ModelId::InB2, ev, p), 2 * gain * tfn * std::log2(901 / 40.5), 1e-10);
    EXPECT_NEAR(score_term(ModelId::In_expB2, ev, p), 2 * gain * tfn * std::log2(901 / (ne + 0.5)), 1e-10);
    EXPECT_NEAR(score_term(ModelId::In_expC2, ev, p), 2 * gain_e * tfn_e * std::log2(901 / (ne + 0.5)), 1e-10);
    EXPECT_NEAR(score_term(ModelId::IFB2, ev, p), 2 * gain * tfn * std::log2(901 / 95.5), 1e-10);
    auto stirling = [](double n, double m) { return (m + 0.5) * std::log2(n / m) + (n - m) * std::log2(n); };
    double const bb2 = gain * (-std::log2(899.0) - std::numbers::log2e + stirling(900 + 95 - 1, 900 + 95 - tfn - 2) -
                               stirling(95, 95 - tfn));
    EXPECT_NEAR(score_term(ModelId::BB2, ev, p), 2 * bb2, 1e-9);
    double const lambda = 95.0 / 900;
    double const pl2 = (tfn * std::log2(tfn / lambda) + (lambda - tfn) * std::numbers::log2e +
                        0.5 * std::log2(2 * std::numbers::pi * tfn)) /
                       (tfn + 1);
    EXPECT_NEAR(score_term(ModelId::PL2, ev, p), 2 * pl2, 1e-10);
    EXPECT_NEAR(score_term(ModelId::LGD, ev, p), 2 * std::log2((40.0 / 900 + tfn) / (40.0 / 900)), 1e-10);
}

TEST(DfrParametric, DomainErrorsInsteadOfNan)
{
    ModelParams const p;
    // cf = 1 with tfn > 1 leaves BB2's Stirling term undefined
    auto const hapax = evidence(1, 2, 10, 50, 1, 1, 500);
    try {
        (void)score_term(ModelId::BB2, hapax, p);
        FAIL() << "BB2 accepted cf - tfn <= 0";
    } catch (ScoringDomainError const& error) {
        EXPECT_EQ(error.model(), "BB2");
    }
    auto const single = evidence(1, 10, 10, 1, 1, 5, 10);
    EXPECT_THROW((void)score_term(ModelId::BB2, single, p), ScoringDomainError);
    auto zero_tf = evidence(0, 10, 10, 5, 1, 3, 50);
    EXPECT_THROW((void)score_term(ModelId::PL2, zero_tf, p), ScoringDomainError);
}

TEST(DfrParameterFree, Examples)
{
    auto const ev = evidence(1, 2, 2, 4, 1, 1, 8);
    double const bracket = std::log2(4.0) + 0.5 * std::log2(std::numbers::pi);
    EXPECT_NEAR(score_term(ModelId::DPH, ev, {}), 0.125 * bracket, 1e-12);
    EXPECT_NEAR(score_term(ModelId::DPH, ev, {}), 0.35322, kPrinted);
    EXPECT_NEAR(score_term(ModelId::DLH13, ev, {}), bracket / 1.5, 1e-12);
    EXPECT_NEAR(score_term(ModelId::DLH13, ev, {}), 1.88383, kPrinted);
    double const dlh = (std::log2(4.0) + 1 * std::log2(0.5) + 0.5 * std::log2(std::numbers::pi)) / 1.5;
    EXPECT_NEAR(score_term(ModelId::DLH, ev, {}), dlh, 1e-12);

    // e = cf*dl/T = 3 >= tf
    EXPECT_EQ(score_term(ModelId::DFI0, evidence(3, 30, 30, 10, 5, 30, 300), {}), 0.0);
    double const e = 1.0 * 30 / 300;
    EXPECT_NEAR(score_term(ModelId::DFI0, evidence(4, 30, 30, 10, 1, 1, 300), {}),
                std::log2(1 + (4 - e) / std::sqrt(e)), 1e-12);
}

TEST(DfrParameterFree, FullDocumentGuard)
{
    // tf = dl substitutes f = tf/(dl+1)
    auto const ev = evidence(3, 3, 10, 100, 5, 20, 1000);
    double const f = 3.0 / 4.0;
    double const divergence = 3 * std::log2((3 * 10.0 / 3) * (100.0 / 20));
    double const binomial = 0.5 * std::log2(2 * std::numbers::pi * 3 * (1 - f));
    EXPECT_NEAR(score_term(ModelId::DLH, ev, {}), (divergence + 0 * std::log2(1 - f) + binomial) / 3.5, 1e-12);
    EXPECT_NEAR(score_term(ModelId::DPH, ev, {}), (1 - f) * (1 - f) / 4 * (divergence + binomial), 1e-12);
    for (auto model : kAllModels) {
        EXPECT_TRUE(std::isfinite(score_term(model, evidence(1, 1, 5, 100, 3, 9, 500), {})) ||
                    model == ModelId::BB2)
            << model_name(model);
    }
}

TEST(DfrParameterFree, LiteratureForms)
{
    auto const ev = evidence(4, 50, 40, 1000, 30, 70, 40000, 3);
    double const prior = 4.0 / 50;
    double const post = 5.0 / 51;
    double const inv = 40000.0 / 70;
    double const dfree = 4 * std::log2(post / prior) *
                         (-4 * std::log2(prior * inv) + 5 * std::log2(post * inv) + 0.5 * std::log2(post / prior));
    EXPECT_NEAR(score_term(ModelId::DFRee, ev, {}), 3 * dfree, 1e-10);

    double const q = 70.0 / 40000;
    double const xsqr = 4 * ((1 - prior) * (1 - prior) / 5) *
                        (5 * std::log2(post / q) - 4 * std::log2(prior / q) + 0.5 * std::log2(post / prior));
    EXPECT_NEAR(score_term(ModelId::XSqrA_M, ev, {}), 3 * xsqr, 1e-10);

    auto h = [](double x) { return -x * std::log2(x) - (1 - x) * std::log2(1 - x); };
    double const js = h((prior + q) / 2) - (h(prior) + h(q)) / 2;
    double const kls = (prior - q) * (std::log2(prior / q) + std::log2((1 - q) / (1 - prior)));
    EXPECT_NEAR(score_term(ModelId::Js_KLs, ev, {}), 3 * 4 * js * kls, 1e-10);
    EXPECT_EQ(score_term(ModelId::Js_KLs, evidence(1, 1000, 40, 1000, 30, 70, 40000), {}), 0.0);
}

TEST(Families, RejectForeignModels)
{
    TermEvidence const ev = evidence(1, 10, 10, 10, 1, 1, 100);
    EXPECT_THROW((void)score_tfidf_family(ModelId::BM25, ev, {}), std::invalid_argument);
    EXPECT_THROW((void)score_bm25_family(ModelId::TF_IDF, ev, {}), std::invalid_argument);
    EXPECT_THROW((void)score_lm_family(ModelId::PL2, ev, {}), std::invalid_argument);
    EXPECT_THROW((void)score_dfr_parametric(ModelId::DPH, ev, {}), std::invalid_argument);
    EXPECT_THROW((void)score_dfr_parameter_free(ModelId::InL2, ev), std::invalid_argument);
}

TEST(Properties, QtfLinearityAndFiniteness)
{
    std::mt19937_64 rng(41);
    ModelParams const p;
    for (int i = 0; i < 3000; ++i) {
        auto ev = draw(rng);
        for (auto model : kAllModels) {
            double one = 0;
            try {
                one = score_term(model, ev, p);
            } catch (ScoringDomainError const&) {
                ASSERT_TRUE(model == ModelId::BB2) << model_name(model);
                continue;
            }
            ASSERT_TRUE(std::isfinite(one));
            auto twice = ev;
            twice.qtf = 2;
            double const two = score_term(model, twice, p);
            if (is_linear_in_qtf(model)) {
                EXPECT_NEAR(two, 2 * one, 1e-12 * std::max(1.0, std::abs(one))) << model_name(model);
            } else {
                EXPECT_NEAR(two, one * (9.0 * 2 / 10) / (9.0 / 9), 1e-12 * std::max(1.0, std::abs(one)));
            }
        }
    }
}

TEST(Properties, TfMonotoneWhereTheFormIsIncreasing)
{
    std::mt19937_64 rng(43);
    ModelParams const p;
    std::vector<ModelId> const always = {ModelId::TF_IDF, ModelId::LemurTF_IDF, ModelId::Hiemstra_LM,
                                         ModelId::DirichletLM, ModelId::InL2, ModelId::InB2,
                                         ModelId::In_expB2, ModelId::In_expC2, ModelId::LGD, ModelId::DFI0};
    for (int i = 0; i < 2000; ++i) {
        auto ev = draw(rng);
        for (auto model : always) {
            double previous = -std::numeric_limits<double>::infinity();
            for (double tf = 1; tf < ev.dl; ++tf) {
                ev.tf = tf;
                double const s = score_term(model, ev, p);
                ASSERT_GE(s, previous - 1e-12 * std::abs(previous)) << model_name(model) << " tf=" << tf;
                previous = s;
            }
        }
        // positive idf for BM25, cf <= N for IFB2's informative factor
        if (ev.df < ev.num_docs / 2) {
            for (auto model : {ModelId::BM25, ModelId::DFR_BM25}) {
                double previous = -1;
                for (double tf = 1; tf < ev.dl; ++tf) {
                    ev.tf = tf;
                    double const s = score_term(model, ev, p);
                    ASSERT_GE(s, previous);
                    previous = s;
                }
            }
        }
        if (ev.cf <= ev.num_docs) {
            double previous = -1;
            for (double tf = 1; tf < ev.dl; ++tf) {
                ev.tf = tf;
                double const s = score_term(ModelId::IFB2, ev, p);
                ASSERT_GE(s, previous - 1e-12);
                previous = s;
            }
        }
    }
}

TEST(Properties, DfNonincreasingForIdfModels)
{
    std::mt19937_64 rng(47);
    ModelParams const p;
    for (int i = 0; i < 2000; ++i) {
        auto ev = draw(rng);
        ev.cf = std::min(ev.cf, ev.num_docs);
        std::uniform_int_distribution<int> df_pick(1, static_cast<int>(ev.cf));
        double const lo = df_pick(rng);
        double const hi = std::min(ev.cf, lo + 1 + df_pick(rng) % 7);
        for (auto model : {ModelId::InL2, ModelId::InB2, ModelId::IFB2, ModelId::In_expB2, ModelId::BM25,
                           ModelId::TF_IDF, ModelId::LemurTF_IDF}) {
            auto a = ev;
            a.df = lo;
            auto b = ev;
            b.df = hi;
            EXPECT_GE(score_term(model, a, p), score_term(model, b, p) - 1e-12) << model_name(model);
        }
    }
}

TEST(Properties, DphFactorShrinksNearFullDocument)
{
    // The (1-f)^2 factor outweighs the growing divergence as tf approaches dl.
    auto ev = evidence(1, 10, 10, 100, 5, 10, 1000);
    ev.tf = 8;
    double const at8 = score_term(ModelId::DPH, ev, {});
    ev.tf = 9;
    EXPECT_LT(score_term(ModelId::DPH, ev, {}), at8);
}

TEST(ScoreDocument, SumsMatchedTerms)
{
    QueryBag bag{"q1", {{"a", 2}, {"b", 1}, {"zz", 1}}, {}};
    auto provider = [](std::string_view term) -> std::optional<TermEvidence> {
        if (term == "a") {
            return evidence(2, 10, 12, 50, 4, 9, 600);
        }
        if (term == "b") {
            return evidence(1, 10, 12, 50, 7, 8, 600);
        }
        return std::nullopt;
    };
    for (auto model : kAllModels) {
        double expected = 0;
        bool domain = false;
        for (auto const& [term, qtf] : bag.terms) {
            if (auto ev = provider(term)) {
                ev->qtf = qtf;
                try {
                    expected += score_term(model, *ev, {});
                } catch (ScoringDomainError const&) {
                    domain = true;
                }
            }
        }
        if (domain) {
            EXPECT_THROW((void)score_document(bag, provider, model, {}), ScoringDomainError);
            continue;
        }
        EXPECT_EQ(score_document(bag, provider, model, {}), expected) << model_name(model);
    }
    QueryBag none{"q2", {{"zz", 3}}, {}};
    EXPECT_EQ(score_document(none, provider, ModelId::BM25, {}), 0.0);
}
