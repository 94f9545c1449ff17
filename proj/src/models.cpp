#include "girit/models.hpp"

#include "girit/error.hpp"

#include <cmath>
#include <numbers>

namespace girit {

namespace {

constexpr double kLog2E = std::numbers::log2e;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

auto log2(double x) -> double { return std::log2(x); }

[[noreturn]] void domain_error(ModelId model, std::string detail)
{
    throw ScoringDomainError(std::string(model_name(model)), std::move(detail));
}

[[noreturn]] void wrong_family(ModelId model, char const* family)
{
    throw std::invalid_argument(std::string(model_name(model)) + " is not a " + family + " model");
}

/// Saturated, length-normalized term frequency shared by the TF-IDF pair.
auto robertson_tf(TermEvidence const& ev, ModelParams const& p) -> double
{
    return p.k1 * ev.tf / (ev.tf + p.k1 * ((1.0 - p.b) + p.b * ev.dl / ev.avgdl));
}

/// Stirling approximation of log2 of the binomial term used by BB2.
auto stirling(double n, double m) -> double
{
    return (m + 0.5) * log2(n / m) + (n - m) * log2(n);
}

/// Bernoulli (cf+1)/(df*(tfn+1)) after-effect.
auto bernoulli_gain(TermEvidence const& ev, double tfn) -> double
{
    return (ev.cf + 1.0) / (ev.df * (tfn + 1.0));
}

/// Within-document relative frequency, kept below one for single-term documents.
auto relative_frequency(TermEvidence const& ev) -> double
{
    return ev.tf < ev.dl ? ev.tf / ev.dl : ev.tf / (ev.dl + 1.0);
}

auto binary_entropy(double p) -> double
{
    double h = 0.0;
    if (p > 0.0) { h -= p * log2(p); }
    if (p < 1.0) { h -= (1.0 - p) * log2(1.0 - p); }
    return h;
}

}  // namespace

void ModelParams::validate() const
{
    if (!(c > 0)) { throw ValidationError("parameter c must be > 0"); }
    if (!(k1 > 0)) { throw ValidationError("parameter k1 must be > 0"); }
    if (!(b >= 0 && b <= 1)) { throw ValidationError("parameter b must be in [0, 1]"); }
    if (!(k3 >= 0)) { throw ValidationError("parameter k3 must be >= 0"); }
    if (!(mu > 0)) { throw ValidationError("parameter mu must be > 0"); }
    if (!(lambda > 0 && lambda < 1)) { throw ValidationError("parameter lambda must be in (0, 1)"); }
}

auto model_name(ModelId model) -> std::string_view
{
    switch (model) {
    case ModelId::TF_IDF: return "TF_IDF";
    case ModelId::LemurTF_IDF: return "LemurTF_IDF";
    case ModelId::BM25: return "BM25";
    case ModelId::DFR_BM25: return "DFR_BM25";
    case ModelId::Hiemstra_LM: return "Hiemstra_LM";
    case ModelId::DirichletLM: return "DirichletLM";
    case ModelId::BB2: return "BB2";
    case ModelId::IFB2: return "IFB2";
    case ModelId::In_expB2: return "In_expB2";
    case ModelId::In_expC2: return "In_expC2";
    case ModelId::InB2: return "InB2";
    case ModelId::InL2: return "InL2";
    case ModelId::PL2: return "PL2";
    case ModelId::LGD: return "LGD";
    case ModelId::DLH: return "DLH";
    case ModelId::DLH13: return "DLH13";
    case ModelId::DPH: return "DPH";
    case ModelId::DFRee: return "DFRee";
    case ModelId::DFI0: return "DFI0";
    case ModelId::XSqrA_M: return "XSqrA_M";
    case ModelId::Js_KLs: return "Js_KLs";
    }
    return "?";
}

auto parse_model(std::string_view name) -> ModelId
{
    for (auto model : kAllModels) {
        if (model_name(model) == name) {
            return model;
        }
    }
    throw ValidationError("unknown model: '" + std::string(name) + "'");
}

auto is_linear_in_qtf(ModelId model) -> bool
{
    return model != ModelId::BM25 && model != ModelId::DFR_BM25;
}

auto norm2_tfn(double tf, double dl, double avgdl, double c, LogBase base) -> double
{
    double const ratio = 1.0 + c * avgdl / dl;
    return tf * (base == LogBase::two ? log2(ratio) : std::log(ratio));
}

auto score_tfidf_family(ModelId model, TermEvidence const& ev, ModelParams const& params) -> double
{
    double const rtf = robertson_tf(ev, params);
    switch (model) {
    case ModelId::TF_IDF:
        return ev.qtf * rtf * std::log(1.0 + ev.num_docs / ev.df);
    case ModelId::LemurTF_IDF: {
        double const idf = std::log(ev.num_docs / ev.df);
        return ev.qtf * rtf * idf * idf;
    }
    default:
        wrong_family(model, "TF-IDF");
    }
}

auto score_bm25_family(ModelId model, TermEvidence const& ev, ModelParams const& params) -> double
{
    if (model != ModelId::BM25 && model != ModelId::DFR_BM25) {
        wrong_family(model, "BM25");
    }
    double const big_k = params.k1 * ((1.0 - params.b) + params.b * ev.dl / ev.avgdl);
    double const odds = (ev.num_docs - ev.df + 0.5) / (ev.df + 0.5);
    double const idf = model == ModelId::BM25 ? std::log(odds) : log2(odds);
    double const query_weight = ((params.k3 + 1.0) * ev.qtf) / (params.k3 + ev.qtf);
    return query_weight * idf * ((params.k1 + 1.0) * ev.tf) / (big_k + ev.tf);
}

auto score_lm_family(ModelId model, TermEvidence const& ev, ModelParams const& params) -> double
{
    switch (model) {
    case ModelId::Hiemstra_LM: {
        double const lambda = params.lambda;
        return ev.qtf * std::log(1.0 + (lambda * ev.tf * ev.num_tokens) / ((1.0 - lambda) * ev.cf * ev.dl));
    }
    case ModelId::DirichletLM: {
        double const mu = params.mu;
        return ev.qtf * (std::log(1.0 + ev.tf / (mu * ev.cf / ev.num_tokens)) + std::log(mu / (ev.dl + mu)));
    }
    default:
        wrong_family(model, "language");
    }
}

auto score_dfr_parametric(ModelId model, TermEvidence const& ev, ModelParams const& params) -> double
{
    double const n = ev.num_docs;
    double const tfn = norm2_tfn(ev.tf, ev.dl, ev.avgdl, params.c,
                                 model == ModelId::In_expC2 ? LogBase::e : LogBase::two);
    double const lambda = ev.cf / n;
    auto expected_df = [&] { return n * (1.0 - std::pow(1.0 - ev.df / n, ev.cf)); };

    switch (model) {
    case ModelId::InL2:
        return ev.qtf * (1.0 / (tfn + 1.0)) * tfn * log2((n + 1.0) / (ev.df + 0.5));
    case ModelId::InB2:
        return ev.qtf * bernoulli_gain(ev, tfn) * tfn * log2((n + 1.0) / (ev.df + 0.5));
    case ModelId::In_expB2:
    case ModelId::In_expC2:
        return ev.qtf * bernoulli_gain(ev, tfn) * tfn * log2((n + 1.0) / (expected_df() + 0.5));
    case ModelId::IFB2:
        return ev.qtf * bernoulli_gain(ev, tfn) * tfn * log2((n + 1.0) / (ev.cf + 0.5));
    case ModelId::PL2: {
        if (!(tfn > 0.0)) {
            domain_error(model, "normalized tf must be positive, got " + std::to_string(tfn));
        }
        double const information =
            tfn * log2(tfn / lambda) + (lambda - tfn) * kLog2E + 0.5 * log2(kTwoPi * tfn);
        return ev.qtf * information / (tfn + 1.0);
    }
    case ModelId::BB2: {
        if (!(n > 1.0)) {
            domain_error(model, "needs at least two documents");
        }
        if (!(ev.cf - tfn > 0.0) || !(n + ev.cf - tfn - 2.0 > 0.0)) {
            domain_error(model, "normalized tf " + std::to_string(tfn) + " is not below collection frequency " +
                                    std::to_string(ev.cf));
        }
        double const information = -log2(n - 1.0) - kLog2E + stirling(n + ev.cf - 1.0, n + ev.cf - tfn - 2.0) -
                                   stirling(ev.cf, ev.cf - tfn);
        return ev.qtf * bernoulli_gain(ev, tfn) * information;
    }
    case ModelId::LGD: {
        double const lambda_d = ev.df / n;
        return ev.qtf * log2((lambda_d + tfn) / lambda_d);
    }
    default:
        wrong_family(model, "parametric DFR");
    }
}

auto score_dfr_parameter_free(ModelId model, TermEvidence const& ev) -> double
{
    double const tf = ev.tf;
    double const dl = ev.dl;
    double const n = ev.num_docs;

    switch (model) {
    case ModelId::DLH:
    case ModelId::DLH13:
    case ModelId::DPH: {
        double const f = relative_frequency(ev);
        double const divergence = tf * log2((tf * ev.avgdl / dl) * (n / ev.cf));
        double const binomial = 0.5 * log2(kTwoPi * tf * (1.0 - f));
        if (model == ModelId::DLH13) {
            return ev.qtf * (divergence + binomial) / (tf + 0.5);
        }
        if (model == ModelId::DLH) {
            return ev.qtf * (divergence + (dl - tf) * log2(1.0 - f) + binomial) / (tf + 0.5);
        }
        double const norm = (1.0 - f) * (1.0 - f) / (tf + 1.0);
        return ev.qtf * norm * (divergence + binomial);
    }
    case ModelId::DFI0: {
        double const expected = ev.cf * dl / ev.num_tokens;
        if (tf <= expected) {
            return 0.0;
        }
        return ev.qtf * log2(1.0 + (tf - expected) / std::sqrt(expected));
    }
    case ModelId::DFRee: {
        double const prior = tf / dl;
        double const posterior = (tf + 1.0) / (dl + 1.0);
        double const inverse_collection_prior = ev.num_tokens / ev.cf;
        double const norm = tf * log2(posterior / prior);
        return ev.qtf * norm *
               (-tf * log2(prior * inverse_collection_prior) + (tf + 1.0) * log2(posterior * inverse_collection_prior) +
                0.5 * log2(posterior / prior));
    }
    case ModelId::XSqrA_M: {
        double const mle = tf / dl;
        double const smoothed = (tf + 1.0) / (dl + 1.0);
        double const collection_prior = ev.cf / ev.num_tokens;
        double const chi_square = (1.0 - mle) * (1.0 - mle) / (tf + 1.0);
        double const information_delta = (tf + 1.0) * log2(smoothed / collection_prior) -
                                         tf * log2(mle / collection_prior) + 0.5 * log2(smoothed / mle);
        return ev.qtf * tf * chi_square * information_delta;
    }
    case ModelId::Js_KLs: {
        double const p = relative_frequency(ev);
        double const q = ev.cf / ev.num_tokens;
        if (!(p > q)) {
            return 0.0;
        }
        double const symmetric_kl = (p - q) * (log2(p / q) + log2((1.0 - q) / (1.0 - p)));
        double const jensen_shannon = binary_entropy(0.5 * (p + q)) - 0.5 * (binary_entropy(p) + binary_entropy(q));
        return ev.qtf * tf * jensen_shannon * symmetric_kl;
    }
    default:
        wrong_family(model, "parameter-free DFR");
    }
}

auto score_term(ModelId model, TermEvidence const& ev, ModelParams const& params) -> double
{
    double score = 0.0;
    switch (model) {
    case ModelId::TF_IDF:
    case ModelId::LemurTF_IDF: score = score_tfidf_family(model, ev, params); break;
    case ModelId::BM25:
    case ModelId::DFR_BM25: score = score_bm25_family(model, ev, params); break;
    case ModelId::Hiemstra_LM:
    case ModelId::DirichletLM: score = score_lm_family(model, ev, params); break;
    case ModelId::BB2:
    case ModelId::IFB2:
    case ModelId::In_expB2:
    case ModelId::In_expC2:
    case ModelId::InB2:
    case ModelId::InL2:
    case ModelId::PL2:
    case ModelId::LGD: score = score_dfr_parametric(model, ev, params); break;
    case ModelId::DLH:
    case ModelId::DLH13:
    case ModelId::DPH:
    case ModelId::DFRee:
    case ModelId::DFI0:
    case ModelId::XSqrA_M:
    case ModelId::Js_KLs: score = score_dfr_parameter_free(model, ev); break;
    }
    if (!std::isfinite(score)) {
        domain_error(model, "non-finite score (tf=" + std::to_string(ev.tf) + ", df=" + std::to_string(ev.df) +
                                ", cf=" + std::to_string(ev.cf) + ", dl=" + std::to_string(ev.dl) + ")");
    }
    return score;
}

auto score_document(QueryBag const& query, EvidenceProvider const& provider, ModelId model,
                    ModelParams const& params) -> double
{
    double total = 0.0;
    for (auto const& [term, qtf] : query.terms) {
        auto evidence = provider(term);
        if (!evidence || evidence->tf < 1.0) {
            continue;
        }
        evidence->qtf = qtf;
        try {
            total += score_term(model, *evidence, params);
        } catch (ScoringDomainError const& error) {
            throw error.with_context(term, query.qid, {});
        }
    }
    return total;
}

}  // namespace girit
