#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace girit {

/// Statistics one query term contributes to one document's score.
struct TermEvidence {
    double tf = 0;      ///< occurrences in the document
    double qtf = 1;     ///< occurrences in the query
    double df = 0;      ///< documents containing the term
    double cf = 0;      ///< occurrences in the collection
    double dl = 0;      ///< document length in tokens
    double avgdl = 0;   ///< mean document length
    double num_docs = 0;
    double num_tokens = 0;
};

/// Free parameters. Defaults are the conventional values for each model.
struct ModelParams {
    double c = 1.0;        ///< Normalization 2
    double k1 = 1.2;       ///< tf saturation
    double b = 0.75;       ///< length normalization
    double k3 = 8.0;       ///< query tf saturation
    double mu = 2500.0;    ///< Dirichlet prior
    double lambda = 0.15;  ///< Hiemstra mixing weight

    /// Throws ValidationError when a parameter is outside its range.
    void validate() const;

    friend auto operator==(ModelParams const&, ModelParams const&) -> bool = default;
};

enum class ModelId : std::uint8_t {
    TF_IDF,
    LemurTF_IDF,
    BM25,
    DFR_BM25,
    Hiemstra_LM,
    DirichletLM,
    BB2,
    IFB2,
    In_expB2,
    In_expC2,
    InB2,
    InL2,
    PL2,
    LGD,
    DLH,
    DLH13,
    DPH,
    DFRee,
    DFI0,
    XSqrA_M,
    Js_KLs,
};

inline constexpr std::size_t kModelCount = 21;

/// Every model, in declaration order.
inline constexpr std::array<ModelId, kModelCount> kAllModels = {
    ModelId::TF_IDF,   ModelId::LemurTF_IDF, ModelId::BM25,  ModelId::DFR_BM25, ModelId::Hiemstra_LM,
    ModelId::DirichletLM, ModelId::BB2,      ModelId::IFB2,  ModelId::In_expB2, ModelId::In_expC2,
    ModelId::InB2,     ModelId::InL2,        ModelId::PL2,   ModelId::LGD,      ModelId::DLH,
    ModelId::DLH13,    ModelId::DPH,         ModelId::DFRee, ModelId::DFI0,     ModelId::XSqrA_M,
    ModelId::Js_KLs,
};

/// Row order of the published recall comparison table.
inline constexpr std::array<ModelId, kModelCount> kReportOrder = {
    ModelId::BB2,      ModelId::BM25,     ModelId::DFI0,        ModelId::DFR_BM25, ModelId::DFRee,
    ModelId::DirichletLM, ModelId::DLH,   ModelId::DLH13,       ModelId::DPH,      ModelId::IFB2,
    ModelId::In_expB2, ModelId::In_expC2, ModelId::LemurTF_IDF, ModelId::PL2,      ModelId::XSqrA_M,
    ModelId::TF_IDF,   ModelId::Hiemstra_LM, ModelId::InB2,     ModelId::InL2,     ModelId::Js_KLs,
    ModelId::LGD,
};

[[nodiscard]] auto model_name(ModelId model) -> std::string_view;
/// Exact spelling match; throws ValidationError for unknown names.
[[nodiscard]] auto parse_model(std::string_view name) -> ModelId;

enum class LogBase : std::uint8_t { two, e };

/// DFR Normalization 2: tf * log(1 + c * avgdl / dl).
[[nodiscard]] auto norm2_tfn(double tf, double dl, double avgdl, double c, LogBase base) -> double;

[[nodiscard]] auto score_tfidf_family(ModelId model, TermEvidence const& ev, ModelParams const& params) -> double;
[[nodiscard]] auto score_bm25_family(ModelId model, TermEvidence const& ev, ModelParams const& params) -> double;
[[nodiscard]] auto score_lm_family(ModelId model, TermEvidence const& ev, ModelParams const& params) -> double;
[[nodiscard]] auto score_dfr_parametric(ModelId model, TermEvidence const& ev, ModelParams const& params) -> double;
[[nodiscard]] auto score_dfr_parameter_free(ModelId model, TermEvidence const& ev) -> double;

/// Dispatches to the owning family. Throws ScoringDomainError instead of
/// returning NaN or infinity.
[[nodiscard]] auto score_term(ModelId model, TermEvidence const& ev, ModelParams const& params) -> double;

/// Whether the score is `qtf * g(...)` with g independent of qtf.
[[nodiscard]] auto is_linear_in_qtf(ModelId model) -> bool;

/// Evidence for one query term in one document, or nullopt when the term
/// does not occur there (or not in the collection at all). `qtf` is filled in
/// by the caller.
using EvidenceProvider = std::function<std::optional<TermEvidence>(std::string_view term)>;

}  // namespace girit

#include "girit/query_bag.hpp"

namespace girit {

/// Sum of per-term scores over query terms present in the document. Terms
/// the provider reports as absent contribute nothing.
[[nodiscard]] auto score_document(QueryBag const& query, EvidenceProvider const& provider, ModelId model,
                                  ModelParams const& params) -> double;

}  // namespace girit
