#pragma once

#include "girit/analysis.hpp"
#include "girit/expansion.hpp"
#include "girit/models.hpp"
#include "girit/topics.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace girit {

using Settings = std::map<std::string, std::string>;

/// Every key understood in a config file or as a --flag override.
[[nodiscard]] auto known_config_keys() -> std::vector<std::string> const&;

/// Parses "key = value" lines; '#' starts a comment. Unknown keys are errors.
[[nodiscard]] auto parse_config_text(std::string_view text) -> Settings;

/// One experiment's settings. Paths are validated per subcommand.
struct ExperimentConfig {
    std::vector<std::filesystem::path> corpus;
    std::filesystem::path index;
    AnalyzerConfig analyzer;
    /// True when any analyzer key was given explicitly.
    bool analyzer_overridden = false;
    std::filesystem::path stopwords;
    std::vector<ModelId> models{kAllModels.begin(), kAllModels.end()};
    ModelParams params;
    std::filesystem::path topics;
    FieldSelection fields = FieldSelection::TD;
    std::filesystem::path thesaurus;
    ExpansionPolicy policy;
    std::filesystem::path qrels;
    std::size_t cutoff = 1000;
    std::filesystem::path output = ".";
    std::string tag = "girit";
    std::size_t memory_budget_mb = 1024;
    bool lenient = false;
    std::size_t threads = 0;
    std::vector<std::filesystem::path> runs;
    std::filesystem::path before;
    std::filesystem::path after;
    std::filesystem::path expanded_topics;
};

/// Applies settings on top of defaults. Throws ValidationError on bad values.
[[nodiscard]] auto make_config(Settings const& settings) -> ExperimentConfig;

}  // namespace girit
