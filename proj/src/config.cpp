#include "girit/config.hpp"

#include "girit/error.hpp"
#include "girit/io.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace girit {

namespace {

auto trim(std::string_view text) -> std::string
{
    auto const first = text.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    auto const last = text.find_last_not_of(" \t\r");
    return std::string(text.substr(first, last - first + 1));
}

auto split_list(std::string const& value) -> std::vector<std::string>
{
    std::vector<std::string> items;
    std::stringstream stream(value);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (auto trimmed = trim(item); !trimmed.empty()) {
            items.push_back(std::move(trimmed));
        }
    }
    return items;
}

auto to_size(std::string const& key, std::string const& value) -> std::size_t
{
    std::size_t result = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), result);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ValidationError("'" + key + "' expects a non-negative integer, got '" + value + "'");
    }
    return result;
}

auto to_double(std::string const& key, std::string const& value) -> double
{
    try {
        std::size_t used = 0;
        double const result = std::stod(value, &used);
        if (used == value.size()) {
            return result;
        }
    } catch (std::logic_error const&) {
    }
    throw ValidationError("'" + key + "' expects a number, got '" + value + "'");
}

auto to_bool(std::string const& key, std::string const& value) -> bool
{
    if (value == "1" || value == "true" || value == "yes" || value == "on") { return true; }
    if (value == "0" || value == "false" || value == "no" || value == "off") { return false; }
    throw ValidationError("'" + key + "' expects true or false, got '" + value + "'");
}

}  // namespace

auto known_config_keys() -> std::vector<std::string> const&
{
    static std::vector<std::string> const keys = {
        "corpus", "index", "lowercase_latin", "normalization", "stopwords", "min_token_length",
        "models", "c", "k1", "b", "k3", "mu", "lambda", "topics", "fields", "thesaurus",
        "max_added_per_query", "max_synonyms_per_term", "expanded_term_weight", "qrels", "cutoff",
        "output", "tag", "memory_budget_mb", "lenient", "threads", "runs", "before", "after",
        "expanded_topics",
    };
    return keys;
}

auto parse_config_text(std::string_view text) -> Settings
{
    Settings settings;
    auto const& keys = known_config_keys();
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        if (trim(line).empty()) {
            continue;
        }
        auto const eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(number) + ": expected key = value");
        }
        auto key = trim(std::string_view(line).substr(0, eq));
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw ValidationError("config line " + std::to_string(number) + ": unknown key '" + key + "'");
        }
        settings[key] = trim(std::string_view(line).substr(eq + 1));
    }
    return settings;
}

auto make_config(Settings const& settings) -> ExperimentConfig
{
    ExperimentConfig cfg;
    auto get = [&](std::string const& key) -> std::string const* {
        auto it = settings.find(key);
        return it == settings.end() ? nullptr : &it->second;
    };

    if (auto const* v = get("corpus")) {
        for (auto const& item : split_list(*v)) { cfg.corpus.emplace_back(item); }
    }
    if (auto const* v = get("index")) { cfg.index = *v; }
    if (auto const* v = get("lowercase_latin")) {
        cfg.analyzer.lowercase_latin = to_bool("lowercase_latin", *v);
        cfg.analyzer_overridden = true;
    }
    if (auto const* v = get("normalization")) {
        cfg.analyzer.normalization = parse_normalization_form(*v);
        cfg.analyzer_overridden = true;
    }
    if (auto const* v = get("min_token_length")) {
        cfg.analyzer.min_token_length = to_size("min_token_length", *v);
        cfg.analyzer_overridden = true;
    }
    if (auto const* v = get("stopwords"); v != nullptr && !v->empty()) {
        cfg.stopwords = *v;
        cfg.analyzer_overridden = true;
    }
    if (auto const* v = get("models"); v != nullptr && *v != "all") {
        cfg.models.clear();
        for (auto const& name : split_list(*v)) { cfg.models.push_back(parse_model(name)); }
        if (cfg.models.empty()) {
            throw ValidationError("'models' lists no model");
        }
    }
    if (auto const* v = get("c")) { cfg.params.c = to_double("c", *v); }
    if (auto const* v = get("k1")) { cfg.params.k1 = to_double("k1", *v); }
    if (auto const* v = get("b")) { cfg.params.b = to_double("b", *v); }
    if (auto const* v = get("k3")) { cfg.params.k3 = to_double("k3", *v); }
    if (auto const* v = get("mu")) { cfg.params.mu = to_double("mu", *v); }
    if (auto const* v = get("lambda")) { cfg.params.lambda = to_double("lambda", *v); }
    cfg.params.validate();
    if (auto const* v = get("topics")) { cfg.topics = *v; }
    if (auto const* v = get("fields")) { cfg.fields = parse_field_selection(*v); }
    if (auto const* v = get("thesaurus")) { cfg.thesaurus = *v; }
    if (auto const* v = get("max_added_per_query")) {
        cfg.policy.max_added_per_query = to_size("max_added_per_query", *v);
    }
    if (auto const* v = get("max_synonyms_per_term"); v != nullptr && *v != "unbounded") {
        cfg.policy.max_synonyms_per_term = to_size("max_synonyms_per_term", *v);
    }
    if (auto const* v = get("expanded_term_weight")) {
        cfg.policy.expanded_term_weight = to_double("expanded_term_weight", *v);
    }
    cfg.policy.fields_expanded = cfg.fields;
    cfg.policy.validate();
    if (auto const* v = get("qrels")) { cfg.qrels = *v; }
    if (auto const* v = get("cutoff")) {
        cfg.cutoff = to_size("cutoff", *v);
        if (cfg.cutoff == 0) {
            throw ValidationError("'cutoff' must be >= 1");
        }
    }
    if (auto const* v = get("output")) { cfg.output = *v; }
    if (auto const* v = get("tag")) {
        cfg.tag = *v;
        if (cfg.tag.empty() || cfg.tag.find_first_of(" \t/") != std::string::npos) {
            throw ValidationError("'tag' must be non-empty without whitespace or '/'");
        }
    }
    if (auto const* v = get("memory_budget_mb")) { cfg.memory_budget_mb = to_size("memory_budget_mb", *v); }
    if (auto const* v = get("lenient")) { cfg.lenient = to_bool("lenient", *v); }
    if (auto const* v = get("threads")) { cfg.threads = to_size("threads", *v); }
    if (auto const* v = get("runs")) {
        for (auto const& item : split_list(*v)) { cfg.runs.emplace_back(item); }
    }
    if (auto const* v = get("before")) { cfg.before = *v; }
    if (auto const* v = get("after")) { cfg.after = *v; }
    if (auto const* v = get("expanded_topics")) { cfg.expanded_topics = *v; }
    return cfg;
}

}  // namespace girit
