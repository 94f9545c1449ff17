#include "girit/cli.hpp"

#include "girit/corpus.hpp"
#include "girit/evaluation.hpp"
#include "girit/expansion.hpp"
#include "girit/index.hpp"
#include "girit/io.hpp"
#include "girit/retrieval.hpp"
#include "girit/topics.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace girit::cli {

namespace fs = std::filesystem;

namespace {

void require_path(fs::path const& path, std::string const& key)
{
    if (path.empty()) {
        throw ValidationError("missing required setting '" + key + "'");
    }
    if (!fs::exists(path)) {
        throw ValidationError("'" + key + "' path does not exist: " + path.string());
    }
}

void require_set(fs::path const& path, std::string const& key)
{
    if (path.empty()) {
        throw ValidationError("missing required setting '" + key + "'");
    }
}

auto warn_to(std::ostream& err)
{
    return [&err](std::string const& message) { err << "warning: " << message << '\n'; };
}

auto configured_analyzer(ExperimentConfig const& cfg) -> AnalyzerConfig
{
    AnalyzerConfig analyzer = cfg.analyzer;
    if (!cfg.stopwords.empty()) {
        require_path(cfg.stopwords, "stopwords");
        std::ifstream in(cfg.stopwords);
        analyzer.stopwords = load_stopwords(in, analyzer);
    }
    return analyzer;
}

/// Queries must be analyzed like the index unless the user insists otherwise.
auto query_analyzer(ExperimentConfig const& cfg, AnalyzerConfig const& index_analyzer) -> AnalyzerConfig
{
    return cfg.analyzer_overridden ? configured_analyzer(cfg) : index_analyzer;
}

auto thread_count(ExperimentConfig const& cfg, std::size_t jobs) -> std::size_t
{
    std::size_t threads = cfg.threads != 0 ? cfg.threads : std::max(1U, std::thread::hardware_concurrency());
    return std::max<std::size_t>(1, std::min(threads, jobs));
}

auto model_of_stem(std::string const& stem) -> std::string
{
    auto const dot = stem.rfind('.');
    std::string const last = dot == std::string::npos ? stem : stem.substr(dot + 1);
    try {
        return std::string(model_name(parse_model(last)));
    } catch (ValidationError const&) {
        return stem;
    }
}

auto files_with_extension(fs::path const& path, std::string const& extension) -> std::vector<fs::path>
{
    std::vector<fs::path> files;
    if (fs::is_directory(path)) {
        for (auto const& entry : fs::directory_iterator(path)) {
            if (entry.is_regular_file() && entry.path().extension() == extension) {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(path);
    }
    return files;
}

auto read_evaluations(fs::path const& directory) -> std::map<std::string, EvalSummary>
{
    std::map<std::string, EvalSummary> result;
    for (auto const& file : files_with_extension(directory, ".eval")) {
        EvalSummary summary;
        try {
            summary = parse_eval_text(io::read_file(file));
        } catch (FormatError const& error) {
            throw FormatError(error.what(), file.string());
        }
        if (!result.emplace(summary.model, summary).second) {
            throw ValidationError("model " + summary.model + " evaluated twice in " + directory.string());
        }
    }
    if (result.empty()) {
        throw ValidationError("no .eval files in " + directory.string());
    }
    return result;
}

auto same_ranking(RankedList const& lhs, RankedList const& rhs) -> bool
{
    if (lhs.entries.size() != rhs.entries.size()) {
        return false;
    }
    for (std::size_t i = 0; i < lhs.entries.size(); ++i) {
        auto const& a = lhs.entries[i];
        auto const& b = rhs.entries[i];
        double const scale = std::max({1.0, std::abs(a.score), std::abs(b.score)});
        if (a.docid != b.docid || a.rank != b.rank || std::abs(a.score - b.score) > 1e-9 * scale) {
            return false;
        }
    }
    return true;
}

}  // namespace

auto cmd_index(ExperimentConfig const& cfg, std::ostream& out, std::ostream& err) -> ExitCode
{
    if (cfg.corpus.empty()) {
        throw ValidationError("missing required setting 'corpus'");
    }
    for (auto const& path : cfg.corpus) {
        require_path(path, "corpus");
    }
    require_set(cfg.index, "index");
    AnalyzerConfig const analyzer = configured_analyzer(cfg);

    ParseOptions options;
    options.lenient = cfg.lenient;
    options.on_warning = warn_to(err);
    MultiFileCorpus corpus(cfg.corpus, options);

    fs::create_directories(cfg.index);
    BuildOptions build;
    build.memory_budget_bytes = cfg.memory_budget_mb << 20;
    build.spill_directory = cfg.index;
    IndexBuilder builder(analyzer, build);

    CorpusStats stats;
    while (auto doc = corpus.next()) {
        auto terms = analyze(doc->text, analyzer);
        ++stats.num_documents;
        stats.num_tokens += terms.size();
        stats.total_bytes += doc->text.size();
        builder.add_analyzed(std::move(doc->docid), std::move(terms));
    }
    Index const index = builder.finish();
    stats.vocabulary_size = index.stats().vocabulary_size;
    persist(index, cfg.index);

    std::ostringstream text;
    write_stats_text(text, stats);
    std::ostringstream csv;
    write_stats_csv(csv, stats);
    io::write_file_atomic(cfg.index / "stats.txt", text.str());
    io::write_file_atomic(cfg.index / "stats.csv", csv.str());
    out << text.str();
    out << "index: " << cfg.index.string() << '\n';
    return ExitCode::ok;
}

auto cmd_run(ExperimentConfig const& cfg, std::ostream& out, std::ostream& err) -> ExitCode
{
    require_path(cfg.index, "index");
    require_path(cfg.topics, "topics");
    Index const index = load_index(cfg.index);
    auto const topics = parse_topics(io::read_file(cfg.topics), warn_to(err));
    AnalyzerConfig const analyzer = query_analyzer(cfg, index.analyzer());
    std::vector<QueryBag> bags;
    bags.reserve(topics.size());
    for (auto const& topic : topics) {
        bags.push_back(build_query(topic, cfg.fields, analyzer, warn_to(err)));
    }
    fs::create_directories(cfg.output);

    std::vector<std::string> failures(cfg.models.size());
    std::vector<fs::path> written(cfg.models.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t m = next++; m < cfg.models.size(); m = next++) {
            ModelId const model = cfg.models[m];
            std::vector<RankedList> lists;
            lists.reserve(bags.size());
            try {
                for (auto const& bag : bags) {
                    lists.push_back(rank(index, bag, model, cfg.params, cfg.cutoff));
                }
            } catch (ScoringDomainError const& error) {
                failures[m] = error.what();
                continue;
            }
            std::ostringstream run;
            write_run(run, lists, cfg.tag);
            written[m] = cfg.output / (cfg.tag + "." + std::string(model_name(model)) + ".run");
            io::write_file_atomic(written[m], run.str());
        }
    };
    std::vector<std::thread> pool;
    std::size_t const threads = thread_count(cfg, cfg.models.size());
    for (std::size_t t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& thread : pool) {
        thread.join();
    }

    bool failed = false;
    for (std::size_t m = 0; m < cfg.models.size(); ++m) {
        if (!failures[m].empty()) {
            err << "error: run for " << model_name(cfg.models[m]) << " aborted: " << failures[m] << '\n';
            failed = true;
        } else {
            out << "wrote " << written[m].string() << '\n';
        }
    }
    return failed ? ExitCode::data : ExitCode::ok;
}

auto cmd_expand(ExperimentConfig const& cfg, std::ostream& out, std::ostream& err) -> ExitCode
{
    require_path(cfg.topics, "topics");
    require_path(cfg.thesaurus, "thesaurus");
    AnalyzerConfig analyzer = configured_analyzer(cfg);
    if (!cfg.index.empty() && !cfg.analyzer_overridden) {
        require_path(cfg.index, "index");
        analyzer = read_index_analyzer(cfg.index);
    }
    auto const topics = parse_topics(io::read_file(cfg.topics), warn_to(err));
    Thesaurus thesaurus;
    try {
        thesaurus = load_thesaurus(io::read_file(cfg.thesaurus), analyzer);
    } catch (FormatError const& error) {
        throw FormatError(error.what(), cfg.thesaurus.string());
    }
    ExpansionPolicy policy = cfg.policy;
    policy.fields_expanded = cfg.fields;

    std::vector<Topic> expanded;
    expanded.reserve(topics.size());
    for (auto const& topic : topics) {
        auto const bag = build_query(topic, cfg.fields, analyzer, warn_to(err));
        expanded.push_back(expanded_topic(topic, bag, expand_query(bag, thesaurus, policy)));
    }

    fs::path target = cfg.expanded_topics;
    if (target.empty()) {
        fs::create_directories(cfg.output);
        target = cfg.output / (cfg.tag + ".expanded.topics");
    } else if (target.has_parent_path()) {
        fs::create_directories(target.parent_path());
    }
    std::ostringstream topics_out;
    write_topics(topics_out, expanded);
    io::write_file_atomic(target, topics_out.str());

    auto const summary = expansion_stats(topics, expanded, cfg.fields, analyzer);
    std::ostringstream summary_out;
    write_expansion_summary(summary_out, summary);
    auto summary_path = target;
    summary_path += ".stats.txt";
    io::write_file_atomic(summary_path, summary_out.str());
    out << "expanded_topics: " << target.string() << '\n' << summary_out.str();
    return ExitCode::ok;
}

auto cmd_eval(ExperimentConfig const& cfg, std::ostream& out, std::ostream& err) -> ExitCode
{
    require_path(cfg.qrels, "qrels");
    if (cfg.runs.empty()) {
        throw ValidationError("missing required setting 'runs'");
    }
    std::vector<fs::path> run_files;
    for (auto const& path : cfg.runs) {
        require_path(path, "runs");
        auto files = files_with_extension(path, ".run");
        run_files.insert(run_files.end(), files.begin(), files.end());
    }
    if (run_files.empty()) {
        throw ValidationError("no .run files found");
    }
    QrelSet qrels;
    try {
        qrels = parse_qrels(io::read_file(cfg.qrels));
    } catch (FormatError const& error) {
        throw FormatError(error.what(), cfg.qrels.string());
    }
    fs::create_directories(cfg.output);
    for (auto const& file : run_files) {
        std::vector<RankedList> run;
        try {
            run = parse_run(io::read_file(file));
        } catch (FormatError const& error) {
            throw FormatError(error.what(), file.string());
        }
        auto const result = evaluate(run, qrels, cfg.cutoff, warn_to(err));
        std::string const stem = file.stem().string();
        std::string const model = model_of_stem(stem);
        std::ostringstream text;
        write_eval_text(text, result, model);
        std::ostringstream csv;
        write_eval_csv(csv, result);
        io::write_file_atomic(cfg.output / (stem + ".eval"), text.str());
        io::write_file_atomic(cfg.output / (stem + ".eval.csv"), csv.str());
        out << model << ": relevant_retrieved " << result.total_relevant_retrieved << '/' << result.total_relevant
            << ", recall " << format_percentage(result.total_relevant_retrieved, result.total_relevant) << "%"
            << ", map " << result.map << '\n';
    }
    return ExitCode::ok;
}

auto cmd_compare(ExperimentConfig const& cfg, std::ostream& out, std::ostream& /*err*/) -> ExitCode
{
    require_path(cfg.before, "before");
    require_path(cfg.after, "after");
    auto const report = compare(read_evaluations(cfg.before), read_evaluations(cfg.after));
    fs::create_directories(cfg.output);
    std::ostringstream text;
    write_comparison_text(text, report, std::string(to_string(cfg.fields)));
    std::ostringstream csv;
    write_comparison_csv(csv, report);
    io::write_file_atomic(cfg.output / "comparison.txt", text.str());
    io::write_file_atomic(cfg.output / "comparison.csv", csv.str());
    out << text.str();
    return ExitCode::ok;
}

auto cmd_verify(ExperimentConfig const& cfg, std::ostream& out, std::ostream& err) -> ExitCode
{
    if (cfg.corpus.empty()) {
        throw ValidationError("missing required setting 'corpus'");
    }
    require_path(cfg.topics, "topics");
    AnalyzerConfig const analyzer = configured_analyzer(cfg);
    ParseOptions options;
    options.on_warning = warn_to(err);
    MultiFileCorpus corpus(cfg.corpus, options);
    std::vector<RawDocument> docs;
    while (auto doc = corpus.next()) {
        docs.push_back(std::move(*doc));
    }
    Index const index = build_index(docs, analyzer);
    auto const topics = parse_topics(io::read_file(cfg.topics), warn_to(err));

    bool all_agree = true;
    for (ModelId model : cfg.models) {
        std::size_t agreed = 0;
        std::size_t compared = 0;
        for (auto const& topic : topics) {
            auto const bag = build_query(topic, cfg.fields, analyzer);
            ++compared;
            std::optional<RankedList> fast;
            std::optional<RankedList> slow;
            std::string fast_error;
            std::string slow_error;
            try {
                fast = rank(index, bag, model, cfg.params, cfg.cutoff);
            } catch (ScoringDomainError const& error) {
                fast_error = error.model() + ":" + error.qid();
            }
            try {
                slow = oracle_rank(docs, analyzer, bag, model, cfg.params, cfg.cutoff);
            } catch (ScoringDomainError const& error) {
                slow_error = error.model() + ":" + error.qid();
            }
            bool const agree = (fast && slow) ? same_ranking(*fast, *slow) : (!fast && !slow && fast_error == slow_error);
            agreed += agree ? 1 : 0;
        }
        bool const ok = agreed == compared;
        all_agree = all_agree && ok;
        out << model_name(model) << ": " << agreed << '/' << compared << (ok ? " ok" : " MISMATCH") << '\n';
    }
    return all_agree ? ExitCode::ok : ExitCode::data;
}

auto run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) -> int
{
    CLI::App app{"girit: ad-hoc retrieval experiments with thesaurus query expansion"};
    app.require_subcommand(1);

    struct Command {
        std::string name;
        std::string help;
        ExitCode (*handler)(ExperimentConfig const&, std::ostream&, std::ostream&);
    };
    std::vector<Command> const commands = {
        {"index", "build and persist an index, report corpus statistics", cmd_index},
        {"run", "rank all topics with each configured model", cmd_run},
        {"expand", "expand topics with thesaurus synonyms", cmd_expand},
        {"eval", "evaluate run files against qrels", cmd_eval},
        {"compare", "before/after expansion comparison report", cmd_compare},
        {"verify", "cross-check index ranking against the exhaustive oracle", cmd_verify},
    };

    auto const& keys = known_config_keys();
    std::string config_file;
    std::vector<std::string> overrides;
    std::map<std::string, std::string> flag_values;
    std::vector<std::pair<CLI::App*, Command const*>> registered;
    for (auto const& command : commands) {
        auto* sub = app.add_subcommand(command.name, command.help);
        sub->add_option("--config", config_file, "key = value configuration file");
        sub->add_option("--set", overrides, "override a setting, key=value (repeatable)");
        for (auto const& key : keys) {
            std::string dashed = key;
            std::replace(dashed.begin(), dashed.end(), '_', '-');
            std::string names = "--" + key;
            if (dashed != key) {
                names += ",--" + dashed;
            }
            sub->add_option(names, flag_values[key], "setting '" + key + "'");
        }
        registered.emplace_back(sub, &command);
    }

    std::vector<std::string> reversed(args.rbegin(), args.empty() ? args.rend() : std::prev(args.rend()));
    try {
        app.parse(reversed);
    } catch (CLI::CallForHelp const&) {
        out << app.help();
        return 0;
    } catch (CLI::ParseError const& error) {
        err << "error: " << error.what() << '\n';
        return static_cast<int>(ExitCode::validation);
    }

    try {
        Settings settings;
        if (!config_file.empty()) {
            if (!fs::exists(config_file)) {
                throw ValidationError("config file does not exist: " + config_file);
            }
            settings = parse_config_text(io::read_file(config_file));
        }
        for (auto const& [sub, command] : registered) {
            if (!sub->parsed()) {
                continue;
            }
            for (auto const& key : keys) {
                if (sub->count("--" + key) > 0) {
                    settings[key] = flag_values[key];
                }
            }
            for (auto const& item : overrides) {
                auto const eq = item.find('=');
                if (eq == std::string::npos) {
                    throw ValidationError("--set expects key=value, got '" + item + "'");
                }
                auto const key = item.substr(0, eq);
                if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
                    throw ValidationError("unknown setting '" + key + "'");
                }
                settings[key] = item.substr(eq + 1);
            }
            ExperimentConfig const cfg = make_config(settings);
            return static_cast<int>(command->handler(cfg, out, err));
        }
        return static_cast<int>(ExitCode::validation);
    } catch (Error const& error) {
        err << "error: " << error.what() << '\n';
        return static_cast<int>(error.exit_code());
    } catch (std::exception const& error) {
        err << "internal error: " << error.what() << '\n';
        return static_cast<int>(ExitCode::internal);
    }
}

}  // namespace girit::cli
