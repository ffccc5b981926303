// codeshot: pick few-shot demonstrations for code-explanation prompts,
// query a chat-completions endpoint, and score the generations.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "codeshot/corpus.hpp"
#include "codeshot/embedding.hpp"
#include "codeshot/entity.hpp"
#include "codeshot/errors.hpp"
#include "codeshot/harness.hpp"
#include "codeshot/metrics.hpp"
#include "codeshot/prompt.hpp"
#include "codeshot/report.hpp"
#include "codeshot/similarity.hpp"

namespace {

using namespace codeshot;

EntityWeights parse_weights(const std::vector<std::string>& specs) {
    EntityWeights weights = EntityWeights::defaults();
    for (const auto& spec : specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw ValidationError("weight must look like type=value: " + spec);
        const auto type = parse_entity_type(spec.substr(0, eq));
        if (!type) throw UnknownEntityType(spec.substr(0, eq));
        try {
            weights.set(*type, std::stod(spec.substr(eq + 1)));
        } catch (const std::invalid_argument&) {
            throw ValidationError("bad weight value in: " + spec);
        }
    }
    return weights;
}

std::string truncate(const std::string& text, std::size_t width) {
    std::string flat;
    for (char c : text) flat.push_back(c == '\n' ? ' ' : c);
    if (flat.size() <= width) return flat;
    return flat.substr(0, width - 3) + "...";
}

void print_split_stats(const char* label, const SplitStats& s) {
    std::printf("  %-16s %6zu samples   code %6.2f tok   explanation %6.2f tok\n",
                label, s.count, s.mean_code_tokens, s.mean_explanation_tokens);
}

int run_cli(int argc, char** argv) {
    CLI::App app{"few-shot demonstration selection and evaluation for "
                 "code explanation"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from an INI file");
    app.get_config_formatter_base()->section("");

    // ---- ingest -----------------------------------------------------------
    auto* ingest = app.add_subcommand(
        "ingest", "validate a corpus file and report what it holds");
    std::string ingest_input, ingest_output;
    ingest->add_option("--input", ingest_input, "corpus JSONL file")
        ->required()
        ->check(CLI::ExistingFile);
    ingest->add_option("--output", ingest_output,
                       "write the normalized corpus here");
    ingest->callback([&] {
        Corpus corpus = read_corpus(ingest_input);
        if (!ingest_output.empty()) write_corpus(corpus, ingest_output);
        std::printf("language: %s\nlevel: %s\nintent-labelled: %s\n",
                    std::string(to_string(corpus.language())).c_str(),
                    std::string(to_string(corpus.level())).c_str(),
                    corpus.intent_labelled() ? "yes" : "no");
        std::printf("train: %zu\ntest: %zu\n", corpus.count(Split::train),
                    corpus.count(Split::test));
    });

    // ---- stats ------------------------------------------------------------
    auto* stats = app.add_subcommand("stats", "token-length statistics");
    std::string stats_corpus;
    stats->add_option("--corpus", stats_corpus)->required()->check(CLI::ExistingFile);
    stats->callback([&] {
        const Corpus corpus = read_corpus(stats_corpus);
        const CodeTokenizer tokenizer(corpus.language());
        const CorpusStats cs = corpus_stats(corpus, tokenizer);
        std::printf("%s corpus, %s level\n",
                    std::string(to_string(corpus.language())).c_str(),
                    std::string(to_string(corpus.level())).c_str());
        print_split_stats("train", cs.train);
        print_split_stats("test", cs.test);
        for (const auto& [intent, pair] : cs.per_intent) {
            std::printf("intent %s:\n", std::string(to_string(intent)).c_str());
            print_split_stats("  train", pair.first);
            print_split_stats("  test", pair.second);
        }
    });

    // ---- extract ------------------------------------------------------------
    auto* extract = app.add_subcommand(
        "extract", "populate the entity cache for a corpus");
    std::string ex_corpus, ex_cache, ex_backend = "local";
    std::string ex_endpoint, ex_model, ex_completion_cache, ex_print;
    int ex_in_flight = 4;
    extract->add_option("--corpus", ex_corpus)->required()->check(CLI::ExistingFile);
    extract->add_option("--cache", ex_cache, "entity cache JSONL path");
    extract->add_option("--backend", ex_backend, "local or remote")
        ->check(CLI::IsMember({"local", "remote"}));
    extract->add_option("--endpoint", ex_endpoint, "remote backend URL");
    extract->add_option("--model", ex_model, "remote backend model name");
    extract->add_option("--completion-cache", ex_completion_cache,
                        "gateway response cache (remote backend)");
    extract->add_option("--max-in-flight", ex_in_flight);
    extract->add_option("--print", ex_print,
                        "also print the entity set of this sample id");
    extract->callback([&] {
        const Corpus corpus = read_corpus(ex_corpus);
        ExtractionBatch batch;
        if (ex_backend == "local") {
            batch = extract_corpus(corpus, LexicalExtractor{}, ex_cache);
        } else {
            if (ex_endpoint.empty() || ex_model.empty())
                throw ValidationError(
                    "remote backend needs --endpoint and --model");
            GatewayConfig config;
            config.cache_path = ex_completion_cache;
            config.max_in_flight = ex_in_flight;
            LlmGateway gateway(config);
            const RemoteExtractor extractor(
                gateway, ModelTarget{ex_model, ex_endpoint,
                                     TemplateFamily::inst_wrapped});
            batch = extract_corpus(corpus, extractor, ex_cache);
        }
        std::printf("entity sets: %zu (%zu from cache, %zu computed)\n",
                    batch.sets.size(), batch.cache_hits, batch.computed);
        if (!ex_print.empty()) {
            auto it = batch.sets.find(ex_print);
            if (it == batch.sets.end())
                throw ValidationError("no sample with id " + ex_print);
            for (EntityType type : entity_registry()) {
                const auto& surfaces = it->second.of(type);
                if (surfaces.empty()) continue;
                std::printf("  %-14s", std::string(entity_type_name(type)).c_str());
                for (const auto& s : surfaces) std::printf(" %s", s.c_str());
                std::printf("\n");
            }
        }
    });

    // ---- embed --------------------------------------------------------------
    auto* embed = app.add_subcommand(
        "embed", "populate the embedding cache for a corpus");
    std::string em_corpus, em_cache, em_source, em_endpoint, em_model;
    embed->add_option("--corpus", em_corpus)->required()->check(CLI::ExistingFile);
    embed->add_option("--cache", em_cache)->required();
    embed->add_option("--source", em_source,
                      "precomputed vectors file (embedding cache format)");
    embed->add_option("--endpoint", em_endpoint, "embedding endpoint URL");
    embed->add_option("--model", em_model, "embedding model name");
    embed->callback([&] {
        const Corpus corpus = read_corpus(em_corpus);
        EmbeddingBatch batch;
        if (!em_source.empty()) {
            const PrecomputedProvider provider(em_source);
            batch = embed_corpus(corpus, provider, em_cache);
        } else if (!em_endpoint.empty()) {
            if (em_model.empty())
                throw ValidationError("remote embedding needs --model");
            const RemoteEmbeddingProvider provider(em_endpoint, em_model);
            batch = embed_corpus(corpus, provider, em_cache);
        } else {
            throw ValidationError("embed needs --source or --endpoint");
        }
        std::printf("embeddings: %zu (%zu from cache, %zu computed)\n",
                    batch.vectors.size(), batch.cache_hits, batch.computed);
    });

    // ---- rank ---------------------------------------------------------------
    auto* rank_cmd = app.add_subcommand(
        "rank", "rank train samples against one query");
    std::string rk_corpus, rk_strategy = "token", rk_query_id, rk_query_code;
    std::string rk_entity_cache, rk_embedding_cache;
    std::vector<std::string> rk_weights;
    int rk_k = 10;
    bool rk_explain = false;
    rank_cmd->add_option("--corpus", rk_corpus)->required()->check(CLI::ExistingFile);
    rank_cmd->add_option("--strategy", rk_strategy)
        ->check(CLI::IsMember({"token", "semantic", "ner"}));
    rank_cmd->add_option("--k", rk_k)->check(CLI::PositiveNumber);
    rank_cmd->add_option("--query-id", rk_query_id,
                         "rank against this corpus sample");
    rank_cmd->add_option("--query-code", rk_query_code,
                         "rank against an ad-hoc snippet");
    rank_cmd->add_option("--entity-cache", rk_entity_cache);
    rank_cmd->add_option("--embedding-cache", rk_embedding_cache);
    rank_cmd->add_option("--weight", rk_weights,
                         "override an entity weight, e.g. variable=0.5");
    rank_cmd->add_flag("--explain", rk_explain,
                       "show per-type contributions (ner strategy)");
    rank_cmd->callback([&] {
        const Corpus corpus = read_corpus(rk_corpus);
        const CodeTokenizer tokenizer(corpus.language());

        if (rk_query_id.empty() == rk_query_code.empty())
            throw ValidationError("give exactly one of --query-id / --query-code");
        CodeSample query;
        if (!rk_query_id.empty()) {
            const CodeSample* found = corpus.find(rk_query_id);
            if (found == nullptr)
                throw ValidationError("no sample with id " + rk_query_id);
            query = *found;
        } else {
            query.id = "adhoc-query";
            query.code = rk_query_code;
            query.explanation = "-";
            query.language = corpus.language();
            query.split = Split::test;
        }

        SelectionConfig config;
        config.strategy = *parse_strategy(rk_strategy);
        config.k = rk_k;
        config.weights = parse_weights(rk_weights);

        EntitySetMap entities;
        EmbeddingMap embeddings;
        if (config.strategy == Strategy::ner) {
            entities =
                extract_corpus(corpus, LexicalExtractor{}, rk_entity_cache).sets;
            if (entities.find(query.id) == entities.end())
                entities.emplace(query.id, LexicalExtractor{}.extract(
                                               query.code, query.language));
        } else if (config.strategy == Strategy::semantic) {
            if (rk_embedding_cache.empty())
                throw ValidationError("semantic strategy needs --embedding-cache");
            for (auto& rec : read_embedding_cache(rk_embedding_cache))
                embeddings[rec.id] = std::move(rec.vector);
        }

        RankInputs inputs{&tokenizer, &entities, &embeddings};
        const auto ranked = rank(query, corpus, config, inputs);
        for (const auto& r : ranked) {
            std::printf("%3d  %10.6f  %-12s %s\n", r.rank, r.score,
                        r.sample.id.c_str(), truncate(r.sample.code, 60).c_str());
            if (rk_explain && config.strategy == Strategy::ner) {
                const auto terms = entity_score_breakdown(
                    entities.at(query.id), entities.at(r.sample.id),
                    config.weights);
                for (const auto& term : terms) {
                    if (term.contribution == 0.0) continue;
                    std::printf("      %-14s jaccard %5.3f x weight %4.2f = %5.3f",
                                std::string(entity_type_name(term.type)).c_str(),
                                term.jaccard, term.weight, term.contribution);
                    if (!term.shared_surfaces.empty()) {
                        std::printf("  (");
                        for (std::size_t i = 0; i < term.shared_surfaces.size(); ++i)
                            std::printf("%s%s", i ? ", " : "",
                                        term.shared_surfaces[i].c_str());
                        std::printf(")");
                    }
                    std::printf("\n");
                }
            }
        }
    });

    // ---- run ------------------------------------------------------------------
    auto* run_cmd = app.add_subcommand(
        "run", "select, prompt, generate and score a whole test split");
    RunSpec spec;
    std::string rn_corpus, rn_strategy = "token", rn_family = "inst-wrapped";
    std::string rn_intent, rn_sampling = "greedy";
    std::string rn_output_dir, rn_entity_cache, rn_embedding_cache;
    std::string rn_embedding_source, rn_template_dir, rn_completion_cache;
    std::vector<std::string> rn_weights;
    bool rn_no_auto = false;
    run_cmd->add_option("--corpus", rn_corpus)->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--strategy", rn_strategy)
        ->check(CLI::IsMember({"token", "semantic", "ner"}));
    run_cmd->add_option("--k", spec.k)->check(CLI::PositiveNumber);
    run_cmd->add_option("--intent", rn_intent,
                        "restrict an intent-labelled corpus");
    run_cmd->add_option("--model", spec.model.name)->required();
    run_cmd->add_option("--endpoint", spec.model.endpoint)->required();
    run_cmd->add_option("--family", rn_family)
        ->check(CLI::IsMember({"inst-wrapped", "human-assistant"}));
    run_cmd->add_option("--output-dir", rn_output_dir)->required();
    run_cmd->add_option("--entity-cache", rn_entity_cache);
    run_cmd->add_option("--embedding-cache", rn_embedding_cache);
    run_cmd->add_option("--embedding-source", rn_embedding_source);
    run_cmd->add_option("--embedding-endpoint", spec.embedding_endpoint);
    run_cmd->add_option("--template-dir", rn_template_dir);
    run_cmd->add_option("--completion-cache", rn_completion_cache);
    run_cmd->add_option("--weight", rn_weights);
    run_cmd->add_flag("--no-auto-populate", rn_no_auto,
                      "never touch the caches, just read them");
    run_cmd->add_option("--max-in-flight", spec.max_in_flight);
    run_cmd->add_option("--backoff-ms", spec.backoff_base_ms);
    run_cmd->add_option("--timeout", spec.timeout_seconds);
    run_cmd->add_option("--max-new-tokens", spec.params.max_new_tokens);
    run_cmd->add_option("--sampling", rn_sampling)
        ->check(CLI::IsMember({"greedy", "sampled"}));
    run_cmd->add_option("--temperature", spec.params.temperature);
    run_cmd->callback([&] {
        spec.corpus_path = rn_corpus;
        spec.strategy = *parse_strategy(rn_strategy);
        spec.model.family = *parse_template_family(rn_family);
        spec.params.sampling = *parse_sampling(rn_sampling);
        spec.output_dir = rn_output_dir;
        spec.entity_cache = rn_entity_cache;
        spec.embedding_cache = rn_embedding_cache;
        spec.embedding_source = rn_embedding_source;
        spec.template_dir = rn_template_dir;
        spec.completion_cache = rn_completion_cache;
        spec.weights = parse_weights(rn_weights);
        spec.auto_populate = !rn_no_auto;
        if (!rn_intent.empty()) {
            auto intent = parse_intent(rn_intent);
            if (!intent) throw ValidationError("unknown intent " + rn_intent);
            spec.intent = *intent;
        }

        const bool show_progress = isatty(fileno(stderr)) != 0;
        const RunResult result = run(spec, [&](std::size_t done, std::size_t total) {
            if (show_progress) {
                std::fprintf(stderr, "\r%zu/%zu", done, total);
                if (done == total) std::fprintf(stderr, "\n");
            }
        });

        std::printf("test samples: %zu (%zu generated, %zu resumed)\n",
                    result.report.rows.size(), result.generated, result.resumed);
        std::printf("bleu %.3f   rouge_l %.3f   meteor %.3f\n",
                    result.report.aggregate.bleu, result.report.aggregate.rouge_l,
                    result.report.aggregate.meteor);
        std::printf("report: %s\ngenerations: %s\n",
                    result.report_path.string().c_str(),
                    result.generations_path.string().c_str());
    });

    // ---- compare ---------------------------------------------------------------
    auto* compare = app.add_subcommand(
        "compare", "paired comparison of two or more reports");
    std::vector<std::string> cm_reports;
    compare->add_option("reports", cm_reports,
                        "report files; the first is the baseline")
        ->expected(2, -1)
        ->check(CLI::ExistingFile);
    compare->callback([&] {
        const EvalReport baseline = read_report(cm_reports.front());
        for (std::size_t i = 1; i < cm_reports.size(); ++i) {
            const EvalReport contender = read_report(cm_reports[i]);
            const auto result = compare_reports(baseline, contender);
            std::printf("%s", comparison_to_string(result).c_str());
            if (i + 1 < cm_reports.size()) std::printf("\n");
        }
    });

    // ---- report ----------------------------------------------------------------
    auto* report_cmd = app.add_subcommand("report", "pretty-print a report file");
    std::string rp_input;
    bool rp_rows = false;
    report_cmd->add_option("--input", rp_input)->required()->check(CLI::ExistingFile);
    report_cmd->add_flag("--rows", rp_rows, "list per-sample rows too");
    report_cmd->callback([&] {
        const EvalReport report = read_report(rp_input);
        std::printf("corpus:   %s\nmodel:    %s\nstrategy: %s (k=%d)\n",
                    report.header.corpus.c_str(), report.header.model.c_str(),
                    report.header.strategy.c_str(), report.header.k);
        std::printf("template: %s\nlayout:   %s\nmetrics:  %s\n",
                    report.header.template_family.c_str(),
                    report.header.few_shot_layout.c_str(),
                    report.header.metric_variants.c_str());
        if (rp_rows)
            for (const auto& row : report.rows)
                std::printf("  %-16s bleu %.3f  rouge_l %.3f  meteor %.3f\n",
                            row.id.c_str(), row.score.bleu, row.score.rouge_l,
                            row.score.meteor);
        std::printf("aggregate (n=%zu): bleu %.3f  rouge_l %.3f  meteor %.3f\n",
                    report.rows.size(), report.aggregate.bleu,
                    report.aggregate.rouge_l, report.aggregate.meteor);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const codeshot::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        switch (e.category()) {
        case codeshot::ErrorCategory::validation: return 2;
        case codeshot::ErrorCategory::upstream: return 3;
        default: return 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
