#include "codeshot/harness.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "codeshot/embedding.hpp"
#include "codeshot/entity.hpp"
#include "codeshot/errors.hpp"
#include "codeshot/hash.hpp"
#include "codeshot/metrics.hpp"

namespace codeshot {

using nlohmann::ordered_json;

namespace {

struct LogEntry {
    std::string prompt_hash;
    std::string text;
};

// The run log is append-only; an interrupted run may leave several entries
// for one sample, in which case the newest wins.
std::unordered_map<std::string, LogEntry> load_run_log(
    const std::filesystem::path& path) {
    std::unordered_map<std::string, LogEntry> entries;
    std::ifstream in(path);
    if (!in) return entries;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            auto obj = ordered_json::parse(line);
            entries[obj.at("id").get<std::string>()] = {
                obj.at("prompt_hash").get<std::string>(),
                obj.at("text").get<std::string>()};
        } catch (const std::exception&) {
            // a torn trailing line from a killed run is expected; skip it
        }
    }
    return entries;
}

EntitySetMap load_entity_map(const std::filesystem::path& path) {
    EntitySetMap map;
    for (auto& rec : read_entity_cache(path))
        map[rec.id] = std::move(rec.entities);
    return map;
}

EmbeddingMap load_embedding_map(const std::filesystem::path& path) {
    EmbeddingMap map;
    for (auto& rec : read_embedding_cache(path))
        map[rec.id] = std::move(rec.vector);
    return map;
}

} // namespace

RunResult run(const RunSpec& spec,
              const std::function<void(std::size_t, std::size_t)>& on_progress) {
    if (spec.output_dir.empty())
        throw ValidationError("run needs an output directory");
    if (spec.model.name.empty())
        throw ValidationError("run needs a model name");
    if (spec.model.endpoint.empty())
        throw ValidationError("run needs an endpoint URL");

    Corpus corpus = read_corpus(spec.corpus_path);
    if (spec.intent) corpus = filter_by_intent(corpus, *spec.intent);

    const CodeTokenizer tokenizer(corpus.language());

    // Selection state. With auto-population the caches are brought up to
    // date here; without it they are taken at face value, which also lets a
    // remotely extracted cache drive the run.
    EntitySetMap entities;
    EmbeddingMap embeddings;
    if (spec.strategy == Strategy::ner) {
        if (spec.auto_populate) {
            entities =
                extract_corpus(corpus, LexicalExtractor{}, spec.entity_cache)
                    .sets;
        } else {
            entities = load_entity_map(spec.entity_cache);
            for (const auto& s : corpus.samples())
                if (entities.find(s.id) == entities.end())
                    throw MissingEntitySet(s.id);
        }
    } else if (spec.strategy == Strategy::semantic) {
        std::unique_ptr<EmbeddingProvider> provider;
        if (!spec.embedding_source.empty())
            provider = std::make_unique<PrecomputedProvider>(spec.embedding_source);
        else if (!spec.embedding_endpoint.empty())
            provider = std::make_unique<RemoteEmbeddingProvider>(
                spec.embedding_endpoint, spec.model.name, "CODESHOT_API_KEY",
                spec.timeout_seconds);
        if (spec.auto_populate && provider != nullptr) {
            embeddings =
                embed_corpus(corpus, *provider, spec.embedding_cache).vectors;
        } else {
            embeddings = load_embedding_map(spec.embedding_cache.empty()
                                                ? spec.embedding_source
                                                : spec.embedding_cache);
            for (const auto& s : corpus.samples())
                if (embeddings.find(s.id) == embeddings.end())
                    throw MissingEmbedding(s.id);
        }
    }

    SelectionConfig selection;
    selection.strategy = spec.strategy;
    selection.k = spec.k;
    selection.weights = spec.weights;

    RankInputs inputs;
    inputs.tokenizer = &tokenizer;
    inputs.entities = &entities;
    inputs.embeddings = &embeddings;

    const PromptTemplate tmpl =
        spec.template_dir.empty()
            ? default_template(spec.model.family)
            : load_template(spec.template_dir, spec.model.family);

    GatewayConfig gw_config;
    gw_config.cache_path = spec.completion_cache;
    gw_config.max_in_flight = spec.max_in_flight;
    gw_config.backoff_base_ms = spec.backoff_base_ms;
    gw_config.timeout_seconds = spec.timeout_seconds;
    LlmGateway gateway(gw_config);

    std::vector<const CodeSample*> queries;
    for (const auto& s : corpus.samples())
        if (s.split == Split::test) queries.push_back(&s);
    if (queries.empty()) throw ValidationError("corpus has no test samples");

    std::filesystem::create_directories(spec.output_dir);
    const auto generations_path = spec.output_dir / "generations.jsonl";
    const auto report_path = spec.output_dir / "report.jsonl";

    auto resume = load_run_log(generations_path);
    std::ofstream log_out(generations_path, std::ios::app);
    if (!log_out)
        throw ValidationError("cannot append to " + generations_path.string());

    RunResult result;
    result.generations_path = generations_path;
    result.report_path = report_path;

    struct Failure {
        std::size_t ordinal;
        std::string id;
        std::string message;
        ErrorCategory category;
    };
    std::vector<std::string> raw_texts(queries.size());
    std::vector<Failure> failures;
    std::mutex io_mu;
    std::atomic<std::size_t> done{0};
    std::atomic<std::size_t> generated{0}, resumed{0};
    std::atomic<std::size_t> cursor{0};

    auto work = [&] {
        for (;;) {
            const std::size_t j = cursor.fetch_add(1);
            if (j >= queries.size()) return;
            const CodeSample& q = *queries[j];
            try {
                auto examples = rank(q, corpus, selection, inputs);
                auto bundle = render(q, examples, tmpl);
                const std::string prompt_hash = content_hash(bundle.text);

                std::string raw;
                auto it = resume.find(q.id);
                if (it != resume.end() && it->second.prompt_hash == prompt_hash) {
                    raw = it->second.text;
                    resumed.fetch_add(1);
                } else {
                    raw = gateway.generate(bundle.text, spec.model, spec.params);
                    generated.fetch_add(1);
                    ordered_json record;
                    record["id"] = q.id;
                    record["prompt_hash"] = prompt_hash;
                    record["text"] = raw;
                    std::lock_guard<std::mutex> lock(io_mu);
                    log_out << record.dump() << '\n';
                    log_out.flush();
                }
                raw_texts[j] = std::move(raw);
            } catch (const Error& e) {
                std::lock_guard<std::mutex> lock(io_mu);
                failures.push_back({q.ordinal, q.id, e.what(), e.category()});
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(io_mu);
                failures.push_back(
                    {q.ordinal, q.id, e.what(), ErrorCategory::internal});
            }
            const std::size_t n = done.fetch_add(1) + 1;
            if (on_progress) on_progress(n, queries.size());
        }
    };

    const int workers = std::max(
        1, std::min<int>(spec.max_in_flight, static_cast<int>(queries.size())));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    if (!failures.empty()) {
        auto first = std::min_element(failures.begin(), failures.end(),
                                      [](const Failure& a, const Failure& b) {
                                          return a.ordinal < b.ordinal;
                                      });
        const std::string message =
            "sample " + first->id + ": " + first->message;
        if (first->category == ErrorCategory::upstream)
            throw UpstreamError(message);
        throw ValidationError(message);
    }

    std::vector<std::pair<std::string, std::string>> pairs;
    std::vector<std::string> ids;
    pairs.reserve(queries.size());
    for (std::size_t j = 0; j < queries.size(); ++j) {
        std::string cleaned;
        try {
            cleaned = strip_output(raw_texts[j]);
        } catch (const Error& e) {
            throw ValidationError("sample " + queries[j]->id + ": " + e.what());
        }
        pairs.emplace_back(std::move(cleaned), queries[j]->explanation);
        ids.push_back(queries[j]->id);
    }

    const EvalResult scores = evaluate(pairs);

    ReportHeader header;
    header.corpus = spec.corpus_path.string() +
                    (spec.intent ? "#intent=" + std::string(to_string(*spec.intent))
                                 : "");
    header.model = spec.model.name;
    header.strategy = std::string(to_string(spec.strategy));
    header.template_family = std::string(to_string(spec.model.family));
    header.few_shot_layout = std::string(few_shot_layout_id());
    header.k = spec.k;

    result.report = make_report(std::move(header), ids, scores);
    write_report(result.report, report_path);
    result.generated = generated.load();
    result.resumed = resumed.load();
    return result;
}

} // namespace codeshot
