#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "codeshot/corpus.hpp"
#include "codeshot/gateway.hpp"
#include "codeshot/prompt.hpp"
#include "codeshot/report.hpp"
#include "codeshot/similarity.hpp"

namespace codeshot {

// Everything one end-to-end run needs. Paths are taken as given; relative
// paths resolve against the working directory.
struct RunSpec {
    std::filesystem::path corpus_path;
    Strategy strategy = Strategy::token;
    int k = 10;
    std::optional<Intent> intent;      // restrict an intent-labelled corpus

    ModelTarget model;
    GenerationParams params;           // defaults: 32 new tokens, greedy

    std::filesystem::path output_dir;  // receives generations.jsonl + report.jsonl
    std::filesystem::path entity_cache;     // ner strategy
    std::filesystem::path embedding_cache;  // semantic strategy
    std::filesystem::path embedding_source; // precomputed vectors (semantic)
    std::string embedding_endpoint;         // remote provider (semantic)

    std::filesystem::path template_dir;     // empty -> built-in templates
    std::filesystem::path completion_cache; // gateway response cache
    EntityWeights weights = EntityWeights::defaults();

    // Fill missing cache entries automatically before ranking. When off, a
    // gap raises MissingEntitySet / MissingEmbedding instead.
    bool auto_populate = true;

    int max_in_flight = 4;
    int backoff_base_ms = 250;
    int timeout_seconds = 60;
};

struct RunResult {
    EvalReport report;
    std::filesystem::path report_path;
    std::filesystem::path generations_path;
    std::size_t generated = 0;  // completions produced this run
    std::size_t resumed = 0;    // test samples answered from the run log
};

// Executes select -> prompt -> generate -> strip -> score for every test
// sample, in corpus order. Progress lands in <output_dir>/generations.jsonl
// as each completion arrives ({id, prompt_hash, text}); rerunning skips
// samples whose logged prompt hash still matches and regenerates the rest.
// The finished report is written to <output_dir>/report.jsonl.
//
// on_progress, when set, is called after each sample with (done, total).
RunResult run(const RunSpec& spec,
              const std::function<void(std::size_t, std::size_t)>& on_progress = {});

} // namespace codeshot
