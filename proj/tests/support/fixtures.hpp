#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "codeshot/corpus.hpp"
#include "codeshot/embedding.hpp"
#include "codeshot/entity.hpp"
#include "codeshot/similarity.hpp"

// Shared builders for synthetic corpora, snippets and lookup state.
namespace fixtures {

// Code whose tokenizer count is exactly `tokens` (>= 1): a call expression
// over fresh identifiers drawn from `counter`, none of them keywords.
std::string exact_token_code(std::size_t tokens, std::size_t& counter);

// Explanation text with exactly `words` whitespace-separated words, none of
// which any tokenizer drops.
std::string exact_word_text(std::size_t words, std::size_t& counter);

// Short snippet over a small shared identifier pool, so snippets from the
// same generator overlap (and often tie) under every similarity strategy.
std::string random_snippet(std::mt19937& rng, codeshot::Language lang);

// Corpus of n random-snippet samples, ids "s000".., both splits guaranteed
// non-empty, unlabelled intents.
codeshot::Corpus random_corpus(std::mt19937& rng, std::size_t n,
                               codeshot::Language lang);

// Entity sets for every sample, from the deterministic local extractor.
codeshot::EntitySetMap extract_all(const codeshot::Corpus& corpus);

// Random embeddings (dim 8) for every sample. Roughly a third of the
// vectors duplicate an earlier one so score ties actually occur.
codeshot::EmbeddingMap random_embeddings(std::mt19937& rng,
                                         const codeshot::Corpus& corpus);

// Synthetic corpora shaped like the two evaluation datasets: exact split
// (and per-intent) sizes, token/word lengths near the published means.
codeshot::Corpus inline_python_fixture();   // 1666 train / 350 test
codeshot::Corpus java_function_fixture();   // five intents, 52258 / 3291

// Random token sequence over vocabulary {w0..w{vocab-1}}.
std::vector<std::string> random_sentence(std::mt19937& rng, std::size_t min_len,
                                         std::size_t max_len,
                                         std::size_t vocab);

// Self-deleting temporary directory.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const {
        return path_ / name;
    }

private:
    std::filesystem::path path_;
};

std::string slurp(const std::filesystem::path& path);

} // namespace fixtures
