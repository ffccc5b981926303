#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "codeshot/corpus.hpp"

namespace codeshot {

struct EmbeddingVector {
    std::vector<double> values;
    std::string provider_id;

    std::size_t dim() const { return values.size(); }
};

// Source of code embeddings. Implementations must be thread-safe.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    // Embeds one snippet. Must return a non-empty vector with at least one
    // non-zero component.
    virtual EmbeddingVector embed(std::string_view id,
                                  std::string_view code) const = 0;

    virtual std::string id() const = 0;
    virtual int max_in_flight() const { return 1; }
};

// Serves vectors from a file in the embedding-cache format, looked up by
// sample id. Asking for an id the file does not contain raises
// ProviderUnavailable naming that id.
class PrecomputedProvider final : public EmbeddingProvider {
public:
    explicit PrecomputedProvider(const std::filesystem::path& path);

    EmbeddingVector embed(std::string_view id,
                          std::string_view code) const override;
    std::string id() const override { return provider_id_; }

private:
    std::unordered_map<std::string, EmbeddingVector> vectors_;
    std::string provider_id_;
};

// POSTs {"input": code} to an embedding endpoint and reads back
// {"embedding": [...]} (or OpenAI-style {"data":[{"embedding":[...]}]}).
class RemoteEmbeddingProvider final : public EmbeddingProvider {
public:
    RemoteEmbeddingProvider(std::string endpoint, std::string model,
                            std::string api_key_env = "CODESHOT_API_KEY",
                            int timeout_seconds = 60);

    EmbeddingVector embed(std::string_view id,
                          std::string_view code) const override;
    std::string id() const override;
    int max_in_flight() const override { return 4; }

private:
    std::string endpoint_;
    std::string model_;
    std::string api_key_env_;
    int timeout_seconds_;
};

using EmbeddingMap = std::unordered_map<std::string, EmbeddingVector>;

struct EmbeddingBatch {
    EmbeddingMap vectors;
    std::size_t cache_hits = 0;
    std::size_t computed = 0;
};

// Embeds every sample in the corpus, reusing cache entries keyed by
// (code hash, provider id). All vectors in the result must share one
// dimension; a drift raises DimensionDrift naming the offending sample.
EmbeddingBatch embed_corpus(const Corpus& corpus,
                            const EmbeddingProvider& provider,
                            const std::filesystem::path& cache_path);

// Cache file access (one JSON object per line: id, code_hash, provider_id,
// dim, values). Values are stored rounded to 9 significant digits so a
// load/store round trip is byte-stable.
struct EmbeddingCacheRecord {
    std::string id;
    std::string code_hash;
    std::string provider_id;
    EmbeddingVector vector;
};
std::vector<EmbeddingCacheRecord> read_embedding_cache(const std::filesystem::path& path);
void write_embedding_cache(const std::vector<EmbeddingCacheRecord>& records,
                           const std::filesystem::path& path);

} // namespace codeshot
