#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "codeshot/corpus.hpp"
#include "codeshot/gateway.hpp"
#include "codeshot/lang.hpp"

namespace codeshot {

// Fixed registry of code-entity types. Nine are live today; the rest are
// reserved slots so weight vectors and caches keep a stable width.
inline constexpr std::size_t kEntityTypeCount = 20;

enum class EntityType : unsigned {
    function,
    class_type,
    library,
    module,
    variable,
    value,
    data_type,
    data_structure,
    algorithm,
    reserved_1,
    reserved_2,
    reserved_3,
    reserved_4,
    reserved_5,
    reserved_6,
    reserved_7,
    reserved_8,
    reserved_9,
    reserved_10,
    reserved_11,
};

std::string_view entity_type_name(EntityType type);
std::optional<EntityType> parse_entity_type(std::string_view name);
const std::array<EntityType, kEntityTypeCount>& entity_registry();

// Version tag of the registry + local rule tables. Folded into backend ids
// so cache entries from older rules never satisfy a lookup.
std::string_view entity_rules_version();

// Typed sets of entity surface strings. Surfaces are non-empty and
// lowercase; a type that was never added compares equal to an empty set.
class EntitySet {
public:
    // Lowercases the surface; empty surfaces are dropped.
    void add(EntityType type, std::string_view surface);

    const std::set<std::string>& of(EntityType type) const {
        return sets_[static_cast<std::size_t>(type)];
    }

    bool empty() const;
    std::size_t total_surfaces() const;

    bool operator==(const EntitySet& other) const { return sets_ == other.sets_; }

private:
    std::array<std::set<std::string>, kEntityTypeCount> sets_{};
};

// A named entity extraction backend. Implementations must be safe to call
// from several threads at once.
class EntityExtractor {
public:
    virtual ~EntityExtractor() = default;

    // Pulls typed entities out of one snippet. The snippet must be non-empty
    // and in a language the backend supports.
    virtual EntitySet extract(std::string_view code, Language lang) const = 0;

    // Identifier stored with cache entries; changes when results could.
    virtual std::string id() const = 0;

    virtual bool supports(Language lang) const = 0;
    virtual int max_in_flight() const { return 1; }
};

// Deterministic extractor built on lexical rules: it scans identifiers,
// literals and a handful of context cues (call parentheses, import clauses,
// assignment operators, declaration keywords, dotted chains) and buckets the
// surfaces into function / class / library / variable / value / data-type.
class LexicalExtractor final : public EntityExtractor {
public:
    EntitySet extract(std::string_view code, Language lang) const override;
    std::string id() const override;
    bool supports(Language lang) const override;
};

// Extractor that asks an instruction-tuned model to list entities, one
// request per entity type, through the shared gateway. Replies are parsed as
// comma/newline separated surface lists; anything the model invents that
// does not occur in the snippet is discarded.
class RemoteExtractor final : public EntityExtractor {
public:
    RemoteExtractor(LlmGateway& gateway, ModelTarget target,
                    GenerationParams params = {64, Sampling::greedy, 0.1});

    EntitySet extract(std::string_view code, Language lang) const override;
    std::string id() const override;
    bool supports(Language lang) const override;
    int max_in_flight() const override;

private:
    LlmGateway* gateway_;
    ModelTarget target_;
    GenerationParams params_;
};

using EntitySetMap = std::unordered_map<std::string, EntitySet>;

struct ExtractionBatch {
    EntitySetMap sets;
    std::size_t cache_hits = 0;
    std::size_t computed = 0;
};

// Runs the extractor over every sample, reusing cache entries whose code
// hash and backend id still match. The cache file is rewritten atomically;
// results computed before a failure are preserved in it. On failure the
// error names the first failing sample in corpus order.
ExtractionBatch extract_corpus(const Corpus& corpus,
                               const EntityExtractor& extractor,
                               const std::filesystem::path& cache_path);

// Cache file access (one JSON object per line: id, code_hash, backend,
// entities). Exposed for tooling and tests.
struct EntityCacheRecord {
    std::string id;
    std::string code_hash;
    std::string backend;
    EntitySet entities;
};
std::vector<EntityCacheRecord> read_entity_cache(const std::filesystem::path& path);
void write_entity_cache(const std::vector<EntityCacheRecord>& records,
                        const std::filesystem::path& path);

} // namespace codeshot
