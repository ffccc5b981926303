#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "codeshot/corpus.hpp"
#include "codeshot/embedding.hpp"
#include "codeshot/entity.hpp"
#include "codeshot/tokenizer.hpp"

namespace codeshot {

// Jaccard overlap of two string sets. Both empty -> 0.0 by convention.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

// Cosine of two equal-dimension vectors. Rejects zero vectors.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

// Per-type weights for the entity-overlap score. Defaults score every type
// at 1.0 except data-type, variable and value, which carry 0.0 — identifier
// spellings and literals are treated as noise.
class EntityWeights {
public:
    static EntityWeights defaults();
    static EntityWeights uniform(double w);

    double of(EntityType type) const {
        return weights_[static_cast<std::size_t>(type)];
    }
    void set(EntityType type, double w);

    // Sum over the registry; the entity score's upper bound.
    double total() const;

    bool operator==(const EntityWeights&) const = default;

private:
    std::array<double, kEntityTypeCount> weights_{};
};

// Token-overlap score: Jaccard of the keyword-free lowercase token sets of
// the two snippets. Samples must share a language.
double score_token(const CodeSample& query, const CodeSample& candidate,
                   const CodeTokenizer& tokenizer);

// Embedding score: cosine between the two samples' vectors.
double score_semantic(const EmbeddingVector& query, const EmbeddingVector& candidate);

// Entity-overlap score: the weighted sum over the registry of per-type
// Jaccard overlaps between the two entity sets.
double score_entity(const EntitySet& query, const EntitySet& candidate,
                    const EntityWeights& weights);

// Per-type contribution of score_entity, for explain-style CLI output.
struct EntityTermBreakdown {
    EntityType type;
    double jaccard;
    double weight;
    double contribution;
    std::vector<std::string> shared_surfaces;
};
std::vector<EntityTermBreakdown> entity_score_breakdown(
    const EntitySet& query, const EntitySet& candidate,
    const EntityWeights& weights);

enum class Strategy { token, semantic, ner };

std::string_view to_string(Strategy strategy);
std::optional<Strategy> parse_strategy(std::string_view text);

struct SelectionConfig {
    Strategy strategy = Strategy::token;
    int k = 10;
    EntityWeights weights = EntityWeights::defaults();
};

struct RankedExample {
    CodeSample sample;
    double score = 0.0;
    int rank = 0; // 1-based
};

// Lookup state rank() draws on; only the member the strategy needs must be
// set. Maps are keyed by sample id and must cover the query as well when
// the strategy is semantic or ner.
struct RankInputs {
    const CodeTokenizer* tokenizer = nullptr;
    const EntitySetMap* entities = nullptr;
    const EmbeddingMap* embeddings = nullptr;
};

// Scores every train sample against the query and returns the top
// min(k, candidates) of them, ordered by descending score with ties broken
// by ascending corpus position. The query itself is never a candidate.
std::vector<RankedExample> rank(const CodeSample& query, const Corpus& corpus,
                                const SelectionConfig& config,
                                const RankInputs& inputs);

} // namespace codeshot
