#include "codeshot/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "codeshot/errors.hpp"

namespace codeshot {

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t inter = 0;
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    for (const auto& s : small)
        if (large.count(s) > 0) ++inter;
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
    if (a.dim() == 0) throw ValidationError("cosine of empty vectors");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0) throw ZeroVector("left operand");
    if (nb == 0.0) throw ZeroVector("right operand");
    // Guard against rounding pushing |cos| a hair past 1.
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

EntityWeights EntityWeights::defaults() {
    EntityWeights w = uniform(1.0);
    w.set(EntityType::data_type, 0.0);
    w.set(EntityType::variable, 0.0);
    w.set(EntityType::value, 0.0);
    return w;
}

EntityWeights EntityWeights::uniform(double value) {
    EntityWeights w;
    w.weights_.fill(value);
    return w;
}

void EntityWeights::set(EntityType type, double w) {
    if (w < 0.0) throw ValidationError("entity weights must be >= 0");
    weights_[static_cast<std::size_t>(type)] = w;
}

double EntityWeights::total() const {
    double sum = 0.0;
    for (double w : weights_) sum += w;
    return sum;
}

double score_token(const CodeSample& query, const CodeSample& candidate,
                   const CodeTokenizer& tokenizer) {
    if (query.language != candidate.language)
        throw LanguageMismatch(std::string(to_string(query.language)),
                               std::string(to_string(candidate.language)));
    if (query.language != tokenizer.language())
        throw LanguageMismatch(std::string(to_string(query.language)),
                               std::string(to_string(tokenizer.language())));
    return jaccard(tokenizer.token_set(query.code),
                   tokenizer.token_set(candidate.code));
}

double score_semantic(const EmbeddingVector& query,
                      const EmbeddingVector& candidate) {
    return cosine(query, candidate);
}

double score_entity(const EntitySet& query, const EntitySet& candidate,
                    const EntityWeights& weights) {
    double score = 0.0;
    for (EntityType type : entity_registry()) {
        const double w = weights.of(type);
        if (w == 0.0) continue;
        score += w * jaccard(query.of(type), candidate.of(type));
    }
    return score;
}

std::vector<EntityTermBreakdown> entity_score_breakdown(
    const EntitySet& query, const EntitySet& candidate,
    const EntityWeights& weights) {
    std::vector<EntityTermBreakdown> terms;
    for (EntityType type : entity_registry()) {
        EntityTermBreakdown term;
        term.type = type;
        term.weight = weights.of(type);
        term.jaccard = jaccard(query.of(type), candidate.of(type));
        term.contribution = term.weight * term.jaccard;
        std::set_intersection(query.of(type).begin(), query.of(type).end(),
                              candidate.of(type).begin(),
                              candidate.of(type).end(),
                              std::back_inserter(term.shared_surfaces));
        terms.push_back(std::move(term));
    }
    return terms;
}

std::string_view to_string(Strategy strategy) {
    switch (strategy) {
    case Strategy::token: return "token";
    case Strategy::semantic: return "semantic";
    case Strategy::ner: return "ner";
    }
    return "?";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
    if (text == "token") return Strategy::token;
    if (text == "semantic") return Strategy::semantic;
    if (text == "ner") return Strategy::ner;
    return std::nullopt;
}

namespace {

const EmbeddingVector& vector_for(const EmbeddingMap& map,
                                  const std::string& id) {
    auto it = map.find(id);
    if (it == map.end()) throw MissingEmbedding(id);
    return it->second;
}

const EntitySet& entities_for(const EntitySetMap& map, const std::string& id) {
    auto it = map.find(id);
    if (it == map.end()) throw MissingEntitySet(id);
    return it->second;
}

} // namespace

std::vector<RankedExample> rank(const CodeSample& query, const Corpus& corpus,
                                const SelectionConfig& config,
                                const RankInputs& inputs) {
    if (config.k < 1) throw ValidationError("k must be at least 1");
    if (query.code.empty()) throw ValidationError("query has empty code");
    if (query.language != corpus.language())
        throw LanguageMismatch(std::string(to_string(query.language)),
                               std::string(to_string(corpus.language())));

    std::vector<RankedExample> scored;
    for (const auto& candidate : corpus.samples()) {
        if (candidate.split != Split::train) continue;
        if (candidate.id == query.id) continue;

        double score = 0.0;
        switch (config.strategy) {
        case Strategy::token:
            if (inputs.tokenizer == nullptr)
                throw ValidationError("token strategy needs a tokenizer");
            score = score_token(query, candidate, *inputs.tokenizer);
            break;
        case Strategy::semantic:
            if (inputs.embeddings == nullptr)
                throw ValidationError("semantic strategy needs embeddings");
            score = score_semantic(vector_for(*inputs.embeddings, query.id),
                                   vector_for(*inputs.embeddings, candidate.id));
            break;
        case Strategy::ner:
            if (inputs.entities == nullptr)
                throw ValidationError("ner strategy needs entity sets");
            score = score_entity(entities_for(*inputs.entities, query.id),
                                 entities_for(*inputs.entities, candidate.id),
                                 config.weights);
            break;
        }
        scored.push_back({candidate, score, 0});
    }
    if (scored.empty()) throw EmptyTrainSplit();

    std::sort(scored.begin(), scored.end(),
              [](const RankedExample& a, const RankedExample& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.sample.ordinal < b.sample.ordinal;
              });

    const std::size_t keep =
        std::min<std::size_t>(static_cast<std::size_t>(config.k), scored.size());
    scored.resize(keep);
    for (std::size_t i = 0; i < scored.size(); ++i)
        scored[i].rank = static_cast<int>(i) + 1;
    return scored;
}

} // namespace codeshot
