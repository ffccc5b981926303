#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "codeshot/lang.hpp"
#include "codeshot/tokenizer.hpp"

namespace codeshot {

// Granularity of the snippets in a corpus. Inline corpora hold one-liners,
// function corpora hold whole method bodies.
enum class Level { inline_snippet, function };

std::string_view to_string(Level level);
std::optional<Level> parse_level(std::string_view text);

struct CodeSample {
    std::string id;
    std::string code;
    std::string explanation;
    Language language = Language::python;
    std::optional<Intent> intent;
    Split split = Split::train;

    // Position in the source file, assigned at ingestion. Ranking uses it to
    // break score ties, so reordering a corpus on disk changes nothing else.
    std::size_t ordinal = 0;
};

class Corpus {
public:
    // Validates and adopts the samples: non-empty ids/code/explanations,
    // unique ids, a single language, and intent labels either on every
    // sample or on none. Ordinals are (re)assigned from vector order.
    static Corpus from_samples(std::vector<CodeSample> samples, Level level);

    // Same validation, but keeps the ordinals already stored on the samples
    // (they must be unique). Use this when deriving a corpus from an already
    // ingested one — filtering or reordering — so score tie-breaks still
    // follow the original ingestion order.
    static Corpus from_ingested(std::vector<CodeSample> samples, Level level);

    const std::vector<CodeSample>& samples() const { return samples_; }
    Language language() const { return language_; }
    Level level() const { return level_; }
    bool intent_labelled() const { return intent_labelled_; }

    std::size_t count(Split split) const;
    const CodeSample* find(const std::string& id) const;

private:
    Corpus() = default;

    static Corpus validate_and_adopt(std::vector<CodeSample> samples,
                                     Level level, bool reassign_ordinals);

    std::vector<CodeSample> samples_;
    Language language_ = Language::python;
    Level level_ = Level::inline_snippet;
    bool intent_labelled_ = false;
};

// One JSON object per line: {"id", "code", "explanation", "language",
// "split", "intent"?}. The intent key is present on every line or on none.
Corpus read_corpus(const std::filesystem::path& path);
Corpus read_corpus(std::istream& in, const std::string& source_name);

void write_corpus(const Corpus& corpus, const std::filesystem::path& path);
std::string corpus_to_string(const Corpus& corpus);

// Keep only samples carrying the given intent (both splits).
Corpus filter_by_intent(const Corpus& corpus, Intent intent);

struct SplitStats {
    std::size_t count = 0;
    double mean_code_tokens = 0.0;
    double mean_explanation_tokens = 0.0;
};

struct CorpusStats {
    SplitStats train;
    SplitStats test;
    // Present only for intent-labelled corpora.
    std::map<Intent, std::pair<SplitStats, SplitStats>> per_intent;
};

// Token counts come from the supplied code tokenizer for both fields, so the
// explanation lengths are keyword-filtered approximations; counts are exact.
CorpusStats corpus_stats(const Corpus& corpus, const CodeTokenizer& tokenizer);

} // namespace codeshot
