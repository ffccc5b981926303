#pragma once

#include <string>
#include <utility>
#include <vector>

namespace codeshot {

// All three metrics take pre-tokenized lowercase sequences (see
// plain_tokens) and return values in [0, 1]. A single reference per
// candidate throughout; an empty reference is rejected, an empty candidate
// scores 0.

// Sentence-level BLEU with n-grams up to min(4, candidate length), add-one
// smoothing on numerator and denominator for n >= 2 (unigrams unsmoothed),
// and the standard brevity penalty exp(1 - r/c) for short candidates.
double bleu(const std::vector<std::string>& candidate,
            const std::vector<std::string>& reference);

// ROUGE-L F-measure with beta = 1: harmonic mean of LCS precision and
// recall.
double rouge_l(const std::vector<std::string>& candidate,
               const std::vector<std::string>& reference);

// Exact-match METEOR: unigram matches maximised, then split into the fewest
// possible chunks; score = F_alpha * (1 - gamma * (chunks/matches)^beta)
// with alpha = 0.9, beta = 3, gamma = 0.5.
double meteor(const std::vector<std::string>& candidate,
              const std::vector<std::string>& reference);

// The match/chunk alignment behind meteor(), exposed for inspection.
struct MeteorAlignment {
    int matches = 0;
    int chunks = 0;
};
MeteorAlignment meteor_alignment(const std::vector<std::string>& candidate,
                                 const std::vector<std::string>& reference);

struct MetricScore {
    double bleu = 0.0;
    double rouge_l = 0.0;
    double meteor = 0.0;
};

struct EvalResult {
    std::vector<MetricScore> per_sample;
    MetricScore mean;
};

// Scores each (generated, reference) text pair with all three metrics,
// tokenizing with plain_tokens. The list must be non-empty.
EvalResult evaluate(
    const std::vector<std::pair<std::string, std::string>>& pairs);

} // namespace codeshot
