#include "codeshot/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "codeshot/errors.hpp"
#include "codeshot/tokenizer.hpp"

namespace codeshot {

namespace {

using Tokens = std::vector<std::string>;

std::map<Tokens, int> ngram_counts(const Tokens& tokens, std::size_t n) {
    std::map<Tokens, int> counts;
    if (tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i)
        ++counts[Tokens(tokens.begin() + i, tokens.begin() + i + n)];
    return counts;
}

} // namespace

double bleu(const Tokens& candidate, const Tokens& reference) {
    if (reference.empty()) throw EmptyReference();
    if (candidate.empty()) return 0.0;

    const std::size_t max_n = std::min<std::size_t>(4, candidate.size());
    double log_sum = 0.0;
    for (std::size_t n = 1; n <= max_n; ++n) {
        const auto cand_counts = ngram_counts(candidate, n);
        const auto ref_counts = ngram_counts(reference, n);
        double matched = 0.0;
        double total = 0.0;
        for (const auto& [gram, count] : cand_counts) {
            auto it = ref_counts.find(gram);
            const int clip = it == ref_counts.end() ? 0 : it->second;
            matched += std::min(count, clip);
            total += count;
        }
        // Unigram precision stays raw; higher orders get add-one smoothing
        // so a single missing n-gram does not zero the whole score.
        if (n >= 2) {
            matched += 1.0;
            total += 1.0;
        }
        if (matched == 0.0) return 0.0;
        log_sum += std::log(matched / total) / static_cast<double>(max_n);
    }

    const double c = static_cast<double>(candidate.size());
    const double r = static_cast<double>(reference.size());
    const double brevity = c < r ? std::exp(1.0 - r / c) : 1.0;
    return brevity * std::exp(log_sum);
}

namespace {

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
    // Two-row DP over the usual LCS table.
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                          : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

} // namespace

double rouge_l(const Tokens& candidate, const Tokens& reference) {
    if (reference.empty()) throw EmptyReference();
    if (candidate.empty()) return 0.0;
    const auto lcs = lcs_length(candidate, reference);
    if (lcs == 0) return 0.0;
    const double precision = static_cast<double>(lcs) / candidate.size();
    const double recall = static_cast<double>(lcs) / reference.size();
    return 2.0 * precision * recall / (precision + recall);
}

namespace {

// Depth-first search for an alignment with the maximum number of exact
// unigram matches and, among those, the fewest chunks. The match count is
// fixed up front (sum over tokens of min(candidate count, reference count)),
// so the search only has to place the matches; branches whose chunk count
// already reaches the best known one are cut, as are branches that skipped
// too many occurrences of some token to still meet its quota.
struct AlignmentSearch {
    const Tokens& cand;
    const Tokens& ref;
    std::unordered_map<std::string, int> needed;  // per-token quota left
    std::unordered_map<std::string, int> ahead;   // candidate occurrences left
    std::vector<bool> ref_used;
    std::vector<std::vector<int>> ref_positions_of; // cand index -> ref slots
    int best_chunks;
    int total_matches = 0;

    AlignmentSearch(const Tokens& c, const Tokens& r)
        : cand(c), ref(r), ref_used(r.size(), false) {
        std::unordered_map<std::string, int> ref_counts;
        for (const auto& t : r) ++ref_counts[t];
        std::unordered_map<std::string, int> cand_counts;
        for (const auto& t : c) ++cand_counts[t];
        for (const auto& [tok, cnt] : cand_counts) {
            auto it = ref_counts.find(tok);
            if (it != ref_counts.end())
                needed[tok] = std::min(cnt, it->second);
        }
        for (const auto& [tok, n] : needed) total_matches += n;
        ahead = cand_counts;

        std::unordered_map<std::string, std::vector<int>> slots;
        for (int j = 0; j < static_cast<int>(r.size()); ++j)
            slots[r[j]].push_back(j);
        ref_positions_of.resize(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) {
            auto it = slots.find(c[i]);
            if (it != slots.end()) ref_positions_of[i] = it->second;
        }
        best_chunks = total_matches + 1; // any alignment beats this
    }

    void run() {
        if (total_matches == 0) {
            best_chunks = 0;
            return;
        }
        dfs(0, -2, -2, 0, 0);
    }

    void dfs(std::size_t i, int prev_ci, int prev_rj, int chunks, int placed) {
        if (chunks >= best_chunks) return;
        if (placed == total_matches) {
            best_chunks = chunks;
            return;
        }
        if (i >= cand.size()) return;

        const std::string& tok = cand[i];
        auto need_it = needed.find(tok);
        const bool match_possible = need_it != needed.end() && need_it->second > 0;

        if (match_possible) {
            // Try the chunk-extending slot first so the best bound drops fast.
            const int extend = prev_ci == static_cast<int>(i) - 1 ? prev_rj + 1 : -1;
            auto try_slot = [&](int j) {
                if (ref_used[j]) return;
                ref_used[j] = true;
                --need_it->second;
                --ahead[tok];
                const bool contiguous =
                    prev_ci == static_cast<int>(i) - 1 && j == prev_rj + 1;
                dfs(i + 1, static_cast<int>(i), j, chunks + (contiguous ? 0 : 1),
                    placed + 1);
                ++ahead[tok];
                ++need_it->second;
                ref_used[j] = false;
            };
            if (extend >= 0 && extend < static_cast<int>(ref.size()) &&
                ref[extend] == tok)
                try_slot(extend);
            for (int j : ref_positions_of[i])
                if (j != extend) try_slot(j);
        }

        // Leaving cand[i] unmatched is only viable while later occurrences
        // can still fill the token's quota.
        const int still_needed = match_possible ? need_it->second : 0;
        const int later = (match_possible ? ahead[tok] : 0) - 1;
        if (!match_possible || later >= still_needed) {
            if (match_possible) --ahead[tok];
            dfs(i + 1, prev_ci, prev_rj, chunks, placed);
            if (match_possible) ++ahead[tok];
        }
    }
};

} // namespace

MeteorAlignment meteor_alignment(const Tokens& candidate, const Tokens& reference) {
    AlignmentSearch search(candidate, reference);
    search.run();
    return {search.total_matches, search.best_chunks};
}

double meteor(const Tokens& candidate, const Tokens& reference) {
    if (reference.empty()) throw EmptyReference();
    if (candidate.empty()) return 0.0;

    const auto alignment = meteor_alignment(candidate, reference);
    if (alignment.matches == 0) return 0.0;

    constexpr double alpha = 0.9, beta = 3.0, gamma = 0.5;
    const double m = alignment.matches;
    const double precision = m / candidate.size();
    const double recall = m / reference.size();
    const double f = precision * recall /
                     (alpha * precision + (1.0 - alpha) * recall);
    const double frag = static_cast<double>(alignment.chunks) / m;
    const double penalty = gamma * std::pow(frag, beta);
    return f * (1.0 - penalty);
}

EvalResult evaluate(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
    if (pairs.empty()) throw EmptyInput("no text pairs to score");

    EvalResult result;
    result.per_sample.reserve(pairs.size());
    for (const auto& [generated, reference] : pairs) {
        const auto cand = plain_tokens(generated);
        const auto ref = plain_tokens(reference);
        MetricScore score;
        score.bleu = bleu(cand, ref);
        score.rouge_l = rouge_l(cand, ref);
        score.meteor = meteor(cand, ref);
        result.per_sample.push_back(score);
        result.mean.bleu += score.bleu;
        result.mean.rouge_l += score.rouge_l;
        result.mean.meteor += score.meteor;
    }
    const double n = static_cast<double>(pairs.size());
    result.mean.bleu /= n;
    result.mean.rouge_l /= n;
    result.mean.meteor /= n;
    return result;
}

} // namespace codeshot
