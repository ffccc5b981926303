// Acceptance checks for the demonstration-selection toolchain. Each numbered
// check prints one [PASS]/[FAIL] line; the exit code is the failure count.
//
// Usage: codeshot_acceptance <path-to-codeshot> <path-to-codeshot-stubllm>
// The two binary paths are needed by the end-to-end CLI checks (7 and 8).

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "codeshot/corpus.hpp"
#include "codeshot/embedding.hpp"
#include "codeshot/entity.hpp"
#include "codeshot/errors.hpp"
#include "codeshot/metrics.hpp"
#include "codeshot/report.hpp"
#include "codeshot/similarity.hpp"
#include "codeshot/tokenizer.hpp"
#include "support/fixtures.hpp"
#include "support/rank_oracle.hpp"
#include "support/reference_metrics.hpp"

using namespace codeshot;

namespace {

struct Criterion {
    bool ok = true;
    std::vector<std::string> notes;

    void require(bool cond, const std::string& note) {
        if (!cond) {
            ok = false;
            notes.push_back(note);
        }
    }
};

double ms_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
}

// Best-of-n wall time of one call, after a warmup call.
template <typename F>
double best_ms(int rounds, F&& f) {
    f();
    double best = 1e300;
    for (int i = 0; i < rounds; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, ms_since(t0));
    }
    return best;
}

bool within_pct(double got, double want, double pct) {
    return std::fabs(got - want) <= std::fabs(want) * (pct / 100.0);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

CodeSample make_sample(std::string id, std::string code, std::string explanation,
                  Split split, Language lang = Language::python,
                  std::optional<Intent> intent = std::nullopt) {
    CodeSample s;
    s.id = std::move(id);
    s.code = std::move(code);
    s.explanation = std::move(explanation);
    s.language = lang;
    s.intent = intent;
    s.split = split;
    return s;
}

// ---- subprocess plumbing for the CLI checks --------------------------------

std::string shell_quote(const std::string& s) { return "'" + s + "'"; }

int run_shell(const std::string& command) {
    const int rc = std::system(command.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string safe_slurp(const std::filesystem::path& path) {
    try {
        return fixtures::slurp(path);
    } catch (const std::exception&) {
        return "<no log file>";
    }
}

// Launches a child process, captures the first stdout line (the endpoint the
// stub server prints), and terminates the child on destruction.
class ChildServer {
public:
    ChildServer(const std::string& binary,
                const std::vector<std::string>& args) {
        int fds[2];
        if (pipe(fds) != 0) return;
        pid_ = fork();
        if (pid_ == 0) {
            dup2(fds[1], STDOUT_FILENO);
            close(fds[0]);
            close(fds[1]);
            std::vector<char*> argv;
            argv.push_back(const_cast<char*>(binary.c_str()));
            for (const auto& a : args)
                argv.push_back(const_cast<char*>(a.c_str()));
            argv.push_back(nullptr);
            execv(binary.c_str(), argv.data());
            _exit(127);
        }
        close(fds[1]);
        if (pid_ > 0) {
            char c;
            while (read(fds[0], &c, 1) == 1 && c != '\n')
                first_line_.push_back(c);
        }
        close(fds[0]);
    }

    ~ChildServer() {
        if (pid_ > 0) {
            kill(pid_, SIGTERM);
            int status = 0;
            waitpid(pid_, &status, 0);
        }
    }

    const std::string& first_line() const { return first_line_; }
    bool running() const { return pid_ > 0 && !first_line_.empty(); }

private:
    pid_t pid_ = -1;
    std::string first_line_;
};

// ---- 1: extractor worked example --------------------------------------------

Criterion criterion_extractor_golden() {
    Criterion c;
    const LexicalExtractor extractor;
    const EntitySet got =
        extractor.extract("print(os.listdir(dname))", Language::python);

    EntitySet want;
    want.add(EntityType::function, "print");
    want.add(EntityType::function, "listdir");
    want.add(EntityType::library, "os");
    want.add(EntityType::variable, "dname");
    c.require(got == want, "extracted entity set differs from the golden set");

    const double ms = best_ms(5, [&] {
        const EntitySet again =
            extractor.extract("print(os.listdir(dname))", Language::python);
        if (again.empty()) std::abort(); // keep the call observable
    });
    c.require(ms < 1.0, "extraction took " + fmt(ms) + " ms (budget 1 ms)");
    return c;
}

// ---- 2: entity retrieval on the worked three-candidate corpus ---------------

Criterion criterion_entity_retrieval() {
    Criterion c;
    const Corpus corpus = Corpus::from_samples(
        {
            make_sample("os-print", "print(os.listdir(dname))",
                   "prints the directory entries", Split::train),
            make_sample("os-filter",
                   "r += [e for e in os.listdir(folder) if e.endswith('.c')]",
                   "collects the c files of a folder", Split::train),
            make_sample("scipy-matrix", "x = scipy.matrix([1, 2, 3]).transpose()",
                   "builds a transposed matrix", Split::train),
            make_sample("query", "os.mkdir(path)", "creates a directory",
                   Split::test),
        },
        Level::inline_snippet);

    const EntitySetMap entities = fixtures::extract_all(corpus);
    const CodeTokenizer tokenizer(Language::python);
    const EmbeddingMap no_embeddings;
    const RankInputs inputs{&tokenizer, &entities, &no_embeddings};

    SelectionConfig config;
    config.strategy = Strategy::ner;
    config.k = 3;

    const CodeSample& query = *corpus.find("query");
    const auto ranked = rank(query, corpus, config, inputs);

    c.require(ranked.size() == 3, "expected 3 ranked candidates");
    if (ranked.size() == 3) {
        c.require(ranked[0].sample.id == "os-print" &&
                      ranked[1].sample.id == "os-filter",
                  "the two os-library snippets are not ranked first");
        c.require(ranked[2].sample.id == "scipy-matrix",
                  "the scipy snippet is not ranked last");
        c.require(ranked[0].score == 1.0 && ranked[1].score == 1.0,
                  "os snippets should score exactly the shared-library 1.0");
        c.require(ranked[2].score == 0.0,
                  "the scipy snippet shares no weighted entity; score must be 0");
    }

    const double ms = best_ms(5, [&] {
        const auto again = rank(query, corpus, config, inputs);
        if (again.empty()) std::abort();
    });
    c.require(ms < 1.0, "ranking took " + fmt(ms) + " ms (budget 1 ms)");
    return c;
}

// ---- 3: ranking equals the brute-force oracle --------------------------------

Criterion criterion_rank_oracle() {
    Criterion c;
    std::mt19937 rng(20240817);
    const auto t0 = std::chrono::steady_clock::now();

    for (int round = 0; round < 100 && c.ok; ++round) {
        const Language lang = (round % 2 == 0) ? Language::python : Language::java;
        const std::size_t n = 2 + rng() % 199; // corpus size in [2, 200]
        const Corpus corpus = fixtures::random_corpus(rng, n, lang);
        const CodeTokenizer tokenizer(lang);
        const EntitySetMap entities = fixtures::extract_all(corpus);
        const EmbeddingMap embeddings = fixtures::random_embeddings(rng, corpus);
        const RankInputs inputs{&tokenizer, &entities, &embeddings};

        std::vector<const CodeSample*> test_samples;
        for (const auto& s : corpus.samples())
            if (s.split == Split::test) test_samples.push_back(&s);
        const CodeSample& query = *test_samples[rng() % test_samples.size()];

        for (const Strategy strategy :
             {Strategy::token, Strategy::semantic, Strategy::ner}) {
            SelectionConfig config;
            config.strategy = strategy;
            config.k = 1 + static_cast<int>(rng() % (n + 3));
            if (strategy == Strategy::ner && round % 3 == 0)
                config.weights = EntityWeights::uniform(0.25);

            const auto got = rank(query, corpus, config, inputs);
            const auto want = rankoracle::oracle_rank(query, corpus, config, inputs);
            c.require(got.size() == want.size(),
                      "round " + std::to_string(round) + ": size mismatch");
            for (std::size_t i = 0; i < got.size() && c.ok; ++i) {
                c.require(got[i].sample.id == want[i].sample.id &&
                              got[i].score == want[i].score &&
                              got[i].rank == want[i].rank,
                          "round " + std::to_string(round) + " strategy " +
                              std::string(to_string(strategy)) + " position " +
                              std::to_string(i) + ": " + got[i].sample.id +
                              "/" + fmt(got[i].score) + " vs oracle " +
                              want[i].sample.id + "/" + fmt(want[i].score));
            }
        }
    }

    const double ms = ms_since(t0);
    c.require(ms < 10'000.0,
              "oracle sweep took " + fmt(ms) + " ms (budget 10 s)");
    return c;
}

// ---- 4: metric worked examples and reference agreement -----------------------

Criterion criterion_metric_oracles() {
    Criterion c;
    using V = std::vector<std::string>;

    const double b = bleu(V{"the", "cat", "sat"}, V{"the", "cat", "sat", "down"});
    c.require(std::fabs(b - 0.7165313105737893) < 1e-6,
              "worked bleu example: got " + fmt(b));

    const double r = rouge_l(V{"the", "cat"}, V{"the", "cat", "sat"});
    c.require(std::fabs(r - 0.8) < 1e-6, "worked rouge_l example: got " + fmt(r));

    const double m = meteor(V{"a", "b", "c", "d"}, V{"a", "b", "c", "d"});
    c.require(std::fabs(m - 0.9921875) < 1e-6,
              "worked meteor example: got " + fmt(m));

    std::mt19937 rng(77);
    for (int round = 0; round < 200 && c.ok; ++round) {
        const auto cand = fixtures::random_sentence(rng, 1, 10, 6);
        const auto ref = fixtures::random_sentence(rng, 1, 10, 6);
        const double db = std::fabs(bleu(cand, ref) - refmetrics::ref_bleu(cand, ref));
        const double dr =
            std::fabs(rouge_l(cand, ref) - refmetrics::ref_rouge_l(cand, ref));
        const double dm =
            std::fabs(meteor(cand, ref) - refmetrics::ref_meteor(cand, ref));
        c.require(db <= 1e-6, "round " + std::to_string(round) +
                                  ": bleu deviates from the reference by " + fmt(db));
        c.require(dr <= 1e-6, "round " + std::to_string(round) +
                                  ": rouge_l deviates from the reference by " +
                                  fmt(dr));
        c.require(dm <= 1e-3, "round " + std::to_string(round) +
                                  ": meteor deviates from the reference by " +
                                  fmt(dm));
    }
    return c;
}

// ---- 5: corpus statistics of the two shaped fixtures -------------------------

void check_split(Criterion& c, const std::string& label, const SplitStats& got,
                 std::size_t count, double code_mean, double expl_mean) {
    c.require(got.count == count, label + ": count " + std::to_string(got.count) +
                                      " != " + std::to_string(count));
    c.require(within_pct(got.mean_code_tokens, code_mean, 20.0),
              label + ": mean code tokens " + fmt(got.mean_code_tokens) +
                  " not within 20% of " + fmt(code_mean));
    c.require(within_pct(got.mean_explanation_tokens, expl_mean, 20.0),
              label + ": mean explanation tokens " +
                  fmt(got.mean_explanation_tokens) + " not within 20% of " +
                  fmt(expl_mean));
}

Criterion criterion_dataset_statistics() {
    Criterion c;
    fixtures::TempDir dir;

    {
        const Corpus fixture = fixtures::inline_python_fixture();
        const auto path = dir.file("inline.jsonl");
        write_corpus(fixture, path);
        const Corpus corpus = read_corpus(path);
        const CodeTokenizer tokenizer(corpus.language());
        const CorpusStats stats = corpus_stats(corpus, tokenizer);
        check_split(c, "inline train", stats.train, 1666, 13.92, 14.68);
        check_split(c, "inline test", stats.test, 350, 14.35, 14.06);
        c.require(stats.per_intent.empty(),
                  "unlabelled corpus must carry no per-intent stats");
    }

    {
        const Corpus fixture = fixtures::java_function_fixture();
        const auto path = dir.file("function.jsonl");
        write_corpus(fixture, path);
        const Corpus corpus = read_corpus(path);
        const CodeTokenizer tokenizer(corpus.language());
        const CorpusStats stats = corpus_stats(corpus, tokenizer);

        c.require(stats.train.count == 52258,
                  "function train count " + std::to_string(stats.train.count));
        c.require(stats.test.count == 3291,
                  "function test count " + std::to_string(stats.test.count));

        struct Want {
            Intent intent;
            std::size_t train, test;
            double train_code, train_expl, test_code, test_expl;
        };
        const Want wants[] = {
            {Intent::how_to_use, 838, 37, 75.14, 12.75, 65.41, 12.97},
            {Intent::property, 5016, 292, 69.96, 12.86, 73.5, 12.59},
            {Intent::why, 5935, 297, 82.29, 12.47, 83.38, 12.34},
            {Intent::how_it_is_done, 11478, 507, 89.5, 14.63, 89.94, 14.32},
            {Intent::what, 28991, 2158, 87.26, 11.8, 86.56, 11.12},
        };
        c.require(stats.per_intent.size() == 5, "expected 5 intents");
        for (const Want& w : wants) {
            const auto it = stats.per_intent.find(w.intent);
            if (it == stats.per_intent.end()) {
                c.require(false, "missing intent " + std::string(to_string(w.intent)));
                continue;
            }
            const std::string name(to_string(w.intent));
            check_split(c, name + " train", it->second.first, w.train,
                        w.train_code, w.train_expl);
            check_split(c, name + " test", it->second.second, w.test,
                        w.test_code, w.test_expl);
        }
    }
    return c;
}

// ---- 6: invariant property suites --------------------------------------------

std::set<std::string> random_word_set(std::mt19937& rng, std::size_t max_size,
                                      std::size_t vocab) {
    std::set<std::string> out;
    const std::size_t size = rng() % (max_size + 1);
    for (std::size_t i = 0; i < size; ++i)
        out.insert("w" + std::to_string(rng() % vocab));
    return out;
}

Criterion criterion_invariants() {
    Criterion c;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937 rng(31337);

    // Jaccard: symmetric, inside [0, 1], 1 on equal non-empty sets.
    for (int i = 0; i < 1000 && c.ok; ++i) {
        const auto a = random_word_set(rng, 10, 12);
        const auto b = random_word_set(rng, 10, 12);
        const double ab = jaccard(a, b);
        c.require(ab == jaccard(b, a), "jaccard asymmetry");
        c.require(ab >= 0.0 && ab <= 1.0, "jaccard out of range: " + fmt(ab));
        if (!a.empty())
            c.require(jaccard(a, a) == 1.0, "jaccard(a, a) != 1");
    }

    // Cosine: symmetric, inside [-1, 1].
    for (int i = 0; i < 1000 && c.ok; ++i) {
        const std::size_t dim = 2 + rng() % 5;
        EmbeddingVector a, b;
        std::uniform_real_distribution<double> value(-2.0, 2.0);
        for (std::size_t d = 0; d < dim; ++d) {
            a.values.push_back(value(rng));
            b.values.push_back(value(rng));
        }
        a.values[0] = 1.0 + std::fabs(a.values[0]); // never the zero vector
        b.values[0] = 1.0 + std::fabs(b.values[0]);
        const double ab = cosine(a, b);
        c.require(ab == cosine(b, a), "cosine asymmetry");
        c.require(ab >= -1.0 && ab <= 1.0, "cosine out of range: " + fmt(ab));
    }

    // Zero-weight opacity: surfaces of zero-weight types never move a score.
    const LexicalExtractor extractor;
    for (int i = 0; i < 1000 && c.ok; ++i) {
        const EntitySet q = extractor.extract(
            fixtures::random_snippet(rng, Language::python), Language::python);
        EntitySet d = extractor.extract(
            fixtures::random_snippet(rng, Language::python), Language::python);

        EntityWeights weights;
        EntityType muted;
        if (i % 2 == 0) {
            weights = EntityWeights::defaults();
            const EntityType zeros[] = {EntityType::data_type,
                                        EntityType::variable, EntityType::value};
            muted = zeros[rng() % 3];
        } else {
            weights = EntityWeights::uniform(0.5);
            muted = entity_registry()[rng() % kEntityTypeCount];
            weights.set(muted, 0.0);
        }

        const double before = score_entity(q, d, weights);
        d.add(muted, "mut" + std::to_string(rng() % 7)); // perturb a muted type
        const double after = score_entity(q, d, weights);
        c.require(before == after,
                  "zero-weight type " + std::string(entity_type_name(muted)) +
                      " changed the score: " + fmt(before) + " -> " + fmt(after));
    }

    // Top-k prefix: a smaller k returns a prefix of a larger k's output.
    for (int i = 0; i < 1000 && c.ok; ++i) {
        const Language lang = (i % 2 == 0) ? Language::python : Language::java;
        const std::size_t n = 2 + rng() % 29;
        const Corpus corpus = fixtures::random_corpus(rng, n, lang);
        const CodeTokenizer tokenizer(lang);
        EntitySetMap entities;
        EmbeddingMap embeddings;
        SelectionConfig config;
        config.strategy =
            std::array{Strategy::token, Strategy::semantic, Strategy::ner}[i % 3];
        if (config.strategy == Strategy::ner)
            entities = fixtures::extract_all(corpus);
        else if (config.strategy == Strategy::semantic)
            embeddings = fixtures::random_embeddings(rng, corpus);
        const RankInputs inputs{&tokenizer, &entities, &embeddings};

        std::vector<const CodeSample*> test_samples;
        for (const auto& s : corpus.samples())
            if (s.split == Split::test) test_samples.push_back(&s);
        const CodeSample& query = *test_samples[rng() % test_samples.size()];

        const int k_small = 1 + static_cast<int>(rng() % n);
        const int k_large = k_small + static_cast<int>(rng() % 5);
        SelectionConfig small = config, large = config;
        small.k = k_small;
        large.k = k_large;
        const auto a = rank(query, corpus, small, inputs);
        const auto b = rank(query, corpus, large, inputs);
        c.require(a.size() <= b.size(), "prefix sizes inverted");
        for (std::size_t j = 0; j < a.size() && c.ok; ++j)
            c.require(a[j].sample.id == b[j].sample.id &&
                          a[j].score == b[j].score && a[j].rank == b[j].rank,
                      "top-k prefix broken at position " + std::to_string(j));
    }

    // Shuffle invariance: storage order never changes the ranking.
    for (int i = 0; i < 1000 && c.ok; ++i) {
        const Language lang = (i % 2 == 0) ? Language::python : Language::java;
        const std::size_t n = 2 + rng() % 29;
        const Corpus corpus = fixtures::random_corpus(rng, n, lang);
        std::vector<CodeSample> shuffled = corpus.samples();
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const Corpus reordered =
            Corpus::from_ingested(std::move(shuffled), corpus.level());

        const CodeTokenizer tokenizer(lang);
        EntitySetMap entities;
        EmbeddingMap embeddings;
        SelectionConfig config;
        config.strategy =
            std::array{Strategy::token, Strategy::semantic, Strategy::ner}[i % 3];
        config.k = 1 + static_cast<int>(rng() % n);
        if (config.strategy == Strategy::ner)
            entities = fixtures::extract_all(corpus);
        else if (config.strategy == Strategy::semantic)
            embeddings = fixtures::random_embeddings(rng, corpus);
        const RankInputs inputs{&tokenizer, &entities, &embeddings};

        std::vector<const CodeSample*> test_samples;
        for (const auto& s : corpus.samples())
            if (s.split == Split::test) test_samples.push_back(&s);
        const CodeSample& query = *test_samples[rng() % test_samples.size()];

        const auto a = rank(query, corpus, config, inputs);
        const auto b = rank(query, reordered, config, inputs);
        c.require(a.size() == b.size(), "shuffle changed the result size");
        for (std::size_t j = 0; j < a.size() && c.ok; ++j)
            c.require(a[j].sample.id == b[j].sample.id &&
                          a[j].score == b[j].score && a[j].rank == b[j].rank,
                      "shuffle changed position " + std::to_string(j));
    }

    // Metric range: all three scores stay inside [0, 1].
    for (int i = 0; i < 1000 && c.ok; ++i) {
        const auto cand = fixtures::random_sentence(rng, 1, 12, 5);
        const auto ref = fixtures::random_sentence(rng, 1, 12, 5);
        for (const double v :
             {bleu(cand, ref), rouge_l(cand, ref), meteor(cand, ref)}) {
            c.require(v >= 0.0 && v <= 1.0, "metric out of range: " + fmt(v));
        }
    }

    const double ms = ms_since(t0);
    c.require(ms < 30'000.0,
              "invariant suites took " + fmt(ms) + " ms (budget 30 s)");
    return c;
}

// ---- 7: end-to-end CLI determinism against the bundled stub ------------------

Criterion criterion_cli_determinism(const std::string& codeshot_bin,
                                    const std::string& stub_bin) {
    Criterion c;
    fixtures::TempDir dir;

    // Identifiers are pairwise disjoint so the echo stub can only ever match
    // the query's own code inside a rendered prompt.
    const Corpus corpus = Corpus::from_samples(
        {
            make_sample("d1", "alpha_one(a)", "runs the first helper", Split::train),
            make_sample("d2", "beta_two(b)", "runs the second helper", Split::train),
            make_sample("d3", "gamma_three(c)", "runs the third helper", Split::train),
            make_sample("d4", "delta_four(d)", "runs the fourth helper", Split::train),
            make_sample("t1", "epsilon_five(e)", "creates the target directory",
                   Split::test),
            make_sample("t2", "zeta_six(f)", "reads every config line", Split::test),
        },
        Level::inline_snippet);
    const auto corpus_path = dir.file("corpus.jsonl");
    write_corpus(corpus, corpus_path);

    // The stub echoes reference explanations for test snippets only; train
    // codes also appear in prompts (as demonstrations) and must not match.
    std::vector<CodeSample> test_only;
    for (const auto& s : corpus.samples())
        if (s.split == Split::test) test_only.push_back(s);
    const auto stub_corpus_path = dir.file("stub_corpus.jsonl");
    write_corpus(Corpus::from_ingested(std::move(test_only), corpus.level()),
                 stub_corpus_path);

    const ChildServer stub(stub_bin,
                           {"--corpus", stub_corpus_path.string()});
    c.require(stub.running(), "stub endpoint did not start from " + stub_bin);
    if (!stub.running()) return c;
    const std::string endpoint = stub.first_line();

    const auto log_path = dir.file("cli.log");
    const std::string base_command =
        shell_quote(codeshot_bin) + " run --corpus " +
        shell_quote(corpus_path.string()) + " --model stub-model --endpoint " +
        shell_quote(endpoint) + " --k 2 --backoff-ms 1 --completion-cache " +
        shell_quote(dir.file("completions.jsonl").string());

    for (const std::string out : {"out1", "out2"}) {
        const int rc = run_shell(base_command + " --output-dir " +
                                 shell_quote(dir.file(out).string()) + " >> " +
                                 shell_quote(log_path.string()) + " 2>&1");
        c.require(rc == 0, "codeshot run (" + out + ") exited with " +
                               std::to_string(rc) + "; log:\n" +
                               safe_slurp(log_path));
        if (!c.ok) return c;
    }

    const std::string first = fixtures::slurp(dir.file("out1/report.jsonl"));
    const std::string second = fixtures::slurp(dir.file("out2/report.jsonl"));
    c.require(!first.empty(), "first report file is empty");
    c.require(first == second, "the two runs wrote different report bytes");

    const EvalReport report = read_report(dir.file("out1/report.jsonl"));
    c.require(report.aggregate.bleu == 1.0,
              "echoed references must score aggregate bleu exactly 1.0, got " +
                  fmt(report.aggregate.bleu));
    return c;
}

// ---- 8: paired t-test on constant-shifted reports -----------------------------

Criterion criterion_compare_ttest(const std::string& codeshot_bin) {
    Criterion c;
    fixtures::TempDir dir;

    // Scores sit on the 0.001 grid and so does every shifted value, so the
    // 3-decimal rounding inside report writing moves nothing.
    const int n = 40;
    std::vector<std::string> ids;
    EvalResult base, shifted;
    for (int i = 0; i < n; ++i) {
        char id[8];
        std::snprintf(id, sizeof id, "r%02d", i);
        ids.push_back(id);
        const double b = 0.3 + 0.001 * i;
        const double d = 0.1 + 0.01 * ((i % 3) - 1); // 0.09 / 0.10 / 0.11
        base.per_sample.push_back({b, b, b});
        shifted.per_sample.push_back({b + d, b + d, b + d});
    }
    for (const auto& s : base.per_sample) {
        base.mean.bleu += s.bleu / n;
        base.mean.rouge_l += s.rouge_l / n;
        base.mean.meteor += s.meteor / n;
    }
    for (const auto& s : shifted.per_sample) {
        shifted.mean.bleu += s.bleu / n;
        shifted.mean.rouge_l += s.rouge_l / n;
        shifted.mean.meteor += s.meteor / n;
    }

    ReportHeader header;
    header.corpus = "synthetic";
    header.model = "stub-model";
    header.strategy = "token";
    header.template_family = "inst-wrapped";
    header.few_shot_layout = "synthetic";
    header.k = 2;
    ReportHeader contender_header = header;
    contender_header.strategy = "ner";

    const auto base_path = dir.file("baseline.jsonl");
    const auto shifted_path = dir.file("contender.jsonl");
    write_report(make_report(header, ids, base), base_path);
    write_report(make_report(contender_header, ids, shifted), shifted_path);

    const EvalReport baseline = read_report(base_path);
    const EvalReport contender = read_report(shifted_path);
    const ComparisonResult result = compare_reports(baseline, contender);
    c.require(result.metrics.size() == 3, "expected 3 metric comparisons");

    // Closed-form paired t over the same parsed row values.
    std::vector<double> diffs;
    for (int i = 0; i < n; ++i)
        diffs.push_back(contender.rows[i].score.bleu -
                        baseline.rows[i].score.bleu);
    double mean = 0.0;
    for (const double d : diffs) mean += d;
    mean /= n;
    double var = 0.0;
    for (const double d : diffs) var += (d - mean) * (d - mean);
    var /= (n - 1);
    const double t_closed = mean / std::sqrt(var / n);

    for (const auto& metric : result.metrics) {
        c.require(std::fabs(metric.test.t - t_closed) < 1e-9,
                  metric.metric + ": t " + fmt(metric.test.t) +
                      " differs from closed form " + fmt(t_closed));
        c.require(metric.test.df == n - 1,
                  metric.metric + ": df " + std::to_string(metric.test.df));
        c.require(metric.test.p > 0.0 && metric.test.p < 1e-40,
                  metric.metric + ": p " + fmt(metric.test.p) +
                      " implausible for t ~ 75.9 at df 39");
    }
    c.require(std::fabs(t_closed - 75.85679278778001) < 1e-6 * 75.86,
              "closed-form t drifted from the pinned value: " + fmt(t_closed));

    // The compare subcommand itself must accept the same pair of files.
    const auto log_path = dir.file("cli.log");
    const int rc = run_shell(shell_quote(codeshot_bin) + " compare " +
                             shell_quote(base_path.string()) + " " +
                             shell_quote(shifted_path.string()) + " > " +
                             shell_quote(log_path.string()) + " 2>&1");
    c.require(rc == 0, "codeshot compare exited with " + std::to_string(rc) +
                           "; log:\n" + safe_slurp(log_path));
    const std::string printed = safe_slurp(log_path);
    c.require(printed.find("bleu") != std::string::npos &&
                  printed.find("meteor") != std::string::npos,
              "compare output does not mention the metrics");
    return c;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr,
                     "usage: %s <path-to-codeshot> <path-to-codeshot-stubllm>\n",
                     argv[0]);
        return 64;
    }
    const std::string codeshot_bin = argv[1];
    const std::string stub_bin = argv[2];

    int failures = 0;
    int number = 0;
    const auto check = [&](const char* label, auto&& body) {
        ++number;
        Criterion result;
        try {
            result = body();
        } catch (const std::exception& e) {
            result.ok = false;
            result.notes.push_back(std::string("threw: ") + e.what());
        }
        std::printf("[%s] criterion %d: %s\n", result.ok ? "PASS" : "FAIL",
                    number, label);
        for (const auto& note : result.notes)
            std::printf("       %s\n", note.c_str());
        std::fflush(stdout);
        if (!result.ok) ++failures;
    };

    check("entity extraction worked example", criterion_extractor_golden);
    check("entity retrieval on the worked corpus", criterion_entity_retrieval);
    check("ranking equals the brute-force oracle", criterion_rank_oracle);
    check("metric worked examples and reference agreement",
          criterion_metric_oracles);
    check("dataset statistics of the shaped fixtures",
          criterion_dataset_statistics);
    check("similarity, ranking and metric invariants", criterion_invariants);
    check("end-to-end CLI determinism against the stub",
          [&] { return criterion_cli_determinism(codeshot_bin, stub_bin); });
    check("paired t-test through report comparison",
          [&] { return criterion_compare_ttest(codeshot_bin); });
    return failures;
}
