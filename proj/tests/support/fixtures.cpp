#include "support/fixtures.hpp"

#include <array>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fixtures {

using namespace codeshot;

std::string exact_token_code(std::size_t tokens, std::size_t& counter) {
    std::string code = "f" + std::to_string(counter++) + "(";
    for (std::size_t i = 1; i < tokens; ++i) {
        if (i > 1) code += ", ";
        code += "a" + std::to_string(counter++);
    }
    code += ")";
    return code;
}

namespace {

// Plain English-ish words that no tokenizer drops (not keywords or literal
// words in either language) and that never split on punctuation.
constexpr std::array<const char*, 31> kWordPool = {
    "copies",  "given",   "directory", "listing", "buffer",  "text",
    "lines",   "entries", "sorted",    "output",  "path",    "string",
    "number",  "file",    "reads",     "writes",  "creates", "updates",
    "removes", "checks",  "merges",    "tokens",  "summary", "table",
    "queue",   "stack",   "payload",   "records", "fields",  "target",
    "source"};

} // namespace

std::string exact_word_text(std::size_t words, std::size_t& counter) {
    std::string text;
    for (std::size_t i = 0; i < words; ++i) {
        if (i > 0) text += ' ';
        text += kWordPool[counter++ % kWordPool.size()];
    }
    return text;
}

std::string random_snippet(std::mt19937& rng, Language lang) {
    static const std::array<const char*, 8> names = {
        "alpha", "beta", "gamma", "delta", "node", "item", "key", "val"};
    static const std::array<const char*, 5> py_roots = {"os", "scipy", "numpy",
                                                        "json", "re"};
    static const std::array<const char*, 4> java_roots = {"System", "Math",
                                                          "Arrays", "Files"};
    const auto name = [&] { return names[rng() % names.size()]; };
    const auto root = [&]() -> std::string {
        return lang == Language::python ? py_roots[rng() % py_roots.size()]
                                        : java_roots[rng() % java_roots.size()];
    };

    std::string out;
    const std::size_t statements = 1 + rng() % 3;
    for (std::size_t s = 0; s < statements; ++s) {
        if (s > 0) out += lang == Language::python ? "; " : " ";
        std::string stmt;
        switch (rng() % 4) {
        case 0:
            stmt = std::string(name()) + " = " + root() + "." + name() + "(" +
                   name() + ")";
            break;
        case 1:
            stmt = std::string(name()) + "(" + name() + ", " +
                   std::to_string(rng() % 100) + ")";
            break;
        case 2:
            stmt = std::string(name()) + "." + name() + "()";
            break;
        default:
            stmt = std::string(name()) + " = " + name();
            break;
        }
        if (lang == Language::java) stmt += ";";
        out += stmt;
    }
    return out;
}

Corpus random_corpus(std::mt19937& rng, std::size_t n, Language lang) {
    std::vector<CodeSample> samples;
    std::size_t words = rng() % kWordPool.size();
    for (std::size_t i = 0; i < n; ++i) {
        CodeSample s;
        std::string num = std::to_string(i);
        s.id = "s" + std::string(num.size() < 3 ? 3 - num.size() : 0, '0') + num;
        s.code = random_snippet(rng, lang);
        s.explanation = exact_word_text(5 + rng() % 5, words);
        s.language = lang;
        if (i == 0)
            s.split = Split::train;
        else if (i + 1 == n)
            s.split = Split::test;
        else
            s.split = rng() % 5 == 0 ? Split::test : Split::train;
        samples.push_back(std::move(s));
    }
    return Corpus::from_samples(std::move(samples),
                                lang == Language::python
                                    ? Level::inline_snippet
                                    : Level::function);
}

EntitySetMap extract_all(const Corpus& corpus) {
    LexicalExtractor extractor;
    EntitySetMap map;
    for (const auto& s : corpus.samples())
        map[s.id] = extractor.extract(s.code, s.language);
    return map;
}

EmbeddingMap random_embeddings(std::mt19937& rng, const Corpus& corpus) {
    std::uniform_real_distribution<double> component(-1.0, 1.0);
    EmbeddingMap map;
    std::vector<const EmbeddingVector*> previous;
    for (const auto& s : corpus.samples()) {
        EmbeddingVector v;
        v.provider_id = "test:rand";
        if (!previous.empty() && rng() % 3 == 0) {
            v = *previous[rng() % previous.size()]; // deliberate tie
        } else {
            v.values.resize(8);
            for (auto& x : v.values) x = component(rng);
            v.values[0] += 1.5; // keep it clearly non-zero
        }
        auto [it, inserted] = map.emplace(s.id, std::move(v));
        (void)inserted;
        previous.push_back(&it->second);
    }
    return map;
}

namespace {

std::string padded(std::size_t i, std::size_t width) {
    std::string num = std::to_string(i);
    return std::string(num.size() < width ? width - num.size() : 0, '0') + num;
}

void append_block(std::vector<CodeSample>& out, const std::string& id_prefix,
                  std::size_t count, Split split, Language lang,
                  std::optional<Intent> intent, std::size_t code_tokens,
                  std::size_t text_words, std::size_t& counter) {
    std::size_t words = counter;
    for (std::size_t i = 0; i < count; ++i) {
        CodeSample s;
        s.id = id_prefix + padded(i, 5);
        s.code = exact_token_code(code_tokens, counter);
        s.explanation = exact_word_text(text_words, words);
        s.language = lang;
        s.intent = intent;
        s.split = split;
        out.push_back(std::move(s));
    }
}

} // namespace

Corpus inline_python_fixture() {
    std::vector<CodeSample> samples;
    std::size_t counter = 0;
    append_block(samples, "cn-tr-", 1666, Split::train, Language::python,
                 std::nullopt, 14, 15, counter);
    append_block(samples, "cn-te-", 350, Split::test, Language::python,
                 std::nullopt, 14, 14, counter);
    return Corpus::from_samples(std::move(samples), Level::inline_snippet);
}

Corpus java_function_fixture() {
    struct Block {
        Intent intent;
        const char* tag;
        std::size_t train, test;
        std::size_t train_code, test_code;
        std::size_t train_text, test_text;
    };
    static const Block blocks[] = {
        {Intent::how_to_use, "use", 838, 37, 75, 65, 13, 13},
        {Intent::property, "prop", 5016, 292, 70, 74, 13, 13},
        {Intent::why, "why", 5935, 297, 82, 83, 12, 12},
        {Intent::how_it_is_done, "done", 11478, 507, 90, 90, 15, 14},
        {Intent::what, "what", 28991, 2158, 87, 87, 12, 11},
    };

    std::vector<CodeSample> samples;
    samples.reserve(55549);
    std::size_t counter = 0;
    for (const auto& b : blocks) {
        const std::string prefix = "tl-" + std::string(b.tag) + "-";
        append_block(samples, prefix + "tr-", b.train, Split::train,
                     Language::java, b.intent, b.train_code, b.train_text,
                     counter);
        append_block(samples, prefix + "te-", b.test, Split::test,
                     Language::java, b.intent, b.test_code, b.test_text,
                     counter);
    }
    return Corpus::from_samples(std::move(samples), Level::function);
}

std::vector<std::string> random_sentence(std::mt19937& rng, std::size_t min_len,
                                         std::size_t max_len,
                                         std::size_t vocab) {
    const std::size_t len = min_len + rng() % (max_len - min_len + 1);
    std::vector<std::string> words;
    for (std::size_t i = 0; i < len; ++i)
        words.push_back("w" + std::to_string(rng() % vocab));
    return words;
}

TempDir::TempDir() {
    std::string name = "/tmp/codeshot-test-XXXXXX";
    if (::mkdtemp(name.data()) == nullptr)
        throw std::runtime_error("mkdtemp failed");
    path_ = name;
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace fixtures
