#include "codeshot/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "codeshot/errors.hpp"

namespace codeshot {

using nlohmann::ordered_json;

std::string_view to_string(Level level) {
    return level == Level::inline_snippet ? "inline" : "function";
}

std::optional<Level> parse_level(std::string_view text) {
    if (text == "inline") return Level::inline_snippet;
    if (text == "function") return Level::function;
    return std::nullopt;
}

Corpus Corpus::validate_and_adopt(std::vector<CodeSample> samples, Level level,
                                  bool reassign_ordinals) {
    if (samples.empty()) throw ValidationError("corpus has no samples");

    std::unordered_set<std::string> seen;
    std::unordered_set<std::size_t> seen_ordinals;
    seen.reserve(samples.size());
    const Language lang = samples.front().language;
    const bool labelled = samples.front().intent.has_value();

    std::size_t ordinal = 0;
    for (auto& s : samples) {
        if (s.id.empty()) throw ValidationError("sample with empty id");
        if (s.code.empty())
            throw ValidationError("sample " + s.id + " has empty code");
        if (s.explanation.empty())
            throw ValidationError("sample " + s.id + " has empty explanation");
        if (!seen.insert(s.id).second) throw DuplicateId(s.id);
        if (s.language != lang)
            throw MixedLanguageCorpus("sample " + s.id + " is " +
                                      std::string(to_string(s.language)) +
                                      " in a " + std::string(to_string(lang)) +
                                      " corpus");
        if (s.intent.has_value() != labelled)
            throw UnlabelledIntent("sample " + s.id +
                                   (labelled ? " lacks an intent label"
                                             : " carries an intent label"));
        if (reassign_ordinals)
            s.ordinal = ordinal++;
        else if (!seen_ordinals.insert(s.ordinal).second)
            throw ValidationError("sample " + s.id +
                                  " repeats an ingestion ordinal");
    }

    Corpus corpus;
    corpus.samples_ = std::move(samples);
    corpus.language_ = lang;
    corpus.level_ = level;
    corpus.intent_labelled_ = labelled;
    return corpus;
}

Corpus Corpus::from_samples(std::vector<CodeSample> samples, Level level) {
    return validate_and_adopt(std::move(samples), level, true);
}

Corpus Corpus::from_ingested(std::vector<CodeSample> samples, Level level) {
    return validate_and_adopt(std::move(samples), level, false);
}

std::size_t Corpus::count(Split split) const {
    std::size_t n = 0;
    for (const auto& s : samples_)
        if (s.split == split) ++n;
    return n;
}

const CodeSample* Corpus::find(const std::string& id) const {
    for (const auto& s : samples_)
        if (s.id == id) return &s;
    return nullptr;
}

namespace {

std::string require_string(const ordered_json& record, const char* key,
                           std::size_t line) {
    auto it = record.find(key);
    if (it == record.end() || !it->is_string())
        throw MalformedRecord(line, std::string("missing string field '") +
                                        key + "'");
    return it->get<std::string>();
}

CodeSample parse_record(const ordered_json& record, std::size_t line) {
    if (!record.is_object())
        throw MalformedRecord(line, "not a JSON object");

    CodeSample s;
    s.id = require_string(record, "id", line);
    s.code = require_string(record, "code", line);
    s.explanation = require_string(record, "explanation", line);

    auto lang = parse_language(require_string(record, "language", line));
    if (!lang) throw MalformedRecord(line, "language must be python or java");
    s.language = *lang;

    auto split = parse_split(require_string(record, "split", line));
    if (!split) throw MalformedRecord(line, "split must be train or test");
    s.split = *split;

    if (auto it = record.find("intent"); it != record.end() && !it->is_null()) {
        if (!it->is_string())
            throw MalformedRecord(line, "intent must be a string");
        auto intent = parse_intent(it->get<std::string>());
        if (!intent)
            throw MalformedRecord(line, "unknown intent '" +
                                            it->get<std::string>() + "'");
        s.intent = *intent;
    }
    return s;
}

// Function-level corpora are the intent-labelled ones in practice; for the
// unlabelled case fall back on the language's usual granularity.
Level infer_level(const std::vector<CodeSample>& samples) {
    if (!samples.empty() && samples.front().intent.has_value())
        return Level::function;
    if (!samples.empty() && samples.front().language == Language::java)
        return Level::function;
    return Level::inline_snippet;
}

} // namespace

Corpus read_corpus(std::istream& in, const std::string& source_name) {
    std::vector<CodeSample> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json record;
        try {
            record = ordered_json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw MalformedRecord(line_no, e.what());
        }
        samples.push_back(parse_record(record, line_no));
    }
    if (samples.empty())
        throw ValidationError("no records in " + source_name);
    const Level level = infer_level(samples);
    return Corpus::from_samples(std::move(samples), level);
}

Corpus read_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open corpus file: " + path.string());
    return read_corpus(in, path.string());
}

std::string corpus_to_string(const Corpus& corpus) {
    std::ostringstream out;
    for (const auto& s : corpus.samples()) {
        ordered_json record;
        record["id"] = s.id;
        record["code"] = s.code;
        record["explanation"] = s.explanation;
        record["language"] = to_string(s.language);
        record["split"] = to_string(s.split);
        if (s.intent) record["intent"] = to_string(*s.intent);
        out << record.dump() << '\n';
    }
    return out.str();
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ValidationError("cannot write corpus file: " + path.string());
    out << corpus_to_string(corpus);
    if (!out) throw ValidationError("short write to " + path.string());
}

Corpus filter_by_intent(const Corpus& corpus, Intent intent) {
    if (!corpus.intent_labelled())
        throw UnlabelledIntent("corpus carries no intent labels to filter on");
    std::vector<CodeSample> kept;
    for (const auto& s : corpus.samples())
        if (s.intent == intent) kept.push_back(s);
    if (kept.empty())
        throw ValidationError("no samples with intent " +
                              std::string(to_string(intent)));
    // Keep ingestion ordinals so ranking tie-breaks are unaffected by the cut.
    return Corpus::from_ingested(std::move(kept), corpus.level());
}

namespace {

struct Accumulator {
    std::size_t count = 0;
    std::size_t code_tokens = 0;
    std::size_t explanation_tokens = 0;

    SplitStats stats() const {
        SplitStats s;
        s.count = count;
        if (count > 0) {
            s.mean_code_tokens = static_cast<double>(code_tokens) / count;
            s.mean_explanation_tokens =
                static_cast<double>(explanation_tokens) / count;
        }
        return s;
    }
};

} // namespace

CorpusStats corpus_stats(const Corpus& corpus, const CodeTokenizer& tokenizer) {
    Accumulator train, test;
    std::map<Intent, std::pair<Accumulator, Accumulator>> per_intent;

    for (const auto& s : corpus.samples()) {
        const std::size_t code_n = tokenizer.tokens(s.code).size();
        const std::size_t expl_n = tokenizer.tokens(s.explanation).size();
        auto feed = [&](Accumulator& acc) {
            ++acc.count;
            acc.code_tokens += code_n;
            acc.explanation_tokens += expl_n;
        };
        feed(s.split == Split::train ? train : test);
        if (s.intent) {
            auto& pair = per_intent[*s.intent];
            feed(s.split == Split::train ? pair.first : pair.second);
        }
    }

    CorpusStats stats;
    stats.train = train.stats();
    stats.test = test.stats();
    for (const auto& [intent, accs] : per_intent)
        stats.per_intent[intent] = {accs.first.stats(), accs.second.stats()};
    return stats;
}

} // namespace codeshot
