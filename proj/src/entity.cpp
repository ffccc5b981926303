#include "codeshot/entity.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "codeshot/errors.hpp"
#include "codeshot/hash.hpp"

namespace codeshot {

using nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, kEntityTypeCount> kTypeNames = {
    "function",     "class",       "library",     "module",
    "variable",     "value",       "data-type",   "data-structure",
    "algorithm",    "reserved-1",  "reserved-2",  "reserved-3",
    "reserved-4",   "reserved-5",  "reserved-6",  "reserved-7",
    "reserved-8",   "reserved-9",  "reserved-10", "reserved-11",
};

std::string to_lower(std::string_view text) {
    std::string out(text);
    for (auto& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace

std::string_view entity_type_name(EntityType type) {
    return kTypeNames[static_cast<std::size_t>(type)];
}

std::optional<EntityType> parse_entity_type(std::string_view name) {
    for (std::size_t i = 0; i < kEntityTypeCount; ++i)
        if (kTypeNames[i] == name) return static_cast<EntityType>(i);
    return std::nullopt;
}

const std::array<EntityType, kEntityTypeCount>& entity_registry() {
    static const auto registry = [] {
        std::array<EntityType, kEntityTypeCount> r{};
        for (std::size_t i = 0; i < kEntityTypeCount; ++i)
            r[i] = static_cast<EntityType>(i);
        return r;
    }();
    return registry;
}

std::string_view entity_rules_version() { return "r20v1"; }

void EntitySet::add(EntityType type, std::string_view surface) {
    if (surface.empty()) return;
    sets_[static_cast<std::size_t>(type)].insert(to_lower(surface));
}

bool EntitySet::empty() const {
    return std::all_of(sets_.begin(), sets_.end(),
                       [](const auto& s) { return s.empty(); });
}

std::size_t EntitySet::total_surfaces() const {
    std::size_t n = 0;
    for (const auto& s : sets_) n += s.size();
    return n;
}

// ---- lexical scanner ------------------------------------------------------

namespace {

enum class LexKind { identifier, number, text, punct };

struct Lexeme {
    LexKind kind;
    std::string value; // identifier/number spelling, string content, or punct char
    std::size_t line;
};

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_'; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_'; }

bool is_string_prefix(std::string_view word) {
    if (word.size() > 2) return false;
    for (char c : word) {
        switch (std::tolower(static_cast<unsigned char>(c))) {
        case 'r': case 'b': case 'u': case 'f': break;
        default: return false;
        }
    }
    return !word.empty();
}

// Splits a snippet into identifiers, number literals, string contents and
// single punctuation characters. Comments vanish; string prefixes (r"", f"")
// fold into the literal; lines are tracked so import clauses can end.
std::vector<Lexeme> scan(std::string_view code, Language lang) {
    std::vector<Lexeme> out;
    std::size_t i = 0, line = 1;
    const std::size_t n = code.size();

    auto peek = [&](std::size_t at) -> char {
        return at < n ? code[at] : '\0';
    };

    auto scan_string = [&](char quote, bool triple) {
        std::string content;
        while (i < n) {
            if (code[i] == '\\' && i + 1 < n) {
                content.push_back(code[i + 1]);
                i += 2;
                continue;
            }
            if (code[i] == '\n') ++line;
            if (triple) {
                if (code[i] == quote && peek(i + 1) == quote &&
                    peek(i + 2) == quote) {
                    i += 3;
                    break;
                }
            } else if (code[i] == quote) {
                ++i;
                break;
            }
            content.push_back(code[i]);
            ++i;
        }
        out.push_back({LexKind::text, std::move(content), line});
    };

    while (i < n) {
        const char c = code[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        // Comments.
        if (lang == Language::python && c == '#') {
            while (i < n && code[i] != '\n') ++i;
            continue;
        }
        if (lang == Language::java && c == '/' && peek(i + 1) == '/') {
            while (i < n && code[i] != '\n') ++i;
            continue;
        }
        if (lang == Language::java && c == '/' && peek(i + 1) == '*') {
            i += 2;
            while (i < n && !(code[i] == '*' && peek(i + 1) == '/')) {
                if (code[i] == '\n') ++line;
                ++i;
            }
            i = std::min(i + 2, n);
            continue;
        }
        // String and char literals.
        if (c == '"' || c == '\'') {
            ++i;
            if (lang == Language::python && peek(i) == c && peek(i + 1) == c) {
                i += 2;
                scan_string(c, true);
            } else {
                scan_string(c, false);
            }
            continue;
        }
        // Numbers: digits plus trailing word chars (hex, exponents) and
        // decimal points followed by a digit.
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = i;
            while (i < n &&
                   (is_ident_char(static_cast<unsigned char>(code[i])) ||
                    (code[i] == '.' &&
                     std::isdigit(static_cast<unsigned char>(peek(i + 1))))))
                ++i;
            out.push_back({LexKind::number,
                           std::string(code.substr(start, i - start)), line});
            continue;
        }
        if (is_ident_start(static_cast<unsigned char>(c))) {
            std::size_t start = i;
            while (i < n && is_ident_char(static_cast<unsigned char>(code[i])))
                ++i;
            std::string word(code.substr(start, i - start));
            if (lang == Language::python && is_string_prefix(word) &&
                (peek(i) == '"' || peek(i) == '\'')) {
                continue; // r"..." / f'...': the prefix is part of the literal
            }
            out.push_back({LexKind::identifier, std::move(word), line});
            continue;
        }
        out.push_back({LexKind::punct, std::string(1, c), line});
        ++i;
    }
    return out;
}

// Marks which lexemes sit inside an import clause: from the import keyword
// to the end of the line (Python) or the closing semicolon (Java).
std::vector<bool> import_clause_mask(const std::vector<Lexeme>& lexemes,
                                     Language lang) {
    const auto& intro = import_intro_words(lang);
    std::vector<bool> mask(lexemes.size(), false);
    bool active = false;
    std::size_t clause_line = 0;
    for (std::size_t i = 0; i < lexemes.size(); ++i) {
        const auto& lx = lexemes[i];
        if (active) {
            const bool line_break =
                lang == Language::python && lx.line != clause_line;
            const bool terminator = lx.kind == LexKind::punct && lx.value == ";";
            if (line_break || terminator) {
                active = false;
            } else {
                mask[i] = true;
                continue;
            }
        }
        if (lx.kind == LexKind::identifier && intro.count(lx.value) > 0) {
            active = true;
            clause_line = lx.line;
        }
    }
    return mask;
}

} // namespace

// The rule ladder, first match wins:
//   1. names inside import clauses ................ library
//   2. builtin type names (wins over keywords) .... data-type
//   3. reserved words ............................. dropped
//   4. name right after a declaration keyword ..... class
//   5. name followed by '(' ....................... function
//   6. head of a dotted chain naming a known or
//      imported root .............................. library
//   7. Java only: name directly before another
//      name (declared-type position) .............. class
//   8. anything left .............................. variable
// Literals always land in value. Assignment targets, bare arguments and
// chain members like os.path.join's "path" all end up in rule 8.
EntitySet LexicalExtractor::extract(std::string_view code, Language lang) const {
    if (code.empty()) throw ValidationError("cannot extract from empty code");
    if (!supports(lang))
        throw UnsupportedLanguage(std::string(to_string(lang)) +
                                  " is not handled by " + id());

    const auto lexemes = scan(code, lang);
    const auto in_import = import_clause_mask(lexemes, lang);
    const auto& reserved = reserved_words(lang);
    const auto& types = builtin_type_names(lang);
    const auto& class_intro = class_intro_words(lang);
    const auto& roots = known_library_roots(lang);

    std::unordered_set<std::string> imported;
    for (std::size_t i = 0; i < lexemes.size(); ++i)
        if (in_import[i] && lexemes[i].kind == LexKind::identifier)
            imported.insert(to_lower(lexemes[i].value));

    EntitySet out;
    for (std::size_t i = 0; i < lexemes.size(); ++i) {
        const auto& lx = lexemes[i];
        if (lx.kind == LexKind::number || lx.kind == LexKind::text) {
            out.add(EntityType::value, lx.value);
            continue;
        }
        if (lx.kind != LexKind::identifier) continue;

        const Lexeme* prev = i > 0 ? &lexemes[i - 1] : nullptr;
        const Lexeme* next = i + 1 < lexemes.size() ? &lexemes[i + 1] : nullptr;

        if (in_import[i]) {
            if (reserved.count(lx.value) == 0)
                out.add(EntityType::library, lx.value);
            continue;
        }
        if (lang == Language::java && prev && prev->kind == LexKind::punct &&
            prev->value == "@")
            continue; // annotation names carry no signal
        if (types.count(lx.value) > 0) {
            out.add(EntityType::data_type, lx.value);
            continue;
        }
        if (reserved.count(lx.value) > 0) continue;
        if (prev && prev->kind == LexKind::identifier &&
            class_intro.count(prev->value) > 0) {
            out.add(EntityType::class_type, lx.value);
            continue;
        }
        if (next && next->kind == LexKind::punct && next->value == "(") {
            out.add(EntityType::function, lx.value);
            continue;
        }
        const bool after_dot =
            prev && prev->kind == LexKind::punct && prev->value == ".";
        if (!after_dot && next && next->kind == LexKind::punct &&
            next->value == "." &&
            (imported.count(to_lower(lx.value)) > 0 ||
             roots.count(lx.value) > 0)) {
            out.add(EntityType::library, lx.value);
            continue;
        }
        if (lang == Language::java && next &&
            next->kind == LexKind::identifier &&
            reserved.count(next->value) == 0) {
            out.add(EntityType::class_type, lx.value);
            continue;
        }
        out.add(EntityType::variable, lx.value);
    }
    return out;
}

std::string LexicalExtractor::id() const {
    return "local-lexical:" + std::string(entity_rules_version());
}

bool LexicalExtractor::supports(Language) const { return true; }

// ---- remote backend -------------------------------------------------------

RemoteExtractor::RemoteExtractor(LlmGateway& gateway, ModelTarget target,
                                 GenerationParams params)
    : gateway_(&gateway), target_(std::move(target)), params_(params) {}

EntitySet RemoteExtractor::extract(std::string_view code, Language lang) const {
    if (code.empty()) throw ValidationError("cannot extract from empty code");
    if (!supports(lang))
        throw UnsupportedLanguage(std::string(to_string(lang)) +
                                  " is not handled by " + id());

    const std::string lowered_code = to_lower(code);
    EntitySet out;
    for (EntityType type : entity_registry()) {
        const auto name = entity_type_name(type);
        if (name.starts_with("reserved-")) continue;

        std::string prompt = "List every ";
        prompt += name;
        prompt += " entity that appears in the following ";
        prompt += to_string(lang);
        prompt += " code. Reply with the names only, comma separated, or "
                  "NONE if there are none.\nCode: ";
        prompt += code;

        const std::string reply =
            gateway_->generate(prompt, target_, params_);

        // Comma/newline separated names; anything not present in the
        // snippet is treated as hallucinated and dropped.
        std::size_t kept = 0;
        std::string surface;
        auto flush = [&] {
            while (!surface.empty() &&
                   (surface.front() == '"' || surface.front() == '\'' ||
                    surface.front() == '`'))
                surface.erase(surface.begin());
            while (!surface.empty() &&
                   (surface.back() == '"' || surface.back() == '\'' ||
                    surface.back() == '`' || surface.back() == '.'))
                surface.pop_back();
            if (!surface.empty() && surface != "none" &&
                lowered_code.find(surface) != std::string::npos) {
                out.add(type, surface);
                ++kept;
            }
            surface.clear();
        };
        for (char c : to_lower(reply)) {
            if (c == ',' || c == '\n' || c == ';') {
                flush();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                if (!surface.empty()) surface.push_back(c); // trim leading only
            } else {
                surface.push_back(c);
            }
        }
        flush();
        if (kept == 0 && !reply.empty() && to_lower(reply).find("none") ==
                                               std::string::npos) {
            std::fprintf(stderr,
                         "warning: unparseable %s reply, keeping empty set\n",
                         std::string(name).c_str());
        }
    }
    return out;
}

std::string RemoteExtractor::id() const {
    return "remote-ner:" + target_.name + ":" +
           std::string(entity_rules_version());
}

bool RemoteExtractor::supports(Language) const { return true; }

int RemoteExtractor::max_in_flight() const {
    return gateway_->config().max_in_flight;
}

// ---- cache ------------------------------------------------------------------

namespace {

ordered_json entity_set_to_json(const EntitySet& set) {
    ordered_json obj = ordered_json::object();
    for (EntityType type : entity_registry()) {
        const auto& surfaces = set.of(type);
        if (surfaces.empty()) continue;
        obj[std::string(entity_type_name(type))] =
            std::vector<std::string>(surfaces.begin(), surfaces.end());
    }
    return obj;
}

EntitySet entity_set_from_json(const ordered_json& obj) {
    EntitySet set;
    for (const auto& [key, values] : obj.items()) {
        auto type = parse_entity_type(key);
        if (!type) throw UnknownEntityType(key);
        for (const auto& v : values) set.add(*type, v.get<std::string>());
    }
    return set;
}

} // namespace

std::vector<EntityCacheRecord> read_entity_cache(
    const std::filesystem::path& path) {
    std::vector<EntityCacheRecord> records;
    std::ifstream in(path);
    if (!in) return records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            auto obj = ordered_json::parse(line);
            EntityCacheRecord rec;
            rec.id = obj.at("id").get<std::string>();
            rec.code_hash = obj.at("code_hash").get<std::string>();
            rec.backend = obj.at("backend").get<std::string>();
            rec.entities = entity_set_from_json(obj.at("entities"));
            records.push_back(std::move(rec));
        } catch (const std::exception& e) {
            // A damaged cache line costs one recomputation, nothing more.
            std::fprintf(stderr,
                         "warning: skipping entity cache line %zu (%s)\n",
                         line_no, e.what());
        }
    }
    return records;
}

void write_entity_cache(const std::vector<EntityCacheRecord>& records,
                        const std::filesystem::path& path) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out)
            throw ValidationError("cannot write entity cache: " + path.string());
        for (const auto& rec : records) {
            ordered_json obj;
            obj["id"] = rec.id;
            obj["code_hash"] = rec.code_hash;
            obj["backend"] = rec.backend;
            obj["entities"] = entity_set_to_json(rec.entities);
            out << obj.dump() << '\n';
        }
        if (!out) throw ValidationError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

ExtractionBatch extract_corpus(const Corpus& corpus,
                               const EntityExtractor& extractor,
                               const std::filesystem::path& cache_path) {
    std::unordered_map<std::string, const EntityCacheRecord*> cached;
    std::vector<EntityCacheRecord> old_records;
    if (!cache_path.empty()) {
        old_records = read_entity_cache(cache_path);
        for (const auto& rec : old_records) cached[rec.id] = &rec;
    }

    const std::string backend_id = extractor.id();
    const auto& samples = corpus.samples();

    ExtractionBatch batch;
    std::vector<const CodeSample*> todo;
    for (const auto& s : samples) {
        auto it = cached.find(s.id);
        if (it != cached.end() && it->second->backend == backend_id &&
            it->second->code_hash == content_hash(s.code)) {
            batch.sets.emplace(s.id, it->second->entities);
            ++batch.cache_hits;
        } else {
            todo.push_back(&s);
        }
    }

    struct Failure {
        std::size_t ordinal;
        std::string id;
        std::string message;
        ErrorCategory category;
    };
    std::vector<std::optional<EntitySet>> results(todo.size());
    std::vector<Failure> failures;
    std::mutex failures_mu;

    const int workers = std::max(
        1, std::min<int>(extractor.max_in_flight(),
                         static_cast<int>(todo.size())));
    std::atomic<std::size_t> cursor{0};
    auto work = [&] {
        for (;;) {
            const std::size_t j = cursor.fetch_add(1);
            if (j >= todo.size()) return;
            const CodeSample& s = *todo[j];
            try {
                results[j] = extractor.extract(s.code, s.language);
            } catch (const Error& e) {
                std::lock_guard<std::mutex> lock(failures_mu);
                failures.push_back({s.ordinal, s.id, e.what(), e.category()});
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failures_mu);
                failures.push_back(
                    {s.ordinal, s.id, e.what(), ErrorCategory::internal});
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    for (std::size_t j = 0; j < todo.size(); ++j) {
        if (results[j]) {
            batch.sets.emplace(todo[j]->id, std::move(*results[j]));
            ++batch.computed;
        }
    }

    // Persist everything that succeeded, even when about to fail: the next
    // attempt should only redo the broken samples.
    if (!cache_path.empty()) {
        std::vector<EntityCacheRecord> records;
        records.reserve(batch.sets.size());
        for (const auto& s : samples) {
            auto it = batch.sets.find(s.id);
            if (it == batch.sets.end()) continue;
            records.push_back(
                {s.id, content_hash(s.code), backend_id, it->second});
        }
        write_entity_cache(records, cache_path);
    }

    if (!failures.empty()) {
        auto first = std::min_element(
            failures.begin(), failures.end(),
            [](const Failure& a, const Failure& b) { return a.ordinal < b.ordinal; });
        if (first->category == ErrorCategory::upstream)
            throw RemoteBackendError(first->id, first->message);
        throw ValidationError("extraction failed for sample " + first->id +
                              ": " + first->message);
    }
    return batch;
}

} // namespace codeshot
