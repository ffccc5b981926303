#include "codeshot/prompt.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "codeshot/errors.hpp"

namespace codeshot {

namespace {

const PromptTemplate kInstTemplate = {
    TemplateFamily::inst_wrapped,
    // zero_shot
    "[INST] <> You are an expert in Programming. Below is a line of python "
    "code that describes a task. Return only one line of summary that "
    "appropriately describes the task that the code is performing. You must "
    "write only summary without any prefix or suffix explanations. Note: The "
    "summary should have minimum 1 words and can have on an average 10 "
    "words. <> {code} [/INST]",
    // example_slot
    "Snippet: {code}\nSummary: {explanation}",
    // frame
    "[INST] <> You are an expert in Programming. Below is a line of python "
    "code that describes a task. Return only one line of summary that "
    "appropriately describes the task that the code is performing. You must "
    "write only summary without any prefix or suffix explanations. Note: The "
    "summary should have minimum 1 words and can have on an average 10 "
    "words. <> {examples}\n\nSnippet: {code}\nSummary: [/INST]",
};

const PromptTemplate kHumanAssistantTemplate = {
    TemplateFamily::human_assistant,
    "#Human: You are a helpful code summarizer. Please describe in simple "
    "english the purpose of the following Python code snippet: {code}\n"
    "#Assistant:",
    "Snippet: {code}\nSummary: {explanation}",
    "#Human: You are a helpful code summarizer. Please describe in simple "
    "english the purpose of the following Python code snippet:\n\n"
    "{examples}\n\nSnippet: {code}\nSummary:\n#Assistant:",
};

// Substitutes {name} placeholders in one left-to-right pass; replacement
// text is never rescanned, so snippets containing "{code}" stay intact.
std::string substitute(
    std::string_view text,
    const std::vector<std::pair<std::string_view, const std::string*>>& slots) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '{') {
            const auto close = text.find('}', i);
            if (close != std::string_view::npos) {
                const auto name = text.substr(i + 1, close - i - 1);
                auto it = std::find_if(slots.begin(), slots.end(),
                                       [&](const auto& s) { return s.first == name; });
                if (it != slots.end()) {
                    out += *it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(text[i]);
        ++i;
    }
    return out;
}

void check_placeholders(std::string_view text,
                        std::initializer_list<std::string_view> allowed,
                        const std::string& where) {
    std::size_t i = 0;
    while ((i = text.find('{', i)) != std::string_view::npos) {
        const auto close = text.find('}', i);
        if (close == std::string_view::npos) break;
        const auto name = text.substr(i + 1, close - i - 1);
        const bool word = !name.empty() &&
                          std::all_of(name.begin(), name.end(), [](char c) {
                              return std::islower(static_cast<unsigned char>(c)) ||
                                     c == '_';
                          });
        if (word && std::find(allowed.begin(), allowed.end(), name) ==
                        allowed.end())
            throw UnknownPlaceholder(std::string(name) + "} in " + where);
        i = close + 1;
    }
}

// Delimiter tokens that must not appear unescaped inside snippet text, per
// family plus the shared pair-labels.
std::vector<std::string_view> delimiters(TemplateFamily family) {
    std::vector<std::string_view> d = {"Snippet:", "Summary:"};
    if (family == TemplateFamily::inst_wrapped) {
        d.push_back("[INST]");
        d.push_back("[/INST]");
    } else {
        d.push_back("#Human:");
        d.push_back("#Assistant:");
    }
    return d;
}

std::string escape_collisions(std::string_view text, TemplateFamily family,
                              bool& escaped) {
    std::string out(text);
    for (auto delim : delimiters(family)) {
        std::size_t pos = 0;
        while ((pos = out.find(delim, pos)) != std::string::npos) {
            out.insert(pos, 1, '\\');
            pos += delim.size() + 1;
            escaped = true;
        }
    }
    return out;
}

} // namespace

const PromptTemplate& default_template(TemplateFamily family) {
    return family == TemplateFamily::inst_wrapped ? kInstTemplate
                                                  : kHumanAssistantTemplate;
}

std::string_view few_shot_layout_id() {
    return "snippet-summary-pairs/most-similar-last/v1";
}

namespace {

std::string read_template_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open template file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    // Editors append a final newline; it is not part of the prompt.
    if (!text.empty() && text.back() == '\n') text.pop_back();
    return text;
}

} // namespace

PromptTemplate load_template(const std::filesystem::path& dir,
                             TemplateFamily family) {
    const std::string base(to_string(family));
    PromptTemplate tmpl;
    tmpl.family = family;
    tmpl.zero_shot = read_template_file(dir / (base + ".zero.txt"));
    tmpl.example_slot = read_template_file(dir / (base + ".example.txt"));
    tmpl.frame = read_template_file(dir / (base + ".frame.txt"));

    check_placeholders(tmpl.zero_shot, {"code"}, base + ".zero.txt");
    check_placeholders(tmpl.example_slot, {"code", "explanation"},
                       base + ".example.txt");
    check_placeholders(tmpl.frame, {"examples", "code"}, base + ".frame.txt");
    return tmpl;
}

PromptBundle render(const CodeSample& query,
                    const std::vector<RankedExample>& examples,
                    const PromptTemplate& tmpl) {
    if (query.code.empty()) throw ValidationError("query has empty code");

    PromptBundle bundle;
    bundle.family = tmpl.family;
    bundle.shots = static_cast<int>(examples.size());

    const std::string query_code =
        escape_collisions(query.code, tmpl.family, bundle.escaped);

    if (examples.empty()) {
        bundle.text = substitute(tmpl.zero_shot, {{"code", &query_code}});
        return bundle;
    }

    // Demonstrations go least-similar-first: the closest example lands
    // directly above the query slot. A blank line separates entries.
    std::string block;
    for (auto it = examples.rbegin(); it != examples.rend(); ++it) {
        const std::string code =
            escape_collisions(it->sample.code, tmpl.family, bundle.escaped);
        const std::string explanation = escape_collisions(
            it->sample.explanation, tmpl.family, bundle.escaped);
        if (!block.empty()) block += "\n\n";
        block += substitute(tmpl.example_slot,
                            {{"code", &code}, {"explanation", &explanation}});
    }

    bundle.text = substitute(tmpl.frame,
                             {{"examples", &block}, {"code", &query_code}});
    return bundle;
}

namespace {

bool iequals_at(std::string_view text, std::size_t at, std::string_view what) {
    if (at + what.size() > text.size()) return false;
    for (std::size_t i = 0; i < what.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(text[at + i])) !=
            std::tolower(static_cast<unsigned char>(what[i])))
            return false;
    }
    return true;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

constexpr std::string_view kLinePrefixes[] = {
    "#assistant:", "#human:", "assistant:", "human:", "[/inst]", "[inst]",
    "summary:",    "output:", "explanation:", "answer:", "response:",
};

bool is_quote(char c) { return c == '"' || c == '\'' || c == '`'; }

} // namespace

std::string strip_output(std::string_view raw) {
    std::size_t start = 0;
    while (start <= raw.size()) {
        const auto end = raw.find('\n', start);
        std::string_view line =
            raw.substr(start, end == std::string_view::npos ? raw.size() - start
                                                            : end - start);
        line = trim(line);
        // Peel role markers and label prefixes until the line stabilises.
        bool stripped = true;
        while (stripped) {
            stripped = false;
            for (auto prefix : kLinePrefixes) {
                if (iequals_at(line, 0, prefix)) {
                    line.remove_prefix(prefix.size());
                    line = trim(line);
                    stripped = true;
                }
            }
        }
        while (!line.empty() && is_quote(line.front())) line.remove_prefix(1);
        while (!line.empty() && is_quote(line.back())) line.remove_suffix(1);
        line = trim(line);
        if (!line.empty()) return std::string(line);
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    throw EmptyGeneration();
}

} // namespace codeshot
