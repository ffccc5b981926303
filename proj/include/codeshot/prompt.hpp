#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "codeshot/corpus.hpp"
#include "codeshot/gateway.hpp"
#include "codeshot/similarity.hpp"

namespace codeshot {

// Prompt layout for one template family. Three pieces of text with named
// placeholders:
//   zero_shot    uses {code}; emitted verbatim when there are no examples
//   example_slot uses {code} and {explanation}; one copy per demonstration
//   frame        uses {examples} and {code}; wraps the few-shot prompt
struct PromptTemplate {
    TemplateFamily family = TemplateFamily::inst_wrapped;
    std::string zero_shot;
    std::string example_slot;
    std::string frame;
};

// Built-in layouts. The zero-shot texts are the canonical instruction
// prompts for each family; the few-shot layout is this project's own
// Snippet:/Summary: pairing and is identified as such in report headers.
const PromptTemplate& default_template(TemplateFamily family);

// Reads <family>.zero.txt, <family>.example.txt and <family>.frame.txt from
// a directory, e.g. inst-wrapped.zero.txt. Unknown {placeholders} in any of
// them are rejected.
PromptTemplate load_template(const std::filesystem::path& dir,
                             TemplateFamily family);

// Identifier of the few-shot layout, recorded in report headers so readers
// can tell which prompt arrangement produced the numbers.
std::string_view few_shot_layout_id();

struct PromptBundle {
    std::string text;
    TemplateFamily family = TemplateFamily::inst_wrapped;
    int shots = 0;
    // True when a delimiter collision in snippet text had to be escaped.
    bool escaped = false;
};

// Renders the prompt for a query. Demonstrations arrive ranked best-first
// (as rank() returns them) and are emitted least-similar-first so the
// strongest example sits right next to the query; the query itself renders
// as a snippet with an empty explanation slot. With no examples the
// zero-shot text is emitted verbatim. Snippet text containing the family's
// own delimiters is backslash-escaped and flagged.
PromptBundle render(const CodeSample& query,
                    const std::vector<RankedExample>& examples,
                    const PromptTemplate& tmpl);

// Reduces a raw completion to the first contentful line: strips role
// markers, "Summary:"-style prefixes and wrapping quotes. Output that is
// empty after cleanup is rejected.
std::string strip_output(std::string_view raw);

} // namespace codeshot
