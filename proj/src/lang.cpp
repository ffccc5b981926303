#include "codeshot/lang.hpp"

namespace codeshot {

std::string_view to_string(Language lang) {
    switch (lang) {
    case Language::python: return "python";
    case Language::java: return "java";
    }
    return "?";
}

std::string_view to_string(Split split) {
    return split == Split::train ? "train" : "test";
}

std::string_view to_string(Intent intent) {
    switch (intent) {
    case Intent::how_to_use: return "how-to-use";
    case Intent::property: return "property";
    case Intent::why: return "why";
    case Intent::how_it_is_done: return "how-it-is-done";
    case Intent::what: return "what";
    }
    return "?";
}

std::optional<Language> parse_language(std::string_view text) {
    if (text == "python") return Language::python;
    if (text == "java") return Language::java;
    return std::nullopt;
}

std::optional<Split> parse_split(std::string_view text) {
    if (text == "train") return Split::train;
    if (text == "test") return Split::test;
    return std::nullopt;
}

std::optional<Intent> parse_intent(std::string_view text) {
    if (text == "how-to-use") return Intent::how_to_use;
    if (text == "property") return Intent::property;
    if (text == "why") return Intent::why;
    if (text == "how-it-is-done") return Intent::how_it_is_done;
    if (text == "what") return Intent::what;
    return std::nullopt;
}

} // namespace codeshot
