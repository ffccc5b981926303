#pragma once

#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "codeshot/lang.hpp"

namespace codeshot {

// Word tables used by the tokenizer and the entity extractor. All accessors
// return references to static tables; safe to call concurrently.

// Reserved words of the language, exact case (Python keeps True/False/None
// capitalised; Java is all lowercase plus true/false/null).
const std::unordered_set<std::string>& reserved_words(Language lang);

// Lowercased reserved words plus the shared literal words true/false/none/null.
// This is what the similarity tokenizer drops.
const std::unordered_set<std::string>& dropped_words(Language lang);

// Primitive and boxed type names, exact case ("int", "String", ...).
const std::unordered_set<std::string>& builtin_type_names(Language lang);

// Keywords that introduce a type name ("class", "new", "extends", ...).
const std::unordered_set<std::string>& class_intro_words(Language lang);

// Keywords that open an import clause ("import", "from").
const std::unordered_set<std::string>& import_intro_words(Language lang);

// Well-known library roots ("os", "numpy", "System", ...), exact case.
const std::unordered_set<std::string>& known_library_roots(Language lang);

// Splits code on every character outside [A-Za-z0-9_], lowercases the pieces
// and drops reserved words. Token order follows the source.
class CodeTokenizer {
public:
    explicit CodeTokenizer(Language lang) : lang_(lang) {}

    std::vector<std::string> tokens(std::string_view code) const;
    std::set<std::string> token_set(std::string_view code) const;

    Language language() const { return lang_; }

private:
    Language lang_;
};

// Tokenizer for natural-language text (metric inputs): lowercase, keep runs
// of letters and digits, drop everything else. No stopword removal.
std::vector<std::string> plain_tokens(std::string_view text);

} // namespace codeshot
