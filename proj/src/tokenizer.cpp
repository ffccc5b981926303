#include "codeshot/tokenizer.hpp"

#include <cctype>

namespace codeshot {

namespace {

bool is_word_char(unsigned char c) {
    return std::isalnum(c) != 0 || c == '_';
}

char lower(unsigned char c) {
    return static_cast<char>(std::tolower(c));
}

} // namespace

std::vector<std::string> CodeTokenizer::tokens(std::string_view code) const {
    const auto& drop = dropped_words(lang_);
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty() && drop.find(cur) == drop.end()) out.push_back(cur);
        cur.clear();
    };
    for (unsigned char c : code) {
        if (is_word_char(c)) {
            cur.push_back(lower(c));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

std::set<std::string> CodeTokenizer::token_set(std::string_view code) const {
    auto toks = tokens(code);
    return std::set<std::string>(toks.begin(), toks.end());
}

std::vector<std::string> plain_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c) != 0) {
            cur.push_back(lower(c));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

} // namespace codeshot
