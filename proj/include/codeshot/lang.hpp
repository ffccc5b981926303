#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace codeshot {

// Source languages the toolchain understands. A corpus is monolingual.
enum class Language { python, java };

// Which half of the corpus a sample belongs to. Retrieval candidates come
// from train; queries come from test.
enum class Split { train, test };

// Optional intent label attached to function-level samples. Corpora are
// either fully labelled or fully unlabelled.
enum class Intent { how_to_use, property, why, how_it_is_done, what };

std::string_view to_string(Language lang);
std::string_view to_string(Split split);
std::string_view to_string(Intent intent);

std::optional<Language> parse_language(std::string_view text);
std::optional<Split> parse_split(std::string_view text);
std::optional<Intent> parse_intent(std::string_view text);

} // namespace codeshot
