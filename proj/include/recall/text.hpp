#pragma once
// Tokenization and string normalization helpers used by retrieval,
// entity matching, and the answer metrics.

#include <string>
#include <string_view>
#include <vector>

namespace recall {

// Lowercased alphanumeric tokens; every other character is a separator.
std::vector<std::string> tokenize(std::string_view text);

// Lowercase, punctuation stripped, whitespace collapsed to single spaces.
std::string normalize_text(std::string_view text);

std::string to_lower(std::string_view s);

std::string trim(std::string_view s);

// True when `needle`'s token sequence appears contiguously in `haystack`'s.
bool contains_token_seq(const std::vector<std::string>& haystack,
                        const std::vector<std::string>& needle);

// True when every token of `needle` occurs somewhere in `haystack`.
bool contains_all(const std::vector<std::string>& haystack,
                  const std::vector<std::string>& needle);

// Whole-token entity match: tokenized `entity` appears in tokenized `field`.
bool entity_matches(std::string_view field, std::string_view entity);

std::vector<std::string> split_lines(std::string_view text);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace recall
