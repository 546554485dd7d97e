#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace kgre::text {

std::string_view trim(std::string_view s);

bool is_space(char c);

// Lowercases ASCII letters and collapses every whitespace run to one space,
// trimming both ends. Non-ASCII bytes pass through untouched.
std::string casefold_ws(std::string_view s);

// Decodes UTF-8 into code points. Invalid bytes decode to themselves so the
// result is total over arbitrary input.
std::u32string utf8_decode(std::string_view s);

struct WordSpan {
  std::size_t start = 0;
  std::size_t end = 0;
};

// Whitespace-plus-punctuation segmentation: maximal runs of word characters
// form one word, every ASCII punctuation character is a word of its own.
std::vector<WordSpan> segment_words(std::string_view s);

// Whitespace tokens of `s` with their byte offsets.
std::vector<WordSpan> whitespace_tokens(std::string_view s);

std::size_t count_whitespace_tokens(std::string_view s);

}  // namespace kgre::text
