#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace kgcoref {

// Half-open byte range [start, end) into a UTF-8 string.
struct ByteSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
};

// Splits on Unicode white space; every punctuation code point becomes its
// own token. Spans are ascending and non-overlapping.
std::vector<ByteSpan> tokenize(std::string_view text);

// Simple (1:1 code point) Unicode case folding. Invalid UTF-8 bytes are
// copied through unchanged.
std::string casefold(std::string_view text);

// Splits a UTF-8 string into code points, each returned as its byte
// sequence. Invalid bytes come back as single-byte entries.
std::vector<std::string_view> code_points(std::string_view text);

// Character trigrams of "^" + text + "$", counted in code points. The
// caller folds case first. A one-character text yields one trigram; the
// empty string yields none.
std::vector<std::string> char_trigrams(std::string_view text);

}  // namespace kgcoref
