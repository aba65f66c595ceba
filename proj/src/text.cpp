#include "kgcoref/text.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <cstdint>

namespace kgcoref {

namespace {

// Decodes one code point at offset i. Returns a negative value for an
// invalid sequence; i always advances by at least one byte.
UChar32 next_code_point(std::string_view text, std::size_t& i) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  auto offset = static_cast<int32_t>(i);
  UChar32 c = 0;
  U8_NEXT(bytes, offset, length, c);
  i = static_cast<std::size_t>(offset);
  return c;
}

void append_utf8(std::string& out, UChar32 c) {
  uint8_t buffer[U8_MAX_LENGTH];
  int32_t length = 0;
  UBool error = false;
  U8_APPEND(buffer, length, U8_MAX_LENGTH, c, error);
  if (!error) out.append(reinterpret_cast<const char*>(buffer), length);
}

bool is_space(UChar32 c) { return c >= 0 && u_isUWhiteSpace(c); }

bool is_punct(UChar32 c) {
  if (c < 0) return false;
  // ASCII symbols such as '+', '$' and '|' are not Unicode punctuation but
  // still separate words in practice.
  if (c < 0x80) return u_ispunct(c) || (c > 0x20 && c < 0x7f && !u_isalnum(c));
  return u_ispunct(c);
}

}  // namespace

std::vector<ByteSpan> tokenize(std::string_view text) {
  std::vector<ByteSpan> spans;
  std::size_t i = 0;
  std::size_t word_start = 0;
  bool in_word = false;
  while (i < text.size()) {
    const std::size_t at = i;
    const UChar32 c = next_code_point(text, i);
    if (is_space(c) || is_punct(c)) {
      if (in_word) spans.push_back({word_start, at});
      in_word = false;
      if (is_punct(c)) spans.push_back({at, i});
    } else if (!in_word) {
      in_word = true;
      word_start = at;
    }
  }
  if (in_word) spans.push_back({word_start, text.size()});
  return spans;
}

std::string casefold(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t at = i;
    const UChar32 c = next_code_point(text, i);
    if (c < 0) {
      out.append(text.substr(at, i - at));
    } else if (c < 0x80) {
      out.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c));
    } else {
      append_utf8(out, u_foldCase(c, U_FOLD_CASE_DEFAULT));
    }
  }
  return out;
}

std::vector<std::string_view> code_points(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t at = i;
    next_code_point(text, i);
    out.push_back(text.substr(at, i - at));
  }
  return out;
}

std::vector<std::string> char_trigrams(std::string_view text) {
  std::vector<std::string_view> chars;
  chars.push_back("^");
  for (auto cp : code_points(text)) chars.push_back(cp);
  chars.push_back("$");

  std::vector<std::string> grams;
  if (chars.size() < 3) return grams;
  grams.reserve(chars.size() - 2);
  for (std::size_t i = 0; i + 2 < chars.size(); ++i) {
    std::string g;
    g.reserve(chars[i].size() + chars[i + 1].size() + chars[i + 2].size());
    g.append(chars[i]).append(chars[i + 1]).append(chars[i + 2]);
    grams.push_back(std::move(g));
  }
  return grams;
}

}  // namespace kgcoref
