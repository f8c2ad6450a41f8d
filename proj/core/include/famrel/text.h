#ifndef FAMREL_TEXT_H_
#define FAMREL_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace famrel {

// Half-open byte range into a source text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool contains(const Span &other) const {
    return begin <= other.begin && other.end <= end;
  }
  bool operator==(const Span &) const = default;
};

enum class TokenKind { kWord, kPunct };

struct Token {
  TokenKind kind = TokenKind::kWord;
  Span span;
  std::string text;
  std::string lower;  // ASCII-lowercased text, used for lexicon lookup

  bool is_word() const { return kind == TokenKind::kWord; }
  bool is_punct() const { return kind == TokenKind::kPunct; }
};

// Splits on whitespace and punctuation. Words keep internal hyphens and
// apostrophes ("sister-in-law", "Elizabeth's"); every other non-space,
// non-word character becomes its own punctuation token. Typographic quotes,
// dashes and ellipses are recognised as single multi-byte punctuation tokens.
// Offsets are shifted by `base`.
std::vector<Token> Tokenize(std::string_view text, std::size_t base = 0);

std::string AsciiLower(std::string_view s);

// Length in bytes of the punctuation sequence starting at text[i], or 0 if
// the character there is not punctuation.
std::size_t PunctLengthAt(std::string_view text, std::size_t i);

bool IsSpaceAt(std::string_view text, std::size_t i);

// Typographic quotation marks.
inline constexpr std::string_view kLeftDoubleQuote = "\xE2\x80\x9C";
inline constexpr std::string_view kRightDoubleQuote = "\xE2\x80\x9D";
inline constexpr std::string_view kLeftSingleQuote = "\xE2\x80\x98";
inline constexpr std::string_view kRightSingleQuote = "\xE2\x80\x99";

bool IsQuoteMark(std::string_view token_text);

}  // namespace famrel

#endif  // FAMREL_TEXT_H_
