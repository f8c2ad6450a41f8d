#include "famrel/text.h"

#include <array>

namespace famrel {
namespace {

constexpr std::array<std::string_view, 7> kMultiBytePunct = {
    "\xE2\x80\x9C",  // left double quote
    "\xE2\x80\x9D",  // right double quote
    "\xE2\x80\x98",  // left single quote
    "\xE2\x80\x99",  // right single quote / apostrophe
    "\xE2\x80\x94",  // em dash
    "\xE2\x80\x93",  // en dash
    "\xE2\x80\xA6",  // ellipsis
};

bool IsAsciiAlnum(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9');
}

// Word character: ASCII alphanumerics and any non-ASCII byte that does not
// begin a recognised punctuation sequence.
std::size_t WordCharLengthAt(std::string_view text, std::size_t i) {
  const auto c = static_cast<unsigned char>(text[i]);
  if (IsAsciiAlnum(c)) return 1;
  if (c < 0x80) return 0;
  if (PunctLengthAt(text, i) > 0) return 0;
  // Consume a whole UTF-8 sequence so offsets stay on code point boundaries.
  std::size_t len = 1;
  if ((c & 0xE0) == 0xC0) len = 2;
  else if ((c & 0xF0) == 0xE0) len = 3;
  else if ((c & 0xF8) == 0xF0) len = 4;
  return i + len <= text.size() ? len : text.size() - i;
}

// Length of an in-word joiner (hyphen or apostrophe) at i, 0 if none.
std::size_t JoinerLengthAt(std::string_view text, std::size_t i) {
  if (text[i] == '-' || text[i] == '\'') return 1;
  if (text.substr(i, 3) == kRightSingleQuote) return 3;
  return 0;
}

}  // namespace

bool IsSpaceAt(std::string_view text, std::size_t i) {
  const char c = text[i];
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::size_t PunctLengthAt(std::string_view text, std::size_t i) {
  const auto c = static_cast<unsigned char>(text[i]);
  if (c < 0x80) {
    if (IsAsciiAlnum(c) || IsSpaceAt(text, i)) return 0;
    return 1;
  }
  for (std::string_view p : kMultiBytePunct) {
    if (text.substr(i, p.size()) == p) return p.size();
  }
  return 0;
}

std::string AsciiLower(std::string_view s) {
  std::string out(s);
  for (char &c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool IsQuoteMark(std::string_view t) {
  return t == "\"" || t == "'" || t == kLeftDoubleQuote ||
         t == kRightDoubleQuote || t == kLeftSingleQuote ||
         t == kRightSingleQuote;
}

std::vector<Token> Tokenize(std::string_view text, std::size_t base) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (IsSpaceAt(text, i)) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::size_t w = WordCharLengthAt(text, i); w > 0) {
      i += w;
      while (i < n) {
        if (std::size_t wl = WordCharLengthAt(text, i); wl > 0) {
          i += wl;
          continue;
        }
        const std::size_t j = JoinerLengthAt(text, i);
        if (j > 0 && i + j < n && WordCharLengthAt(text, i + j) > 0) {
          i += j;
          continue;
        }
        break;
      }
      Token t;
      t.kind = TokenKind::kWord;
      t.span = {base + start, base + i};
      t.text = std::string(text.substr(start, i - start));
      t.lower = AsciiLower(t.text);
      tokens.push_back(std::move(t));
      continue;
    }
    std::size_t p = PunctLengthAt(text, i);
    if (p == 0) p = 1;
    i += p;
    Token t;
    t.kind = TokenKind::kPunct;
    t.span = {base + start, base + i};
    t.text = std::string(text.substr(start, p));
    t.lower = t.text;
    tokens.push_back(std::move(t));
  }
  return tokens;
}

}  // namespace famrel
