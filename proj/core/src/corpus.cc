#include "famrel/corpus.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "famrel/error.h"
#include "json.hpp"

namespace famrel {
namespace {

using json = nlohmann::json;

const std::set<std::string> kArticles = {"a", "an", "the"};
const std::set<std::string> kPossessives = {"my",  "your", "his",  "her",
                                            "its", "our",  "their"};
const std::set<std::string> kNumerals = {
    "one",   "two",    "three",  "four",  "five",   "six",
    "seven", "eight",  "nine",   "ten",   "first",  "second",
    "third", "fourth", "fifth",  "sixth", "eldest", "youngest"};
const std::set<std::string> kPronouns = {"he", "she", "him",
                                         "her", "they", "them"};
const std::set<std::string> kSecondPerson = {
    "you", "your", "yours", "yourself", "yourselves", "thee", "thou", "thy"};

bool EndsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

bool IsNumber(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return c >= '0' && c <= '9';
  });
}

bool IsDeterminer(const Token &t) {
  if (!t.is_word()) return false;
  if (kArticles.contains(t.lower) || kPossessives.contains(t.lower) ||
      kNumerals.contains(t.lower) || IsNumber(t.lower)) {
    return true;
  }
  return EndsWith(t.lower, "'s") || EndsWith(t.lower, "\xE2\x80\x99s");
}

bool IsSentenceFinal(const Token &t) {
  return t.text == "." || t.text == "!" || t.text == "?" ||
         t.text == "\xE2\x80\xA6";
}

bool IsOpener(const Token &t, QuoteStyle style) {
  return style == QuoteStyle::kStraight ? t.text == "\""
                                        : t.text == kLeftDoubleQuote;
}

bool IsCloser(const Token &t, QuoteStyle style) {
  return style == QuoteStyle::kStraight ? t.text == "\""
                                        : t.text == kRightDoubleQuote;
}

bool IsBlankLine(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
  });
}

// Byte ranges of non-blank line runs.
std::vector<Span> SplitParagraphBodies(std::string_view text) {
  std::vector<Span> bodies;
  std::size_t pos = 0;
  bool in_para = false;
  Span current;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    if (IsBlankLine(line)) {
      if (in_para) bodies.push_back(current);
      in_para = false;
    } else {
      if (!in_para) current.begin = pos;
      current.end = nl;
      in_para = true;
    }
    if (nl == text.size()) break;
    pos = nl + 1;
  }
  if (in_para) bodies.push_back(current);
  // Whitespace-only input still owns one empty paragraph so the slices
  // reproduce the text.
  if (bodies.empty() && !text.empty()) bodies.push_back({text.size(), text.size()});
  // Trim leading/trailing whitespace inside each body.
  for (Span &b : bodies) {
    while (b.begin < b.end && IsSpaceAt(text, b.begin)) ++b.begin;
    while (b.end > b.begin && IsSpaceAt(text, b.end - 1)) --b.end;
  }
  return bodies;
}

bool FirstTokenOpens(std::string_view text, Span body, QuoteStyle style) {
  const auto tokens = Tokenize(text.substr(body.begin, body.size()));
  return !tokens.empty() && IsOpener(tokens.front(), style);
}

// Narration word within `reach` words of the utterance boundary is an
// expression verb ("said Jane", "Jane replied").
bool HasSpeechTag(const Paragraph &p, const Utterance &u,
                  const Lexicons &lex) {
  auto scan = [&](std::size_t start, int step) {
    int words = 0;
    for (std::size_t i = start; i < p.tokens.size() && words < 3;
         i = static_cast<std::size_t>(static_cast<long>(i) + step)) {
      if (p.UtteranceAt(i) >= 0) break;
      if (p.tokens[i].is_word()) {
        if (lex.IsExpressionVerb(p.tokens[i].lower)) return true;
        ++words;
      }
      if (i == 0 && step < 0) break;
    }
    return false;
  };
  if (u.closed && scan(u.close_token + 1, +1)) return true;
  return u.open_token > 0 && scan(u.open_token - 1, -1);
}

void DecideSpeakerUtterance(const Paragraph &p, Utterance &u,
                            const Lexicons &lex) {
  std::size_t words = 0;
  bool second_person = false;
  const Token *last = nullptr;
  const std::size_t inner_end = u.closed ? u.close_token : u.close_token + 1;
  for (std::size_t i = u.open_token + 1; i < inner_end; ++i) {
    const Token &t = p.tokens[i];
    if (t.is_word()) {
      ++words;
      if (kSecondPerson.contains(t.lower)) second_person = true;
    }
    last = &t;
  }
  const bool final_punct = last != nullptr && IsSentenceFinal(*last);
  u.is_speaker_utterance = words >= 3 || final_punct || second_person ||
                           HasSpeechTag(p, u, lex);
}

void FindQuotes(const std::string &text, Paragraph &p, QuoteStyle style,
                bool next_opens, std::vector<Diagnostic> &diags) {
  std::optional<std::size_t> open;
  auto emit = [&](std::size_t open_tok, std::size_t close_tok, bool closed) {
    Utterance u;
    u.id = {p.index, static_cast<int>(p.utterances.size())};
    u.open_token = open_tok;
    u.close_token = close_tok;
    u.closed = closed;
    const Token &o = p.tokens[open_tok];
    const std::size_t inner_begin = o.span.end;
    const std::size_t inner_end =
        closed ? p.tokens[close_tok].span.begin : p.body.end;
    u.span = {o.span.begin, closed ? p.tokens[close_tok].span.end : p.body.end};
    u.text = text.substr(inner_begin, inner_end - inner_begin);
    p.utterances.push_back(std::move(u));
  };
  for (std::size_t i = 0; i < p.tokens.size(); ++i) {
    const Token &t = p.tokens[i];
    if (style == QuoteStyle::kStraight) {
      if (t.text != "\"") continue;
      if (open) {
        emit(*open, i, true);
        open.reset();
      } else {
        open = i;
      }
      continue;
    }
    if (IsOpener(t, style)) {
      if (open) {
        diags.push_back({p.index, "nested opening quotation mark ignored"});
      } else {
        open = i;
      }
    } else if (IsCloser(t, style)) {
      if (open) {
        emit(*open, i, true);
        open.reset();
      } else {
        diags.push_back({p.index, "closing quotation mark without opener"});
      }
    }
  }
  if (open) {
    emit(*open, p.tokens.size() - 1, false);
    if (!next_opens) {
      diags.push_back({p.index,
                       "unbalanced quotation mark; closed at paragraph end"});
    }
  }
}

void FindMentions(Paragraph &p, const CharacterRegistry &registry,
                  const Lexicons &lex,
                  const std::unordered_map<std::string, std::vector<std::size_t>>
                      &aliases_by_first) {
  const auto &patterns = registry.alias_patterns();
  std::vector<bool> used(p.tokens.size(), false);
  auto add = [&](MentionKind kind, std::size_t first, std::size_t last,
                 std::optional<CharacterId> resolved) {
    CharacterMention m;
    m.kind = kind;
    m.first_token = first;
    m.last_token = last;
    m.span = {p.tokens[first].span.begin, p.tokens[last].span.end};
    m.resolved = std::move(resolved);
    m.in_quote = p.UtteranceAt(first) >= 0;
    p.mentions.push_back(std::move(m));
    for (std::size_t i = first; i <= last; ++i) used[i] = true;
  };

  for (std::size_t i = 0; i < p.tokens.size(); ++i) {
    auto it = aliases_by_first.find(p.tokens[i].text);
    if (it == aliases_by_first.end()) continue;
    for (std::size_t idx : it->second) {  // longest first
      const auto &pat = patterns[idx].tokens;
      if (i + pat.size() > p.tokens.size()) continue;
      bool match = true;
      for (std::size_t k = 0; k < pat.size() && match; ++k) {
        match = p.tokens[i + k].text == pat[k];
      }
      if (!match) continue;
      add(MentionKind::kNamed, i, i + pat.size() - 1, patterns[idx].id);
      i += pat.size() - 1;
      break;
    }
  }
  for (std::size_t i = 0; i + 1 < p.tokens.size(); ++i) {
    if (used[i] || used[i + 1]) continue;
    const Token &det = p.tokens[i];
    const Token &noun = p.tokens[i + 1];
    if (IsDeterminer(det) && noun.is_word() && lex.IsHeadNoun(noun.lower)) {
      add(MentionKind::kNominal, i, i + 1, std::nullopt);
    }
  }
  for (std::size_t i = 0; i < p.tokens.size(); ++i) {
    if (!used[i] && p.tokens[i].is_word() &&
        kPronouns.contains(p.tokens[i].lower)) {
      add(MentionKind::kPronoun, i, i, std::nullopt);
    }
  }
  std::sort(p.mentions.begin(), p.mentions.end(),
            [](const CharacterMention &a, const CharacterMention &b) {
              return a.first_token < b.first_token;
            });
}

std::string RequireString(const json &obj, const char *key,
                          const char *what) {
  if (!obj.is_object() || !obj.contains(key) || !obj[key].is_string()) {
    throw ValidationError(std::string(what) + " entry lacks string field '" +
                          key + "'");
  }
  return obj[key].get<std::string>();
}

}  // namespace

std::string_view GenderName(Gender g) {
  switch (g) {
    case Gender::kFemale: return "female";
    case Gender::kMale: return "male";
    case Gender::kUnknown: return "unknown";
  }
  return "unknown";
}

Gender ParseGender(std::string_view s) {
  if (s == "female" || s == "f") return Gender::kFemale;
  if (s == "male" || s == "m") return Gender::kMale;
  if (s == "unknown" || s == "u" || s.empty()) return Gender::kUnknown;
  throw ValidationError("unknown gender '" + std::string(s) + "'");
}

std::string_view MentionKindName(MentionKind k) {
  switch (k) {
    case MentionKind::kNamed: return "named";
    case MentionKind::kNominal: return "nominal";
    case MentionKind::kPronoun: return "pronoun";
  }
  return "named";
}

CharacterRegistry::CharacterRegistry(std::vector<Character> characters)
    : characters_(std::move(characters)) {
  for (std::size_t i = 0; i < characters_.size(); ++i) {
    Character &c = characters_[i];
    if (c.id.empty()) throw ValidationError("character with empty id");
    if (!index_.emplace(c.id, i).second) {
      throw ValidationError("duplicate character id '" + c.id + "'");
    }
    if (!c.name.empty() &&
        std::find(c.aliases.begin(), c.aliases.end(), c.name) ==
            c.aliases.end()) {
      c.aliases.insert(c.aliases.begin(), c.name);
    }
    if (c.aliases.empty()) {
      throw ValidationError("character '" + c.id + "' has no aliases");
    }
    for (const std::string &alias : c.aliases) {
      if (alias.empty()) {
        throw ValidationError("character '" + c.id + "' has an empty alias");
      }
      auto [it, inserted] = alias_index_.emplace(alias, c.id);
      if (!inserted && it->second != c.id) {
        throw ValidationError("alias '" + alias + "' shared by '" +
                              it->second + "' and '" + c.id + "'");
      }
      if (!inserted) continue;
      AliasPattern pat;
      for (Token &t : Tokenize(alias)) pat.tokens.push_back(std::move(t.text));
      pat.id = c.id;
      alias_patterns_.push_back(std::move(pat));
    }
  }
  std::stable_sort(alias_patterns_.begin(), alias_patterns_.end(),
                   [](const AliasPattern &a, const AliasPattern &b) {
                     return a.tokens.size() > b.tokens.size();
                   });
}

const Character *CharacterRegistry::Find(const CharacterId &id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &characters_[it->second];
}

Gender CharacterRegistry::GenderOf(const CharacterId &id) const {
  const Character *c = Find(id);
  return c == nullptr ? Gender::kUnknown : c->gender;
}

std::optional<CharacterId> CharacterRegistry::ResolveAlias(
    std::string_view surface) const {
  auto it = alias_index_.find(std::string(surface));
  if (it == alias_index_.end()) return std::nullopt;
  return it->second;
}

std::string UtteranceId::ToString() const {
  return std::to_string(paragraph) + ":" + std::to_string(position);
}

UtteranceId UtteranceId::Parse(std::string_view s) {
  const std::size_t colon = s.find(':');
  UtteranceId id;
  auto parse_int = [&](std::string_view part, int &out) {
    const auto *end = part.data() + part.size();
    auto [ptr, ec] = std::from_chars(part.data(), end, out);
    return ec == std::errc() && ptr == end && !part.empty() && out >= 0;
  };
  if (colon == std::string_view::npos ||
      !parse_int(s.substr(0, colon), id.paragraph) ||
      !parse_int(s.substr(colon + 1), id.position)) {
    throw ValidationError("malformed utterance id '" + std::string(s) + "'");
  }
  return id;
}

bool Paragraph::StartsWithUtterance() const {
  return !utterances.empty() && utterances.front().open_token == 0;
}

int Paragraph::UtteranceAt(std::size_t token) const {
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    const Utterance &u = utterances[i];
    if (token >= u.open_token && token <= u.close_token) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

const Utterance *Document::FindUtterance(const UtteranceId &id) const {
  if (id.paragraph < 0 ||
      static_cast<std::size_t>(id.paragraph) >= paragraphs.size()) {
    return nullptr;
  }
  const auto &us = paragraphs[id.paragraph].utterances;
  if (id.position < 0 || static_cast<std::size_t>(id.position) >= us.size()) {
    return nullptr;
  }
  return &us[id.position];
}

std::vector<const Utterance *> Document::AllUtterances() const {
  std::vector<const Utterance *> out;
  for (const Paragraph &p : paragraphs) {
    for (const Utterance &u : p.utterances) out.push_back(&u);
  }
  return out;
}

std::vector<const Utterance *> Document::SpeakerUtterances() const {
  std::vector<const Utterance *> out;
  for (const Paragraph &p : paragraphs) {
    for (const Utterance &u : p.utterances) {
      if (u.is_speaker_utterance) out.push_back(&u);
    }
  }
  return out;
}

Document ParseNarrative(std::string text, const CharacterRegistry &registry,
                        const Lexicons &lexicons, const ParseOptions &options,
                        std::string source_name) {
  Document doc;
  doc.source_name = std::move(source_name);
  doc.text = std::move(text);
  const std::string_view view(doc.text);

  std::unordered_map<std::string, std::vector<std::size_t>> aliases_by_first;
  const auto &patterns = registry.alias_patterns();
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    if (!patterns[i].tokens.empty()) {
      aliases_by_first[patterns[i].tokens.front()].push_back(i);
    }
  }

  const std::vector<Span> bodies = SplitParagraphBodies(view);
  std::size_t words_so_far = 0;
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    Paragraph p;
    p.index = static_cast<int>(i);
    p.body = bodies[i];
    p.span.begin = i == 0 ? 0 : doc.paragraphs.back().span.end;
    p.span.end = i + 1 < bodies.size() ? bodies[i + 1].begin : view.size();
    p.tokens = Tokenize(view.substr(p.body.begin, p.body.size()), p.body.begin);
    p.words_before.reserve(p.tokens.size());
    for (const Token &t : p.tokens) {
      p.words_before.push_back(words_so_far);
      if (t.is_word()) ++words_so_far;
    }
    const bool next_opens = i + 1 < bodies.size() &&
                            FirstTokenOpens(view, bodies[i + 1], options.quotes);
    FindQuotes(doc.text, p, options.quotes, next_opens, doc.diagnostics);
    if (!doc.paragraphs.empty() && !p.utterances.empty() &&
        p.utterances.front().open_token == 0) {
      const Paragraph &prev = doc.paragraphs.back();
      if (!prev.utterances.empty() && !prev.utterances.back().closed) {
        p.utterances.front().continues = true;
      }
    }
    for (Utterance &u : p.utterances) DecideSpeakerUtterance(p, u, lexicons);
    FindMentions(p, registry, lexicons, aliases_by_first);
    for (CharacterMention &m : p.mentions) {
      m.surface = std::string(view.substr(m.span.begin, m.span.size()));
    }
    doc.paragraphs.push_back(std::move(p));
  }
  return doc;
}

GoldAnnotations ParseAnnotations(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ValidationError(std::string("annotations: ") + e.what());
  }
  if (!root.is_object()) {
    throw ValidationError("annotations: top level must be an object");
  }
  GoldAnnotations gold;
  std::vector<Character> characters;
  for (const json &c : root.value("characters", json::array())) {
    Character ch;
    ch.id = RequireString(c, "id", "character");
    ch.name = c.value("name", ch.id);
    ch.gender = ParseGender(c.value("gender", std::string("unknown")));
    for (const json &a : c.value("aliases", json::array())) {
      ch.aliases.push_back(a.get<std::string>());
    }
    characters.push_back(std::move(ch));
  }
  gold.characters = CharacterRegistry(std::move(characters));
  auto require_known = [&](const std::string &id, const std::string &where) {
    if (!gold.characters.Contains(id)) {
      throw ValidationError("unknown character id '" + id + "' in " + where);
    }
  };
  for (const json &a : root.value("attributions", json::array())) {
    const std::string uid = RequireString(a, "utterance_id", "attribution");
    const std::string cid = RequireString(a, "character_id", "attribution");
    require_known(cid, "attribution of utterance " + uid);
    gold.attributions[UtteranceId::Parse(uid)] = cid;
  }
  for (const json &r : root.value("relations", json::array())) {
    RelationTriple t{RequireString(r, "from", "relation"),
                     RequireString(r, "type", "relation"),
                     RequireString(r, "to", "relation")};
    require_known(t.a1, "relation");
    require_known(t.a2, "relation");
    gold.relations.push_back(std::move(t));
  }
  return gold;
}

void ApplyGoldSpeakers(Document &doc, const GoldAnnotations &gold) {
  for (const auto &[uid, cid] : gold.attributions) {
    const Utterance *u = doc.FindUtterance(uid);
    if (u == nullptr) {
      throw ValidationError("attribution references unknown utterance " +
                            uid.ToString());
    }
    doc.paragraphs[uid.paragraph].utterances[uid.position]
        .is_speaker_utterance = true;
  }
}

CorpusStats ComputeStats(const Document &doc) {
  CorpusStats s;
  s.paragraphs = doc.paragraphs.size();
  s.diagnostics = doc.diagnostics.size();
  for (const Paragraph &p : doc.paragraphs) {
    s.utterances += p.utterances.size();
    for (const Utterance &u : p.utterances) {
      if (u.is_speaker_utterance) ++s.speaker_utterances;
    }
    for (const CharacterMention &m : p.mentions) {
      switch (m.kind) {
        case MentionKind::kNamed: ++s.named_mentions; break;
        case MentionKind::kNominal: ++s.nominal_mentions; break;
        case MentionKind::kPronoun: ++s.pronoun_mentions; break;
      }
    }
  }
  return s;
}

std::string ReadFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::filesystem::path &path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Corpus LoadCorpus(const std::filesystem::path &narrative,
                  const std::filesystem::path &annotations,
                  const std::filesystem::path &lexicon_dir,
                  const ParseOptions &options) {
  Corpus corpus;
  corpus.lexicons = Lexicons::LoadDirectory(lexicon_dir);
  corpus.gold = ParseAnnotations(ReadFile(annotations));
  corpus.document = ParseNarrative(ReadFile(narrative), corpus.gold.characters,
                                   corpus.lexicons, options,
                                   narrative.filename().string());
  ApplyGoldSpeakers(corpus.document, corpus.gold);
  corpus.stats = ComputeStats(corpus.document);
  return corpus;
}

}  // namespace famrel
