#ifndef FAMREL_CORPUS_H_
#define FAMREL_CORPUS_H_

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "famrel/text.h"

namespace famrel {

enum class Gender { kFemale, kMale, kUnknown };

std::string_view GenderName(Gender g);
// Accepts "female"/"male"/"unknown" and the one-letter forms f/m/u.
Gender ParseGender(std::string_view s);

using CharacterId = std::string;

struct Character {
  CharacterId id;
  std::string name;
  Gender gender = Gender::kUnknown;
  std::vector<std::string> aliases;
};

// Ground-truth character list. Every character's canonical name is also one
// of its aliases; an alias may belong to only one character.
class CharacterRegistry {
 public:
  struct AliasPattern {
    std::vector<std::string> tokens;
    CharacterId id;
  };

  CharacterRegistry() = default;

  // Throws ValidationError on duplicate ids, empty alias sets or aliases
  // shared between characters.
  explicit CharacterRegistry(std::vector<Character> characters);

  const std::vector<Character> &characters() const { return characters_; }
  std::size_t size() const { return characters_.size(); }
  bool Contains(const CharacterId &id) const { return index_.contains(id); }
  const Character *Find(const CharacterId &id) const;
  Gender GenderOf(const CharacterId &id) const;

  // Case-sensitive exact match of a surface form against alias sets.
  std::optional<CharacterId> ResolveAlias(std::string_view surface) const;

  // Tokenized aliases, longest first, for mention matching.
  const std::vector<AliasPattern> &alias_patterns() const {
    return alias_patterns_;
  }

 private:
  std::vector<Character> characters_;
  std::unordered_map<CharacterId, std::size_t> index_;
  std::unordered_map<std::string, CharacterId> alias_index_;
  std::vector<AliasPattern> alias_patterns_;
};

enum class GenderConstraint { kFemale, kMale, kEither };

std::string_view GenderConstraintName(GenderConstraint g);
bool GenderSatisfies(Gender g, GenderConstraint c);

struct TargetNominal {
  GenderConstraint gender = GenderConstraint::kEither;
  std::string relation;  // canonical relation type, empty when unmapped
};

// Word lists consumed by the parser and the detectors. All keys lower case.
struct Lexicons {
  std::set<std::string> expression_verbs;
  std::set<std::string> head_nouns;
  std::map<std::string, TargetNominal> target_nominals;

  bool IsExpressionVerb(std::string_view lower) const;
  bool IsHeadNoun(std::string_view lower) const;
  const TargetNominal *FindNominal(std::string_view lower) const;

  // Throws ValidationError when a base family nominal is missing.
  void Validate() const;

  // Reads expression_verbs.txt, head_nouns.txt and target_nominals.txt.
  static Lexicons LoadDirectory(const std::filesystem::path &dir);
};

// The base family nominals every target-nominal lexicon must contain.
const std::vector<std::string> &BaseTargetNominals();

// One entry per line, '#' comments; returns lower-cased entries.
std::set<std::string> ParseWordList(std::string_view content,
                                    const std::string &source);
// Lines of the form `lemma<TAB>f|m|e[<TAB>relation]`.
std::map<std::string, TargetNominal> ParseTargetNominals(
    std::string_view content, const std::string &source);

// Position of an utterance: "<paragraph_index>:<position_in_paragraph>".
struct UtteranceId {
  int paragraph = 0;
  int position = 0;

  std::string ToString() const;
  // Throws ValidationError on malformed input.
  static UtteranceId Parse(std::string_view s);

  auto operator<=>(const UtteranceId &) const = default;
};

struct Utterance {
  UtteranceId id;
  Span span;         // including quotation marks
  std::string text;  // inner text, quotation marks removed
  bool is_speaker_utterance = true;
  bool closed = true;     // false when recovered at paragraph end
  bool continues = false; // re-opened quote continuing the previous paragraph
  std::size_t open_token = 0;   // paragraph-local token index of the opener
  std::size_t close_token = 0;  // closing quote, or last token when unclosed
};

enum class MentionKind { kNamed, kNominal, kPronoun };

std::string_view MentionKindName(MentionKind k);

struct CharacterMention {
  MentionKind kind = MentionKind::kNamed;
  Span span;
  std::string surface;
  std::optional<CharacterId> resolved;
  std::size_t first_token = 0;  // paragraph-local, inclusive
  std::size_t last_token = 0;
  bool in_quote = false;
};

struct Paragraph {
  int index = 0;
  Span span;  // paragraph spans tile the source text
  Span body;  // span trimmed of surrounding whitespace
  std::vector<Token> tokens;
  // Number of word tokens in the whole document before tokens[i].
  std::vector<std::size_t> words_before;
  std::vector<Utterance> utterances;
  std::vector<CharacterMention> mentions;

  bool StartsWithUtterance() const;
  // Index of the utterance containing token i, or -1 for narration.
  int UtteranceAt(std::size_t token) const;
};

struct Diagnostic {
  int paragraph = -1;
  std::string message;
};

struct Document {
  std::string source_name;
  std::string text;
  std::vector<Paragraph> paragraphs;
  std::vector<Diagnostic> diagnostics;

  std::string_view Slice(Span s) const {
    return std::string_view(text).substr(s.begin, s.size());
  }
  const Utterance *FindUtterance(const UtteranceId &id) const;
  std::vector<const Utterance *> AllUtterances() const;
  std::vector<const Utterance *> SpeakerUtterances() const;
};

enum class QuoteStyle { kStraight, kTypographic };

struct ParseOptions {
  QuoteStyle quotes = QuoteStyle::kStraight;
};

// Splits paragraphs on blank lines, pairs quotation marks left to right and
// finds named, nominal and pronoun mentions. Unbalanced quotes are closed at
// the paragraph end and reported in Document::diagnostics.
Document ParseNarrative(std::string text, const CharacterRegistry &registry,
                        const Lexicons &lexicons,
                        const ParseOptions &options = {},
                        std::string source_name = {});

struct RelationTriple {
  CharacterId a1;
  std::string relation;
  CharacterId a2;

  auto operator<=>(const RelationTriple &) const = default;
};

struct GoldAnnotations {
  CharacterRegistry characters;
  std::map<UtteranceId, CharacterId> attributions;
  std::vector<RelationTriple> relations;
};

// Parses the annotation JSON document. Throws ValidationError naming any
// dangling character id.
GoldAnnotations ParseAnnotations(std::string_view json);

// Marks every gold-attributed utterance as a speaker utterance. Throws
// ValidationError if an attribution names an utterance the document lacks.
void ApplyGoldSpeakers(Document &doc, const GoldAnnotations &gold);

struct CorpusStats {
  std::size_t paragraphs = 0;
  std::size_t utterances = 0;
  std::size_t speaker_utterances = 0;
  std::size_t named_mentions = 0;
  std::size_t nominal_mentions = 0;
  std::size_t pronoun_mentions = 0;
  std::size_t diagnostics = 0;
};

CorpusStats ComputeStats(const Document &doc);

struct Corpus {
  Document document;
  GoldAnnotations gold;
  Lexicons lexicons;
  CorpusStats stats;
};

std::string ReadFile(const std::filesystem::path &path);
void WriteFile(const std::filesystem::path &path, std::string_view content);

Corpus LoadCorpus(const std::filesystem::path &narrative,
                  const std::filesystem::path &annotations,
                  const std::filesystem::path &lexicon_dir,
                  const ParseOptions &options = {});

}  // namespace famrel

#endif  // FAMREL_CORPUS_H_
