#ifndef FAMREL_EXTRACTION_H_
#define FAMREL_EXTRACTION_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "famrel/corpus.h"
#include "famrel/kinship.h"
#include "famrel/vocative.h"

namespace famrel {

enum class RecipientSource { kPreceding, kFollowing };
std::string_view RecipientSourceName(RecipientSource s);

struct RecipientCandidate {
  CharacterId character;
  RecipientSource source = RecipientSource::kPreceding;
  int paragraph_distance = 0;  // always positive
  UtteranceId utterance;
};

using SpeakerMap = std::map<UtteranceId, CharacterId>;

// The speaker-utterances closest to the vocative in the nearest earlier and
// the nearest later paragraph holding any. A neighbour without an attributed
// speaker contributes no candidate. Preceding comes first.
std::vector<RecipientCandidate> CandidateRecipients(const Document &doc,
                                                    const UtteranceId &vocative,
                                                    const SpeakerMap &speakers);

// Gender filter, then adjacency (distance exactly 1), then preference for the
// following speaker. Characters of unknown gender pass the gender filter.
std::optional<RecipientCandidate> ApplyConstraints(
    std::span<const RecipientCandidate> candidates, const std::string &lemma,
    const Lexicons &lexicons, const CharacterRegistry &registry);

struct SeedRelation {
  CharacterId a1;  // recipient, holds the relation
  std::string relation;
  CharacterId a2;  // speaker
  int count = 1;
  std::vector<UtteranceId> evidence;

  RelationTriple triple() const { return {a1, relation, a2}; }
  SeedFact fact() const { return {a1, relation, a2, count}; }
};

struct ExtractionResult {
  std::vector<SeedRelation> seeds;  // ordered by (a1, relation, a2)
  std::vector<std::string> diagnostics;
  int abandoned = 0;      // no candidate survived the constraints
  int self_rejected = 0;  // recipient and speaker coincided
};

// Maps each vocative to (recipient, relation, speaker). The lexicon's
// relation is specialised by the recipient's gender when it is ungendered.
ExtractionResult ExtractSeeds(const Document &doc, const SpeakerMap &speakers,
                              std::span<const NominalOccurrence> vocatives,
                              const Lexicons &lexicons,
                              const CharacterRegistry &registry);

std::vector<SeedFact> ToFacts(std::span<const SeedRelation> seeds);

// JSON array of {a1, relation, a2, count, evidence}.
std::string SeedsToJson(std::span<const SeedRelation> seeds);
std::vector<SeedRelation> ParseSeeds(std::string_view json);

// Line-oriented list of seeds to drop: a 0-based seed index, or the three
// fields `a1 relation a2` separated by whitespace. '#' starts a comment.
struct CleaningList {
  std::vector<std::size_t> indices;
  std::vector<RelationTriple> triples;
};
CleaningList ParseCleaningList(std::string_view content, const std::string &source);
std::vector<SeedRelation> ApplyCleaning(std::span<const SeedRelation> seeds,
                                        const CleaningList &cleaning);

}  // namespace famrel

#endif  // FAMREL_EXTRACTION_H_
