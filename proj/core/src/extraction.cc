#include "famrel/extraction.h"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "famrel/error.h"
#include "famrel/relation.h"
#include "json.hpp"

namespace famrel {
namespace {

using json = nlohmann::json;

const Utterance *SpeakerUtteranceIn(const Paragraph &p, bool last) {
  const Utterance *found = nullptr;
  for (const Utterance &u : p.utterances) {
    if (!u.is_speaker_utterance) continue;
    found = &u;
    if (!last) break;
  }
  return found;
}

}  // namespace

std::string_view RecipientSourceName(RecipientSource s) {
  return s == RecipientSource::kPreceding ? "preceding" : "following";
}

std::vector<RecipientCandidate> CandidateRecipients(const Document &doc,
                                                    const UtteranceId &vocative,
                                                    const SpeakerMap &speakers) {
  std::vector<RecipientCandidate> out;
  const int n = static_cast<int>(doc.paragraphs.size());
  auto consider = [&](const Utterance *u, RecipientSource source) {
    if (!u) return;
    const auto it = speakers.find(u->id);
    if (it == speakers.end()) return;
    out.push_back({it->second, source, std::abs(u->id.paragraph - vocative.paragraph),
                   u->id});
  };
  for (int p = vocative.paragraph - 1; p >= 0; --p) {
    if (const Utterance *u = SpeakerUtteranceIn(doc.paragraphs[p], true)) {
      consider(u, RecipientSource::kPreceding);
      break;
    }
  }
  for (int p = vocative.paragraph + 1; p < n; ++p) {
    if (const Utterance *u = SpeakerUtteranceIn(doc.paragraphs[p], false)) {
      consider(u, RecipientSource::kFollowing);
      break;
    }
  }
  return out;
}

std::optional<RecipientCandidate> ApplyConstraints(
    std::span<const RecipientCandidate> candidates, const std::string &lemma,
    const Lexicons &lexicons, const CharacterRegistry &registry) {
  const TargetNominal *nominal = lexicons.FindNominal(lemma);
  if (!nominal) {
    throw ValidationError("'" + lemma + "' is not a target nominal");
  }
  std::optional<RecipientCandidate> chosen;
  for (const RecipientCandidate &c : candidates) {
    if (!GenderSatisfies(registry.GenderOf(c.character), nominal->gender)) continue;
    if (c.paragraph_distance != 1) continue;
    if (!chosen || c.source == RecipientSource::kFollowing) chosen = c;
  }
  return chosen;
}

ExtractionResult ExtractSeeds(const Document &doc, const SpeakerMap &speakers,
                              std::span<const NominalOccurrence> vocatives,
                              const Lexicons &lexicons,
                              const CharacterRegistry &registry) {
  ExtractionResult result;
  std::map<RelationTriple, SeedRelation> merged;
  for (const NominalOccurrence &v : vocatives) {
    const auto speaker = speakers.find(v.utterance);
    if (speaker == speakers.end()) {
      result.diagnostics.push_back("vocative " + v.utterance.ToString() +
                                   " has no attributed speaker");
      continue;
    }
    const TargetNominal *nominal = lexicons.FindNominal(v.lemma);
    if (!nominal || !IsKnownRelation(nominal->relation)) {
      result.diagnostics.push_back("nominal '" + v.lemma +
                                   "' has no canonical relation; dropped " +
                                   v.utterance.ToString());
      continue;
    }
    const auto candidates = CandidateRecipients(doc, v.utterance, speakers);
    const auto recipient = ApplyConstraints(candidates, v.lemma, lexicons, registry);
    if (!recipient) {
      ++result.abandoned;
      continue;
    }
    if (recipient->character == speaker->second) {
      ++result.self_rejected;
      result.diagnostics.push_back("rejected self relation (" + speaker->second +
                                   ", " + v.lemma + ", " + speaker->second +
                                   ") at " + v.utterance.ToString());
      continue;
    }
    std::string relation = nominal->relation;
    if (IsUngendered(relation)) {
      relation = SpecializeRelation(relation, registry.GenderOf(recipient->character));
    }
    RelationTriple key{recipient->character, relation, speaker->second};
    auto [it, inserted] = merged.try_emplace(
        key, SeedRelation{key.a1, key.relation, key.a2, 0, {}});
    ++it->second.count;
    it->second.evidence.push_back(v.utterance);
  }
  for (auto &[key, seed] : merged) result.seeds.push_back(std::move(seed));
  return result;
}

std::vector<SeedFact> ToFacts(std::span<const SeedRelation> seeds) {
  std::vector<SeedFact> out;
  out.reserve(seeds.size());
  for (const auto &s : seeds) out.push_back(s.fact());
  return out;
}

std::string SeedsToJson(std::span<const SeedRelation> seeds) {
  json j = json::array();
  for (const auto &s : seeds) {
    json evidence = json::array();
    for (const auto &id : s.evidence) evidence.push_back(id.ToString());
    j.push_back({{"a1", s.a1},
                 {"relation", s.relation},
                 {"a2", s.a2},
                 {"count", s.count},
                 {"evidence", evidence}});
  }
  return j.dump(2);
}

std::vector<SeedRelation> ParseSeeds(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ValidationError(std::string("seeds: ") + e.what());
  }
  if (!j.is_array()) throw ValidationError("seeds: expected a JSON array");
  std::vector<SeedRelation> out;
  for (const auto &e : j) {
    try {
      SeedRelation s;
      s.a1 = e.at("a1").get<std::string>();
      s.relation = e.at("relation").get<std::string>();
      s.a2 = e.at("a2").get<std::string>();
      s.count = e.value("count", 1);
      if (e.contains("evidence")) {
        for (const auto &id : e.at("evidence")) {
          s.evidence.push_back(UtteranceId::Parse(id.get<std::string>()));
        }
      }
      if (s.count < 1) throw ValidationError("seeds: count must be at least 1");
      if (!IsKnownRelation(s.relation)) {
        throw ValidationError("seeds: unknown relation '" + s.relation + "'");
      }
      out.push_back(std::move(s));
    } catch (const json::exception &ex) {
      throw ValidationError(std::string("seeds: ") + ex.what());
    }
  }
  return out;
}

CleaningList ParseCleaningList(std::string_view content, const std::string &source) {
  CleaningList list;
  std::istringstream in{std::string(content)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::vector<std::string> parts;
    for (std::string f; fields >> f;) parts.push_back(f);
    if (parts.empty()) continue;
    if (parts.size() == 1) {
      std::size_t index = 0;
      const auto &p = parts[0];
      const auto [end, ec] = std::from_chars(p.data(), p.data() + p.size(), index);
      if (ec != std::errc() || end != p.data() + p.size()) {
        throw ParseError(source, line_no, "expected a seed index or 'a1 relation a2'");
      }
      list.indices.push_back(index);
    } else if (parts.size() == 3) {
      list.triples.push_back({parts[0], parts[1], parts[2]});
    } else {
      throw ParseError(source, line_no, "expected a seed index or 'a1 relation a2'");
    }
  }
  return list;
}

std::vector<SeedRelation> ApplyCleaning(std::span<const SeedRelation> seeds,
                                        const CleaningList &cleaning) {
  const std::set<std::size_t> drop_index(cleaning.indices.begin(),
                                         cleaning.indices.end());
  const std::set<RelationTriple> drop_triple(cleaning.triples.begin(),
                                             cleaning.triples.end());
  std::vector<SeedRelation> out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (drop_index.contains(i) || drop_triple.contains(seeds[i].triple())) continue;
    out.push_back(seeds[i]);
  }
  return out;
}

}  // namespace famrel
