#include "famrel/attribution.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "famrel/error.h"
#include "json.hpp"

namespace famrel {
namespace {

using json = nlohmann::json;

constexpr std::array<std::string_view, kAttributionFeatureCount>
    kFeatureNames = {
        "appearance_count", "utterance_length",  "distance",
        "side_after",       "adjacent",          "verb_between",
        "verb_next_to_candidate", "ends_with_comma", "ends_with_terminal",
        "introduced_by_punct",    "named",           "nominal",
        "pronoun",          "same_paragraph",    "paragraph_offset",
        "mentions_between", "utterance_first_in_paragraph",
        "paragraph_starts_with_quote",
};

bool IsTerminal(std::string_view t) {
  return t == "." || t == "!" || t == "?" || t == "\xE2\x80\xA6";
}

bool StopsSpeechTag(std::string_view t) {
  return IsTerminal(t) || t == ";" || t == ":";
}

// Position of a token in document order.
struct Pos {
  int paragraph = 0;
  std::size_t token = 0;
  auto operator<=>(const Pos &) const = default;
};

template <typename Fn>
void ForEachTokenBetween(const Document &doc, Pos from, Pos to, Fn &&fn) {
  // Visits tokens in [from, to).
  for (int p = from.paragraph; p <= to.paragraph && p < static_cast<int>(doc.paragraphs.size()); ++p) {
    const auto &tokens = doc.paragraphs[p].tokens;
    const std::size_t begin = p == from.paragraph ? from.token : 0;
    const std::size_t end =
        p == to.paragraph ? std::min(to.token, tokens.size()) : tokens.size();
    for (std::size_t i = begin; i < end; ++i) fn(p, i, tokens[i]);
  }
}

std::size_t MemberIndex(ClassifierKind kind) {
  for (std::size_t i = 0; i < kEnsembleKinds.size(); ++i) {
    if (kEnsembleKinds[i] == kind) return i;
  }
  throw ValidationError("classifier '" + std::string(ClassifierKindName(kind)) +
                        "' is not part of the attribution ensemble");
}

// Better candidate first: higher score, then closer, then after the utterance.
bool Outranks(double score_a, const CandidateScore &a, double score_b,
              const CandidateScore &b) {
  if (score_a != score_b) return score_a > score_b;
  if (a.distance != b.distance) return a.distance < b.distance;
  return a.side == Side::kAfter && b.side != Side::kAfter;
}

std::optional<std::size_t> BestByScore(std::span<const CandidateScore> scores,
                                       const std::vector<double> &values,
                                       double threshold) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!best || Outranks(values[i], scores[i], values[*best], scores[*best])) {
      best = i;
    }
  }
  if (best && values[*best] >= threshold) return best;
  return std::nullopt;
}

}  // namespace

std::string_view CategoryName(UtteranceCategory c) {
  switch (c) {
    case UtteranceCategory::kCharacterTrigram: return "character_trigram";
    case UtteranceCategory::kAddedQuote: return "added_quote";
    case UtteranceCategory::kQuoteAlone: return "quote_alone";
    case UtteranceCategory::kApparentConversation: return "apparent_conversation";
    case UtteranceCategory::kAnaphora: return "anaphora";
    case UtteranceCategory::kBackoff: return "backoff";
  }
  return "backoff";
}

bool IsSupervisedCategory(UtteranceCategory c) {
  return c == UtteranceCategory::kQuoteAlone ||
         c == UtteranceCategory::kAnaphora || c == UtteranceCategory::kBackoff;
}

std::string_view AttributionFeatureName(std::size_t feature) {
  if (feature >= kFeatureNames.size()) {
    throw ValidationError("attribution feature index out of range");
  }
  return kFeatureNames[feature];
}

std::string_view RankingName(Ranking r) {
  switch (r) {
    case Ranking::kLabel: return "label";
    case Ranking::kProbability: return "probability";
    case Ranking::kHybrid: return "hybrid";
    case Ranking::kCombined: return "combined";
  }
  return "hybrid";
}

std::string_view CombinerName(Combiner c) {
  switch (c) {
    case Combiner::kMax: return "max";
    case Combiner::kMean: return "mean";
    case Combiner::kMedian: return "median";
    case Combiner::kProduct: return "product";
  }
  return "mean";
}

std::string_view ChainSourceName(ChainSource c) {
  return c == ChainSource::kGold ? "gold" : "predicted";
}

Ranking ParseRanking(std::string_view s) {
  for (Ranking r : {Ranking::kLabel, Ranking::kProbability, Ranking::kHybrid,
                    Ranking::kCombined}) {
    if (RankingName(r) == s) return r;
  }
  throw ValidationError("unknown ranking '" + std::string(s) + "'");
}

Combiner ParseCombiner(std::string_view s) {
  for (Combiner c : {Combiner::kMax, Combiner::kMean, Combiner::kMedian,
                     Combiner::kProduct}) {
    if (CombinerName(c) == s) return c;
  }
  throw ValidationError("unknown combiner '" + std::string(s) + "'");
}

ChainSource ParseChainSource(std::string_view s) {
  if (s == "gold") return ChainSource::kGold;
  if (s == "predicted") return ChainSource::kPredicted;
  throw ValidationError("unknown chain source '" + std::string(s) + "'");
}

double CombineProbabilities(std::span<const double> probs, Combiner combiner) {
  if (probs.empty()) return 0.0;
  switch (combiner) {
    case Combiner::kMax:
      return *std::max_element(probs.begin(), probs.end());
    case Combiner::kMean:
      return std::accumulate(probs.begin(), probs.end(), 0.0) /
             static_cast<double>(probs.size());
    case Combiner::kMedian: {
      std::vector<double> v(probs.begin(), probs.end());
      std::sort(v.begin(), v.end());
      const std::size_t n = v.size();
      return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
    }
    case Combiner::kProduct:
      return std::accumulate(probs.begin(), probs.end(), 1.0,
                             std::multiplies<>());
  }
  return 0.0;
}

std::optional<std::size_t> RankCandidates(std::span<const CandidateScore> scores,
                                          const AttributionConfig &config) {
  if (scores.empty()) return std::nullopt;
  std::vector<double> values(scores.size());
  if (config.ranking == Ranking::kCombined) {
    for (std::size_t i = 0; i < scores.size(); ++i) {
      values[i] = CombineProbabilities(scores[i].probabilities, config.combiner);
    }
    return BestByScore(scores, values, config.threshold);
  }

  const std::size_t m = MemberIndex(config.classifier);
  if (config.ranking == Ranking::kLabel || config.ranking == Ranking::kHybrid) {
    std::optional<std::size_t> positive;
    int positives = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (m < scores[i].labels.size() && scores[i].labels[m]) {
        ++positives;
        positive = i;
      }
    }
    if (positives == 1) return positive;
    if (config.ranking == Ranking::kLabel) return std::nullopt;
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    values[i] = m < scores[i].probabilities.size() ? scores[i].probabilities[m]
                                                   : 0.0;
  }
  return BestByScore(scores, values, config.threshold);
}

// ---------------------------------------------------------------------------

AttributionModel::AttributionModel() {
  for (ClassifierKind k : kEnsembleKinds) members_.push_back(MakeClassifier(k));
}

void AttributionModel::Fit(const Dataset &data) {
  for (auto &m : members_) m->Fit(data);
}

CandidateScore AttributionModel::Score(std::span<const double> features) const {
  CandidateScore s;
  for (const auto &m : members_) {
    const double p = m->Probability(features);
    s.probabilities.push_back(p);
    s.labels.push_back(p > 0.5);
  }
  return s;
}

std::string AttributionModel::Serialize() const {
  json j;
  j["format"] = "famrel-attribution-model";
  j["version"] = kFormatVersion;
  j["members"] = json::array();
  for (const auto &m : members_) j["members"].push_back(json::parse(m->Serialize()));
  return j.dump(2);
}

AttributionModel AttributionModel::Deserialize(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ValidationError(std::string("attribution model: ") + e.what());
  }
  if (!j.is_object() || j.value("format", std::string()) != "famrel-attribution-model") {
    throw ValidationError("attribution model: not a famrel attribution model");
  }
  const int version = j.value("version", -1);
  if (version != kFormatVersion) {
    throw ValidationError("attribution model: unsupported version " +
                          std::to_string(version) + " (expected " +
                          std::to_string(kFormatVersion) + ")");
  }
  const auto &members = j.at("members");
  if (!members.is_array() || members.size() != kEnsembleKinds.size()) {
    throw ValidationError("attribution model: expected " +
                          std::to_string(kEnsembleKinds.size()) + " members");
  }
  AttributionModel model;
  for (std::size_t i = 0; i < members.size(); ++i) {
    auto m = DeserializeClassifier(members[i].dump());
    if (m->kind() != kEnsembleKinds[i]) {
      throw ValidationError("attribution model: member " + std::to_string(i) +
                            " has the wrong kind");
    }
    model.members_[i] = std::move(m);
  }
  return model;
}

// ---------------------------------------------------------------------------

AttributionContext::AttributionContext(const Document &doc,
                                       const Lexicons &lexicons,
                                       const CharacterRegistry &registry)
    : doc_(doc), lexicons_(lexicons), registry_(registry) {
  mention_at_token_.resize(doc.paragraphs.size());
  for (const Paragraph &p : doc.paragraphs) {
    auto &at = mention_at_token_[p.index];
    at.assign(p.tokens.size(), -1);
    for (std::size_t m = 0; m < p.mentions.size(); ++m) {
      const CharacterMention &cm = p.mentions[m];
      for (std::size_t t = cm.first_token; t <= cm.last_token && t < at.size(); ++t) {
        at[t] = static_cast<int>(m);
      }
      if (cm.kind == MentionKind::kNamed && cm.resolved) ++appearances_[*cm.resolved];
    }
  }
}

int AttributionContext::MentionAtToken(int paragraph, std::size_t token) const {
  const auto &at = mention_at_token_[paragraph];
  return token < at.size() ? at[token] : -1;
}

int AttributionContext::AppearanceCount(const CharacterId &id) const {
  const auto it = appearances_.find(id);
  return it == appearances_.end() ? 0 : it->second;
}

std::optional<CharacterId> AttributionContext::ResolveMention(
    const MentionRef &ref) const {
  const CharacterMention &m = mention(ref);
  if (m.kind != MentionKind::kPronoun) return m.resolved;

  GenderConstraint want = GenderConstraint::kEither;
  const std::string lower = AsciiLower(m.surface);
  if (lower == "she" || lower == "her") want = GenderConstraint::kFemale;
  if (lower == "he" || lower == "him") want = GenderConstraint::kMale;

  constexpr int kLookback = 5;
  for (int p = ref.paragraph; p >= 0 && p >= ref.paragraph - kLookback; --p) {
    const auto &mentions = doc_.paragraphs[p].mentions;
    std::size_t end = p == ref.paragraph ? ref.index : mentions.size();
    while (end > 0) {
      const CharacterMention &c = mentions[--end];
      if (c.kind != MentionKind::kNamed || !c.resolved || c.in_quote) continue;
      if (GenderSatisfies(registry_.GenderOf(*c.resolved), want)) return c.resolved;
    }
  }
  return std::nullopt;
}

std::optional<MentionRef> AttributionContext::SpeechTagMention(
    const Utterance &u, bool pronouns) const {
  const Paragraph &para = doc_.paragraphs[u.id.paragraph];
  struct Unit {
    bool verb = false;
    int mention = -1;
  };
  auto accepts = [&](int m) {
    const bool is_pronoun = para.mentions[m].kind == MentionKind::kPronoun;
    return is_pronoun == pronouns;
  };
  auto match = [&](const std::vector<Unit> &units) -> std::optional<MentionRef> {
    if (units.size() < 2) return std::nullopt;
    const Unit &a = units[0], &b = units[1];
    if (a.verb && b.mention >= 0 && accepts(b.mention)) {
      return MentionRef{u.id.paragraph, static_cast<std::size_t>(b.mention)};
    }
    if (b.verb && a.mention >= 0 && accepts(a.mention)) {
      return MentionRef{u.id.paragraph, static_cast<std::size_t>(a.mention)};
    }
    return std::nullopt;
  };

  if (u.closed) {
    std::vector<Unit> after;
    for (std::size_t i = u.close_token + 1; i < para.tokens.size() && after.size() < 2;) {
      if (para.UtteranceAt(i) >= 0) break;
      const Token &t = para.tokens[i];
      if (const int m = MentionAtToken(u.id.paragraph, i); m >= 0) {
        after.push_back({false, m});
        i = para.mentions[m].last_token + 1;
        continue;
      }
      if (t.is_punct()) {
        if (StopsSpeechTag(t.text)) break;
        ++i;
        continue;
      }
      after.push_back({lexicons_.IsExpressionVerb(t.lower), -1});
      ++i;
    }
    if (auto r = match(after)) return r;
  }

  std::vector<Unit> before;
  for (std::size_t i = u.open_token; i-- > 0 && before.size() < 2;) {
    if (para.UtteranceAt(i) >= 0) break;
    const Token &t = para.tokens[i];
    if (const int m = MentionAtToken(u.id.paragraph, i); m >= 0) {
      before.push_back({false, m});
      i = para.mentions[m].first_token;
      continue;
    }
    if (t.is_punct()) {
      if (StopsSpeechTag(t.text)) break;
      continue;
    }
    before.push_back({lexicons_.IsExpressionVerb(t.lower), -1});
  }
  return match(before);
}

UtteranceCategory AttributionContext::Categorize(const Utterance &u) const {
  if (SpeechTagMention(u, false)) return UtteranceCategory::kCharacterTrigram;

  const Paragraph &para = doc_.paragraphs[u.id.paragraph];
  for (int i = 0; i < u.id.position; ++i) {
    if (para.utterances[i].is_speaker_utterance) return UtteranceCategory::kAddedQuote;
  }

  auto alone = [&](const Paragraph &p) {
    if (p.utterances.size() != 1) return false;
    for (std::size_t i = 0; i < p.tokens.size(); ++i) {
      if (p.tokens[i].is_word() && p.UtteranceAt(i) < 0) return false;
    }
    return true;
  };
  if (alone(para)) {
    const int p = u.id.paragraph;
    if (p >= 2 && alone(doc_.paragraphs[p - 1]) && alone(doc_.paragraphs[p - 2])) {
      return UtteranceCategory::kApparentConversation;
    }
    return UtteranceCategory::kQuoteAlone;
  }

  if (SpeechTagMention(u, true)) return UtteranceCategory::kAnaphora;
  return UtteranceCategory::kBackoff;
}

std::optional<CharacterId> AttributionContext::AttributeHeuristic(
    const Utterance &u, UtteranceCategory category,
    const std::function<std::optional<CharacterId>(const UtteranceId &)> &chain)
    const {
  switch (category) {
    case UtteranceCategory::kCharacterTrigram: {
      const auto tag = SpeechTagMention(u, false);
      return tag ? ResolveMention(*tag) : std::nullopt;
    }
    case UtteranceCategory::kAddedQuote: {
      const Paragraph &para = doc_.paragraphs[u.id.paragraph];
      for (int i = u.id.position; i-- > 0;) {
        if (para.utterances[i].is_speaker_utterance) return chain(para.utterances[i].id);
      }
      return std::nullopt;
    }
    case UtteranceCategory::kApparentConversation:
      return chain(UtteranceId{u.id.paragraph - 2, 0});
    default:
      throw ValidationError("category '" + std::string(CategoryName(category)) +
                            "' is not attributed by a heuristic");
  }
}

std::vector<CandidateSpeaker> AttributionContext::GatherCandidates(
    const Utterance &u, UtteranceCategory category, int window) const {
  std::vector<CandidateSpeaker> out;
  const int first = std::max(0, u.id.paragraph - window);
  const int last = std::min(static_cast<int>(doc_.paragraphs.size()) - 1,
                            u.id.paragraph + window);
  const Pos open{u.id.paragraph, u.open_token};
  const Pos close{u.id.paragraph, u.close_token};
  for (int p = first; p <= last; ++p) {
    const auto &mentions = doc_.paragraphs[p].mentions;
    for (std::size_t m = 0; m < mentions.size(); ++m) {
      const CharacterMention &cm = mentions[m];
      if (cm.in_quote) continue;
      if (category == UtteranceCategory::kAnaphora &&
          cm.kind != MentionKind::kPronoun) {
        continue;
      }
      CandidateSpeaker c;
      c.mention = {p, m};
      c.kind = cm.kind;
      const Pos start{p, cm.first_token};
      std::size_t words = 0;
      auto count = [&](int, std::size_t, const Token &t) { words += t.is_word(); };
      if (start < open) {
        c.side = Side::kBefore;
        ForEachTokenBetween(doc_, Pos{p, cm.last_token + 1}, open, count);
      } else {
        c.side = Side::kAfter;
        ForEachTokenBetween(doc_, Pos{close.paragraph, close.token + 1}, start, count);
      }
      c.distance = words;
      c.character = ResolveMention(c.mention);
      out.push_back(std::move(c));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.side == Side::kAfter && b.side != Side::kAfter;
  });
  return out;
}

std::vector<double> AttributionContext::ExtractFeatures(
    const Utterance &u, const CandidateSpeaker &c) const {
  std::vector<double> f(kAttributionFeatureCount, 0.0);
  const Paragraph &para = doc_.paragraphs[u.id.paragraph];
  const CharacterMention &cm = mention(c.mention);

  f[kFeatAppearanceCount] = c.character ? AppearanceCount(*c.character) : 0;
  std::size_t inner_words = 0;
  for (std::size_t i = u.open_token; i <= u.close_token && i < para.tokens.size(); ++i) {
    inner_words += para.tokens[i].is_word();
  }
  f[kFeatUtteranceLength] = static_cast<double>(inner_words);
  f[kFeatDistance] = static_cast<double>(c.distance);
  f[kFeatSideAfter] = c.side == Side::kAfter;
  f[kFeatSameParagraph] = c.mention.paragraph == u.id.paragraph;
  f[kFeatAdjacent] = c.distance <= 1 && c.mention.paragraph == u.id.paragraph;
  f[kFeatParagraphOffset] = std::abs(c.mention.paragraph - u.id.paragraph);

  Pos from{c.mention.paragraph, cm.last_token + 1}, to{u.id.paragraph, u.open_token};
  if (c.side == Side::kAfter) {
    from = {u.id.paragraph, u.close_token + 1};
    to = {c.mention.paragraph, cm.first_token};
  }
  bool verb_between = false;
  int mentions_between = 0;
  ForEachTokenBetween(doc_, from, to, [&](int p, std::size_t i, const Token &t) {
    if (t.is_word() && lexicons_.IsExpressionVerb(t.lower)) verb_between = true;
    const int m = MentionAtToken(p, i);
    if (m >= 0 && doc_.paragraphs[p].mentions[m].first_token == i &&
        !doc_.paragraphs[p].mentions[m].in_quote) {
      ++mentions_between;
    }
  });
  f[kFeatVerbBetween] = verb_between;
  f[kFeatMentionsBetween] = mentions_between;

  const Paragraph &cpara = doc_.paragraphs[c.mention.paragraph];
  auto verb_at = [&](std::size_t i) {
    return i < cpara.tokens.size() && cpara.tokens[i].is_word() &&
           lexicons_.IsExpressionVerb(cpara.tokens[i].lower);
  };
  f[kFeatVerbNextToCandidate] =
      (cm.first_token > 0 && verb_at(cm.first_token - 1)) || verb_at(cm.last_token + 1);

  // Last token inside the quotation marks.
  std::size_t last_inner = u.close_token;
  if (u.closed && last_inner > u.open_token) --last_inner;
  if (last_inner > u.open_token && last_inner < para.tokens.size()) {
    const std::string &t = para.tokens[last_inner].text;
    f[kFeatEndsWithComma] = t == ",";
    f[kFeatEndsWithTerminal] = IsTerminal(t);
  }
  if (u.open_token > 0) {
    const std::string &t = para.tokens[u.open_token - 1].text;
    f[kFeatIntroducedByPunct] = t == "," || t == ":";
  }
  f[kFeatNamed] = cm.kind == MentionKind::kNamed;
  f[kFeatNominal] = cm.kind == MentionKind::kNominal;
  f[kFeatPronoun] = cm.kind == MentionKind::kPronoun;
  f[kFeatUtteranceFirstInParagraph] = u.id.position == 0;
  f[kFeatParagraphStartsWithQuote] = para.StartsWithUtterance();
  return f;
}

// ---------------------------------------------------------------------------

std::vector<LabeledPair> BuildTrainingPairs(const AttributionContext &ctx,
                                            const GoldAnnotations &gold,
                                            int window) {
  std::vector<LabeledPair> pairs;
  for (const Utterance *u : ctx.document().SpeakerUtterances()) {
    const auto label = gold.attributions.find(u->id);
    if (label == gold.attributions.end()) continue;
    const UtteranceCategory cat = ctx.Categorize(*u);
    if (!IsSupervisedCategory(cat)) continue;
    const auto candidates = ctx.GatherCandidates(*u, cat, window);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      pairs.push_back({u->id, i, ctx.ExtractFeatures(*u, candidates[i]),
                       candidates[i].character == label->second ? 1 : 0});
    }
  }
  return pairs;
}

namespace {

Dataset ToDataset(std::span<const LabeledPair> pairs,
                  const std::vector<int> *folds = nullptr, int skip_fold = -1) {
  Dataset d;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (folds && (*folds)[i] == skip_fold) continue;
    d.Add(pairs[i].features, pairs[i].label);
  }
  return d;
}

void WarnIfDegenerate(const Dataset &d, const std::string &where,
                      TrainingReport *report) {
  if (!report) return;
  const auto pos = std::count(d.labels.begin(), d.labels.end(), 1);
  if (d.size() == 0) {
    report->warnings.push_back(where + ": no training pairs");
  } else if (pos == 0 || pos == static_cast<long>(d.size())) {
    report->warnings.push_back(where + ": training pairs all carry label " +
                               std::to_string(d.labels.front()));
  }
}

}  // namespace

AttributionModel TrainModel(std::span<const LabeledPair> pairs,
                            TrainingReport *report) {
  const Dataset d = ToDataset(pairs);
  WarnIfDegenerate(d, "attribution model", report);
  AttributionModel model;
  model.Fit(d);
  return model;
}

CrossValidatedModels TrainCrossValidated(std::span<const LabeledPair> pairs,
                                         int folds, std::uint64_t seed) {
  if (folds < 2) throw ValidationError("cross validation needs at least 2 folds");
  std::vector<int> labels;
  labels.reserve(pairs.size());
  for (const auto &p : pairs) labels.push_back(p.label);

  CrossValidatedModels cv;
  cv.fold_of_pair = StratifiedFolds(labels, folds, seed);
  for (int f = 0; f < folds; ++f) {
    const Dataset train = ToDataset(pairs, &cv.fold_of_pair, f);
    WarnIfDegenerate(train, "fold " + std::to_string(f), &cv.report);
    AttributionModel model;
    model.Fit(train);

    std::array<int, 3> right{};
    int total = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (cv.fold_of_pair[i] != f) continue;
      ++total;
      const CandidateScore s = model.Score(pairs[i].features);
      for (std::size_t m = 0; m < right.size(); ++m) {
        right[m] += static_cast<int>(s.labels[m]) == pairs[i].label;
      }
    }
    std::array<double, 3> acc{};
    for (std::size_t m = 0; m < acc.size(); ++m) {
      acc[m] = total == 0 ? 0.0 : static_cast<double>(right[m]) / total;
    }
    cv.report.fold_accuracy.push_back(acc);
    cv.models.push_back(std::move(model));
  }
  return cv;
}

std::map<UtteranceId, CharacterId> AttributionResult::Speakers() const {
  std::map<UtteranceId, CharacterId> out;
  for (const auto &[id, a] : utterances) {
    if (a.speaker) out.emplace(id, *a.speaker);
  }
  return out;
}

AttributionResult AttributeAll(const AttributionContext &ctx,
                               const GoldAnnotations *gold,
                               const AttributionConfig &config,
                               const CandidateScorer &scorer) {
  AttributionResult result;
  for (UtteranceCategory c : kAllCategories) result.tallies[c] = {};

  auto chain = [&](const UtteranceId &id) -> std::optional<CharacterId> {
    if (config.chain_source == ChainSource::kGold && gold) {
      if (auto it = gold->attributions.find(id); it != gold->attributions.end()) {
        return it->second;
      }
    }
    if (auto it = result.utterances.find(id); it != result.utterances.end()) {
      return it->second.speaker;
    }
    return std::nullopt;
  };

  for (const Utterance *u : ctx.document().SpeakerUtterances()) {
    UtteranceAttribution a;
    a.category = ctx.Categorize(*u);
    if (!IsSupervisedCategory(a.category)) {
      a.speaker = ctx.AttributeHeuristic(*u, a.category, chain);
    } else {
      const auto candidates = ctx.GatherCandidates(*u, a.category, config.window);
      std::vector<CandidateScore> scores;
      scores.reserve(candidates.size());
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto features = ctx.ExtractFeatures(*u, candidates[i]);
        CandidateScore s = scorer(*u, i, features);
        s.distance = candidates[i].distance;
        s.side = candidates[i].side;
        scores.push_back(std::move(s));
      }
      if (const auto pick = RankCandidates(scores, config)) {
        a.speaker = candidates[*pick].character;
      }
    }

    CategoryTally &tally = result.tallies[a.category];
    ++tally.total;
    if (a.speaker) ++tally.attributed;
    if (gold) {
      if (auto it = gold->attributions.find(u->id); it != gold->attributions.end()) {
        ++tally.gold_labelled;
        ++result.gold_labelled;
        if (a.speaker == it->second) {
          ++tally.correct;
          ++result.correct;
        }
      }
    }
    result.utterances.emplace(u->id, std::move(a));
  }
  return result;
}

AttributionResult AttributeWithModel(const AttributionContext &ctx,
                                     const GoldAnnotations *gold,
                                     const AttributionConfig &config,
                                     const AttributionModel &model) {
  return AttributeAll(ctx, gold, config,
                      [&](const Utterance &, std::size_t, std::span<const double> x) {
                        return model.Score(x);
                      });
}

AttributionResult AttributeCrossValidated(const AttributionContext &ctx,
                                          const GoldAnnotations &gold,
                                          const AttributionConfig &config,
                                          TrainingReport *report) {
  const auto pairs = BuildTrainingPairs(ctx, gold, config.window);
  CrossValidatedModels cv = TrainCrossValidated(pairs, config.folds, config.seed);
  std::map<std::pair<UtteranceId, std::size_t>, int> fold_of;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    fold_of[{pairs[i].utterance, pairs[i].candidate}] = cv.fold_of_pair[i];
  }
  const int folds = static_cast<int>(cv.models.size());
  auto scorer = [&](const Utterance &u, std::size_t cand, std::span<const double> x) {
    int f;
    if (auto it = fold_of.find({u.id, cand}); it != fold_of.end()) {
      f = it->second;
    } else {
      // Utterances without gold labels were never trained on; any fold works.
      f = (u.id.paragraph + u.id.position) % folds;
    }
    return cv.models[f].Score(x);
  };
  AttributionResult result = AttributeAll(ctx, &gold, config, scorer);
  if (report) *report = std::move(cv.report);
  return result;
}

}  // namespace famrel
