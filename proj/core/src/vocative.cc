#include "famrel/vocative.h"

#include <algorithm>

#include "famrel/error.h"
#include "json.hpp"

namespace famrel {
namespace {

using json = nlohmann::json;

constexpr std::array<std::string_view, kVocativeFeatureCount> kFeatureNames = {
    "my_alone",        "dear_alone",       "my_dear",
    "you_before",      "you_after",        "oh_before",
    "you_anywhere",    "my_dear_anywhere", "comma_right",
    "period_right",    "question_right",   "exclamation_right",
    "punct_right",     "surrounded_by_commas", "surrounded_by_punct",
    "at_start",        "at_end",           "repeated",
};

bool IsDear(std::string_view lower) { return lower == "dear" || lower == "dearest"; }

// Where the nominal and its optional `my dear(est)` modifiers sit among the
// utterance tokens. `left` is the index of the token before the modifiers,
// -1 at the utterance start.
struct Frame {
  std::span<const Token> tokens;
  long t = 0;
  long left = -1;
  bool my = false;
  bool dear = false;

  bool LeftIsBoundaryOrPunct() const {
    return left < 0 || tokens[left].is_punct();
  }
  bool RightIsBoundaryOrPunct() const {
    const auto r = static_cast<std::size_t>(t + 1);
    return r >= tokens.size() || tokens[r].is_punct();
  }
};

Frame MakeFrame(const Document &doc, const NominalOccurrence &occ) {
  const Utterance *u = doc.FindUtterance(occ.utterance);
  if (!u) {
    throw ValidationError("no utterance " + occ.utterance.ToString());
  }
  Frame f;
  f.tokens = InnerTokens(doc, *u);
  if (occ.token_index >= f.tokens.size()) {
    throw ValidationError("token index " + std::to_string(occ.token_index) +
                          " outside utterance " + occ.utterance.ToString());
  }
  f.t = static_cast<long>(occ.token_index);
  f.left = f.t - 1;
  if (f.left >= 0 && IsDear(f.tokens[f.left].lower)) {
    f.dear = true;
    --f.left;
  }
  if (f.left >= 0 && f.tokens[f.left].lower == "my") {
    f.my = true;
    --f.left;
  }
  return f;
}

}  // namespace

std::span<const Token> InnerTokens(const Document &doc, const Utterance &u) {
  const auto &tokens = doc.paragraphs.at(u.id.paragraph).tokens;
  const std::size_t begin = u.open_token + 1;
  std::size_t end = u.closed ? u.close_token : u.close_token + 1;
  end = std::min(end, tokens.size());
  if (begin >= end) return {};
  return std::span<const Token>(tokens).subspan(begin, end - begin);
}

std::vector<NominalOccurrence> SelectCandidates(
    const Document &doc, std::span<const Utterance *const> utterances,
    const Lexicons &lexicons) {
  std::vector<NominalOccurrence> out;
  for (const Utterance *u : utterances) {
    const auto tokens = InnerTokens(doc, *u);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i].is_word() && lexicons.FindNominal(tokens[i].lower)) {
        out.push_back({u->id, tokens[i].lower, i, tokens[i].span.begin});
      }
    }
  }
  return out;
}

bool DetectPattern(const Document &doc, const NominalOccurrence &occ) {
  const Frame f = MakeFrame(doc, occ);
  return f.LeftIsBoundaryOrPunct() && f.RightIsBoundaryOrPunct();
}

std::string_view VocativeFeatureName(std::size_t feature) {
  if (feature >= kFeatureNames.size()) {
    throw ValidationError("vocative feature index out of range");
  }
  return kFeatureNames[feature];
}

std::vector<double> ExtractVocativeFeatures(const Document &doc,
                                            const NominalOccurrence &occ) {
  const Frame fr = MakeFrame(doc, occ);
  const auto &tok = fr.tokens;
  const auto n = static_cast<long>(tok.size());
  std::vector<double> f(kVocativeFeatureCount, 0.0);

  f[kVocMyAlone] = fr.my && !fr.dear;
  f[kVocDearAlone] = fr.dear && !fr.my;
  f[kVocMyDear] = fr.my && fr.dear;

  for (long i = fr.left; i >= 0; --i) {
    if (tok[i].is_word()) {
      f[kVocYouBefore] = tok[i].lower == "you";
      break;
    }
  }
  for (long i = fr.t + 1; i < n; ++i) {
    if (tok[i].is_word()) {
      f[kVocYouAfter] = tok[i].lower == "you";
      break;
    }
  }
  for (long i = 0; i < n; ++i) {
    const std::string &w = tok[i].lower;
    if (i < fr.t && w == "oh") f[kVocOhBefore] = 1;
    if (w == "you") f[kVocYouAnywhere] = 1;
    if (w == "my" && i + 1 < n && IsDear(tok[i + 1].lower)) f[kVocMyDearAnywhere] = 1;
    if (i != fr.t && w == occ.lemma) f[kVocRepeated] = 1;
  }

  const bool right_boundary = fr.t + 1 >= n;
  const std::string right = right_boundary ? std::string() : tok[fr.t + 1].text;
  f[kVocCommaRight] = right == ",";
  f[kVocPeriodRight] = right == ".";
  f[kVocQuestionRight] = right == "?";
  f[kVocExclamationRight] = right == "!";
  f[kVocPunctRight] = fr.RightIsBoundaryOrPunct();
  f[kVocSurroundedByCommas] =
      fr.left >= 0 && tok[fr.left].text == "," && right == ",";
  f[kVocSurroundedByPunct] = fr.LeftIsBoundaryOrPunct() && fr.RightIsBoundaryOrPunct();
  f[kVocAtStart] = fr.left < 0;
  bool only_punct_after = true;
  for (long i = fr.t + 1; i < n; ++i) only_punct_after &= tok[i].is_punct();
  f[kVocAtEnd] = only_punct_after;
  return f;
}

VocativeLabelMap ParseVocativeLabels(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ValidationError(std::string("vocative labels: ") + e.what());
  }
  if (!j.is_array()) throw ValidationError("vocative labels: expected a JSON array");
  VocativeLabelMap out;
  for (const auto &e : j) {
    if (!e.is_object() || !e.contains("utterance_id") || !e.contains("token_index") ||
        !e.contains("label")) {
      throw ValidationError(
          "vocative labels: entries need utterance_id, token_index and label");
    }
    const UtteranceId id = UtteranceId::Parse(e.at("utterance_id").get<std::string>());
    const auto index = e.at("token_index").get<std::size_t>();
    const auto &l = e.at("label");
    bool label;
    if (l.is_boolean()) {
      label = l.get<bool>();
    } else if (l.is_number_integer() && (l.get<int>() == 0 || l.get<int>() == 1)) {
      label = l.get<int>() == 1;
    } else {
      throw ValidationError("vocative labels: label must be 0, 1, true or false");
    }
    if (!out.emplace(std::make_pair(id, index), label).second) {
      throw ValidationError("vocative labels: duplicate entry for " + id.ToString() +
                            " token " + std::to_string(index));
    }
  }
  return out;
}

std::string VocativeLabelsToJson(const VocativeLabelMap &labels) {
  json j = json::array();
  for (const auto &[key, label] : labels) {
    j.push_back({{"utterance_id", key.first.ToString()},
                 {"token_index", key.second},
                 {"label", label ? 1 : 0}});
  }
  return j.dump(2);
}

std::set<UtteranceId> VocativeDetections::VocativeUtterances() const {
  std::set<UtteranceId> out;
  for (std::size_t i = 0; i < occurrences.size(); ++i) {
    if (positive[i]) out.insert(occurrences[i].utterance);
  }
  return out;
}

std::vector<NominalOccurrence> VocativeDetections::Vocatives() const {
  std::vector<NominalOccurrence> out;
  std::set<std::pair<UtteranceId, std::string>> seen;
  for (std::size_t i = 0; i < occurrences.size(); ++i) {
    if (positive[i] &&
        seen.emplace(occurrences[i].utterance, occurrences[i].lemma).second) {
      out.push_back(occurrences[i]);
    }
  }
  return out;
}

VocativeDetections DetectAllPattern(const Document &doc,
                                    std::vector<NominalOccurrence> occurrences) {
  VocativeDetections d;
  d.positive.reserve(occurrences.size());
  for (const auto &o : occurrences) d.positive.push_back(DetectPattern(doc, o));
  d.occurrences = std::move(occurrences);
  return d;
}

std::set<UtteranceId> GoldVocativeUtterances(const VocativeLabelMap &labels) {
  std::set<UtteranceId> out;
  for (const auto &[key, label] : labels) {
    if (label) out.insert(key.first);
  }
  return out;
}

PrecisionRecall ScoreVocatives(const std::set<UtteranceId> &predicted,
                               const std::set<UtteranceId> &gold) {
  std::size_t tp = 0;
  for (const auto &id : predicted) tp += gold.contains(id);
  return FromCounts(tp, predicted.size() - tp, gold.size() - tp);
}

std::vector<bool> CrossValidatePredictions(const Dataset &data, int folds,
                                           std::uint64_t seed,
                                           ClassifierKind kind) {
  const std::vector<int> fold_of = StratifiedFolds(data.labels, folds, seed);
  std::vector<bool> out(data.size(), false);
  for (int f = 0; f < folds; ++f) {
    Dataset train;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (fold_of[i] != f) train.Add(data.features[i], data.labels[i]);
    }
    auto model = MakeClassifier(kind);
    model->Fit(train);
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (fold_of[i] == f) out[i] = model->Label(data.features[i]);
    }
  }
  return out;
}

SupervisedVocativeResult DetectSupervised(const Document &doc,
                                          std::vector<NominalOccurrence> occurrences,
                                          const VocativeLabelMap &labels,
                                          int folds, std::uint64_t seed,
                                          ClassifierKind kind) {
  Dataset data;
  for (const auto &o : occurrences) {
    const auto it = labels.find({o.utterance, o.token_index});
    data.Add(ExtractVocativeFeatures(doc, o), it != labels.end() && it->second);
  }
  SupervisedVocativeResult r;
  r.detections.positive = CrossValidatePredictions(data, folds, seed, kind);
  r.detections.occurrences = std::move(occurrences);
  r.metrics = ScoreVocatives(r.detections.VocativeUtterances(),
                             GoldVocativeUtterances(labels));
  return r;
}

}  // namespace famrel
