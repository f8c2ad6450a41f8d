#include <charconv>
#include <sstream>

#include "famrel/corpus.h"
#include "famrel/error.h"

namespace famrel {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename Fn>
void ForEachLine(std::string_view content, Fn &&fn) {
  int line_no = 0;
  while (!content.empty()) {
    ++line_no;
    const std::size_t nl = content.find('\n');
    std::string_view line = content.substr(0, nl);
    content = nl == std::string_view::npos ? std::string_view{}
                                           : content.substr(nl + 1);
    if (const std::size_t hash = line.find('#'); hash != line.npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (!line.empty()) fn(line, line_no);
  }
}

// "mother-in-law" -> "mother_in_law_of"
std::string DefaultRelationFor(std::string_view lemma) {
  std::string out(lemma);
  for (char &c : out) {
    if (c == '-' || c == ' ') c = '_';
  }
  return out + "_of";
}

}  // namespace

std::string_view GenderConstraintName(GenderConstraint g) {
  switch (g) {
    case GenderConstraint::kFemale: return "female";
    case GenderConstraint::kMale: return "male";
    case GenderConstraint::kEither: return "either";
  }
  return "either";
}

bool GenderSatisfies(Gender g, GenderConstraint c) {
  if (c == GenderConstraint::kEither || g == Gender::kUnknown) return true;
  return (c == GenderConstraint::kFemale) == (g == Gender::kFemale);
}

const std::vector<std::string> &BaseTargetNominals() {
  static const std::vector<std::string> kBase = {
      "mother",        "father",        "son",         "daughter",
      "child",         "sister",        "brother",     "cousin",
      "aunt",          "uncle",         "niece",       "nephew",
      "wife",          "husband",       "grandfather", "grandmother",
      "mother-in-law", "father-in-law", "sister-in-law", "brother-in-law",
  };
  return kBase;
}

bool Lexicons::IsExpressionVerb(std::string_view lower) const {
  return expression_verbs.contains(std::string(lower));
}

bool Lexicons::IsHeadNoun(std::string_view lower) const {
  return head_nouns.contains(std::string(lower));
}

const TargetNominal *Lexicons::FindNominal(std::string_view lower) const {
  auto it = target_nominals.find(std::string(lower));
  return it == target_nominals.end() ? nullptr : &it->second;
}

void Lexicons::Validate() const {
  for (const std::string &base : BaseTargetNominals()) {
    if (!target_nominals.contains(base)) {
      throw ValidationError("target nominal lexicon lacks base entry '" +
                            base + "'");
    }
  }
}

std::set<std::string> ParseWordList(std::string_view content,
                                    const std::string &source) {
  std::set<std::string> out;
  ForEachLine(content, [&](std::string_view line, int line_no) {
    if (line.find_first_of(" \t") != std::string_view::npos) {
      throw ParseError(source, line_no, "expected a single entry per line");
    }
    out.insert(AsciiLower(line));
  });
  return out;
}

std::map<std::string, TargetNominal> ParseTargetNominals(
    std::string_view content, const std::string &source) {
  std::map<std::string, TargetNominal> out;
  ForEachLine(content, [&](std::string_view line, int line_no) {
    std::vector<std::string_view> cols;
    std::size_t pos = 0;
    while (true) {
      const std::size_t tab = line.find('\t', pos);
      cols.push_back(Trim(line.substr(pos, tab - pos)));
      if (tab == std::string_view::npos) break;
      pos = tab + 1;
    }
    if (cols.size() < 2 || cols.size() > 3 || cols[0].empty()) {
      throw ParseError(source, line_no,
                       "expected '<lemma>\\t<f|m|e>[\\t<relation>]'");
    }
    TargetNominal entry;
    if (cols[1] == "f") entry.gender = GenderConstraint::kFemale;
    else if (cols[1] == "m") entry.gender = GenderConstraint::kMale;
    else if (cols[1] == "e") entry.gender = GenderConstraint::kEither;
    else throw ParseError(source, line_no, "gender must be f, m or e");
    const std::string lemma = AsciiLower(cols[0]);
    entry.relation = cols.size() == 3 && !cols[2].empty()
                         ? std::string(cols[2])
                         : DefaultRelationFor(lemma);
    if (!out.emplace(lemma, entry).second) {
      throw ParseError(source, line_no, "duplicate lemma '" + lemma + "'");
    }
  });
  return out;
}

Lexicons Lexicons::LoadDirectory(const std::filesystem::path &dir) {
  Lexicons lex;
  const auto verbs = dir / "expression_verbs.txt";
  const auto nouns = dir / "head_nouns.txt";
  const auto nominals = dir / "target_nominals.txt";
  lex.expression_verbs = ParseWordList(ReadFile(verbs), verbs.string());
  lex.head_nouns = ParseWordList(ReadFile(nouns), nouns.string());
  lex.target_nominals =
      ParseTargetNominals(ReadFile(nominals), nominals.string());
  lex.Validate();
  return lex;
}

}  // namespace famrel
