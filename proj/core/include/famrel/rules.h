#ifndef FAMREL_RULES_H_
#define FAMREL_RULES_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "famrel/corpus.h"

namespace famrel {

enum class RuleCategory { kCompliment, kTransitivity, kCompound };

std::string_view RuleCategoryName(RuleCategory c);
// Base rule ids are this prefix plus a 1-based index within the category.
std::string_view RuleIdPrefix(RuleCategory c);

// (holder, relation, other) over rule variables, stored as indices into
// Rule::variables.
struct RelationPattern {
  int holder = 0;
  std::string relation;
  int other = 0;

  bool operator==(const RelationPattern &) const = default;
};

struct GenderGuard {
  int variable = 0;
  Gender gender = Gender::kFemale;

  bool operator==(const GenderGuard &) const = default;
};

struct Rule {
  std::string id;       // "C1" for base rules, "C1/f.m/rev" for analogues
  std::string base_id;  // id of the base rule this one was expanded from
  RuleCategory category = RuleCategory::kCompound;
  std::vector<std::string> variables;
  std::vector<RelationPattern> antecedents;  // one or two
  std::vector<GenderGuard> guards;
  RelationPattern consequent;
  bool expand = true;
  int line = 0;

  std::string ToString() const;
};

struct RuleSet {
  std::vector<Rule> base;      // rules as written in the file
  std::vector<Rule> expanded;  // base rules plus direction/gender analogues
};

// Grammar, one rule per line, '#' comments:
//   [category] (V, relation, V) [& (V, relation, V)] [& GENDER(V)]
//       => (V, relation, V) [!noexpand]
// category is compliment, transitivity or compound; when omitted it is
// inferred (one antecedent: compliment; all patterns in one relation group:
// transitivity; otherwise compound). GENDER is FEMALE or MALE.
// Throws ParseError with the offending line number.
RuleSet ParseRules(std::string_view content, const std::string &source);
RuleSet LoadRules(const std::filesystem::path &path);

// Gender analogues (every combination of genders for the variables whose
// gender the rule fixes) and the direction analogue (every pattern inverted).
// Each generated rule carries explicit guards for the variables whose gender
// it fixes.
std::vector<Rule> ExpandRule(const Rule &base);

}  // namespace famrel

#endif  // FAMREL_RULES_H_
