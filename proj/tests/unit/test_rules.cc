#include <set>

#include "doctest.h"
#include "famrel/error.h"
#include "famrel/rules.h"
#include "fixtures.h"

using namespace famrel;
using namespace famrel::testing;

TEST_CASE("a wife/husband rule parses as a compliment rule") {
  const RuleSet rs = ParseRules("(A, wife_of, B) => (B, husband_of, A)\n", "t");
  REQUIRE(rs.base.size() == 1);
  CHECK(rs.base[0].category == RuleCategory::kCompliment);
  CHECK(rs.base[0].id == "C1");
  CHECK(rs.base[0].ToString() == "compliment (A, wife_of, B) => (B, husband_of, A)");
}

TEST_CASE("a mother/sister rule parses as a compound rule") {
  const RuleSet rs =
      ParseRules("(A, mother_of, B) & (B, sister_of, C) => (A, mother_of, C)", "t");
  REQUIRE(rs.base.size() == 1);
  CHECK(rs.base[0].category == RuleCategory::kCompound);
  CHECK(rs.base[0].id == "K1");
  CHECK(rs.base[0].antecedents.size() == 2);
}

TEST_CASE("same-group antecedents infer the transitivity category") {
  const RuleSet rs =
      ParseRules("(A, cousin_of, B) & (B, cousin_of, C) => (A, cousin_of, C)", "t");
  CHECK(rs.base[0].category == RuleCategory::kTransitivity);
}

TEST_CASE("explicit categories, guards and the unicode arrow") {
  const RuleSet rs = ParseRules(
      "compliment (A, mr_and_mrs, B) & FEMALE(B) \xE2\x87\x92 (B, wife_of, A)", "t");
  REQUIRE(rs.base.size() == 1);
  REQUIRE(rs.base[0].guards.size() == 1);
  CHECK(rs.base[0].guards[0].gender == Gender::kFemale);
}

TEST_CASE("an unbound consequent variable is a parse error with its line") {
  try {
    ParseRules("# header\n(A, cousin_of, B) => (B, cousin_of, A)\n"
               "(A, cousin_of, B) => (D, cousin_of, A)\n",
               "bad.rules");
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("malformed rules are rejected") {
  const char *bad[] = {
      "(A, friend_of, B) => (B, friend_of, A)",           // unknown relation
      "(A, cousin_of, B) (B, cousin_of, A)",              // no arrow
      "(A, mother_of, B) & MALE(A) => (B, child_of, A)",  // ill-typed guard
      "(A, cousin_of, A) => (A, cousin_of, A)",           // self relation
      "FEMALE(A) => (A, cousin_of, B)",                   // no antecedent
      "(A, cousin_of, B) & (B, cousin_of, C) & (C, cousin_of, A) => (A, cousin_of, C)",
  };
  for (const char *rule : bad) {
    CAPTURE(rule);
    CHECK_THROWS_AS(ParseRules(rule, "t"), ParseError);
  }
}

TEST_CASE("the shipped rule file holds 21 base rules over three categories") {
  const RuleSet &rs = DefaultRules();
  CHECK(rs.base.size() == 21);
  std::map<RuleCategory, int> per;
  std::set<std::string> ids;
  for (const Rule &r : rs.base) {
    ++per[r.category];
    ids.insert(r.id);
  }
  CHECK(ids.size() == 21);
  CHECK(per[RuleCategory::kCompliment] == 7);
  CHECK(per[RuleCategory::kTransitivity] == 3);
  CHECK(per[RuleCategory::kCompound] == 11);
  CHECK(rs.expanded.size() > rs.base.size());
}

TEST_CASE("expansion adds the reverse and opposite-gender analogues") {
  const RuleSet rs =
      ParseRules("(A, father_of, B) & (B, sister_of, C) => (A, father_of, C)", "t");
  std::set<std::string> shapes;
  for (const Rule &r : rs.expanded) {
    CHECK(r.base_id == "K1");
    shapes.insert(r.ToString());
  }
  CHECK(shapes.size() == rs.expanded.size());
  // Two gendered variables give four gender combinations, each in two
  // directions.
  CHECK(rs.expanded.size() == 8);
  CHECK(shapes.contains(
      "compound (A, mother_of, B) & (B, sister_of, C) & FEMALE(A) & FEMALE(B) => "
      "(A, mother_of, C)"));
  CHECK(shapes.contains(
      "compound (A, father_of, B) & (B, brother_of, C) & MALE(A) & MALE(B) => "
      "(A, father_of, C)"));
}

TEST_CASE("!noexpand keeps a single rule") {
  const RuleSet rs = ParseRules("(A, wife_of, B) => (B, husband_of, A) !noexpand", "t");
  CHECK(rs.expanded.size() == 1);
}
