#ifndef FAMREL_RELATION_H_
#define FAMREL_RELATION_H_

#include <string>
#include <string_view>
#include <vector>

#include "famrel/corpus.h"

namespace famrel {

// Canonical family-relation taxonomy. Relations are grouped into roles
// (parent, child, sibling, ...); each group has a female, a male and an
// ungendered member, and an inverse group. The ungendered member is used when
// the holder's gender is unknown and, inside rule patterns, matches any
// member of its group.
struct RelationInfo {
  std::string name;
  std::string group;
  GenderConstraint holder = GenderConstraint::kEither;
  bool family = true;  // false for pseudo relations such as mr_and_mrs
  bool in_law = false;
};

const RelationInfo *FindRelation(std::string_view name);
bool IsKnownRelation(std::string_view name);
std::vector<std::string> AllRelationNames();

// The group member for a holder of the given gender; unknown gender yields
// the ungendered member.
std::string SpecializeRelation(std::string_view relation, Gender holder);

// Relation held by the other party: (A, r, B) -> (B, inverse, A), gendered by
// B's gender.
std::string InverseRelation(std::string_view relation, Gender new_holder);

std::string UngenderedRelation(std::string_view relation);
bool IsUngendered(std::string_view relation);
bool SameGroup(std::string_view a, std::string_view b);

// Pattern semantics: exact match, or an ungendered pattern matching any
// member of its group.
bool RelationMatches(std::string_view pattern, std::string_view fact);

}  // namespace famrel

#endif  // FAMREL_RELATION_H_
