#include "famrel/relation.h"

#include <array>
#include <map>

#include "famrel/error.h"

namespace famrel {
namespace {

struct Group {
  const char *name;
  const char *female;
  const char *male;
  const char *neutral;
  const char *inverse;
  bool family;
  bool in_law;
};

constexpr std::array<Group, 12> kGroups = {{
    {"parent", "mother_of", "father_of", "parent_of", "child", true, false},
    {"child", "daughter_of", "son_of", "child_of", "parent", true, false},
    {"sibling", "sister_of", "brother_of", "sibling_of", "sibling", true,
     false},
    {"cousin", "cousin_of", "cousin_of", "cousin_of", "cousin", true, false},
    {"spouse", "wife_of", "husband_of", "spouse_of", "spouse", true, false},
    {"parent_sibling", "aunt_of", "uncle_of", "parent_sibling_of",
     "sibling_child", true, false},
    {"sibling_child", "niece_of", "nephew_of", "sibling_child_of",
     "parent_sibling", true, false},
    {"grandparent", "grandmother_of", "grandfather_of", "grandparent_of",
     "grandchild", true, false},
    {"grandchild", "granddaughter_of", "grandson_of", "grandchild_of",
     "grandparent", true, false},
    {"parent_in_law", "mother_in_law_of", "father_in_law_of",
     "parent_in_law_of", "child_in_law", true, true},
    {"child_in_law", "daughter_in_law_of", "son_in_law_of",
     "child_in_law_of", "parent_in_law", true, true},
    {"sibling_in_law", "sister_in_law_of", "brother_in_law_of",
     "sibling_in_law_of", "sibling_in_law", true, true},
}};

// Spouses sharing a title and surname; not a family relation of its own.
constexpr Group kTitlePair = {"title_pair", "mr_and_mrs", "mr_and_mrs",
                              "mr_and_mrs", "title_pair", false, false};

struct Tables {
  std::map<std::string, RelationInfo, std::less<>> relations;
  std::map<std::string, const Group *, std::less<>> groups;
};

const Tables &GetTables() {
  static const Tables tables = [] {
    Tables t;
    auto add_group = [&](const Group &g) {
      t.groups.emplace(g.name, &g);
      auto add = [&](const char *name, GenderConstraint holder) {
        auto [it, inserted] = t.relations.emplace(
            name, RelationInfo{name, g.name, holder, g.family, g.in_law});
        // Members shared between genders (cousin_of) are ungendered.
        if (!inserted) it->second.holder = GenderConstraint::kEither;
      };
      add(g.female, GenderConstraint::kFemale);
      add(g.male, GenderConstraint::kMale);
      add(g.neutral, GenderConstraint::kEither);
    };
    for (const Group &g : kGroups) add_group(g);
    add_group(kTitlePair);
    return t;
  }();
  return tables;
}

const Group &GroupOf(std::string_view relation) {
  const Tables &t = GetTables();
  auto it = t.relations.find(relation);
  if (it == t.relations.end()) {
    throw ValidationError("unknown relation '" + std::string(relation) + "'");
  }
  return *t.groups.find(it->second.group)->second;
}

const char *Member(const Group &g, Gender gender) {
  switch (gender) {
    case Gender::kFemale: return g.female;
    case Gender::kMale: return g.male;
    case Gender::kUnknown: return g.neutral;
  }
  return g.neutral;
}

}  // namespace

const RelationInfo *FindRelation(std::string_view name) {
  const Tables &t = GetTables();
  auto it = t.relations.find(name);
  return it == t.relations.end() ? nullptr : &it->second;
}

bool IsKnownRelation(std::string_view name) {
  return FindRelation(name) != nullptr;
}

std::vector<std::string> AllRelationNames() {
  std::vector<std::string> out;
  for (const auto &[name, info] : GetTables().relations) out.push_back(name);
  return out;
}

std::string SpecializeRelation(std::string_view relation, Gender holder) {
  return Member(GroupOf(relation), holder);
}

std::string InverseRelation(std::string_view relation, Gender new_holder) {
  const Group &g = GroupOf(relation);
  const Group &inv = *GetTables().groups.find(g.inverse)->second;
  return Member(inv, new_holder);
}

std::string UngenderedRelation(std::string_view relation) {
  return GroupOf(relation).neutral;
}

bool IsUngendered(std::string_view relation) {
  return UngenderedRelation(relation) == relation;
}

bool SameGroup(std::string_view a, std::string_view b) {
  return &GroupOf(a) == &GroupOf(b);
}

bool RelationMatches(std::string_view pattern, std::string_view fact) {
  if (pattern == fact) return true;
  return IsUngendered(pattern) && SameGroup(pattern, fact);
}

}  // namespace famrel
