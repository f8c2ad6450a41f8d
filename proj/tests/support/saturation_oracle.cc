#include "saturation_oracle.h"

#include <vector>

#include "famrel/relation.h"

namespace famrel::testing {
namespace {

using Pair = std::pair<CharacterId, CharacterId>;

struct Proposal {
  std::string relation;  // oriented along the canonical pair
  int count = 0;
};

bool Family(const std::string &r) { return FindRelation(r)->family; }

// Canonical pair (smaller id first) and the relation seen from its first id.
std::pair<Pair, std::string> Orient(const CharacterId &x, const std::string &r,
                                    const CharacterId &y,
                                    const CharacterRegistry &registry) {
  if (x < y) return {{x, y}, r};
  return {{y, x}, InverseRelation(r, registry.GenderOf(y))};
}

void Store(PairState &state, const Pair &canonical, const std::string &r, int count,
           const CharacterRegistry &registry) {
  state[canonical] = {r, count};
  state[{canonical.second, canonical.first}] = {
      InverseRelation(r, registry.GenderOf(canonical.second)), count};
}

}  // namespace

PairState BruteForceSaturate(std::span<const SeedFact> seeds, const RuleSet &rules,
                             const CharacterRegistry &registry) {
  std::vector<CharacterId> people;
  for (const Character &c : registry.characters()) people.push_back(c.id);

  std::map<Pair, std::map<std::string, int>> seed_totals;
  for (const SeedFact &s : seeds) {
    if (!GenderSatisfies(registry.GenderOf(s.a1), FindRelation(s.relation)->holder)) {
      continue;
    }
    auto [pair, r] = Orient(s.a1, SpecializeRelation(s.relation, registry.GenderOf(s.a1)),
                            s.a2, registry);
    seed_totals[pair][r] += s.count;
  }
  PairState state;
  for (const auto &[pair, totals] : seed_totals) {
    std::string best;
    int best_count = 0;
    for (const auto &[r, c] : totals) {
      if (c > best_count) {
        best = r;
        best_count = c;
      }
    }
    Store(state, pair, best, best_count, registry);
  }

  while (true) {
    const PairState frozen = state;
    std::map<Pair, std::vector<Proposal>> proposals;
    for (const Rule &rule : rules.expanded) {
      const std::size_t k = rule.variables.size();
      std::vector<std::size_t> idx(k, 0);
      while (true) {
        bool ok = true;
        int count = 0;
        for (const RelationPattern &p : rule.antecedents) {
          const auto it = frozen.find({people[idx[p.holder]], people[idx[p.other]]});
          if (it == frozen.end() || !RelationMatches(p.relation, it->second.first)) {
            ok = false;
            break;
          }
          count = std::max(count, it->second.second);
        }
        for (const GenderGuard &g : rule.guards) {
          if (!ok) break;
          ok = registry.GenderOf(people[idx[g.variable]]) == g.gender;
        }
        const CharacterId &x = people[idx[rule.consequent.holder]];
        const CharacterId &y = people[idx[rule.consequent.other]];
        if (ok && x != y) {
          auto [pair, r] = Orient(
              x, SpecializeRelation(rule.consequent.relation, registry.GenderOf(x)), y,
              registry);
          proposals[pair].push_back({r, count});
        }
        // Next assignment, odometer style.
        std::size_t d = 0;
        while (d < k && ++idx[d] == people.size()) idx[d++] = 0;
        if (d == k) break;
      }
    }

    bool changed = false;
    for (const auto &[pair, list] : proposals) {
      const auto existing = frozen.find(pair);
      const Proposal *best = nullptr;
      for (const Proposal &p : list) {
        if (!best || p.count > best->count) {
          best = &p;
          continue;
        }
        if (p.count < best->count) continue;
        const bool p_old = existing != frozen.end() && p.relation == existing->second.first;
        const bool b_old =
            existing != frozen.end() && best->relation == existing->second.first;
        if (p_old != b_old) {
          if (p_old) best = &p;
        } else if (p.relation < best->relation) {
          best = &p;
        }
      }
      if (existing == frozen.end()) {
        Store(state, pair, best->relation, best->count, registry);
        changed = true;
      } else if (existing->second.first == best->relation) {
        if (best->count > existing->second.second) {
          Store(state, pair, best->relation, best->count, registry);
          changed = true;
        }
      } else if (best->count > existing->second.second ||
                 (!Family(existing->second.first) && Family(best->relation))) {
        Store(state, pair, best->relation,
              std::max(best->count, existing->second.second), registry);
        changed = true;
      }
    }
    if (!changed) return state;
  }
}

}  // namespace famrel::testing
