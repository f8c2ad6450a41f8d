#include "famrel/kinship.h"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "famrel/error.h"
#include "famrel/relation.h"

namespace famrel {
namespace {

struct Candidate {
  std::string relation;  // oriented from pair.first to pair.second
  int count = 0;
  const std::string *rule_id = nullptr;
  // Facts of the round's frozen snapshot.
  std::vector<const KinshipFact *> antecedents;
};

// Orients (a1, relation, a2) so that the holder is the smaller id.
std::pair<KinshipGraph::Pair, std::string> Canonical(
    const CharacterId &a1, const std::string &relation, const CharacterId &a2,
    const CharacterRegistry &registry) {
  if (a1 < a2) return {{a1, a2}, relation};
  return {{a2, a1}, InverseRelation(relation, registry.GenderOf(a2))};
}

std::string Describe(const CharacterId &a1, const std::string &r,
                     const CharacterId &a2) {
  return "(" + a1 + ", " + r + ", " + a2 + ")";
}

// Ranks candidates for one pair: higher count, then the pair's current
// relation, then relation name.
const Candidate &Best(const std::vector<Candidate> &cands,
                      const KinshipFact *existing) {
  const Candidate *best = &cands.front();
  for (const Candidate &c : cands) {
    if (c.count != best->count) {
      if (c.count > best->count) best = &c;
      continue;
    }
    const bool c_is_existing = existing && c.relation == existing->relation;
    const bool b_is_existing = existing && best->relation == existing->relation;
    if (c_is_existing != b_is_existing) {
      if (c_is_existing) best = &c;
      continue;
    }
    if (c.relation < best->relation) best = &c;
  }
  return *best;
}

class RoundMatcher {
 public:
  RoundMatcher(const KinshipGraph &snapshot, const CharacterRegistry &registry)
      : registry_(registry) {
    for (const auto &[pair, fact] : snapshot.facts()) {
      const std::string group = UngenderedRelation(fact.relation);
      by_group_[group].push_back(&fact);
      by_holder_group_[{fact.a1, group}].push_back(&fact);
    }
  }

  void Run(const Rule &rule,
           std::map<KinshipGraph::Pair, std::vector<Candidate>> &out) {
    rule_ = &rule;
    out_ = &out;
    binding_.assign(rule.variables.size(), nullptr);
    matched_.assign(rule.antecedents.size(), nullptr);
    Match(0);
  }

 private:
  void Match(std::size_t k) {
    if (k == rule_->antecedents.size()) {
      Emit();
      return;
    }
    const RelationPattern &p = rule_->antecedents[k];
    // Every fact in the pool shares the pattern's group; a gendered pattern
    // still has to match the relation exactly.
    const std::string group = UngenderedRelation(p.relation);
    const bool exact = group != p.relation;
    const std::vector<const KinshipFact *> *pool = nullptr;
    if (binding_[p.holder] != nullptr) {
      auto it = by_holder_group_.find({*binding_[p.holder], group});
      if (it == by_holder_group_.end()) return;
      pool = &it->second;
    } else {
      auto it = by_group_.find(group);
      if (it == by_group_.end()) return;
      pool = &it->second;
    }
    for (const KinshipFact *f : *pool) {
      if (exact && f->relation != p.relation) continue;
      if (binding_[p.other] != nullptr && *binding_[p.other] != f->a2) continue;
      const bool bound_holder = binding_[p.holder] == nullptr;
      const bool bound_other = binding_[p.other] == nullptr;
      if (bound_holder) binding_[p.holder] = &f->a1;
      if (bound_other) binding_[p.other] = &f->a2;
      matched_[k] = f;
      Match(k + 1);
      if (bound_holder) binding_[p.holder] = nullptr;
      if (bound_other) binding_[p.other] = nullptr;
    }
  }

  void Emit() {
    for (const GenderGuard &g : rule_->guards) {
      if (registry_.GenderOf(*binding_[g.variable]) != g.gender) return;
    }
    const RelationPattern &c = rule_->consequent;
    const CharacterId &x = *binding_[c.holder];
    const CharacterId &y = *binding_[c.other];
    if (x == y) return;
    Candidate cand;
    for (const KinshipFact *f : matched_) {
      cand.count = std::max(cand.count, f->count);
      cand.antecedents.push_back(f);
    }
    const std::string relation =
        SpecializeRelation(c.relation, registry_.GenderOf(x));
    auto [pair, oriented] = Canonical(x, relation, y, registry_);
    cand.relation = std::move(oriented);
    cand.rule_id = &rule_->id;
    (*out_)[pair].push_back(std::move(cand));
  }

  const CharacterRegistry &registry_;
  std::unordered_map<std::string, std::vector<const KinshipFact *>> by_group_;
  std::map<std::pair<CharacterId, std::string>, std::vector<const KinshipFact *>>
      by_holder_group_;
  const Rule *rule_ = nullptr;
  std::map<KinshipGraph::Pair, std::vector<Candidate>> *out_ = nullptr;
  std::vector<const CharacterId *> binding_;
  std::vector<const KinshipFact *> matched_;
};

bool IsFamilyRelation(const std::string &relation) {
  const RelationInfo *info = FindRelation(relation);
  return info != nullptr && info->family;
}

std::vector<std::string_view> Words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

}  // namespace

std::string_view ProvenanceName(Provenance p) {
  return p == Provenance::kSeed ? "seed" : "propagated";
}

KinshipFact InvertFact(const KinshipFact &fact,
                       const CharacterRegistry &registry) {
  KinshipFact inv = fact;
  inv.a1 = fact.a2;
  inv.a2 = fact.a1;
  inv.relation = InverseRelation(fact.relation, registry.GenderOf(fact.a2));
  return inv;
}

const KinshipFact *KinshipGraph::Find(const CharacterId &a1,
                                      const CharacterId &a2) const {
  auto it = facts_.find({a1, a2});
  return it == facts_.end() ? nullptr : &it->second;
}

std::vector<KinshipFact> KinshipGraph::Facts() const {
  std::vector<KinshipFact> out;
  out.reserve(facts_.size());
  for (const auto &[pair, fact] : facts_) out.push_back(fact);
  return out;
}

std::vector<KinshipFact> KinshipGraph::UndirectedFacts() const {
  std::vector<KinshipFact> out;
  for (const auto &[pair, fact] : facts_) {
    if (pair.first < pair.second) out.push_back(fact);
  }
  return out;
}

void KinshipGraph::Put(const KinshipFact &fact) {
  if (registry_ == nullptr) {
    throw std::logic_error("KinshipGraph::Put without a registry");
  }
  facts_[{fact.a1, fact.a2}] = fact;
  KinshipFact inv = InvertFact(fact, *registry_);
  facts_[{inv.a1, inv.a2}] = std::move(inv);
}

PropagationResult Propagate(std::span<const SeedFact> seeds,
                            const RuleSet &rules,
                            const CharacterRegistry &registry) {
  PropagationResult result{KinshipGraph(&registry), {}, {}};
  KinshipGraph &graph = result.graph;

  // Seeds: validate, normalise to the holder's gender, orient, sum duplicates.
  std::map<KinshipGraph::Pair, std::map<std::string, int>> seed_counts;
  for (const SeedFact &s : seeds) {
    for (const CharacterId *id : {&s.a1, &s.a2}) {
      if (!registry.Contains(*id)) {
        throw ValidationError("seed references unknown character '" + *id + "'");
      }
    }
    if (s.a1 == s.a2) {
      throw ValidationError("self relation " + Describe(s.a1, s.relation, s.a2));
    }
    if (s.count < 1) {
      throw ValidationError("seed count must be positive for " +
                            Describe(s.a1, s.relation, s.a2));
    }
    const RelationInfo *info = FindRelation(s.relation);
    if (info == nullptr) {
      throw ValidationError("unknown relation '" + s.relation + "'");
    }
    if (!GenderSatisfies(registry.GenderOf(s.a1), info->holder)) {
      result.diagnostics.push_back("seed " + Describe(s.a1, s.relation, s.a2) +
                                   " contradicts the holder's gender; dropped");
      continue;
    }
    const std::string rel =
        SpecializeRelation(s.relation, registry.GenderOf(s.a1));
    auto [pair, oriented] = Canonical(s.a1, rel, s.a2, registry);
    seed_counts[pair][oriented] += s.count;
  }
  for (const auto &[pair, by_relation] : seed_counts) {
    const std::pair<const std::string, int> *best = nullptr;
    for (const auto &entry : by_relation) {
      if (best == nullptr || entry.second > best->second) best = &entry;
    }
    if (by_relation.size() > 1) {
      result.diagnostics.push_back(
          "conflicting seeds for (" + pair.first + ", " + pair.second +
          "); kept " + best->first);
    }
    graph.Put(KinshipFact{pair.first, best->first, pair.second, best->second,
                          Provenance::kSeed, std::nullopt});
  }

  std::map<KinshipGraph::Pair, std::set<std::string>> history;
  constexpr int kRoundLimit = 100000;
  while (true) {
    if (++result.stats.rounds > kRoundLimit) {
      throw std::logic_error("propagation failed to reach a fixed point");
    }
    std::map<KinshipGraph::Pair, std::vector<Candidate>> candidates;
    {
      RoundMatcher matcher(graph, registry);
      for (const Rule &rule : rules.expanded) matcher.Run(rule, candidates);
    }
    KinshipGraph next = graph;
    bool changed = false;
    for (const auto &[pair, cands] : candidates) {
      const KinshipFact *existing = graph.Find(pair.first, pair.second);
      const Candidate &best = Best(cands, existing);
      Derivation derivation{*best.rule_id, {}};
      for (const KinshipFact *f : best.antecedents) {
        derivation.antecedents.push_back(f->triple());
      }
      KinshipFact fact{pair.first,  best.relation,           pair.second,
                       best.count, Provenance::kPropagated, std::move(derivation)};
      if (existing == nullptr) {
        next.Put(fact);
        ++result.stats.added;
        changed = true;
      } else if (existing->relation == best.relation) {
        if (best.count > existing->count) {
          KinshipFact updated = *existing;
          updated.count = best.count;
          next.Put(updated);
          ++result.stats.reinforced;
          changed = true;
        }
      } else if (best.count > existing->count ||
                 (!IsFamilyRelation(existing->relation) &&
                  IsFamilyRelation(best.relation))) {
        auto &seen = history[pair];
        seen.insert(existing->relation);
        if (seen.contains(best.relation)) {
          result.diagnostics.push_back(
              "pair (" + pair.first + ", " + pair.second + ") re-entered " +
              best.relation + " after being replaced");
        }
        fact.count = std::max(fact.count, existing->count);
        next.Put(fact);
        ++result.stats.replaced;
        changed = true;
      } else {
        ++result.stats.cancelled;
      }
    }
    if (!changed) break;
    graph = std::move(next);
  }
  return result;
}

std::vector<SeedFact> InferSpousesFromTitles(const CharacterRegistry &registry) {
  // surname -> (husbands, wives)
  std::map<std::string, std::pair<std::set<CharacterId>, std::set<CharacterId>>>
      by_surname;
  for (const Character &c : registry.characters()) {
    for (const std::string &surface : c.aliases) {
      const auto words = Words(surface);
      if (words.size() < 2) continue;
      const std::string_view title = words.front();
      const std::string surname(words.back());
      if ((title == "Mr." || title == "Mr") && c.gender == Gender::kMale) {
        by_surname[surname].first.insert(c.id);
      } else if ((title == "Mrs." || title == "Mrs") &&
                 c.gender == Gender::kFemale) {
        by_surname[surname].second.insert(c.id);
      }
    }
  }
  std::vector<SeedFact> out;
  for (const auto &[surname, couple] : by_surname) {
    const auto &[husbands, wives] = couple;
    if (husbands.size() != 1 || wives.size() != 1) continue;
    out.push_back({*wives.begin(), "wife_of", *husbands.begin(), 1});
  }
  return out;
}

}  // namespace famrel
