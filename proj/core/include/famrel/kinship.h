#ifndef FAMREL_KINSHIP_H_
#define FAMREL_KINSHIP_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "famrel/corpus.h"
#include "famrel/rules.h"

namespace famrel {

enum class Provenance { kSeed, kPropagated };

std::string_view ProvenanceName(Provenance p);

struct Derivation {
  std::string rule_id;
  std::vector<RelationTriple> antecedents;
};

// A count-weighted kinship edge: a1 holds `relation` towards a2.
struct KinshipFact {
  CharacterId a1;
  std::string relation;
  CharacterId a2;
  int count = 1;
  Provenance provenance = Provenance::kSeed;
  std::optional<Derivation> derivation;

  RelationTriple triple() const { return {a1, relation, a2}; }
};

// (A, r, B) -> (B, inverse(r), A) with the same count; the inverse relation is
// gendered by B's gender.
KinshipFact InvertFact(const KinshipFact &fact, const CharacterRegistry &registry);

// At most one relation per ordered pair; storing (A, r, B) always stores
// (B, inverse(r), A) with the same count.
class KinshipGraph {
 public:
  using Pair = std::pair<CharacterId, CharacterId>;

  KinshipGraph() = default;
  explicit KinshipGraph(const CharacterRegistry *registry) : registry_(registry) {}

  const KinshipFact *Find(const CharacterId &a1, const CharacterId &a2) const;
  std::size_t size() const { return facts_.size(); }
  bool empty() const { return facts_.empty(); }

  // All stored facts, both orientations, ordered by (a1, a2).
  std::vector<KinshipFact> Facts() const;
  // One fact per unordered pair, oriented so that a1 < a2.
  std::vector<KinshipFact> UndirectedFacts() const;
  const std::map<Pair, KinshipFact> &facts() const { return facts_; }

  // Stores `fact` and its inverse, replacing whatever the pair held.
  void Put(const KinshipFact &fact);

  const CharacterRegistry *registry() const { return registry_; }

 private:
  const CharacterRegistry *registry_ = nullptr;
  std::map<Pair, KinshipFact> facts_;
};

struct SeedFact {
  CharacterId a1;
  std::string relation;
  CharacterId a2;
  int count = 1;
};

struct PropagationStats {
  int rounds = 0;
  int added = 0;
  int reinforced = 0;
  int replaced = 0;   // contradictions resolved in favour of the new fact
  int cancelled = 0;  // contradictions resolved in favour of the old fact
};

struct PropagationResult {
  KinshipGraph graph;
  PropagationStats stats;
  std::vector<std::string> diagnostics;
};

// Forward chaining to a fixed point. Each round evaluates every rule against
// a snapshot of the graph; a derived fact carries the maximum of its
// antecedent counts. Candidates for the same pair are ranked by count (ties:
// the pair's current relation, then relation name). The winner is added to an
// empty pair, reinforces an identical relation, or replaces a different
// relation only when its count is strictly larger. A family relation always
// replaces a non-family one such as mr_and_mrs, keeping the larger count.
PropagationResult Propagate(std::span<const SeedFact> seeds,
                            const RuleSet &rules,
                            const CharacterRegistry &registry);

// Pairs "Mr. X" / "Mrs. X" of male and female characters sharing a surname
// (only when each title names exactly one character) and returns
// (Mrs. X, wife_of, Mr. X) with count 1 for each couple.
std::vector<SeedFact> InferSpousesFromTitles(const CharacterRegistry &registry);

}  // namespace famrel

#endif  // FAMREL_KINSHIP_H_
